"""Cross-check every spectral result of a weight against the oracles."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracles
from .invariant import free_energy, invariant_boundaries, verify_invariance
from .process import assemble_chain, covariance_toeplitz, periodic_chain
from .symbol import compute_spectrum, fourier_coefficient
from .szego import corrected_toeplitz, symbol_of_weight
from .weights import log_partition_function


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tol)


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b))))


def cross_check(w, tol: float = 1e-8, kmax: int = 10, P: int = 8) -> list[Check]:
    """Run the spectral pipeline on ``w`` and compare each output with an
    independent oracle.  Returns one ``Check`` per comparison."""
    s = compute_spectrum(w)
    ib = invariant_boundaries(w, s)
    checks = []
    for side, b in (("right", ib.B_R), ("left", ib.B_L)):
        rep = oracles.riccati_fixed_point(w, side, tol=min(tol, 1e-12) / 10)
        err = _rel(b.B, rep.value) if rep.ok else math.inf
        checks.append(Check(f"B_{side[0].upper()} vs fixed-point iteration", err, tol))
        checks.append(Check(f"B_{side[0].upper()} invariance residual", verify_invariance(w, b.B, side), tol))

    quad = oracles.quadrature_fourier_many(w, range(-kmax, kmax + 1))
    err = max(_rel(fourier_coefficient(s, k), quad[k]) for k in quad)
    checks.append(Check(f"C_k vs quadrature, |k| <= {kmax}", err, tol))
    C0 = fourier_coefficient(s, 0)
    checks.append(Check("B_L + B_R vs C_0^-1", _rel(ib.B_L.B + ib.B_R.B, np.linalg.inv(C0)), tol))

    f_eig = ib.free_energy
    checks.append(Check("free energy: eigenvalue vs integral",
                        abs(f_eig - free_energy(w, s, "integral")), tol))

    err = 0.0
    for p in range(1, P + 1):
        logZ = log_partition_function(w, ib.B_L, ib.B_R, p)
        err = max(err, abs(logZ - p * math.log(ib.Lambda)) / max(1.0, abs(logZ)))
    checks.append(Check(f"Z_P = Lambda^P, P <= {P}", err, tol))

    ring = periodic_chain(w, P)
    checks.append(Check("ring partition function vs DFT product",
                        abs(ring.log_Z_per - oracles.dft_log_partition(w, P)) / max(1.0, abs(ring.log_Z_per)), tol))

    law = assemble_chain(w, ib.B_L, ib.B_R, P)
    checks.append(Check("covariance vs Toeplitz(C_{l-k})", _rel(law.Sigma, covariance_toeplitz(s, P).dense()), tol))

    if w.full_rank:
        sym = symbol_of_weight(w)
        err = 0.0
        for p in range(1, P + 1):
            ct = corrected_toeplitz(sym, p)
            det = oracles.dense_det(ct.matrix.dense())
            err = max(err, abs(det - ct.predicted_det()) / ct.predicted_det())
        checks.append(Check(f"corrected Toeplitz det vs g^P kappa, P <= {P}", err, tol))
    return checks
