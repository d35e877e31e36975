"""Brute-force references for the spectral results.

None of these touch the zeros of the symbol: boundaries come from iterating
the Schur fixed-point map, Fourier coefficients from quadrature of a dense
inverse, determinants from LU, and ring partition functions from a product
over DFT modes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg as la

from . import numkit
from .errors import ValidationError
from .symbol import eval_phi, eval_phi_circle
from .weights import TWO_PI, GaussianWeight, make_gaussian_weight


@dataclass(frozen=True)
class OracleReport:
    name: str
    value: Any
    iterations: int
    residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)


def riccati_fixed_point(w: GaussianWeight, side: str = "right", tol: float = 1e-12,
                        max_iter: int = 10_000) -> OracleReport:
    """Iterate the Schur map until the update drops below ``tol``.

    right: ``B <- A_LL - A_LR (A_RR + B)^-1 A_RL`` from ``B = A_LL``;
    left:  ``B <- A_RR - A_RL (B + A_LL)^-1 A_LR`` from ``B = A_RR``.
    A report whose ``ok`` is False means the iteration did not converge.
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    if side == "right":
        base, shift, X, Y = w.LL, w.RR, w.LR, w.RL
    elif side == "left":
        base, shift, X, Y = w.RR, w.LL, w.RL, w.LR
    else:
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    B = np.array(base)
    step = math.inf
    it = 0
    while it < max_iter:
        it += 1
        B_new = base - X @ np.linalg.solve(shift + B, Y)
        step = float(np.linalg.norm(B_new - B, 2))
        B = B_new
        if step <= tol:
            break
    return OracleReport(f"riccati-{side}", B, it, step, tol)


def quadrature_fourier(w: GaussianWeight, k: int, N: int = numkit.DEFAULT_GRID) -> np.ndarray:
    """``(1/N) sum_j Phi(e^{i t_j})^-1 e^{-i k t_j}`` with dense inverses."""
    if N < 4 * abs(k) + 16:
        raise ValidationError(f"grid of {N} nodes is too coarse for k = {k}")
    T = w.LL + w.RR
    return numkit.circle_quadrature(
        lambda th: np.linalg.inv(eval_phi_circle(T, w.LR, w.RL, th)) * np.exp(-1j * k * th)[:, None, None],
        N, vectorized=True,
    )


def quadrature_fourier_many(w: GaussianWeight, ks, N: int = numkit.DEFAULT_GRID) -> dict:
    """``quadrature_fourier`` for several ``k`` sharing one set of inverses."""
    ks = list(ks)
    if N < 4 * max(abs(k) for k in ks) + 16:
        raise ValidationError(f"grid of {N} nodes is too coarse")
    theta = 2.0 * np.pi * np.arange(N) / N
    inv = np.linalg.inv(eval_phi_circle(w.LL + w.RR, w.LR, w.RL, theta))
    return {k: np.einsum("n,nij->ij", np.exp(-1j * k * theta), inv) / N for k in ks}


def dense_det(M) -> complex:
    """Determinant from a partially pivoted LU factorisation."""
    M = numkit.as_square(M)
    lu, piv = la.lu_factor(M)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return complex((-1) ** swaps * np.prod(np.diag(lu)))


def dft_log_partition(w: GaussianWeight, P: int) -> float:
    """log of ``alpha^P (2 pi)^(dP) prod_m det Phi(omega^m)^-1``."""
    if P < 2:
        raise ValidationError("P must be at least 2")
    logdet = 0.0
    for m in range(P):
        logdet += math.log(dense_det(eval_phi(w, np.exp(2j * np.pi * m / P))).real)
    return P * math.log(w.alpha) + w.d * P * math.log(TWO_PI) - logdet


def dft_partition(w: GaussianWeight, P: int) -> float:
    return math.exp(dft_log_partition(w, P))


def random_weight(d: int, seed: int, alpha: float = 1.0) -> GaussianWeight:
    """``A = G G* + 0.1 ||G G*|| I`` with ``G`` a seeded complex Gaussian 2d x 2d."""
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((2 * d, 2 * d)) + 1j * rng.standard_normal((2 * d, 2 * d))
    H = G @ G.conj().T
    return make_gaussian_weight(alpha, H + 0.1 * np.linalg.norm(H, 2) * np.eye(2 * d))


def random_degenerate_weight(d: int, k: int, seed: int, alpha: float = 1.0) -> GaussianWeight:
    """Random weight whose coupling block ``A_LR`` has rank ``d - k``.

    ``A_LR = X Y*`` with ``X, Y`` of width ``d - k``; the diagonal blocks
    dominate ``||A_LR||`` so that ``A`` is PD.
    """
    if not 0 < k < d:
        raise ValidationError("need 0 < k < d")
    rng = np.random.default_rng(seed)

    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    C = cplx(d, d - k) @ cplx(d, d - k).conj().T
    c = np.linalg.norm(C, 2) + 0.5
    H1, H2 = cplx(d, d), cplx(d, d)
    A = np.block([
        [c * np.eye(d) + 0.3 * H1 @ H1.conj().T, C],
        [C.conj().T, c * np.eye(d) + 0.3 * H2 @ H2.conj().T],
    ])
    return make_gaussian_weight(alpha, A)
