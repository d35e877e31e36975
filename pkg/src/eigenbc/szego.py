"""Block-Toeplitz determinants with exact geometric growth.

For a Hermitian PD trigonometric polynomial ``Psi(theta) = sum_j Psi_j e^{ij theta}``
of order 1, adding ``G_L = Psi_{-1} W_gt1_inv`` to the first diagonal block and
``G_R = Psi_1 W_lt1`` to the last one makes every Schur pivot equal, so the
determinant of the ``P + 1`` block truncation is exactly ``g^P kappa`` with
``g = exp(mean log det Psi)`` and ``kappa = det(G_L + G_R + Psi_0)``.
Higher orders are reduced to order 1 by grouping ``N`` consecutive sites.

Block (k, l) of every truncation here is ``Psi_{l-k}``: ``Psi_1`` sits on the
block superdiagonal, as ``A_LR`` does in a chain precision matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import NumericalFailure, ValidationError
from .invariant import transfer_matrices
from .numkit import BlockToeplitz
from .symbol import symbol_spectrum
from .weights import GaussianWeight

PD_GRID = 512


@dataclass(frozen=True, eq=False)
class TrigPolySymbol:
    """``coeffs[j]`` is ``Psi_j`` for ``j = 0..N``; negative indices follow
    from ``Psi_{-j} = Psi_j*``."""

    coeffs: tuple

    def __post_init__(self):
        cs = [numkit.as_square(c, f"Psi_{j}") for j, c in enumerate(self.coeffs)]
        if not cs:
            raise ValidationError("a trigonometric symbol needs at least Psi_0")
        d = cs[0].shape[0]
        for j, c in enumerate(cs):
            if c.shape != (d, d):
                raise ValidationError(f"Psi_{j} has shape {c.shape}, expected {(d, d)}")
        object.__setattr__(self, "coeffs", tuple(numkit.frozen(c) for c in cs))
        theta = 2 * np.pi * np.arange(PD_GRID) / PD_GRID
        vals = self.evaluate(theta)
        herm = np.linalg.norm(vals - np.conj(np.swapaxes(vals, -1, -2)), axis=(1, 2)).max()
        if herm > 1e-10 * (1 + np.abs(vals).max()):
            raise ValidationError("the symbol is not Hermitian on the unit circle")
        low = np.linalg.eigvalsh(0.5 * (vals + np.conj(np.swapaxes(vals, -1, -2))))[:, 0].min()
        if not low > 1e-10 * np.abs(vals).max():
            raise ValidationError(f"the symbol is not positive definite on the circle (min eigenvalue {low:.6g})")

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @property
    def d(self) -> int:
        return self.coeffs[0].shape[0]

    def coefficient(self, j: int) -> np.ndarray:
        if abs(j) > self.N:
            return np.zeros((self.d, self.d), dtype=np.complex128)
        c = self.coeffs[abs(j)]
        return c if j >= 0 else c.conj().T

    def evaluate(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.zeros((theta.size, self.d, self.d), dtype=np.complex128)
        for j in range(-self.N, self.N + 1):
            out += self.coefficient(j)[None] * np.exp(1j * j * theta)[:, None, None]
        return out

    def toeplitz(self, P: int, G_L=None, G_R=None) -> BlockToeplitz:
        blocks = {j: self.coefficient(j) for j in range(-min(self.N, P), min(self.N, P) + 1)}
        return BlockToeplitz(int(P), self.d, blocks, G_L, G_R)


def symbol_of_weight(w: GaussianWeight) -> TrigPolySymbol:
    """Order-1 symbol ``Psi_0 = A_LL + A_RR``, ``Psi_1 = A_LR``."""
    return TrigPolySymbol((w.LL + w.RR, w.LR))


def log_mean_det(sym: TrigPolySymbol, N: int = numkit.DEFAULT_GRID) -> float:
    """``(1/2pi) int log det Psi``."""
    mean = numkit.circle_quadrature(lambda th: numkit.logdet_pd(sym.evaluate(th)), N, vectorized=True)
    return float(mean.real.ravel()[0])


@dataclass(frozen=True, eq=False)
class CorrectedToeplitz:
    matrix: BlockToeplitz
    g: float
    kappa: float

    def predicted_det(self, P: int | None = None) -> float:
        P = self.matrix.P if P is None else P
        return self.g**P * self.kappa

    def predicted_logdet(self, P: int | None = None) -> float:
        P = self.matrix.P if P is None else P
        return P * math.log(self.g) + math.log(self.kappa)


def corner_corrections(sym: TrigPolySymbol):
    """``(G_L, G_R, spectrum)`` for an order-1 symbol with invertible ``Psi_1``."""
    if sym.N != 1:
        raise ValidationError(f"corner corrections need an order-1 symbol, got order {sym.N}")
    s = symbol_spectrum(sym.coefficient(0), sym.coefficient(1), sym.coefficient(-1))
    if s.k:
        raise ValidationError("Psi_1 must be invertible for corner corrections")
    W_lt1, W_gt1_inv = transfer_matrices(s)
    return sym.coefficient(-1) @ W_gt1_inv, sym.coefficient(1) @ W_lt1, s


def corrected_toeplitz(sym: TrigPolySymbol, P: int) -> CorrectedToeplitz:
    """Corner-corrected truncation with ``P + 1`` blocks, plus ``g`` and ``kappa``.

    The geometric mean ``g`` is taken from quadrature and checked against
    ``det(Psi_0 + G_R)`` and ``det(Psi_0 + G_L)``, which equal it exactly.
    """
    G_L, G_R, _ = corner_corrections(sym)
    Psi0 = sym.coefficient(0)
    g = math.exp(log_mean_det(sym))
    for name, G in (("G_R", G_R), ("G_L", G_L)):
        pivot = np.linalg.det(Psi0 + G)
        if abs(pivot - g) > 1e-8 * g:
            raise NumericalFailure(f"det(Psi_0 + {name}) = {pivot!r} differs from g = {g!r}")
    kappa = np.linalg.det(G_L + G_R + Psi0)
    if abs(kappa.imag) > 1e-8 * abs(kappa) or kappa.real <= 0:
        raise NumericalFailure(f"kappa = {kappa!r} is not a positive real")
    return CorrectedToeplitz(sym.toeplitz(P, G_L, G_R), g, float(kappa.real))


def block_reduce(sym: TrigPolySymbol) -> TrigPolySymbol:
    """Group ``N`` consecutive sites of an order-``N`` symbol into one.

    ``Psi~_0[k, l] = Psi_{l-k}`` and ``Psi~_1[k, l] = Psi_{l-k+N}`` for
    ``0 <= k, l < N``.  The result is an order-1 symbol in dimension ``N d``
    whose plain truncations are those of ``sym``.
    """
    N, d = sym.N, sym.d
    if N < 2:
        raise ValidationError(f"blocking needs order N >= 2, got {N}")
    T0 = np.block([[sym.coefficient(l - k) for l in range(N)] for k in range(N)])
    T1 = np.block([[sym.coefficient(l - k + N) for l in range(N)] for k in range(N)])
    if numkit.numerical_rank(T1) < N * d:
        raise ValidationError("the blocked coupling Psi~_1 is not invertible")
    try:
        return TrigPolySymbol((T0, T1))
    except ValidationError as exc:
        raise ValidationError(f"blocked symbol check failed: {exc}") from exc


def plain_toeplitz_det(sym: TrigPolySymbol, P: int) -> float:
    """Determinant of the uncorrected truncation with ``P + 1`` blocks."""
    sign, logdet = np.linalg.slogdet(sym.toeplitz(P).dense())
    return float((sign * np.exp(logdet)).real)


def corrected_det(sym: TrigPolySymbol, P: int) -> float:
    """Dense determinant of the corner-corrected truncation."""
    sign, logdet = np.linalg.slogdet(corrected_toeplitz(sym, P).matrix.dense())
    return float((sign * np.exp(logdet)).real)


def schur_pivots(M: BlockToeplitz) -> list[np.ndarray]:
    """Diagonal blocks left by block Gaussian elimination from the top."""
    A = M.dense()
    d, n = M.d, M.P + 1
    pivots = []
    piv = A[:d, :d]
    pivots.append(piv)
    for k in range(1, n):
        up = A[(k - 1) * d:k * d, k * d:(k + 1) * d]
        low = A[k * d:(k + 1) * d, (k - 1) * d:k * d]
        piv = A[k * d:(k + 1) * d, k * d:(k + 1) * d] - low @ np.linalg.solve(piv, up)
        pivots.append(piv)
    return pivots


@dataclass(frozen=True)
class ReportRow:
    P: int
    plain: float
    corrected: float
    ratio: float


def asymptotic_report(sym: TrigPolySymbol, Pmax: int) -> list[ReportRow]:
    """Plain vs corner-corrected determinants for ``P = 1..Pmax``.

    Raises NumericalFailure if the ratio's successive differences stop
    shrinking beyond ``P = 8`` (above rounding level).
    """
    if Pmax < 4:
        raise ValidationError("Pmax must be at least 4")
    if sym.N != 1:
        raise ValidationError("asymptotic_report takes an order-1 symbol")
    G_L, G_R, _ = corner_corrections(sym)
    rows = []
    for P in range(1, Pmax + 1):
        _, lp = np.linalg.slogdet(sym.toeplitz(P).dense())
        _, lc = np.linalg.slogdet(sym.toeplitz(P, G_L, G_R).dense())
        rows.append(ReportRow(P, math.exp(lp), math.exp(lc), math.exp(lp - lc)))
    # diffs[i] is the change of the ratio from P = i + 1 to P = i + 2
    diffs = [abs(b.ratio - a.ratio) for a, b in zip(rows, rows[1:])]
    for i in range(8, len(diffs)):
        if diffs[i] > diffs[i - 1] + 1e-12 * abs(rows[i + 1].ratio):
            raise NumericalFailure(f"plain/corrected ratio does not settle near P = {i + 2}")
    return rows
