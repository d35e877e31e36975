"""Small dense complex linear-algebra helpers shared by the other modules.

Everything here is a pure function over numpy arrays.  The structural
tolerance is relative to the spectral norm of the input.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalFailure, ValidationError

DEFAULT_TOL = 1e-10
DEFAULT_GRID = 4096


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a finite 2-D complex128 array or raise ValidationError."""
    try:
        arr = np.asarray(M, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: entries are not numeric ({exc})") from exc
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ValidationError(f"{name}: expected a 2-D array, got shape {arr.shape}")
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        i, j = bad[0]
        raise ValidationError(f"{name}: non-finite entry at ({i}, {j})")
    return arr


def as_square(M, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name}: expected a square matrix, got shape {arr.shape}")
    return arr


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.conj().T)


def frozen(M: np.ndarray) -> np.ndarray:
    """Read-only copy, so value objects cannot be mutated through their arrays."""
    out = np.array(M, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


def hermitian_defect(M, tol: float = DEFAULT_TOL):
    """Largest violation of M = M* as ``(excess, (i, j))``; excess <= 0 means OK."""
    M = as_square(M)
    norm = np.linalg.norm(M, 2) if M.size else 0.0
    D = np.abs(M - M.conj().T)
    i, j = np.unravel_index(np.argmax(D), D.shape) if D.size else (0, 0)
    return float(np.linalg.norm(M - M.conj().T, 2) - tol * (1.0 + norm)), (int(i), int(j))


def min_eigenvalue(M) -> float:
    """Smallest eigenvalue of the Hermitian part of ``M``."""
    M = as_square(M)
    return float(np.linalg.eigvalsh(hermitian_part(M))[0])


def is_hermitian_pd(M, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``M`` is Hermitian and positive definite up to ``tol``.

    The test is ``||M - M*|| <= tol (1 + ||M||)`` and
    ``lambda_min((M + M*)/2) > tol ||M||`` with spectral norms.
    """
    if tol < 0:
        raise ValidationError("tol must be nonnegative")
    M = as_square(M)
    norm = np.linalg.norm(M, 2)
    if np.linalg.norm(M - M.conj().T, 2) > tol * (1.0 + norm):
        return False
    return min_eigenvalue(M) > tol * norm


def numerical_rank(M, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values above ``tol * sigma_max`` (0 for the zero matrix)."""
    M = as_matrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def null_basis(M, dim: int) -> np.ndarray:
    """Orthonormal basis (as columns) of the ``dim`` least-significant right
    singular directions of ``M``."""
    M = as_matrix(M)
    n = M.shape[1]
    if dim == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    _, _, vh = np.linalg.svd(M)
    return vh[n - dim:].conj().T


def logdet_pd(M):
    """log det of Hermitian PD matrices via Cholesky; accepts a stack (..., d, d)."""
    M = np.asarray(M, dtype=np.complex128)
    H = 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("matrix is not positive definite") from exc
    out = 2.0 * np.sum(np.log(np.abs(np.diagonal(L, axis1=-2, axis2=-1))), axis=-1)
    return float(out) if out.ndim == 0 else out


def circle_quadrature(f: Callable, N: int = DEFAULT_GRID, *, vectorized: bool = False) -> np.ndarray:
    """Trapezoidal mean of ``f`` over ``N`` equispaced angles in [0, 2pi).

    Parameters
    ----------
    f : callable
        Maps an angle to a matrix.  With ``vectorized=True`` it receives the
        whole angle grid (shape ``(N,)``) and must return shape ``(N, ...)``.
    N : int
        Number of nodes, at least 2.

    Returns
    -------
    ndarray
        ``(1/N) sum_j f(2 pi j / N)``.  For smooth periodic integrands this
        converges geometrically in ``N``.
    """
    if N < 2:
        raise ValidationError("circle_quadrature needs N >= 2")
    theta = 2.0 * np.pi * np.arange(N) / N
    if vectorized:
        vals = np.asarray(f(theta), dtype=np.complex128)
        if vals.shape[0] != N:
            raise ValidationError("vectorized integrand must return one value per node")
        total = vals.mean(axis=0)
    else:
        total = None
        for t in theta:
            v = np.asarray(f(t), dtype=np.complex128)
            if not np.all(np.isfinite(v)):
                raise NumericalFailure(f"integrand is not finite at theta={t!r}")
            total = v.copy() if total is None else total + v
        total = total / N
    if not np.all(np.isfinite(total)):
        raise NumericalFailure("integrand produced non-finite values")
    return np.atleast_2d(total) if np.ndim(total) < 2 else total


def block(M: np.ndarray, i: int, j: int, d: int) -> np.ndarray:
    """The (i, j) block of size d x d of a block matrix (zero-based)."""
    return M[i * d:(i + 1) * d, j * d:(j + 1) * d]


@dataclass(frozen=True)
class BlockToeplitz:
    """Block-Toeplitz matrix with optional corner corrections.

    Block (k, l), zero-based with 0 <= k, l <= P, equals ``blocks[l - k]``
    plus ``G_L`` at (0, 0) and ``G_R`` at (P, P).  ``blocks`` maps an offset
    to a d x d matrix; missing offsets are zero.
    """

    P: int
    d: int
    blocks: dict
    G_L: np.ndarray | None = None
    G_R: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.d * (self.P + 1)

    def base(self, offset: int) -> np.ndarray:
        b = self.blocks.get(offset)
        return np.zeros((self.d, self.d), dtype=np.complex128) if b is None else b

    def dense(self) -> np.ndarray:
        d, n = self.d, self.P + 1
        M = np.zeros((d * n, d * n), dtype=np.complex128)
        for offset, b in self.blocks.items():
            for k in range(n):
                l = k + offset
                if 0 <= l < n:
                    M[k * d:(k + 1) * d, l * d:(l + 1) * d] = b
        if self.G_L is not None:
            M[:d, :d] += self.G_L
        if self.G_R is not None:
            M[-d:, -d:] += self.G_R
        return M
