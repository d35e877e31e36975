"""Gaussian weights on edges and boundary weights on endpoints.

A Gaussian weight is the kernel ``alpha * exp(-x* A x / 2)`` with
``x = (x_left, x_right)`` in C^d x C^d.  A boundary weight is
``beta * exp(-x* B x / 2)`` on a single site.  Integrating out a shared site
turns two weights into one (``glue``) or a weight and a boundary into a new
boundary (``act_left`` / ``act_right``); the matrices transform by Schur
complements and the scales pick up ``(2 pi)^d / det``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import numkit
from .errors import NumericalFailure, ValidationError

TWO_PI = 2.0 * math.pi
# glue/act refuse to invert a shifted block worse conditioned than this
MAX_COND = 1e12


def _check_hermitian_pd(M: np.ndarray, name: str, tol: float) -> None:
    excess, (i, j) = numkit.hermitian_defect(M, tol)
    if excess > 0:
        raise ValidationError(
            f"{name} is not Hermitian: entry ({i}, {j}) = {M[i, j]!r} "
            f"but entry ({j}, {i}) = {M[j, i]!r}"
        )
    lam = numkit.min_eigenvalue(M)
    if not lam > tol * np.linalg.norm(M, 2):
        raise ValidationError(f"{name} is not positive definite (smallest eigenvalue {lam:.6g})")


def _check_scale(x: float, name: str) -> float:
    x = float(x)
    if not (math.isfinite(x) and x > 0):
        raise ValidationError(f"{name} must be a finite positive real, got {x!r}")
    return x


@dataclass(frozen=True, eq=False)
class GaussianWeight:
    """Edge weight ``alpha exp(-x* A x / 2)``; validated on construction.

    ``A`` is stored as its exact Hermitian part, read-only.
    """

    alpha: float
    A: np.ndarray
    tol: float = field(default=numkit.DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        A = numkit.as_square(self.A, "A")
        if A.shape[0] % 2 or A.shape[0] == 0:
            raise ValidationError(f"A must be 2d x 2d, got shape {A.shape}")
        _check_hermitian_pd(A, "A", self.tol)
        object.__setattr__(self, "alpha", _check_scale(self.alpha, "alpha"))
        object.__setattr__(self, "A", numkit.frozen(numkit.hermitian_part(A)))

    @property
    def d(self) -> int:
        return self.A.shape[0] // 2

    @property
    def LL(self) -> np.ndarray:
        return self.A[: self.d, : self.d]

    @property
    def LR(self) -> np.ndarray:
        return self.A[: self.d, self.d:]

    @property
    def RL(self) -> np.ndarray:
        return self.A[self.d:, : self.d]

    @property
    def RR(self) -> np.ndarray:
        return self.A[self.d:, self.d:]

    @cached_property
    def k(self) -> int:
        """Rank deficiency of the coupling block A_LR."""
        return self.d - numkit.numerical_rank(self.LR, self.tol)

    @property
    def full_rank(self) -> bool:
        return self.k == 0


@dataclass(frozen=True, eq=False)
class BoundaryWeight:
    """Endpoint weight ``beta exp(-x* B x / 2)``."""

    beta: float
    B: np.ndarray
    tol: float = field(default=numkit.DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        B = numkit.as_square(self.B, "B")
        _check_hermitian_pd(B, "B", self.tol)
        object.__setattr__(self, "beta", _check_scale(self.beta, "beta"))
        object.__setattr__(self, "B", numkit.frozen(numkit.hermitian_part(B)))

    @property
    def d(self) -> int:
        return self.B.shape[0]


def make_gaussian_weight(alpha: float, A, tol: float = numkit.DEFAULT_TOL) -> GaussianWeight:
    """Validated Gaussian weight with scale ``alpha`` and coupling ``A``."""
    return GaussianWeight(alpha, A, tol)


def make_boundary_weight(beta: float, B, tol: float = numkit.DEFAULT_TOL) -> BoundaryWeight:
    return BoundaryWeight(beta, B, tol)


def _same_d(a, b) -> int:
    if a.d != b.d:
        raise ValidationError(f"dimension mismatch: {a.d} vs {b.d}")
    return a.d


def _inv_and_det(M: np.ndarray, what: str):
    if np.linalg.cond(M) > MAX_COND:
        raise NumericalFailure(f"{what} is too ill-conditioned to invert")
    sign, logdet = np.linalg.slogdet(M)
    return np.linalg.inv(M), (sign * np.exp(logdet)).real


def glue(w1: GaussianWeight, w2: GaussianWeight) -> GaussianWeight:
    """Integrate out the shared site of two consecutive edges.

    With ``K = (A_RR + A~_LL)^-1`` the result has scale
    ``(2 pi)^d alpha alpha~ det K`` and matrix::

        [[A_LL - A_LR K A_RL,    -A_LR K A~_LR        ],
         [-A~_RL K A_RL,          A~_RR - A~_RL K A~_LR]]
    """
    d = _same_d(w1, w2)
    K, detM = _inv_and_det(w1.RR + w2.LL, "A_RR + A~_LL")
    S = np.block([
        [w1.LL - w1.LR @ K @ w1.RL, -w1.LR @ K @ w2.LR],
        [-w2.RL @ K @ w1.RL, w2.RR - w2.RL @ K @ w2.LR],
    ])
    return GaussianWeight(TWO_PI**d * w1.alpha * w2.alpha / detM, S, w1.tol)


def act_left(b: BoundaryWeight, w: GaussianWeight) -> BoundaryWeight:
    """Boundary on the left of an edge, pushed to the edge's right site."""
    d = _same_d(b, w)
    K, detM = _inv_and_det(b.B + w.LL, "B + A_LL")
    return BoundaryWeight(TWO_PI**d * w.alpha * b.beta / detM, w.RR - w.RL @ K @ w.LR, b.tol)


def act_right(w: GaussianWeight, b: BoundaryWeight) -> BoundaryWeight:
    """Boundary on the right of an edge, pulled back to the edge's left site."""
    d = _same_d(b, w)
    K, detM = _inv_and_det(w.RR + b.B, "A_RR + B")
    return BoundaryWeight(TWO_PI**d * w.alpha * b.beta / detM, w.LL - w.LR @ K @ w.RL, b.tol)


def pair(bL: BoundaryWeight, bR: BoundaryWeight) -> float:
    """Integral of the product of two boundary weights on one site."""
    d = _same_d(bL, bR)
    return TWO_PI**d * bL.beta * bR.beta / np.linalg.det(bL.B + bR.B).real


def normalize_pair(bL: BoundaryWeight, bR: BoundaryWeight) -> tuple[BoundaryWeight, BoundaryWeight]:
    """Rescale both boundaries equally so that ``pair`` returns 1."""
    d = _same_d(bL, bR)
    beta = math.sqrt(np.linalg.det(bL.B + bR.B).real / TWO_PI**d)
    return BoundaryWeight(beta, bL.B, bL.tol), BoundaryWeight(beta, bR.B, bR.tol)


def schur_power(w: GaussianWeight, n: int) -> GaussianWeight:
    """``n`` copies of ``w`` glued in a row (``n = 1`` returns ``w``)."""
    if int(n) != n or n < 1:
        raise ValidationError(f"schur_power needs a positive integer n, got {n!r}")
    out = w
    for _ in range(int(n) - 1):
        out = glue(out, w)
    return out


def log_partition_function(w: GaussianWeight, bL: BoundaryWeight, bR: BoundaryWeight,
                           P: int, rtol: float = 1e-8) -> float:
    """log Z_P for a chain of ``P`` edges closed by ``bL`` and ``bR``.

    Two routes are taken and compared: pushing ``bL`` through ``P`` edges then
    pairing with ``bR``, and the dense Gaussian integral
    ``(2 pi)^(d(P+1)) beta_L beta_R alpha^P / det Q``.
    """
    from .process import chain_precision

    if int(P) != P or P < 1:
        raise ValidationError(f"P must be a positive integer, got {P!r}")
    P = int(P)
    d = _same_d(w, bL)
    _same_d(w, bR)

    log_scale = 0.0
    b = bL
    for _ in range(P):
        b = act_left(b, w)
        log_scale += math.log(b.beta)
        b = BoundaryWeight(1.0, b.B, b.tol)
    algebraic = log_scale + math.log(pair(b, bR))

    sign, logdet = np.linalg.slogdet(chain_precision(w, bL.B, bR.B, P))
    if not abs(sign - 1) < 1e-6:
        raise NumericalFailure("chain precision matrix has a non-positive determinant")
    dense = (d * (P + 1) * math.log(TWO_PI) + math.log(bL.beta) + math.log(bR.beta)
             + P * math.log(w.alpha) - logdet)

    if abs(algebraic - dense) > rtol:
        raise NumericalFailure(
            f"partition function routes disagree: log Z = {algebraic!r} (boundary action) "
            f"vs {dense!r} (dense determinant)"
        )
    return dense


def partition_function(w: GaussianWeight, bL: BoundaryWeight, bR: BoundaryWeight,
                       P: int, rtol: float = 1e-8) -> float:
    """Z_P, checked by two independent routes (see ``log_partition_function``)."""
    return math.exp(log_partition_function(w, bL, bR, P, rtol))
