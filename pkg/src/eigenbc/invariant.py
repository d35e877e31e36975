"""Eigen-boundary conditions built from the zeros of the symbol.

The right boundary ``B_R`` is the fixed point of gluing one more edge on the
right, ``B = A_LL - A_LR (A_RR + B)^-1 A_RL``; likewise ``B_L`` on the left.
Both come out in closed form as ``B_R = A_LL + A_LR W_lt1`` and
``B_L = A_RR + A_RL W_gt1_inv`` where ``W_lt1`` has the inside zeros as
eigenvalues (kernel vectors as eigenvectors) and ``W_gt1_inv`` has the
inverses of the outside zeros.  Each glued edge then multiplies the boundary
scale by ``Lambda``, and ``log Lambda`` is the free energy per edge.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import NumericalFailure, ValidationError
from .symbol import SymbolSpectrum, compute_spectrum, eval_phi_circle
from .weights import TWO_PI, BoundaryWeight, GaussianWeight, normalize_pair

log = logging.getLogger(__name__)

COND_WARN = 1e8
LAMBDA_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class InvariantBoundaries:
    """Eigen-boundaries of a weight.

    ``B_L`` and ``B_R`` carry scales normalized so that pairing them gives 1.
    ``Lambda`` includes the weight's own scale ``alpha``.
    """

    W_lt1: np.ndarray
    W_gt1_inv: np.ndarray
    B_L: BoundaryWeight
    B_R: BoundaryWeight
    Lambda: float

    @property
    def free_energy(self) -> float:
        return math.log(self.Lambda)

    @property
    def d(self) -> int:
        return self.W_lt1.shape[0]


def _diagonalized(V: np.ndarray, eigs: np.ndarray, what: str) -> np.ndarray:
    cond = np.linalg.cond(V)
    if cond > COND_WARN:
        log.warning("%s basis is poorly conditioned (cond = %.3g)", what, cond)
    d = V.shape[0]
    D = np.zeros(d, dtype=np.complex128)
    D[: len(eigs)] = eigs
    # V diag(D) V^-1 computed as a solve against V^T
    return np.linalg.solve(V.T, (V * D).T).T


def transfer_matrices(s: SymbolSpectrum) -> tuple[np.ndarray, np.ndarray]:
    """``(W_lt1, W_gt1_inv)``.

    ``W_lt1 u_w = w u_w`` for inside zeros and vanishes on ``ker A_RL``;
    ``W_gt1_inv u_w = u_w / w`` for outside zeros and vanishes on ``ker A_LR``.
    """
    W_lt1 = _diagonalized(np.hstack([s.u_inside, s.ker_RL]), s.zeros_inside, "inside")
    W_gt1_inv = _diagonalized(np.hstack([s.u_outside, s.ker_LR]), 1.0 / s.zeros_outside, "outside")
    return W_lt1, W_gt1_inv


def invariant_boundaries(w: GaussianWeight, s: SymbolSpectrum | None = None) -> InvariantBoundaries:
    """Left and right eigen-boundaries of ``w`` with the eigenvalue ``Lambda``.

    ``Lambda = alpha (2 pi)^d / det(A_RR + B_R)``; the left-hand analogue and,
    when ``A_LR`` is invertible, the product formula
    ``alpha (2 pi)^d (-1)^d prod(w inside) / det A_RL`` are used as checks.
    """
    if s is None:
        s = compute_spectrum(w)
    d = w.d
    W_lt1, W_gt1_inv = transfer_matrices(s)
    B_R = w.LL + w.LR @ W_lt1
    B_L = w.RR + w.RL @ W_gt1_inv
    try:
        bR = BoundaryWeight(1.0, B_R, w.tol)
        bL = BoundaryWeight(1.0, B_L, w.tol)
    except ValidationError as exc:
        raise NumericalFailure(f"eigen-boundary is not Hermitian PD: {exc}") from exc

    scale = w.alpha * TWO_PI**d
    lam_right = scale / np.linalg.det(w.RR + bR.B).real
    lam_left = scale / np.linalg.det(bL.B + w.LL).real
    checks = [("left", lam_left)]
    if s.k == 0:
        lam_prod = scale * (-1) ** d * np.prod(s.zeros_inside) / np.linalg.det(w.RL)
        if abs(lam_prod.imag) > LAMBDA_RTOL * abs(lam_right):
            raise NumericalFailure(f"product formula for Lambda is not real: {lam_prod!r}")
        checks.append(("product", lam_prod.real))
    for name, other in checks:
        if not abs(other - lam_right) <= LAMBDA_RTOL * abs(lam_right):
            raise NumericalFailure(f"Lambda disagrees: {lam_right!r} (right) vs {other!r} ({name})")
    if not lam_right > 0:
        raise NumericalFailure(f"non-positive eigenvalue Lambda = {lam_right!r}")
    bL, bR = normalize_pair(bL, bR)
    return InvariantBoundaries(numkit.frozen(W_lt1), numkit.frozen(W_gt1_inv), bL, bR, float(lam_right))


def verify_invariance(w: GaussianWeight, B, side: str) -> float:
    """Spectral-norm residual of the Schur fixed-point equation for ``B``."""
    B = numkit.as_square(B, "B")
    if side == "right":
        M = w.RR + B
        cols = w.RL
        image = lambda X: w.LL - w.LR @ X
    elif side == "left":
        M = B + w.LL
        cols = w.LR
        image = lambda X: w.RR - w.RL @ X
    else:
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    if np.linalg.cond(M) > 1e14:
        raise NumericalFailure(f"shifted block for the {side} equation is singular")
    return float(np.linalg.norm(B - image(np.linalg.solve(M, cols)), 2))


def free_energy(w: GaussianWeight, s: SymbolSpectrum | None = None, method: str = "eigen",
                P: int | None = None, N: int = numkit.DEFAULT_GRID) -> float:
    """Free energy per edge by one of three routes.

    ``eigen``: ``log Lambda``.  ``integral``: ``log(alpha (2pi)^d)`` minus the
    circle mean of ``log det Phi``.  ``dft``: ``log(Z_per) / P`` for a ring of
    ``P`` edges.
    """
    if method == "eigen":
        return invariant_boundaries(w, s).free_energy
    if method == "integral":
        T = w.LL + w.RR
        mean = numkit.circle_quadrature(
            lambda th: numkit.logdet_pd(eval_phi_circle(T, w.LR, w.RL, th)), N, vectorized=True
        )
        return math.log(w.alpha) + w.d * math.log(TWO_PI) - float(mean.real.ravel()[0])
    if method == "dft":
        from .process import periodic_chain

        if P is None or P < 2:
            raise ValidationError("the dft route needs P >= 2")
        return periodic_chain(w, P).log_Z_per / P
    raise ValidationError(f"unknown free-energy method {method!r}")


def dirichlet_solve(ib: InvariantBoundaries, x0, K: int, side: str = "right") -> np.ndarray:
    """Decaying solution of the interior equation seeded with ``x0``.

    Returns rows ``x_0 .. x_K`` with ``x_j = W_lt1^j x0`` (right) or
    ``x_{-j} = W_gt1_inv^j x0`` (left).
    """
    if K < 1:
        raise ValidationError("K must be at least 1")
    W = {"right": ib.W_lt1, "left": ib.W_gt1_inv}.get(side)
    if W is None:
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    x = np.asarray(x0, dtype=np.complex128).reshape(ib.d)
    out = [x]
    for _ in range(K):
        x = W @ x
        out.append(x)
    return np.array(out)
