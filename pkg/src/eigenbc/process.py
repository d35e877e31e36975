"""Finite Gaussian chains: precision and covariance, sampling, conditional
laws and rings.

A chain of ``P`` edges has ``P + 1`` sites in C^d and density proportional to
``exp(-x* Q x / 2)`` with ``Q`` block tridiagonal.  Draws are circularly
symmetric complex Gaussians normalised so that ``E[X X*] = Q^-1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import NumericalFailure, ValidationError
from .invariant import InvariantBoundaries
from .numkit import BlockToeplitz
from .symbol import SymbolSpectrum, eval_phi, fourier_coefficient
from .weights import TWO_PI, BoundaryWeight, GaussianWeight

TOEPLITZ_TOL = 1e-8
# dense F* Q F check only below this size, FFT of the first block row above
DENSE_DFT_LIMIT = 512


def chain_precision(w: GaussianWeight, B_L, B_R, P: int) -> np.ndarray:
    """Block-tridiagonal precision of a chain with ``P`` edges.

    Diagonal blocks: ``B_L + A_LL``, then ``A_RR + A_LL`` inside, then
    ``A_RR + B_R``; ``A_LR`` above the diagonal and ``A_RL`` below.
    """
    if int(P) != P or P < 1:
        raise ValidationError(f"P must be a positive integer, got {P!r}")
    P, d = int(P), w.d
    Q = np.zeros((d * (P + 1), d * (P + 1)), dtype=np.complex128)
    for e in range(P):
        sl = slice(e * d, (e + 2) * d)
        Q[sl, sl] += w.A
    Q[:d, :d] += B_L
    Q[-d:, -d:] += B_R
    return Q


@dataclass(frozen=True, eq=False)
class ChainLaw:
    P: int
    Q: np.ndarray
    Sigma: np.ndarray
    B_L: BoundaryWeight
    B_R: BoundaryWeight

    @property
    def d(self) -> int:
        return self.B_L.d

    def block(self, k: int, l: int) -> np.ndarray:
        return numkit.block(self.Sigma, k, l, self.d)

    @property
    def is_toeplitz(self) -> bool:
        """Whether every covariance block depends only on ``l - k``."""
        scale = max(1.0, np.linalg.norm(self.Sigma, 2))
        n = self.P + 1
        for off in range(-self.P, self.P + 1):
            ref = None
            for k in range(max(0, -off), min(n, n - off)):
                b = self.block(k, k + off)
                if ref is None:
                    ref = b
                elif np.linalg.norm(b - ref) > TOEPLITZ_TOL * scale:
                    return False
        return True


def assemble_chain(w: GaussianWeight, bL: BoundaryWeight, bR: BoundaryWeight, P: int) -> ChainLaw:
    """Precision, covariance and boundaries of a chain with ``P`` edges."""
    Q = chain_precision(w, bL.B, bR.B, P)
    if not numkit.is_hermitian_pd(Q, w.tol):
        raise NumericalFailure("chain precision matrix is not positive definite")
    Sigma = np.linalg.inv(Q)
    Sigma = numkit.hermitian_part(Sigma)
    if np.linalg.norm(Sigma @ Q - np.eye(Q.shape[0]), 2) > 1e-8:
        raise NumericalFailure("covariance is not an accurate inverse of the precision")
    return ChainLaw(int(P), numkit.frozen(Q), numkit.frozen(Sigma), bL, bR)


def covariance_toeplitz(s: SymbolSpectrum, P: int) -> BlockToeplitz:
    """Block-Toeplitz covariance ``(C_{l-k})`` of ``P + 1`` consecutive sites."""
    blocks = {j: fourier_coefficient(s, j) for j in range(-P, P + 1)}
    return BlockToeplitz(int(P), s.d, blocks)


def sample(law: ChainLaw, n: int, seed: int) -> np.ndarray:
    """``n`` independent draws, shape ``(n, d (P+1))``, with ``E[X X*] = Sigma``."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    try:
        L = np.linalg.cholesky(law.Sigma)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("covariance has no Cholesky factor") from exc
    rng = np.random.default_rng(seed)
    m = law.Sigma.shape[0]
    Z = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / math.sqrt(2.0)
    return Z @ L.T


@dataclass(frozen=True)
class ConditionalLaw:
    """Given ``X_l``: ``E[X_{l+k_i} | X_l] = mean_i X_l`` and the conditional
    covariance of ``(X_{l+k1}, X_{l+k2})``."""

    mean_1: np.ndarray
    mean_2: np.ndarray
    covariance: np.ndarray


def conditional_law(ib: InvariantBoundaries, s: SymbolSpectrum, k1: int, k2: int) -> ConditionalLaw:
    """Forward conditional law of the stationary chain, ``0 <= k1 <= k2``."""
    if not 0 <= k1 <= k2:
        raise ValidationError("need 0 <= k1 <= k2")
    mp = np.linalg.matrix_power
    C0 = fourier_coefficient(s, 0)
    cov = (mp(ib.W_gt1_inv, k2 - k1) - mp(ib.W_lt1, k1) @ mp(ib.W_gt1_inv, k2)) @ C0
    return ConditionalLaw(mp(ib.W_lt1, k1), mp(ib.W_lt1, k2), cov)


def mean_coefficient(ib: InvariantBoundaries, k: int, direction: str = "forward") -> np.ndarray:
    """``W_lt1^k`` (forward, ``E[X_{l+k} | X_l]``) or ``W_gt1_inv^k`` (backward)."""
    W = {"forward": ib.W_lt1, "backward": ib.W_gt1_inv}.get(direction)
    if W is None:
        raise ValidationError(f"direction must be 'forward' or 'backward', got {direction!r}")
    return np.linalg.matrix_power(W, k)


@dataclass(frozen=True, eq=False)
class PeriodicChainLaw:
    P: int
    Q_per: np.ndarray
    modes: np.ndarray  # shape (P, d, d), Phi at the P-th roots of unity
    log_Z_per: float

    @property
    def Z_per(self) -> float:
        return math.exp(self.log_Z_per)


def periodic_precision(w: GaussianWeight, P: int) -> np.ndarray:
    """Block-circulant precision of a ring of ``P`` edges and ``P`` sites."""
    d = w.d
    Q = np.zeros((d * P, d * P), dtype=np.complex128)
    for e in range(P):
        idx = np.r_[e * d:(e + 1) * d, ((e + 1) % P) * d:((e + 1) % P + 1) * d]
        Q[np.ix_(idx, idx)] += w.A
    return Q


def periodic_chain(w: GaussianWeight, P: int) -> PeriodicChainLaw:
    """Ring of ``P`` edges, diagonalised by the discrete Fourier transform.

    ``Z_per = alpha^P (2 pi)^(dP) prod_m det Phi(omega^m)^-1`` with
    ``omega = exp(2 pi i / P)``.
    """
    if int(P) != P or P < 2:
        raise ValidationError(f"a ring needs P >= 2, got {P!r}")
    P, d = int(P), w.d
    Q = periodic_precision(w, P)
    omega = np.exp(2j * np.pi * np.arange(P) / P)
    modes = np.array([eval_phi(w, z) for z in omega])

    scale = max(1.0, np.linalg.norm(w.A, 2))
    if d * P <= DENSE_DFT_LIMIT:
        F = np.kron(np.exp(2j * np.pi * np.outer(np.arange(P), np.arange(P)) / P) / math.sqrt(P), np.eye(d))
        D = F.conj().T @ Q @ F
        expected = np.zeros_like(D)
        for m in range(P):
            expected[m * d:(m + 1) * d, m * d:(m + 1) * d] = modes[m]
        err = np.linalg.norm(D - expected, 2)
    else:
        # block-circulant: mode m equals sum_j Q_{0,j} omega^(j m)
        row = Q[:d].reshape(d, P, d).transpose(1, 0, 2)
        err = np.max(np.abs(np.fft.ifft(row, axis=0) * P - modes))
    if err > 1e-8 * scale:
        raise NumericalFailure(f"DFT does not block-diagonalise the ring precision (error {err:.3g})")

    logdets = numkit.logdet_pd(modes)
    log_Z = P * math.log(w.alpha) + d * P * math.log(TWO_PI) - float(np.sum(logdets))
    return PeriodicChainLaw(P, numkit.frozen(Q), numkit.frozen(modes), log_Z)
