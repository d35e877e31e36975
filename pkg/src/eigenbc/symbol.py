"""The matrix symbol Phi(z) = A_LL + A_RR + A_LR z + A_RL / z and its zeros.

``Phi(e^{i theta})`` is Hermitian PD, so ``Phi^-1`` is smooth on the circle and
its Fourier coefficients ``C_k`` are the covariances of the infinite chain.
They are obtained here in closed form from the zeros of ``det Phi``: each zero
``w`` carries a kernel vector ``u_w`` and a rank-one residue of ``Phi^-1``.

Zeros are the finite nonzero eigenvalues of the companion pencil of
``z Phi(z) = A_LR z^2 + T z + A_RL`` (``T = A_LL + A_RR``).  When ``A_LR`` has
rank ``d - k`` the pencil also has ``k`` eigenvalues at 0 and ``k`` at infinity,
which are discarded, and ``Phi^-1`` keeps a constant term at infinity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import numkit
from .errors import AssumptionViolation, NumericalFailure, ValidationError
from .weights import GaussianWeight

CIRCLE_TOL = 1e-8  # ||w| - 1| at or below this is rejected
CLUSTER_TOL = 1e-8  # relative distance under which two zeros are one multiple zero
PAIR_TOL = 1e-8
KERNEL_TOL = 1e-8
# pencil eigenvalues with |z| below this (or above its inverse) count as 0 (or inf)
ZERO_TOL = 1e-6
MAX_BASIS_COND = 1e12


@dataclass(frozen=True, eq=False)
class SymbolSpectrum:
    """Zeros of ``det Phi`` with their kernel vectors and residues.

    ``u_inside[:, i]`` spans ``ker Phi(zeros_inside[i])`` and likewise outside;
    ``zeros_outside[i] = 1 / conj(zeros_inside[i])``.  ``alpha_*`` and
    ``P_*`` hold the residue scalar and rank-one matrix of each zero, so that
    ``Phi(z)^-1 = sum alpha_w P_w / (z - w) + psi_const``.
    """

    T: np.ndarray
    LR: np.ndarray
    RL: np.ndarray
    k: int
    zeros_inside: np.ndarray
    u_inside: np.ndarray
    zeros_outside: np.ndarray
    u_outside: np.ndarray
    alpha_inside: np.ndarray
    P_inside: np.ndarray  # shape (d - k, d, d)
    alpha_outside: np.ndarray
    P_outside: np.ndarray
    ker_LR: np.ndarray  # columns, shape (d, k)
    ker_RL: np.ndarray
    p_top: complex
    psi_const: np.ndarray  # lim Phi(z)^-1 as z -> infinity
    psi_zero: np.ndarray  # lim Phi(z)^-1 as z -> 0

    @property
    def d(self) -> int:
        return self.T.shape[0]

    @property
    def zeros(self) -> np.ndarray:
        return np.concatenate([self.zeros_inside, self.zeros_outside])

    @property
    def rho(self) -> float:
        """Decay rate of the Fourier coefficients: the largest inside modulus."""
        if self.zeros_inside.size == 0:
            return 0.0
        return float(max(np.max(np.abs(self.zeros_inside)),
                         1.0 / np.min(np.abs(self.zeros_outside))))

    def phi(self, z: complex) -> np.ndarray:
        return self.T + self.LR * z + self.RL / z


def eval_phi(w: GaussianWeight, z: complex) -> np.ndarray:
    """``A_LL + A_RR + A_LR z + A_RL / z``."""
    if z == 0:
        raise ValidationError("the symbol is not defined at z = 0")
    return w.LL + w.RR + w.LR * z + w.RL / z


def eval_phi_circle(T, LR, RL, theta) -> np.ndarray:
    """Symbol on a grid of angles, shape ``(len(theta), d, d)``."""
    z = np.exp(1j * np.asarray(theta, dtype=float))[:, None, None]
    return T[None] + LR[None] * z + RL[None] / z


def _normalize(u: np.ndarray) -> np.ndarray:
    u = u / np.linalg.norm(u)
    mags = np.abs(u)
    j = int(np.argmax(mags > 1e-8 * mags.max()))
    return u * (np.conj(u[j]) / mags[j])


def _polish(T, LR, RL, w: complex, u: np.ndarray, steps: int = 4):
    """Newton on the bordered system [Phi(w) u = 0, c* u = 1]."""
    d = T.shape[0]
    c = u / np.vdot(u, u)
    res0 = np.linalg.norm((T + LR * w + RL / w) @ u)
    w_new, u_new = w, u.copy()
    for _ in range(steps):
        Phi = T + LR * w_new + RL / w_new
        dPhi = LR - RL / w_new**2
        J = np.zeros((d + 1, d + 1), dtype=np.complex128)
        J[:d, :d] = Phi
        J[:d, d] = dPhi @ u_new
        J[d, :d] = c.conj()
        rhs = -np.concatenate([Phi @ u_new, [np.vdot(c, u_new) - 1.0]])
        try:
            step = np.linalg.solve(J, rhs)
        except np.linalg.LinAlgError:
            break
        u_new = u_new + step[:d]
        w_new = w_new + step[d]
        if abs(step[d]) <= 4 * np.finfo(float).eps * abs(w_new):
            break
    res1 = np.linalg.norm((T + LR * w_new + RL / w_new) @ u_new) / np.linalg.norm(u_new)
    if np.isfinite(res1) and res1 <= res0 and abs(w_new - w) <= 1e-6 * abs(w):
        return w_new, u_new
    return w, u


def symbol_spectrum(T, LR, RL, tol: float = numkit.DEFAULT_TOL) -> SymbolSpectrum:
    """Spectrum of ``Phi(z) = T + LR z + RL / z`` with ``RL = LR*`` and
    ``Phi`` Hermitian PD on the unit circle.

    Raises
    ------
    AssumptionViolation
        A zero is repeated, sits on the unit circle, or the number of
        eigenvalues at 0 / infinity does not match the rank deficiency.
    NumericalFailure
        The pencil solve or the pairing of zeros fails.
    """
    T = np.asarray(T, dtype=np.complex128)
    LR = np.asarray(LR, dtype=np.complex128)
    RL = np.asarray(RL, dtype=np.complex128)
    d = T.shape[0]
    k = d - numkit.numerical_rank(LR, tol)
    if d - numkit.numerical_rank(RL, tol) != k:
        raise NumericalFailure("A_LR and A_RL have different numerical ranks")
    m = d - k

    I, Z = np.eye(d), np.zeros((d, d))
    M1 = np.block([[Z, I], [-RL, -T]])
    M2 = np.block([[I, Z], [Z, LR]])
    try:
        (ev_a, ev_b), V = la.eig(M1, M2, homogeneous_eigvals=True)
    except (la.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"companion pencil solve failed: {exc}") from exc
    with np.errstate(divide="ignore", invalid="ignore"):
        mod = np.where(ev_b != 0, np.abs(ev_a) / np.abs(ev_b), np.inf)
    order = np.argsort(mod)
    n_zero = int(np.count_nonzero(mod <= ZERO_TOL))
    n_inf = int(np.count_nonzero(mod >= 1.0 / ZERO_TOL))
    if n_zero != k or n_inf != k:
        raise AssumptionViolation(
            f"expected {k} eigenvalues at 0 and at infinity (rank deficiency of A_LR), "
            f"found {n_zero} and {n_inf}"
        )
    finite = order[k:2 * d - k]
    ws = ev_a[finite] / ev_b[finite]

    for i in range(len(ws)):
        for j in range(i + 1, len(ws)):
            if abs(ws[i] - ws[j]) <= CLUSTER_TOL * max(1.0, abs(ws[i])):
                raise AssumptionViolation(f"repeated zero near {ws[i]:.6g}")

    zs, us = [], []
    for idx, w in zip(finite, ws):
        v = V[:, idx]
        u = v[:d] if abs(w) <= 1 else v[d:] / w
        if np.linalg.norm(u) == 0:
            u = v[d:] if abs(w) <= 1 else v[:d]
        w, u = _polish(T, LR, RL, complex(w), u / np.linalg.norm(u))
        if abs(abs(w) - 1.0) <= CIRCLE_TOL:
            raise AssumptionViolation(f"zero {w:.6g} lies on the unit circle")
        zs.append(w)
        us.append(_normalize(u))
    zs = np.array(zs, dtype=np.complex128)
    us = np.array(us, dtype=np.complex128).T.reshape(d, -1)

    for i, w in enumerate(zs):
        Phi = T + LR * w + RL / w
        s = np.linalg.svd(Phi, compute_uv=False)
        if d > 1 and s[-2] <= CLUSTER_TOL * s[0]:
            raise AssumptionViolation(f"the kernel at zero {w:.6g} has dimension > 1")
        if np.linalg.norm(Phi @ us[:, i]) > KERNEL_TOL * max(1.0, np.linalg.norm(Phi, 2)):
            raise NumericalFailure(f"kernel vector residual too large at zero {w:.6g}")

    inside = np.flatnonzero(np.abs(zs) < 1)
    outside = np.flatnonzero(np.abs(zs) > 1)
    if len(inside) != m or len(outside) != m:
        raise NumericalFailure(f"{len(inside)} zeros inside and {len(outside)} outside, expected {m} each")
    inside = inside[np.lexsort((np.angle(zs[inside]), np.abs(zs[inside])))]
    partner = []
    free = list(outside)
    for i in inside:
        gaps = [abs(zs[i] * np.conj(zs[j]) - 1.0) for j in free]
        j = int(np.argmin(gaps))
        if gaps[j] > PAIR_TOL:
            raise NumericalFailure(f"zero {zs[i]:.6g} has no partner 1/conj(w)")
        partner.append(free.pop(j))
    partner = np.array(partner, dtype=int)

    z_in, u_in = zs[inside], us[:, inside]
    z_out, u_out = zs[partner], us[:, partner]
    alpha_in, P_in = _residues(T, LR, RL, z_in, u_in, u_out)
    alpha_out, P_out = _residues(T, LR, RL, z_out, u_out, u_in)

    ker_LR = numkit.null_basis(LR, k)
    ker_RL = numkit.null_basis(RL, k)
    for name, basis in (("inside", np.hstack([u_in, ker_RL])), ("outside", np.hstack([u_out, ker_LR]))):
        if basis.shape[1] != d or np.linalg.cond(basis) > MAX_BASIS_COND:
            raise NumericalFailure(f"kernel vectors of the {name} zeros do not span C^d")

    # Phi^-1 stays finite at 0 and infinity; its limits live on the kernels
    if k:
        psi_const = ker_LR @ np.linalg.solve(ker_RL.conj().T @ T @ ker_LR, ker_RL.conj().T)
        psi_zero = ker_RL @ np.linalg.solve(ker_LR.conj().T @ T @ ker_RL, ker_LR.conj().T)
    else:
        psi_const = psi_zero = np.zeros((d, d), dtype=np.complex128)
    # det Phi(z) = p_top z^(k-d) prod (z - w); read p_top off at z = 1
    p_top = complex(np.linalg.det(T + LR + RL) / np.prod(1.0 - zs))

    f = numkit.frozen
    return SymbolSpectrum(
        T=f(T), LR=f(LR), RL=f(RL), k=k,
        zeros_inside=f(z_in), u_inside=f(u_in), zeros_outside=f(z_out), u_outside=f(u_out),
        alpha_inside=f(alpha_in), P_inside=f(P_in), alpha_outside=f(alpha_out), P_outside=f(P_out),
        ker_LR=f(ker_LR), ker_RL=f(ker_RL), p_top=p_top, psi_const=f(psi_const),
        psi_zero=f(psi_zero),
    )


def _residues(T, LR, RL, zs, u, u_partner):
    """alpha_w = 1 / <u_{1/conj w}, Phi'(w) u_w> and P_w = u_w u_{1/conj w}*."""
    alphas, Ps = [], []
    for i, w in enumerate(zs):
        dPhi = LR - RL / w**2
        denom = np.vdot(u_partner[:, i], dPhi @ u[:, i])
        if abs(denom) <= 1e-12 * np.linalg.norm(dPhi, 2):
            raise AssumptionViolation(f"zero {w:.6g} is not simple (vanishing residue denominator)")
        alphas.append(1.0 / denom)
        Ps.append(np.outer(u[:, i], u_partner[:, i].conj()))
    d = T.shape[0]
    return np.array(alphas, dtype=np.complex128), np.array(Ps, dtype=np.complex128).reshape(-1, d, d)


def compute_spectrum(w: GaussianWeight) -> SymbolSpectrum:
    """Zeros, kernel vectors and residues of the symbol of ``w``."""
    return symbol_spectrum(w.LL + w.RR, w.LR, w.RL, w.tol)


def inverse_phi(s: SymbolSpectrum, z: complex) -> np.ndarray:
    """``Phi(z)^-1`` from its partial fraction expansion."""
    if z == 0:
        raise ValidationError("the symbol is not defined at z = 0")
    zs = np.concatenate([s.zeros_inside, s.zeros_outside])
    if zs.size and np.min(np.abs(z - zs)) <= 1e-8:
        raise ValidationError(f"z = {z!r} is too close to a zero of the symbol")
    out = np.array(s.psi_const, dtype=np.complex128)
    for zz, aa, PP in ((s.zeros_inside, s.alpha_inside, s.P_inside),
                       (s.zeros_outside, s.alpha_outside, s.P_outside)):
        out = out + np.einsum("i,ijk->jk", aa / (z - zz), PP)
    return out


def fourier_coefficient(s: SymbolSpectrum, k: int) -> np.ndarray:
    """``C_k = (1/2pi) int Phi(e^{i t})^-1 e^{-i k t} dt`` in closed form.

    Outside zeros give the coefficients with ``k > 0``, inside zeros those
    with ``k < 0``.  ``C_0`` sums the inside residues divided by ``w`` plus
    ``Phi^-1(0)``, which is zero unless ``A_LR`` is singular.
    """
    k = int(k)
    if k > 0:
        c = -s.alpha_outside / s.zeros_outside ** (k + 1)
        return np.einsum("i,ijk->jk", c, s.P_outside)
    c = s.zeros_inside ** (-k - 1) * s.alpha_inside
    out = np.einsum("i,ijk->jk", c, s.P_inside)
    return out + s.psi_zero if k == 0 else out


def flip(w: GaussianWeight) -> GaussianWeight:
    """Reverse the edge direction: swap the LL/RR and LR/RL blocks."""
    S = np.block([[w.RR, w.RL], [w.LR, w.LL]])
    return GaussianWeight(w.alpha, S, w.tol)
