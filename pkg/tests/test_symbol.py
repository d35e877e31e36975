import numpy as np
import pytest

from eigenbc import fixtures
from eigenbc.errors import AssumptionViolation, ValidationError
from eigenbc.oracles import quadrature_fourier_many, random_degenerate_weight, random_weight
from eigenbc.symbol import (_residues, compute_spectrum, eval_phi, flip, fourier_coefficient,
                            inverse_phi, symbol_spectrum)

SEEDS = range(8)


def _random(seed):
    return random_weight(1 + seed % 4, seed)


def _C(s, k):
    return fourier_coefficient(s, k)


class TestEvalPhi:
    def test_ou_at_one(self, ou):
        assert abs(eval_phi(ou, 1.0)[0, 0] - 0.5) < 1e-15

    def test_zero_rejected(self, ou):
        with pytest.raises(ValidationError):
            eval_phi(ou, 0)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_hermitian_pd_on_circle(self, seed):
        w = _random(seed)
        for t in np.linspace(0, 2 * np.pi, 13):
            M = eval_phi(w, np.exp(1j * t))
            np.testing.assert_allclose(M, M.conj().T, atol=1e-13)
            assert np.linalg.eigvalsh(M)[0] > 0

    @pytest.mark.parametrize("seed", SEEDS)
    def test_reflection(self, seed):
        w = _random(seed)
        z = 0.3 + 1.7j
        np.testing.assert_allclose(eval_phi(w, 1 / np.conj(z)), eval_phi(w, z).conj().T, atol=1e-13)


class TestSpectrum:
    def test_ou(self, ou):
        s = compute_spectrum(ou)
        assert s.k == 0
        np.testing.assert_allclose(s.zeros_inside, [0.5], atol=1e-12)
        np.testing.assert_allclose(s.zeros_outside, [2.0], atol=1e-12)
        np.testing.assert_allclose(s.alpha_inside, [1 / 3], atol=1e-12)
        np.testing.assert_allclose(s.alpha_outside, [-4 / 3], atol=1e-12)

    def test_rd(self, rd):
        s = compute_spectrum(rd)
        assert s.k == 1
        np.testing.assert_allclose(s.zeros_inside, [-0.5], atol=1e-10)
        np.testing.assert_allclose(s.zeros_outside, [-2.0], atol=1e-10)
        np.testing.assert_allclose(s.u_inside[:, 0], [1, 0], atol=1e-12)
        np.testing.assert_allclose(np.abs(s.ker_LR[:, 0]), [0, 1], atol=1e-12)
        np.testing.assert_allclose(np.abs(s.ker_RL[:, 0]), [0, 1], atol=1e-12)

    def test_double_zero_rejected(self):
        with pytest.raises(AssumptionViolation):
            compute_spectrum(fixtures.decoupled_ou())

    def test_zero_on_circle_rejected(self):
        # Phi(z) = 2 - z - 1/z vanishes at z = 1
        with pytest.raises(AssumptionViolation):
            symbol_spectrum([[2.0]], [[-1.0]], [[-1.0]])

    @pytest.mark.parametrize("seed", SEEDS)
    def test_invariants(self, seed):
        w = _random(seed)
        s = compute_spectrum(w)
        assert len(s.zeros_inside) == len(s.zeros_outside) == w.d
        assert np.all(np.abs(np.abs(s.zeros) - 1) > 1e-8)
        np.testing.assert_allclose(s.zeros_inside * np.conj(s.zeros_outside), 1, atol=1e-8)
        for zs, U in ((s.zeros_inside, s.u_inside), (s.zeros_outside, s.u_outside)):
            for i, z in enumerate(zs):
                assert abs(np.linalg.norm(U[:, i]) - 1) < 1e-14
                assert np.linalg.norm(eval_phi(w, z) @ U[:, i]) < 1e-8

    @pytest.mark.parametrize("seed", SEEDS)
    def test_residue_scale_invariance(self, seed):
        w = _random(seed)
        s = compute_spectrum(w)
        rng = np.random.default_rng(seed)
        c_in = rng.standard_normal(w.d) + 1j * rng.standard_normal(w.d)
        c_out = rng.standard_normal(w.d) + 1j * rng.standard_normal(w.d)
        a, P = _residues(s.T, s.LR, s.RL, s.zeros_inside, s.u_inside * c_in, s.u_outside * c_out)
        np.testing.assert_allclose(a[:, None, None] * P, s.alpha_inside[:, None, None] * s.P_inside, atol=1e-12)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_determinant_factorization(self, seed):
        w = _random(seed)
        s = compute_spectrum(w)
        assert abs(s.p_top - np.linalg.det(w.LR)) < 1e-10 * abs(np.linalg.det(w.LR))
        for z in (0.4 + 0.1j, 1.3j, -2.2, 5 - 1j):
            lhs = np.linalg.det(eval_phi(w, z))
            rhs = np.linalg.det(w.LR) * z ** (-w.d) * np.prod(z - s.zeros)
            assert abs(lhs - rhs) <= 1e-8 * abs(lhs)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_product_of_inside_zeros(self, seed):
        w = _random(seed)
        s = compute_spectrum(w)
        lhs = np.prod(s.zeros_inside) / np.linalg.det(w.RL)
        rhs = np.prod(np.conj(s.zeros_inside)) / np.linalg.det(w.LR)
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)

    @pytest.mark.parametrize("d,k,seed", [(2, 1, 0), (3, 1, 1), (3, 2, 2), (4, 2, 3)])
    def test_degenerate_limits(self, d, k, seed):
        w = random_degenerate_weight(d, k, seed)
        s = compute_spectrum(w)
        assert s.k == k and len(s.zeros_inside) == d - k
        # the constants are the limits of Phi^-1 at infinity and at 0
        np.testing.assert_allclose(s.psi_const, np.linalg.inv(eval_phi(w, 1e7)), atol=1e-6)
        np.testing.assert_allclose(s.psi_zero, np.linalg.inv(eval_phi(w, 1e-7)), atol=1e-6)
        np.testing.assert_allclose(s.psi_const, s.psi_zero.conj().T, atol=1e-12)


class TestInversePhi:
    def test_ou_at_i(self, ou):
        assert abs(inverse_phi(compute_spectrum(ou), 1j)[0, 0] - 0.4) < 1e-14

    def test_near_zero_rejected(self, ou):
        with pytest.raises(ValidationError):
            inverse_phi(compute_spectrum(ou), 0.5 + 1e-10)

    @pytest.mark.parametrize("w", [_random(s) for s in SEEDS]
                             + [random_degenerate_weight(3, 1, 5), fixtures.rank_deficient()])
    def test_matches_dense_inverse(self, w):
        s = compute_spectrum(w)
        for r in (0.7, 1.0, 1.4):
            for t in np.linspace(0, 2 * np.pi, 64, endpoint=False):
                z = r * np.exp(1j * t)
                np.testing.assert_allclose(inverse_phi(s, z), np.linalg.inv(eval_phi(w, z)), atol=1e-8)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_hermitian_pd_on_circle(self, seed):
        s = compute_spectrum(_random(seed))
        M = inverse_phi(s, np.exp(0.7j))
        np.testing.assert_allclose(M, M.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(M)[0] > 0


class TestFourierCoefficients:
    def test_ou_values(self, ou):
        s = compute_spectrum(ou)
        for k, v in ((0, 2 / 3), (-1, 1 / 3), (-2, 1 / 6), (3, 1 / 12)):
            assert abs(_C(s, k)[0, 0] - v) < 1e-12

    def test_rd_c0(self, rd):
        np.testing.assert_allclose(_C(compute_spectrum(rd), 0), np.diag([5 / 6, 1 / 2]), atol=1e-12)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_hermitian_pairs(self, seed):
        s = compute_spectrum(_random(seed))
        for k in range(6):
            np.testing.assert_allclose(_C(s, k), _C(s, -k).conj().T, atol=1e-12)

    @pytest.mark.parametrize("w", [fixtures.ou(), fixtures.rank_deficient()]
                             + [_random(s) for s in SEEDS]
                             + [random_degenerate_weight(d, k, 7) for d, k in ((2, 1), (3, 1), (3, 2), (4, 3))])
    def test_matches_quadrature(self, w):
        s = compute_spectrum(w)
        quad = quadrature_fourier_many(w, range(-10, 11))
        for k, q in quad.items():
            np.testing.assert_allclose(_C(s, k), q, atol=1e-8)

    @pytest.mark.parametrize("w", [fixtures.ou(), fixtures.rank_deficient()]
                             + [_random(s) for s in SEEDS] + [random_degenerate_weight(3, 1, 4)])
    def test_recursion(self, w):
        s = compute_spectrum(w)
        T = w.LL + w.RR
        for k in range(-10, 11):
            r = _C(s, k) @ T + _C(s, k + 1) @ w.RL + _C(s, k - 1) @ w.LR - (k == 0) * np.eye(w.d)
            assert np.linalg.norm(r) <= 1e-8

    @pytest.mark.parametrize("seed", SEEDS)
    def test_exponential_decay(self, seed):
        # triangle inequality on the closed form: ||C_k|| <= c rho^|k| with
        # c = sum |alpha_w| ||P_w|| / |w| (each side separately)
        s = compute_spectrum(_random(seed))
        rho = s.rho
        norms = lambda P: np.linalg.norm(P, 2, axis=(1, 2))
        c_in = np.sum(np.abs(s.alpha_inside) * norms(s.P_inside) / np.abs(s.zeros_inside))
        c_out = np.sum(np.abs(s.alpha_outside) * norms(s.P_outside) / np.abs(s.zeros_outside))
        for k in range(1, 31):
            assert np.linalg.norm(_C(s, -k), 2) <= c_in * rho**k * (1 + 1e-8)
            assert np.linalg.norm(_C(s, k), 2) <= c_out * rho**k * (1 + 1e-8)
        # and the rate is sharp
        assert abs(np.linalg.norm(_C(s, -40), 2) ** (1 / 40) / rho - 1) < 0.1

    @pytest.mark.parametrize("w", [fixtures.ou(), fixtures.rank_deficient()])
    def test_decay_fitted_constant_single_zero(self, w):
        # one zero per side: the envelope fitted on |k| <= 3 is exact
        s = compute_spectrum(w)
        rho = s.rho
        c = max(np.linalg.norm(_C(s, k), 2) / rho ** abs(k) for k in range(-3, 4) if k)
        for k in list(range(-30, -3)) + list(range(4, 31)):
            assert np.linalg.norm(_C(s, k), 2) <= c * rho ** abs(k) * (1 + 1e-8)


class TestFlip:
    def test_ou_symmetric(self, ou):
        np.testing.assert_array_equal(flip(ou).A, ou.A)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_involution(self, seed):
        w = _random(seed)
        np.testing.assert_array_equal(flip(flip(w)).A, w.A)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_zeros_conjugate(self, seed):
        w = _random(seed)
        a = np.sort_complex(compute_spectrum(flip(w)).zeros)
        b = np.sort_complex(np.conj(compute_spectrum(w).zeros))
        np.testing.assert_allclose(a, b, atol=1e-10)
