import json
import math

import numpy as np
import pytest

from eigenbc.errors import ValidationError
from eigenbc.oracles import dense_det, random_weight
from eigenbc.szego import (TrigPolySymbol, asymptotic_report, block_reduce, corner_corrections,
                           corrected_det, corrected_toeplitz, log_mean_det, plain_toeplitz_det,
                           schur_pivots, symbol_of_weight)
from eigenbc.invariant import invariant_boundaries

from conftest import DATA


@pytest.fixture
def ou_sym():
    return TrigPolySymbol(([[2.5]], [[-1.0]]))


@pytest.fixture
def order2():
    with open(DATA / "order2.json") as fh:
        return TrigPolySymbol(tuple(json.load(fh)["coefficients"]))


def _random_symbol(seed, d=2):
    rng = np.random.default_rng(seed)
    Psi1 = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    H = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Psi0 = 2.5 * np.linalg.norm(Psi1, 2) * np.eye(d) + 0.3 * H @ H.conj().T
    return TrigPolySymbol((Psi0, Psi1))


class TestTrigPolySymbol:
    def test_hermitian_extension(self, ou_sym):
        assert ou_sym.N == 1 and ou_sym.d == 1
        np.testing.assert_array_equal(ou_sym.coefficient(-1), [[-1]])
        np.testing.assert_array_equal(ou_sym.coefficient(2), [[0]])

    def test_evaluate(self, ou_sym):
        theta = np.linspace(0, 2 * np.pi, 7)
        np.testing.assert_allclose(ou_sym.evaluate(theta)[:, 0, 0], 2.5 - 2 * np.cos(theta), atol=1e-14)

    def test_not_positive(self):
        with pytest.raises(ValidationError, match="positive definite"):
            TrigPolySymbol(([[2.0]], [[-1.0]]))

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError, match="shape"):
            TrigPolySymbol((np.eye(2), [[1.0]]))

    def test_of_weight(self, ou):
        sym = symbol_of_weight(ou)
        np.testing.assert_allclose(sym.coefficient(0), [[2.5]])
        np.testing.assert_allclose(sym.coefficient(1), [[-1.0]])


class TestCorrectedToeplitz:
    def test_ou_p1(self, ou_sym):
        G_L, G_R, _ = corner_corrections(ou_sym)
        np.testing.assert_allclose(G_L, [[-0.5]], atol=1e-14)
        np.testing.assert_allclose(G_R, [[-0.5]], atol=1e-14)
        ct = corrected_toeplitz(ou_sym, 1)
        np.testing.assert_allclose(ct.matrix.dense(), [[2, -1], [-1, 2]], atol=1e-14)
        assert abs(dense_det(ct.matrix.dense()) - 3) < 1e-12

    def test_ou_p2(self, ou_sym):
        ct = corrected_toeplitz(ou_sym, 2)
        np.testing.assert_allclose(ct.matrix.dense(), [[2, -1, 0], [-1, 2.5, -1], [0, -1, 2]], atol=1e-14)
        assert abs(dense_det(ct.matrix.dense()) - 6) < 1e-12

    def test_ou_g_kappa(self, ou_sym):
        ct = corrected_toeplitz(ou_sym, 3)
        assert abs(ct.g - 2) < 1e-12
        assert abs(ct.kappa - 1.5) < 1e-12
        assert abs(log_mean_det(ou_sym) - math.log(2)) < 1e-12

    @pytest.mark.parametrize("P", range(1, 25))
    def test_exact_ou(self, ou_sym, P):
        ct = corrected_toeplitz(ou_sym, P)
        assert abs(corrected_det(ou_sym, P) - 2**P * 1.5) <= 1e-10 * 2**P * 1.5
        assert abs(ct.predicted_det() - 2**P * 1.5) <= 1e-12 * 2**P * 1.5

    @pytest.mark.parametrize("seed", range(3))
    @pytest.mark.parametrize("P", [1, 2, 5, 11, 24])
    def test_exact_random_d2(self, seed, P):
        sym = _random_symbol(seed)
        ct = corrected_toeplitz(sym, P)
        sign, logdet = np.linalg.slogdet(ct.matrix.dense())
        assert abs(sign - 1) < 1e-10
        assert abs(logdet - ct.predicted_logdet()) <= 1e-10

    @pytest.mark.parametrize("seed", range(4))
    def test_exact_weight_symbols(self, seed):
        sym = symbol_of_weight(random_weight(1 + seed % 4, 900 + seed))
        for P in (1, 4, 9):
            ct = corrected_toeplitz(sym, P)
            _, logdet = np.linalg.slogdet(ct.matrix.dense())
            assert abs(logdet - ct.predicted_logdet()) <= 1e-10 * max(1, abs(logdet))

    def test_needs_order_one(self, order2):
        with pytest.raises(ValidationError):
            corrected_toeplitz(order2, 3)

    def test_needs_invertible_coupling(self):
        sym = TrigPolySymbol((np.diag([2.0, 2.0]), np.diag([0.8, 0.0])))
        with pytest.raises(ValidationError, match="invertible"):
            corner_corrections(sym)

    @pytest.mark.parametrize("seed", range(3))
    def test_corners_are_eigen_boundaries(self, seed):
        # first and last diagonal blocks equal B_L + A_LL and A_RR + B_R
        w = random_weight(2 + seed % 2, 950 + seed)
        G_L, G_R, _ = corner_corrections(symbol_of_weight(w))
        ib = invariant_boundaries(w)
        Psi0 = w.LL + w.RR
        np.testing.assert_allclose(Psi0 + G_L, ib.B_L.B + w.LL, atol=1e-10)
        np.testing.assert_allclose(Psi0 + G_R, w.RR + ib.B_R.B, atol=1e-10)


class TestSchurPivots:
    @pytest.mark.parametrize("sym", [TrigPolySymbol(([[2.5]], [[-1.0]])), _random_symbol(5), _random_symbol(6, 3)])
    def test_constant(self, sym):
        ct = corrected_toeplitz(sym, 10)
        G_L, G_R, _ = corner_corrections(sym)
        pivots = schur_pivots(ct.matrix)
        top = sym.coefficient(0) + G_L
        for piv in pivots[:-1]:
            assert np.abs(piv - top).max() <= 1e-10
        assert abs(dense_det(pivots[-1]) - ct.kappa) <= 1e-10 * ct.kappa

    def test_ratio_is_g(self, ou_sym):
        dets = [corrected_det(ou_sym, P) for P in range(1, 25)]
        for a, b in zip(dets, dets[1:]):
            assert abs(b / a - 2) <= 1e-12 * 2


class TestBlockReduce:
    def test_example(self, order2):
        b = block_reduce(order2)
        np.testing.assert_array_equal(b.coefficient(0), [[6, 2], [2, 6]])
        np.testing.assert_array_equal(b.coefficient(1), [[1, 0], [2, 1]])

    def test_order_one_rejected(self, ou_sym):
        with pytest.raises(ValidationError, match="N >= 2"):
            block_reduce(ou_sym)

    @pytest.mark.parametrize("P", range(1, 6))
    def test_blocked_plain_is_original_plain(self, order2, P):
        # P+1 blocks of 2 sites = 2P+2 sites = original truncation index 2P+1
        b = block_reduce(order2)
        np.testing.assert_allclose(b.toeplitz(P).dense(), order2.toeplitz(2 * P + 1).dense())

    @pytest.mark.parametrize("P", range(1, 25))
    def test_blocked_exact(self, order2, P):
        b = block_reduce(order2)
        ct = corrected_toeplitz(b, P)
        _, logdet = np.linalg.slogdet(ct.matrix.dense())
        assert abs(math.exp(logdet - ct.predicted_logdet()) - 1) <= 1e-10

    def test_blocked_g(self, order2):
        # log det of the blocked symbol averages to N times the original
        b = block_reduce(order2)
        assert abs(log_mean_det(b) - 2 * log_mean_det(order2)) < 1e-10

    def test_singular_blocked_coupling(self):
        # Psi_2 = 0 makes the blocked coupling singular
        sym = TrigPolySymbol(([[6.0]], [[2.0]], [[0.0]]))
        with pytest.raises(ValidationError, match="not invertible"):
            block_reduce(sym)


class TestPlain:
    def test_ou_p1(self, ou_sym):
        assert abs(plain_toeplitz_det(ou_sym, 1) - 21 / 4) < 1e-12

    @pytest.mark.parametrize("P", range(1, 30))
    def test_closed_form(self, ou_sym, P):
        n = P + 1
        exact = (2 ** (n + 2) - 2.0 ** (-n)) / 3
        assert abs(plain_toeplitz_det(ou_sym, P) - exact) <= 1e-11 * exact

    @pytest.mark.parametrize("P", [1, 4, 10])
    def test_identity(self, P):
        assert plain_toeplitz_det(TrigPolySymbol((np.eye(3),)), P) == pytest.approx(1.0, abs=1e-14)


class TestAsymptoticReport:
    def test_ou_ratio(self, ou_sym):
        rows = asymptotic_report(ou_sym, 30)
        assert [r.P for r in rows] == list(range(1, 31))
        assert abs(rows[19].ratio - 16 / 9) < 1e-6
        for r in rows[19:]:
            assert abs(r.ratio - 16 / 9) < 1e-6

    def test_plain_growth(self, ou_sym):
        rows = asymptotic_report(ou_sym, 25)
        for a, b in zip(rows[19:], rows[20:]):
            assert abs(b.plain / a.plain - 2) < 1e-6
        for a, b in zip(rows, rows[1:]):
            assert abs(b.corrected / a.corrected - 2) <= 1e-12 * 2

    def test_random(self):
        rows = asymptotic_report(_random_symbol(1), 30)
        assert abs(rows[-1].ratio - rows[-2].ratio) < 1e-8

    def test_pmax(self, ou_sym):
        with pytest.raises(ValidationError):
            asymptotic_report(ou_sym, 3)
