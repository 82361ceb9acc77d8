import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from stiffelm.linalg import (DecompositionError, EPS, SingularSpectrum, as_matrix, condition_number,
                             gram_psd_check, least_squares_solve, log10_det_proxy, numerical_rank,
                             pseudoinverse, svd)


def make_spectrum(values, tol=1e-12):
    return SingularSpectrum(np.array(values, dtype=float), tol)


class TestMatrixValidation:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            as_matrix([[1.0, np.nan]])

    def test_rejects_inf(self):
        with pytest.raises(ValueError):
            svd([[np.inf]])

    def test_rejects_empty_and_1d(self):
        with pytest.raises(ValueError):
            as_matrix(np.zeros((0, 3)))
        with pytest.raises(ValueError):
            as_matrix([1.0, 2.0])

    def test_spectrum_invariants(self):
        with pytest.raises(ValueError):
            make_spectrum([1.0, 2.0])
        with pytest.raises(ValueError):
            make_spectrum([1.0, -1.0])
        with pytest.raises(ValueError):
            make_spectrum([1.0], tol=0.0)


class TestSvd:
    def test_identity(self):
        _, s, _ = svd(np.eye(2))
        np.testing.assert_allclose(s.values, [1, 1])

    def test_diagonal(self):
        _, s, _ = svd(np.diag([3.0, 0.0]))
        np.testing.assert_allclose(s.values, [3, 0], atol=1e-15)

    def test_rank_one(self):
        # m^T m = [[5,10],[10,20]] has eigenvalues 25 and 0 -> singular values 5, 0
        _, s, _ = svd([[1.0, 2.0], [2.0, 4.0]])
        np.testing.assert_allclose(s.values, [5, 0], atol=1e-14)
        assert numerical_rank(s) == 1

    @pytest.mark.parametrize("shape", [(7, 3), (3, 7), (5, 5), (1, 4)])
    def test_reconstruction(self, rng, shape):
        m = rng.normal(size=shape) * 10
        u, s, v = svd(m)
        err = np.abs(u @ np.diag(s.values) @ v.T - m).max()
        assert err <= 1e-10 * (s.values[0] + 1)
        assert np.all(np.diff(s.values) <= 0)

    def test_convergence_failure_is_explicit(self, monkeypatch):
        def boom(*a, **k):
            raise np.linalg.LinAlgError("SVD did not converge")
        monkeypatch.setattr(np.linalg, "svd", boom)
        with pytest.raises(DecompositionError):
            svd(np.eye(3))


class TestPseudoinverse:
    def test_identity(self):
        np.testing.assert_allclose(pseudoinverse(np.eye(3)), np.eye(3))

    def test_zero_singular_value_maps_to_zero(self):
        np.testing.assert_allclose(pseudoinverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))

    def test_left_inverse_of_full_rank(self, rng):
        a = rng.normal(size=(5, 3))
        np.testing.assert_allclose(pseudoinverse(a) @ a, np.eye(3), atol=1e-8)

    @pytest.mark.parametrize("shape", [(20, 10), (10, 20)])
    def test_penrose_conditions(self, rng, shape):
        a = rng.normal(size=shape)
        p = pseudoinverse(a)
        na, np_ = np.linalg.norm(a), np.linalg.norm(p)
        assert np.linalg.norm(a @ p @ a - a) <= 1e-8 * na
        assert np.linalg.norm(p @ a @ p - p) <= 1e-8 * np_
        assert np.abs(a @ p - (a @ p).T).max() <= 1e-8
        assert np.abs(p @ a - (p @ a).T).max() <= 1e-8

    def test_bad_factor(self):
        with pytest.raises(ValueError):
            pseudoinverse(np.eye(2), rank_tol_factor=0.0)


class TestLeastSquares:
    def test_identity(self):
        np.testing.assert_allclose(least_squares_solve(np.eye(2), [3.0, 4.0]), [3, 4])

    def test_mean_of_column_of_ones(self):
        # 1-D calculus: d/db [(b-0)^2 + (b-2)^2] = 0 at b = 1
        beta = least_squares_solve([[1.0], [1.0]], [0.0, 2.0])
        np.testing.assert_allclose(beta, [1.0], rtol=1e-14)

    def test_consistent_overdetermined(self, rng):
        h = rng.normal(size=(30, 6))
        t = h @ rng.normal(size=6)
        beta = least_squares_solve(h, t)
        assert np.linalg.norm(h @ beta - t) <= 1e-10 * np.linalg.norm(t)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            least_squares_solve(np.eye(3), [1.0, 2.0])

    def test_residual_orthogonal_to_range(self, rng):
        h = rng.normal(size=(15, 4))
        t = rng.normal(size=15)
        r = h @ least_squares_solve(h, t) - t
        assert np.abs(h.T @ r).max() <= 1e-8 * np.linalg.norm(t)

    def test_minimum_norm_on_rank_deficient(self):
        # both columns equal: minimisers are b1 + b2 = 1; min-norm picks (1/2, 1/2)
        beta = least_squares_solve([[1.0, 1.0], [1.0, 1.0]], [1.0, 1.0])
        np.testing.assert_allclose(beta, [0.5, 0.5], rtol=1e-12)

    @pytest.mark.parametrize("shape", [(10, 5), (8, 3), (6, 6)])
    def test_matches_normal_equations(self, rng, shape):
        h = rng.normal(size=shape) + 2 * np.eye(*shape)
        t = rng.normal(size=shape[0])
        expected = np.linalg.solve(h.T @ h, h.T @ t)
        np.testing.assert_allclose(least_squares_solve(h, t), expected, rtol=1e-6)

    def test_deterministic(self, rng):
        h = rng.normal(size=(40, 12))
        t = rng.normal(size=40)
        assert least_squares_solve(h, t).tobytes() == least_squares_solve(h, t).tobytes()


class TestRankAndCondition:
    def test_rank_simple(self):
        assert numerical_rank(make_spectrum([1, 1])) == 2
        assert numerical_rank(make_spectrum([5, 0])) == 1

    def test_rank_against_tolerance_formula(self):
        tol = 3 * EPS * 1.0
        assert numerical_rank(make_spectrum([1, 1e-20, 0], tol)) == 1
        _, s, _ = svd(np.diag([1.0, 1e-20, 0.0]))
        assert s.rank_tolerance == pytest.approx(tol)
        assert numerical_rank(s) == 1

    def test_condition_identity(self):
        assert condition_number(make_spectrum([1, 1])) == (1.0, 1.0)

    def test_condition_singular(self):
        raw, eff = condition_number(make_spectrum([2, 0]))
        assert raw == np.inf and eff == 1.0

    def test_condition_ratio(self):
        raw, eff = condition_number(make_spectrum([1e4, 1e-17], tol=1e-20))
        assert raw == pytest.approx(1e21) and eff == pytest.approx(1e21)
        raw, eff = condition_number(make_spectrum([1e4, 1e-17], tol=1e-12))
        assert raw == pytest.approx(1e21) and eff == 1.0

    def test_condition_empty(self):
        with pytest.raises(ValueError):
            condition_number(make_spectrum([]))

    def test_log_det_proxy(self):
        assert log10_det_proxy(make_spectrum([100.0, 10.0, 0.0])) == pytest.approx(3.0)


class TestGram:
    def test_identity(self):
        assert gram_psd_check(np.eye(2)) == (1.0, True)

    def test_rank_one(self):
        lam, ok = gram_psd_check([[1.0, 2.0], [2.0, 4.0]])
        assert lam == pytest.approx(0.0, abs=1e-20) and ok

    def test_tall_matrix_has_zero_eigenvalue(self, rng):
        lam, ok = gram_psd_check(rng.normal(size=(6, 3)))
        assert lam == 0.0 and ok

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8)),
                  elements=st.floats(-1e3, 1e3, allow_nan=False)))
    def test_always_psd(self, a):
        lam, ok = gram_psd_check(a)
        assert ok and lam >= 0


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 9), st.integers(1, 9)),
              elements=st.floats(-100, 100, allow_nan=False)))
def test_penrose_property(a):
    p = pseudoinverse(a)
    scale = max(np.linalg.norm(a), 1.0)
    assert np.linalg.norm(a @ p @ a - a) <= 1e-8 * scale
