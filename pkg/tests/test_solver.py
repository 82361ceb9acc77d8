import math

import numpy as np
import pytest

from stiffelm.assembly import LinearSystem, OdeProblem, assemble_fit
from stiffelm.basis import ElmConfig, build_basis, forward
from stiffelm.solver import (evaluate, exact_ade_solution, fit_samples, multiscale_target, predict,
                             solve_ade, solve_ode, sweep_epsilon, train)


def naive_ade(eps, x):
    return (math.exp(x / eps) - 1) / (math.exp(1 / eps) - 1)


class TestExactSolution:
    @pytest.mark.parametrize("eps", [1e-6, 1e-3, 0.01, 1.0, 1e6])
    def test_boundaries(self, eps):
        assert exact_ade_solution(eps, 0.0) == 0.0
        assert exact_ade_solution(eps, 1.0) == 1.0

    def test_midpoint(self):
        assert exact_ade_solution(1.0, 0.5) == pytest.approx((math.exp(0.5) - 1) / (math.e - 1), rel=1e-14)
        assert exact_ade_solution(1.0, 0.5) == pytest.approx(0.377541, abs=1e-6)

    def test_large_eps_is_linear(self):
        xs = np.linspace(0, 1, 1001)
        assert np.abs(exact_ade_solution(1e6, xs) - xs).max() <= 1e-5

    @pytest.mark.parametrize("eps", [0.01, 0.05, 0.3, 2.0])
    def test_matches_naive(self, eps):
        xs = np.linspace(0, 1, 201)
        naive = np.array([naive_ade(eps, x) for x in xs])
        np.testing.assert_allclose(exact_ade_solution(eps, xs), naive, rtol=0, atol=1e-12)

    def test_no_overflow_tiny_eps(self):
        with np.errstate(all="raise"):
            u = exact_ade_solution(1e-6, np.linspace(0, 1, 101))
        assert np.all(np.isfinite(u)) and np.all((u >= 0) & (u <= 1))

    def test_negative_eps(self):
        assert exact_ade_solution(-0.5, 0.3) == pytest.approx(naive_ade(-0.5, 0.3), rel=1e-13)

    def test_zero_eps(self):
        with pytest.raises(ValueError):
            exact_ade_solution(0.0, 0.5)


class TestMultiscaleTarget:
    def test_origin(self):
        assert multiscale_target(0.0) == pytest.approx(0.2, abs=1e-15)

    def test_one(self):
        assert multiscale_target(1.0) == pytest.approx(math.sin(10) + 0.2 * math.cos(70), abs=1e-15)

    def test_odd_part(self):
        x = 0.01
        diff = multiscale_target(x) - multiscale_target(-x)
        t1 = 2 * math.sin(10 * x)
        t2 = 0.2 * (math.cos(20 * x + 50 * x * x) - math.cos(-20 * x + 50 * x * x))
        t3 = 2 * math.exp(-100 * x * x) * math.sin(200 * x)
        assert diff == pytest.approx(t1 + t2 + t3, rel=1e-13)
        assert abs(t3) > abs(t1) + abs(t2)


class TestTrain:
    def test_identity(self):
        t = np.array([1.0, 0.0, 0.0])
        sys_ = LinearSystem(np.eye(3), t, np.array(["data"] * 3), np.ones(3))
        beta, report, secs = train(sys_)
        np.testing.assert_array_equal(beta, t)
        assert report.rank == 3 and report.raw_condition == 1.0 and report.effective_condition == 1.0
        assert report.residual_stats == (0.0, 0.0) and report.sparsity == pytest.approx(6 / 9)
        assert secs >= 0

    def test_no_descent_direction(self, rng):
        basis = build_basis(ElmConfig(nodes=40, filter_width=0.01, seed=4))
        xs = rng.uniform(0, 1, 90)
        sys_ = assemble_fit(basis, xs, np.sin(9 * xs))
        beta, report, _ = train(sys_)
        g = sys_.H.T @ (sys_.H @ beta - sys_.T)
        assert np.linalg.norm(g) <= 1e-8 * np.linalg.norm(sys_.H.T) * np.linalg.norm(sys_.T)
        assert 0 <= report.rank <= 40 and 0 <= report.sparsity <= 1

    @pytest.mark.parametrize("seed", range(40))
    def test_stationarity_tracks_conditioning(self, seed):
        # the gradient at the min-norm solution is a rounding floor of order eps * cond_eff
        r = np.random.default_rng(seed)
        config = ElmConfig(nodes=int(r.integers(2, 80)), encoding=("none", "gaussian")[seed % 2],
                           filter_width=float(10 ** r.uniform(-4, 0)), activation=("tanh", "sine")[seed // 2 % 2],
                           seed=seed)
        xs = r.uniform(0, 1, int(r.integers(1, 150)))
        sys_ = assemble_fit(build_basis(config), xs, r.normal(size=xs.size))
        beta, report, _ = train(sys_)
        ratio = (np.linalg.norm(sys_.H.T @ (sys_.H @ beta - sys_.T))
                 / (np.linalg.norm(sys_.H) * np.linalg.norm(sys_.T)))
        assert ratio <= 20 * np.finfo(float).eps * report.effective_condition
        if report.effective_condition <= 1e6:
            assert ratio <= 1e-8


class TestPredictEvaluate:
    def test_zero_beta(self):
        b = build_basis(ElmConfig(nodes=10))
        assert np.all(predict(b, np.zeros(10), np.linspace(0, 1, 5)) == 0)

    def test_matches_forward(self, rng):
        b = build_basis(ElmConfig(nodes=25, filter_width=0.02, seed=6))
        beta = rng.normal(size=25)
        xs = rng.uniform(0, 1, 40)
        np.testing.assert_allclose(predict(b, beta, xs), [forward(b, beta, x) for x in xs], rtol=1e-13, atol=1e-14)

    def test_interpolating_fit(self):
        xs = np.linspace(0, 1, 8)
        ys = np.cos(3 * xs)
        config = ElmConfig(nodes=30, filter_width=0.05, seed=2)
        res = fit_samples(config, xs, ys)
        np.testing.assert_allclose(predict(build_basis(config), res.beta, xs), ys, atol=1e-8)

    def test_exact_prediction(self):
        xs = np.linspace(0, 1, 11)
        m = evaluate(np.sin(xs), np.sin, xs)
        assert (m.mae, m.mse, m.max_abs_err) == (0.0, 0.0, 0.0)

    def test_offset(self):
        xs = np.linspace(0, 1, 11)
        m = evaluate(np.cos(xs) + 0.1, np.cos, xs)
        assert m.mae == pytest.approx(0.1) and m.mse == pytest.approx(0.01) and m.max_abs_err == pytest.approx(0.1)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(np.zeros(3), np.sin, np.zeros(4))


class TestSolve:
    def test_metrics_only_with_oracle(self):
        config = ElmConfig(nodes=50, filter_width=0.01)
        p = OdeProblem((1.0, 1.0, 0.0), 1.0, ((0.0, 0.0),), ("uniform", 60))
        assert solve_ode(config, p, eval_points=101).metrics is None
        # u + u' = 1, u(0) = 0  ->  u = 1 - exp(-x)
        res = solve_ode(config, p, lambda x: 1 - np.exp(-x), eval_points=101)
        assert res.metrics.mae < 1e-6

    def test_boundary_fidelity(self):
        res = solve_ade(ElmConfig(nodes=200, filter_width=1e-3), 0.1, ("uniform", 200), eval_points=2001)
        assert abs(res.predictions[0]) <= 10 * res.metrics.mae
        assert abs(res.predictions[-1] - 1) <= 10 * res.metrics.mae

    def test_eval_grid_differs_from_collocation(self):
        res = solve_ade(ElmConfig(nodes=20, encoding="none"), 1.0, ("uniform", 20), eval_points=101)
        assert res.xs.size == 101 and res.system.shape == (22, 20)


class TestSweep:
    def test_rows_in_order_with_duplicates(self):
        rows = sweep_epsilon(ElmConfig(nodes=80, filter_width=1e-3), [0.5, 0.1, 0.5], ("uniform", 80),
                             eval_points=501)
        assert [r.epsilon for r in rows] == [0.5, 0.1, 0.5]
        assert rows[0].mae == rows[2].mae and rows[0].rank == rows[2].rank
        assert all(r.ok for r in rows)

    def test_failure_marked_not_raised(self):
        rows = sweep_epsilon(ElmConfig(nodes=30, filter_width=1e-2), [0.5, -1.0, 0.2], ("uniform", 30),
                             eval_points=101)
        assert [r.ok for r in rows] == [True, False, True]
        assert "positive" in rows[1].error and np.isnan(rows[1].mae)
