import numpy as np
import pytest

from echelonopt.model import repair_policy_array
from echelonopt.optim import (
    Budget,
    BudgetExhaustedError,
    CubicRbfSurrogate,
    GaussianProcess,
    SearchSpace,
    SingularInterpolationError,
    gp_optimize,
    minimize,
    nelder_mead_restart,
    rbf_optimize,
)


def quadratic(x):
    return float(np.sum((x - 3.0) ** 2))


def vee(x):
    return float(np.abs(x[0] - 5.0))


SPACE_2D = SearchSpace(np.zeros(2), np.full(2, 10.0))


class TestSearchSpace:
    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            SearchSpace([0.0, 5.0], [10.0, 5.0])

    def test_latin_hypercube_strata(self):
        space = SearchSpace(np.array([0.0, -2.0]), np.array([8.0, 2.0]))
        pts = space.latin_hypercube(np.random.default_rng(3), 16)
        assert pts.shape == (16, 2)
        assert np.all(pts >= space.lower) and np.all(pts <= space.upper)
        for axis in range(2):
            u = (pts[:, axis] - space.lower[axis]) / space.span[axis]
            strata = np.floor(u * 16).astype(int)
            assert sorted(strata) == list(range(16))


class TestBudget:
    @pytest.mark.parametrize("kwargs", [
        {"max_evaluations": 0},
        {"max_wall_time_s": 0.0},
        {"cycles": 0},
        {"iterations_per_cycle": -3},
    ])
    def test_nonpositive_rejected(self, kwargs):
        with pytest.raises(ValueError):
            Budget(**kwargs)


STRATEGY_CASES = [
    ("nelder-mead", {}, Budget(max_evaluations=60, cycles=3,
                               iterations_per_cycle=15)),
    ("gp", {"kappa": 2.0, "n_random_starts": 6},
     Budget(max_evaluations=40, cycles=2, iterations_per_cycle=12)),
    ("rbf", {}, Budget(max_evaluations=40)),
]


class TestMinimizeContract:
    @pytest.mark.parametrize("strategy,kwargs,budget", STRATEGY_CASES)
    def test_trace_nonincreasing_and_consistent(self, strategy, kwargs,
                                                budget):
        run = minimize(quadratic, SPACE_2D, budget, strategy=strategy,
                       seed=5, **kwargs)
        trace = run.best_so_far_trace
        assert np.all(np.diff(trace) <= 0)
        assert run.best_value == trace[-1]
        assert run.evaluations_used == len(trace) <= budget.max_evaluations
        assert np.all(run.best_point >= SPACE_2D.lower)
        assert np.all(run.best_point <= SPACE_2D.upper)

    @pytest.mark.parametrize("strategy,kwargs,budget", STRATEGY_CASES)
    def test_same_seed_identical_runs(self, strategy, kwargs, budget):
        a = minimize(quadratic, SPACE_2D, budget, strategy=strategy,
                     seed=11, **kwargs)
        b = minimize(quadratic, SPACE_2D, budget, strategy=strategy,
                     seed=11, **kwargs)
        assert np.array_equal(a.best_so_far_trace, b.best_so_far_trace)
        assert np.array_equal(a.evaluated_points, b.evaluated_points)

    @pytest.mark.parametrize("strategy,kwargs,budget", STRATEGY_CASES)
    def test_single_evaluation_budget(self, strategy, kwargs, budget):
        one = Budget(max_evaluations=1, cycles=budget.cycles,
                     iterations_per_cycle=budget.iterations_per_cycle)
        run = minimize(quadratic, SPACE_2D, one, strategy=strategy,
                       seed=2, **kwargs)
        assert run.evaluations_used == 1
        assert run.best_value == quadratic(run.best_point)

    def test_degenerate_wall_time_raises(self):
        budget = Budget(max_evaluations=10, max_wall_time_s=1e-12)
        with pytest.raises(BudgetExhaustedError):
            minimize(quadratic, SPACE_2D, budget, strategy="rbf", seed=0)

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ValueError):
            minimize(quadratic, SPACE_2D, Budget(), strategy="annealing")

    def test_log_sink_sees_every_evaluation(self):
        records = []
        budget = Budget(max_evaluations=25)
        run = minimize(quadratic, SPACE_2D, budget, strategy="rbf", seed=4,
                       log=lambda i, x, z, best: records.append((i, z, best)))
        assert len(records) == run.evaluations_used
        assert [r[0] for r in records] == list(range(1, len(records) + 1))
        assert records[-1][2] == run.best_value

    def test_repair_hook_applied_to_reported_points(self):
        lo, hi = np.zeros(2), np.array([50.0, 80.0])
        space = SearchSpace(lo, hi)
        run = minimize(lambda x: float(np.sum(x)), space,
                       Budget(max_evaluations=30), strategy="rbf", seed=9,
                       repair=lambda x: repair_policy_array(x, lo, hi))
        for point in run.evaluated_points:
            assert np.array_equal(point, np.rint(point))
            assert point[1] >= point[0]  # B >= R layout for one facility
        assert np.array_equal(run.best_point, np.rint(run.best_point))


class TestNelderMead:
    def test_converges_on_vee_function(self):
        space = SearchSpace(np.array([0.0]), np.array([10.0]))
        budget = Budget(max_evaluations=400, cycles=10,
                        iterations_per_cycle=40)
        run = nelder_mead_restart(vee, space, budget, seed=1)
        assert abs(run.best_point[0] - 5.0) < 1e-3

    def test_collapse_triggers_early_restart(self):
        # With an absurdly large collapse tolerance every cycle stops
        # right after evaluating its fresh simplex, so the run burns
        # exactly cycles * (dim + 1) evaluations.
        budget = Budget(max_evaluations=1000, cycles=4,
                        iterations_per_cycle=50)
        run = nelder_mead_restart(quadratic, SPACE_2D, budget, seed=3,
                                  collapse_tol=10.0)
        assert run.evaluations_used == 4 * 3

    def test_starts_from_supplied_initial_guess(self):
        budget = Budget(max_evaluations=3, cycles=1, iterations_per_cycle=1)
        x0 = np.array([1.25, 8.5])
        run = nelder_mead_restart(quadratic, SPACE_2D, budget, seed=0, x0=x0)
        assert np.array_equal(run.evaluated_points[0], x0)


class TestGaussianProcess:
    def test_noise_free_interpolation_and_variance(self):
        space = SearchSpace(np.zeros(3), np.full(3, 4.0))
        rng = np.random.default_rng(8)
        x = space.latin_hypercube(rng, 14)
        y = np.sin(x).sum(axis=1) + 0.3 * x[:, 0] ** 2
        gp = GaussianProcess(space).fit(x, y)
        mu, sigma = gp.predict(x)
        scale = max(1.0, float(np.abs(y).max()))
        assert np.abs(mu - y).max() <= 1e-5 * scale
        assert np.all(sigma ** 2 <= gp.jitter_ * gp._y_scale ** 2 + 1e-9)

    def test_kappa_zero_reduces_to_posterior_mean(self):
        space = SearchSpace(np.zeros(2), np.full(2, 1.0))
        rng = np.random.default_rng(1)
        x = space.latin_hypercube(rng, 10)
        y = (x ** 2).sum(axis=1)
        gp = GaussianProcess(space).fit(x, y)
        grid = space.sample(rng, 64)
        mu, _ = gp.predict(grid)
        assert np.allclose(gp.lower_confidence_bound(grid, 0.0), mu)

    def test_optimize_quadratic_loosely(self):
        budget = Budget(max_evaluations=120, cycles=2,
                        iterations_per_cycle=50)
        run = gp_optimize(quadratic, SPACE_2D, budget, kappa=2.0,
                          n_random_starts=8, seed=3)
        assert run.best_value < 1e-2


class TestCubicRbf:
    def test_interpolates_random_design(self):
        space = SearchSpace(np.zeros(4), np.full(4, 7.0))
        rng = np.random.default_rng(2)
        x = space.latin_hypercube(rng, 20)
        y = np.cos(x).sum(axis=1) * 10.0 + x[:, 2]
        surrogate = CubicRbfSurrogate(space).fit(x, y)
        pred = surrogate.predict(x)
        assert np.abs(pred - y).max() <= 1e-8 * max(1.0, np.abs(y).max())

    def test_gradient_matches_finite_difference(self):
        space = SearchSpace(np.zeros(3), np.full(3, 5.0))
        rng = np.random.default_rng(4)
        x = space.latin_hypercube(rng, 12)
        y = (x ** 2).sum(axis=1)
        surrogate = CubicRbfSurrogate(space).fit(x, y)
        point = np.array([1.1, 2.7, 3.3])
        grad = surrogate.gradient(point)
        eps = 1e-6
        for j in range(3):
            shifted = point.copy()
            shifted[j] += eps
            fd = (surrogate.predict(shifted[None, :])[0]
                  - surrogate.predict(point[None, :])[0]) / eps
            assert abs(fd - grad[j]) < 1e-3 * max(1.0, abs(grad[j]))

    def test_constant_data_gives_constant_surrogate(self):
        space = SearchSpace(np.zeros(2), np.full(2, 1.0))
        rng = np.random.default_rng(5)
        x = space.latin_hypercube(rng, 8)
        surrogate = CubicRbfSurrogate(space).fit(x, np.full(8, 42.0))
        probes = space.sample(rng, 30)
        assert np.allclose(surrogate.predict(probes), 42.0, atol=1e-7)

    def test_inconsistent_duplicates_raise(self):
        space = SearchSpace(np.zeros(2), np.full(2, 1.0))
        x = np.array([[0.2, 0.2], [0.2, 0.2], [0.8, 0.5]])
        with pytest.raises(SingularInterpolationError):
            CubicRbfSurrogate(space).fit(x, np.array([1.0, 2.0, 3.0]))

    def test_optimize_quadratic_loosely(self):
        run = rbf_optimize(quadratic, SPACE_2D,
                           Budget(max_evaluations=80), seed=6)
        assert run.best_value < 1e-3
