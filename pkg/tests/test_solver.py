import math

import numpy as np
import pytest

from groupprox import (
    Dataset,
    GroupedVector,
    LossKind,
    Problem,
    SolverConfig,
    lambda_max,
    model_value,
    prox_grouped,
    prox_step,
    reg_path,
    row_group_offsets,
    solve,
)


def small_problem(seed=0, m=12, d=6, k=2, lam_ratio=0.3, q=2.0,
                  kind=LossKind.LEAST_SQUARES):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, d))
    if kind is LossKind.LOGISTIC:
        y = np.sign(rng.standard_normal((m, k)))
    else:
        y = rng.standard_normal((m, k))
    data = Dataset(a, y)
    offsets = row_group_offsets(d, k)
    lam = lam_ratio * lambda_max(data, kind, offsets, q)
    return Problem(data, kind, offsets, lam, q)


class TestProblem:
    def test_offsets_must_cover_flattened_matrix(self):
        data = Dataset(np.ones((3, 2)), np.ones((3, 2)))
        with pytest.raises(ValueError):
            Problem(data, LossKind.LEAST_SQUARES, [0, 3], 0.1, 2.0)

    def test_objective_composes_loss_and_penalty(self):
        p = small_problem()
        w = p.zero().with_values(np.ones(12))
        smooth = p.smooth(w)
        assert p.objective(w) == pytest.approx(
            smooth + p.lam * math.sqrt(2.0) * 6, rel=1e-12
        )


class TestModelValue:
    def test_taylor_point_recovers_objective(self):
        p = small_problem()
        w = p.zero().with_values(np.linspace(-1, 1, 12))
        assert model_value(w, w, 5.0, p) == pytest.approx(p.objective(w), rel=1e-12)

    def test_descent_lemma_at_true_lipschitz(self):
        # lam = 0 quadratic: L = largest eigenvalue of A^T A majorizes f
        rng = np.random.default_rng(7)
        a = rng.standard_normal((10, 4))
        data = Dataset(a, rng.standard_normal((10, 1)))
        p = Problem(data, LossKind.LEAST_SQUARES, row_group_offsets(4, 1), 0.0, 2.0)
        L = float(np.linalg.eigvalsh(a.T @ a).max())
        x = p.zero().with_values(rng.standard_normal(4))
        for _ in range(20):
            y = p.zero().with_values(rng.standard_normal(4))
            assert p.objective(y) <= model_value(y, x, L, p) + 1e-9

    def test_quadratic_term_linear_in_L(self):
        p = small_problem()
        x = p.zero().with_values(np.linspace(0, 1, 12))
        e = np.full(12, 0.1)
        y = x.with_values(x.values + e)
        m1 = model_value(y, x, 2.0, p)
        m2 = model_value(y, x, 4.0, p)
        assert m2 - m1 == pytest.approx(0.5 * 2.0 * float(e @ e), rel=1e-9)

    def test_nonpositive_L_rejected(self):
        p = small_problem()
        w = p.zero()
        with pytest.raises(ValueError):
            model_value(w, w, 0.0, p)


class TestProxStep:
    def test_lambda_zero_is_gradient_step(self):
        p = small_problem(lam_ratio=0.3)
        p = Problem(p.data, p.kind, p.offsets, 0.0, p.q)
        s = p.zero().with_values(np.linspace(-1, 1, 12))
        g = p.smooth_gradient(s)
        out = prox_step(s, 3.0, p)
        np.testing.assert_allclose(out.values, s.values - g.values / 3.0, rtol=1e-12)

    def test_stationary_loss_reduces_to_projection(self):
        # perfect-fit data: gradient vanishes, the step is a pure prox
        rng = np.random.default_rng(9)
        a = rng.standard_normal((8, 4))
        w_true = rng.standard_normal((4, 2))
        data = Dataset(a, a @ w_true)
        p = Problem(data, LossKind.LEAST_SQUARES, row_group_offsets(4, 2), 0.4, 2.0)
        s = p.zero().with_values(w_true.reshape(-1))
        out = prox_step(s, 2.0, p)
        expected = prox_grouped(s, 0.4 / 2.0, 2.0)
        np.testing.assert_allclose(out.values, expected.values, atol=1e-10)

    def test_large_lambda_zeroes_step(self):
        p = small_problem()
        s = p.zero()
        lam_big = 10.0 * lambda_max(p.data, p.kind, p.offsets, p.q)
        p_big = Problem(p.data, p.kind, p.offsets, lam_big, p.q)
        out = prox_step(s, 1.0, p_big)
        assert np.all(out.values == 0.0)


class TestAlphaSequence:
    def recurrence(self, n):
        alphas = [1.0]
        for _ in range(n):
            alphas.append(0.5 * (1.0 + math.sqrt(1.0 + 4.0 * alphas[-1] ** 2)))
        return alphas

    def test_first_step_is_golden_ratio(self):
        assert self.recurrence(1)[1] == pytest.approx((1 + math.sqrt(5)) / 2)

    def test_identity_holds_exactly(self):
        # alpha_{i+1}**2 - alpha_{i+1} = alpha_i**2 by construction
        alphas = self.recurrence(50)
        for a, b in zip(alphas, alphas[1:]):
            assert b * b - b == pytest.approx(a * a, rel=1e-12)

    def test_growth_rate(self):
        alphas = self.recurrence(100)
        # alpha_k >= (k+2)/2, the bound behind the O(1/k^2) rate
        for k, a in enumerate(alphas):
            assert a >= (k + 2) / 2.0 - 1e-9


class TestSolve:
    def test_lambda_above_max_stays_zero(self):
        p = small_problem()
        lam_big = 1.5 * lambda_max(p.data, p.kind, p.offsets, p.q)
        big = Problem(p.data, p.kind, p.offsets, lam_big, p.q)
        res = solve(big, SolverConfig(max_iter=50))
        assert np.all(res.W.values == 0.0)
        assert res.iterations <= 2

    @pytest.mark.parametrize("kind", [LossKind.LEAST_SQUARES, LossKind.LOGISTIC])
    @pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 3.0, math.inf])
    def test_certificate_and_descent(self, kind, q):
        p = small_problem(kind=kind, q=q, lam_ratio=0.2)
        res = solve(p, SolverConfig(max_iter=300, rel_tol=1e-12))
        assert np.all(res.cert_gaps <= 1e-10 * np.maximum(1.0, np.abs(res.objective_history)))
        # L never shrinks across iterations
        assert np.all(res.L_history[1:] >= res.L_history[:-1])
        # best-iterate contract
        assert p.objective(res.W) == pytest.approx(res.objective_history.min(), rel=1e-12)

    def test_matches_long_reference_run(self):
        p = small_problem(seed=21, q=2.0, lam_ratio=0.1)
        ref = solve(p, SolverConfig(max_iter=10_000, rel_tol=1e-15))
        short = solve(p, SolverConfig(max_iter=500, rel_tol=1e-15))
        f_ref = p.objective(ref.W)
        f_short = p.objective(short.W)
        assert abs(f_short - f_ref) <= 1e-8 * max(1.0, abs(f_ref))

    def test_zero_is_fixed_point_of_iteration(self):
        # at lambda > lambda_max, one iteration from X = 0 returns exactly 0
        p = small_problem()
        lam_big = 1.2 * lambda_max(p.data, p.kind, p.offsets, p.q)
        big = Problem(p.data, p.kind, p.offsets, lam_big, p.q)
        res = solve(big, SolverConfig(max_iter=1), x0=big.zero())
        assert np.all(res.W.values == 0.0)

    def test_near_fixed_point_stays_put(self):
        p = small_problem(seed=5, lam_ratio=0.3)
        ref = solve(p, SolverConfig(max_iter=3000, rel_tol=1e-15))
        stepped = prox_step(ref.W, float(ref.L_history[-1]), p)
        assert np.abs(stepped.values - ref.W.values).max() <= 1e-7

    def test_history_lengths_consistent(self):
        p = small_problem()
        res = solve(p, SolverConfig(max_iter=40, rel_tol=1e-14))
        assert len(res.objective_history) == res.iterations
        assert len(res.L_history) == res.iterations
        assert len(res.cert_gaps) == res.iterations


class TestLambdaMax:
    def test_identity_design_singleton_groups(self):
        y = np.array([0.5, -2.0, 1.0])
        data = Dataset(np.eye(3), y)
        offsets = np.array([0, 1, 2, 3])
        assert lambda_max(data, LossKind.LEAST_SQUARES, offsets, 2.0) == pytest.approx(2.0)

    def test_zero_targets(self):
        data = Dataset(np.eye(3), np.zeros(3))
        offsets = np.array([0, 1, 2, 3])
        assert lambda_max(data, LossKind.LEAST_SQUARES, offsets, 2.0) == 0.0

    @pytest.mark.parametrize("kind", [LossKind.LEAST_SQUARES, LossKind.LOGISTIC])
    def test_bracketing(self, kind):
        p = small_problem(seed=33, kind=kind)
        lam_star = lambda_max(p.data, p.kind, p.offsets, p.q)
        above = Problem(p.data, p.kind, p.offsets, 1.001 * lam_star, p.q)
        below = Problem(p.data, p.kind, p.offsets, 0.99 * lam_star, p.q)
        cfg = SolverConfig(max_iter=300)
        assert np.all(solve(above, cfg).W.values == 0.0)
        assert np.any(solve(below, cfg).W.values != 0.0)


class TestRegPath:
    def test_ratio_one_is_zero(self):
        p = small_problem()
        results = reg_path(p.data, p.kind, p.offsets, p.q, [1.0])
        assert len(results) == 1
        assert np.all(results[0].W.values == 0.0)

    def test_nondecreasing_ratios_rejected(self):
        p = small_problem()
        with pytest.raises(ValueError):
            reg_path(p.data, p.kind, p.offsets, p.q, [0.5, 0.5])
        with pytest.raises(ValueError):
            reg_path(p.data, p.kind, p.offsets, p.q, [0.5, 1.5])

    def test_warm_start_matches_cold_with_fewer_iterations(self):
        p = small_problem(seed=41)
        ratios = 0.9 ** np.arange(0, 51, 5)
        cfg = SolverConfig(max_iter=2000, rel_tol=1e-12)
        path = reg_path(p.data, p.kind, p.offsets, p.q, ratios, cfg)
        lam_last = ratios[-1] * lambda_max(p.data, p.kind, p.offsets, p.q)
        cold = solve(Problem(p.data, p.kind, p.offsets, lam_last, p.q), cfg)
        warm = path[-1]
        prob_last = Problem(p.data, p.kind, p.offsets, lam_last, p.q)
        f_warm = prob_last.objective(warm.W)
        f_cold = prob_last.objective(cold.W)
        assert abs(f_warm - f_cold) <= 1e-6 * max(1.0, abs(f_cold))
        assert warm.iterations < cold.iterations
