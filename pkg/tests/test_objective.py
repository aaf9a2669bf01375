import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddgd import objective, spectral, weights, digraph
from ddgd.errors import InputError, NumericError
from ddgd.objective import LeastSquaresProblem


def test_subgradient_hand_value():
    prob = LeastSquaresProblem([[[2.0]]], [[4.0]])
    np.testing.assert_allclose(objective.ls_subgradient(prob, 0, [3.0]), [2.0])
    assert prob.local_value(0, [3.0]) == pytest.approx(2.0)


def test_subgradient_zero_at_kink():
    r = np.array([[1.0, 2.0], [0.5, -1.0], [3.0, 0.0]])
    x = np.array([0.3, -0.7])
    prob = LeastSquaresProblem([r], [r @ x])
    np.testing.assert_array_equal(objective.ls_subgradient(prob, 0, x), 0.0)
    np.testing.assert_array_equal(prob.subgradients(x[None, :]), 0.0)


def test_agent_index_checked():
    prob = objective.generate_least_squares(3, seed=0)
    with pytest.raises(InputError):
        objective.ls_subgradient(prob, 3, np.zeros(3))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_subgradient_norm_bounded_by_sigma_max(seed):
    prob = objective.generate_least_squares(4, p=3, m=5, seed=seed)
    x = np.random.default_rng(seed).standard_normal(3) * 10
    for i in range(prob.n):
        assert np.linalg.norm(objective.ls_subgradient(prob, i, x)) <= np.linalg.norm(prob.R[i], 2) + 1e-12


@pytest.mark.parametrize("squared", [False, True])
def test_subgradient_inequality(squared):
    prob = objective.generate_least_squares(5, p=3, m=3, heterogeneity=0.5, squared=squared, seed=1)
    rng = np.random.default_rng(2)
    for _ in range(1000):
        i = int(rng.integers(prob.n))
        x, y = rng.standard_normal((2, prob.p)) * 3
        g = prob.local_subgradient(i, x)
        assert prob.local_value(i, y) >= prob.local_value(i, x) + g @ (y - x) - 1e-9


def test_vectorized_matches_per_agent():
    prob = objective.generate_least_squares(5, p=3, m=4, seed=3)
    xs = np.random.default_rng(0).standard_normal((5, 3))
    per = np.array([prob.local_subgradient(i, xs[i]) for i in range(5)])
    np.testing.assert_allclose(prob.subgradients(xs), per, atol=1e-14)
    x = xs[0]
    assert prob.value(x) == pytest.approx(np.mean([prob.local_value(i, x) for i in range(5)]))


def test_ragged_agents():
    rng = np.random.default_rng(5)
    R = [rng.standard_normal((m, 2)) for m in (1, 3, 4)]
    s = [rng.standard_normal(m) for m in (1, 3, 4)]
    prob = LeastSquaresProblem(R, s)
    xs = rng.standard_normal((3, 2))
    assert prob.subgradients(xs).shape == (3, 2)
    assert np.isfinite(prob.value(xs[0]))


def test_bad_shapes():
    with pytest.raises(InputError):
        LeastSquaresProblem([np.ones((2, 3))], [np.ones(3)])
    with pytest.raises(InputError):
        LeastSquaresProblem([], [])
    prob = objective.generate_least_squares(3, seed=0)
    with pytest.raises(InputError):
        prob.subgradients(np.zeros((2, 3)))


def test_bound_assertion_fires():
    bad = objective.FunctionObjective([lambda x: 0.0], [lambda x: np.array([5.0])], p=1, bound=1.0)
    with pytest.raises(NumericError, match="bound"):
        bad.subgradients(np.zeros((1, 1)))


def test_squared_noiseless_closed_form():
    prob = objective.generate_least_squares(5, noise=0.0, squared=True, seed=4)
    x_star, f_star = objective.solve_centralized(prob)
    np.testing.assert_allclose(x_star, prob.x_true, atol=1e-12)
    assert f_star == pytest.approx(0.0, abs=1e-20)


def test_radius_guard():
    prob = objective.generate_least_squares(2, squared=True, seed=0, radius=5.0)
    with pytest.raises(NumericError, match="radius"):
        prob.subgradients(np.full((2, 3), 10.0))


def test_abs_objective_optimum():
    x, f = objective.solve_centralized(objective.abs_objective(), iters=2000, x0=[2.0])
    assert abs(x[0]) < 1e-2 and f < 1e-2
    assert objective.abs_objective().optimum[1] == 0.0


def test_oracle_stable_under_doubling():
    prob = objective.generate_least_squares(5, p=3, seed=11)
    _, f1 = objective.solve_centralized(prob, iters=5000)
    _, f2 = objective.solve_centralized(prob, iters=10000)
    assert abs(f1 - f2) < 1e-6


@pytest.mark.parametrize("seed", range(4))
def test_oracle_against_cvxpy(seed):
    cp = pytest.importorskip("cvxpy")
    prob = objective.generate_least_squares(6, p=3, heterogeneity=0.5, seed=seed)
    x_star, f_star = prob.optimum
    x = cp.Variable(3)
    cost = sum(cp.norm(r @ x - v, 2) for r, v in zip(prob.R, prob.s)) / prob.n
    ref = cp.Problem(cp.Minimize(cost)).solve(solver=cp.CLARABEL)
    assert f_star <= ref + 1e-7
    assert f_star == pytest.approx(ref, abs=1e-6)


def test_best_value_history_non_increasing():
    prob = objective.generate_least_squares(5, seed=8)
    *_, hist = objective.solve_centralized(prob, iters=3000, return_history=True)
    assert np.all(np.diff(hist) <= 0)


def test_weighted_uniform_keeps_minimizer():
    prob = objective.generate_least_squares(5, heterogeneity=0.5, seed=2)
    x_star, f_star = prob.optimum
    x_w, f_w = objective.weighted_objective(prob, np.full(5, 0.2)).optimum
    np.testing.assert_allclose(x_w, x_star, atol=1e-6)
    assert f_w == pytest.approx(f_star, rel=1e-9)


def test_weighted_degenerate_pi():
    prob = objective.generate_least_squares(4, heterogeneity=0.5, seed=6)
    w = objective.weighted_objective(prob, [1.0, 0.0, 0.0, 0.0])
    x_w, f_w = w.optimum
    # R_1 is square and invertible, so f_1 alone is minimized with zero residual
    np.testing.assert_allclose(x_w, np.linalg.solve(prob.R[0], prob.s[0]), atol=1e-6)
    assert f_w < 1e-6
    # averaged value equals sum pi_i f_i
    x = np.ones(3)
    assert w.value(x) == pytest.approx(prob.local_value(0, x))


def test_weighted_nonuniform_moves_minimizer():
    prob = objective.generate_least_squares(6, heterogeneity=0.5, seed=0)
    a, _ = weights.uniform_weights(digraph.random_strongly_connected(6, 0.3, seed=0))
    pi = spectral.stationary_distribution(a)
    assert np.ptp(pi) > 1e-3
    x_hat, _ = objective.weighted_objective(prob, pi).optimum
    x_star, _ = prob.optimum
    assert np.linalg.norm(x_hat - x_star) > 1e-3


def test_weighted_rejects_bad_pi():
    prob = objective.generate_least_squares(3, seed=0)
    with pytest.raises(InputError, match="negative"):
        objective.weighted_objective(prob, [1.2, -0.1, -0.1])
    with pytest.raises(InputError, match="sum to 1"):
        objective.weighted_objective(prob, [0.5, 0.5, 0.5])
    with pytest.raises(InputError, match="length"):
        objective.weighted_objective(prob, [1.0])


def test_generator_seeded():
    a = objective.generate_least_squares(4, seed=9)
    b = objective.generate_least_squares(4, seed=9)
    assert all(np.array_equal(u, v) for u, v in zip(a.R, b.R))
    assert a.n == 4 and a.p == 3 and a.R[0].shape == (3, 3)
    with pytest.raises(InputError):
        objective.generate_least_squares(0)


@pytest.mark.parametrize("squared", [False, True])
def test_serialization_round_trip(squared):
    prob = objective.generate_least_squares(4, p=2, m=3, squared=squared, seed=7)
    back = LeastSquaresProblem.loads(prob.dumps())
    assert back.squared == squared and back.n == 4 and back.p == 2
    for u, v in zip(prob.R + prob.s, back.R + back.s):
        np.testing.assert_array_equal(u, v)
    np.testing.assert_array_equal(back.x_true, prob.x_true)
    assert back.dumps() == prob.dumps()


def test_loads_rejects_garbage():
    with pytest.raises(InputError):
        LeastSquaresProblem.loads("hello\n")
    with pytest.raises(InputError):
        LeastSquaresProblem.loads("ddgd-least-squares 1\nn 2 p 2 squared 0\nweights 1 1\n")


def test_constant_objective():
    c = objective.constant_objective(3, 2, 1.5)
    np.testing.assert_array_equal(c.subgradients(np.ones((3, 2))), 0.0)
    assert c.value(np.ones(2)) == 1.5
