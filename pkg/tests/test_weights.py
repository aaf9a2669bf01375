import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddgd import digraph, spectral, weights
from ddgd.digraph import Digraph
from ddgd.errors import InputError, NumericError, WeightValidationError
from ddgd.weights import WeightSystem


def two_cycle():
    return Digraph(2, frozenset({(1, 2), (2, 1)}))


def two_cycle_spectrum(eps):
    # shared eigenvectors of A = B = J/2: the ones direction gives [[1, eps], [0, 1 - eps]],
    # the difference direction gives [[0, eps], [1, -eps]]
    root = np.sqrt(eps**2 + 4 * eps)
    return np.array([1.0, 1.0 - eps, (-eps + root) / 2, (-eps - root) / 2])


def test_uniform_examples():
    a, b = weights.uniform_weights(Digraph(1))
    assert a.tolist() == [[1.0]] and b.tolist() == [[1.0]]
    a, b = weights.uniform_weights(digraph.cycle(3))
    assert set(a[a > 0]) == {0.5} and set(b[b > 0]) == {0.5}
    assert (a > 0).sum() == 6


def test_uniform_b_column_uses_out_degree():
    # node 2 sends to 1 and 4 (and itself)
    g = Digraph(4, frozenset({(1, 2), (4, 2), (2, 1), (3, 4), (2, 3)}))
    _, b = weights.uniform_weights(g)
    np.testing.assert_array_equal(np.flatnonzero(b[:, 1]), [0, 1, 3])
    assert np.allclose(b[[0, 1, 3], 1], 1 / 3)


def test_assemble_examples():
    m = weights.assemble_m([[1.0]], [[1.0]], 0.3)
    np.testing.assert_array_equal(m, [[1.0, 0.3], [0.0, 0.7]])
    a, b = weights.uniform_weights(two_cycle())
    m = weights.assemble_m(a, b, 0.7)
    expected = np.array([[0.5, 0.5, 0.7, 0.0],
                         [0.5, 0.5, 0.0, 0.7],
                         [0.5, -0.5, -0.2, 0.5],
                         [-0.5, 0.5, 0.5, -0.2]])
    np.testing.assert_allclose(m, expected, atol=1e-15)
    assert m[3, 3] < 0
    np.testing.assert_allclose(m.sum(axis=0), 1.0, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.floats(0.0, 1.0), st.integers(0, 2**31 - 1), st.floats(1e-4, 0.99))
def test_column_sums_and_eigenvectors(n, p, seed, eps):
    g = digraph.random_strongly_connected(n, p, seed)
    a, b = weights.uniform_weights(g)
    weights.validate_weights(g, a, b)
    m = weights.assemble_m(a, b, eps)
    ones, zeros = np.ones(n), np.zeros(n)
    np.testing.assert_allclose(m.sum(axis=0), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.r_[ones, ones] @ m, np.r_[ones, ones], atol=1e-12)
    np.testing.assert_allclose(m @ np.r_[ones, zeros], np.r_[ones, zeros], atol=1e-12)


def test_negative_entries_are_allowed():
    a, b = weights.uniform_weights(digraph.random_strongly_connected(5, 0.4, seed=1))
    m = weights.assemble_m(a, b, 0.9)
    assert (m < 0).any()


def test_epsilon_bound_n1_is_degenerate():
    with pytest.raises(NumericError, match="third eigenvalue"):
        weights.epsilon_bound(weights.assemble_m([[1.0]], [[1.0]], 0.0))


def test_epsilon_bound_two_cycle():
    a, b = weights.uniform_weights(two_cycle())
    m0 = weights.assemble_m(a, b, 0.0)
    lam3 = sorted(np.abs(np.linalg.eigvals(m0)), reverse=True)[2]
    # exact lambda_3 is 0 but sits in a 2x2 Jordan block, so the solver sees ~sqrt(machine eps)
    assert lam3 == pytest.approx(0.0, abs=1e-7)
    assert weights.epsilon_bound(m0) == pytest.approx((1 / 36) ** 2 * (1 - lam3) ** 2, rel=1e-12)
    assert weights.epsilon_bound(m0) == pytest.approx(1 / 1296, rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_epsilon_bound_in_unit_interval(seed):
    n = 2 + seed
    a, b = weights.uniform_weights(digraph.random_strongly_connected(n, 0.3, seed))
    ups = weights.epsilon_bound(weights.assemble_m(a, b, 0.0))
    assert 0 < ups < 1


def test_epsilon_bound_large_n_does_not_overflow():
    a, b = weights.uniform_weights(digraph.random_strongly_connected(200, 0.05, seed=0))
    ups = weights.epsilon_bound(weights.assemble_m(a, b, 0.0))
    assert ups >= 0.0 and np.isfinite(ups)


def test_validate_epsilon_n1():
    v = WeightSystem.build([[1.0]], [[1.0]], 0.3).certify()
    assert v.unit_eigenvalue_simple
    assert v.second_magnitude == pytest.approx(0.7)
    assert v.margin == pytest.approx(0.3)


@pytest.mark.parametrize("eps", [0.1, 0.3, 0.49, 0.51, 0.7, 0.9])
def test_validate_epsilon_two_cycle_closed_form(eps):
    a, b = weights.uniform_weights(two_cycle())
    v = weights.validate_epsilon(WeightSystem.build(a, b, eps))
    spectrum = two_cycle_spectrum(eps)
    np.testing.assert_allclose(np.sort_complex(v.eigenvalues), np.sort_complex(spectrum.astype(complex)),
                               atol=1e-12)
    second = np.abs(spectrum[1:]).max()  # all but the unit eigenvalue
    assert v.second_magnitude == pytest.approx(second, abs=1e-12)
    assert v.unit_eigenvalue_simple == (eps < 0.5)


@pytest.mark.parametrize("seed", range(4))
def test_eps_zero_has_repeated_unit_eigenvalue(seed):
    n = 2 + seed
    a, b = weights.uniform_weights(digraph.random_strongly_connected(n, 0.4, seed))
    m0 = weights.assemble_m(a, b, 0.0)
    # independent oracle: geometric multiplicity from the rank of M0 - I
    assert 2 * n - np.linalg.matrix_rank(m0 - np.eye(2 * n), tol=1e-9) >= 2
    assert not spectral.certify(m0).unit_eigenvalue_simple


def test_weight_system_rejects_nonpositive_eps():
    with pytest.raises(InputError, match="epsilon"):
        WeightSystem.build([[1.0]], [[1.0]], 0.0)
    with pytest.raises(InputError, match="epsilon"):
        weights.assemble_m([[1.0]], [[1.0]], -0.1)


def test_row_validation_names_index():
    a = np.array([[0.5, 0.5, 0.0], [0.2, 0.7, 0.0], [0.0, 0.5, 0.5]])
    with pytest.raises(WeightValidationError, match="row 2") as err:
        weights.check_row_stochastic(a)
    assert err.value.axis == "row" and err.value.index == 2


def test_column_validation_names_index():
    b = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 0.9]])
    with pytest.raises(WeightValidationError, match="column 3") as err:
        weights.assemble_m(np.eye(3), b, 0.1)
    assert err.value.axis == "column" and err.value.index == 3


def test_pattern_validation():
    g = digraph.cycle(3)
    a, b = weights.uniform_weights(g)
    weights.validate_weights(g, a, b)
    bad = np.full((3, 3), 1 / 3)
    with pytest.raises(WeightValidationError, match="off the graph"):
        weights.validate_weights(g, bad, b)
    neg = np.array([[1.2, -0.2, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(WeightValidationError, match="negative"):
        weights.check_row_stochastic(neg)
    with pytest.raises(WeightValidationError, match="must be 3x3"):
        weights.validate_weights(g, np.eye(2), np.eye(2))


def test_metropolis_is_doubly_stochastic():
    g = digraph.random_strongly_connected(7, 0.2, seed=4)
    w = weights.metropolis_weights(g)
    np.testing.assert_allclose(w.sum(axis=0), 1.0, atol=1e-12)
    np.testing.assert_allclose(w, w.T, atol=0)
    assert (w >= 0).all()


def test_choose_epsilon_certifies():
    a, b = weights.uniform_weights(digraph.random_strongly_connected(6, 0.3, seed=0))
    eps, verdict = weights.choose_epsilon(a, b)
    assert verdict.unit_eigenvalue_simple
    assert spectral.certify(weights.assemble_m(a, b, eps)).margin == pytest.approx(verdict.margin)
    with pytest.raises(NumericError):
        weights.choose_epsilon(a, b, candidates=[5.0])


def test_matrix_csv_full_precision():
    w = np.array([[1 / 3, 2 / 3], [0.1, 0.9]])
    back = np.array([[float(v) for v in line.split(",")] for line in weights.matrix_to_csv(w).splitlines()])
    np.testing.assert_array_equal(back, w)
