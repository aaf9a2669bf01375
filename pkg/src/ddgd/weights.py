"""Row/column-stochastic weights and the augmented 2n x 2n mixing matrix."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .digraph import Digraph
from .errors import InputError, NumericError, WeightValidationError

STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class WeightSystem:
    a: np.ndarray
    b: np.ndarray
    eps: float
    m: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @classmethod
    def build(cls, a, b, eps: float) -> WeightSystem:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if eps <= 0:
            raise InputError(f"epsilon must be positive, got {eps}")
        return cls(a, b, float(eps), assemble_m(a, b, eps))

    def certify(self) -> spectral.SpectralVerdict:
        return validate_epsilon(self)


def uniform_weights(g: Digraph) -> tuple[np.ndarray, np.ndarray]:
    """``a_ij = 1/|N_i^in|`` and ``b_ij = 1/|N_j^out|`` on the graph's links."""
    adj = g.adjacency().astype(float)
    a = adj / adj.sum(axis=1, keepdims=True)
    b = adj / adj.sum(axis=0, keepdims=True)
    return a, b


def metropolis_weights(g: Digraph) -> np.ndarray:
    """Doubly-stochastic Metropolis-Hastings weights on the symmetrized graph."""
    adj = g.symmetrized().adjacency()
    deg = adj.sum(axis=1) - 1
    n = g.n
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j and adj[i, j]:
                w[i, j] = 1.0 / (1 + max(deg[i], deg[j]))
        w[i, i] = 1.0 - w[i].sum()
    return w


def check_row_stochastic(a, pattern=None, name="A"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise WeightValidationError(f"{name} must be square, got shape {a.shape}")
    bad = np.flatnonzero(np.abs(a.sum(axis=1) - 1.0) > STOCHASTIC_TOL)
    if bad.size:
        i = int(bad[0]) + 1
        raise WeightValidationError(
            f"{name} row {i} sums to {a[i - 1].sum()!r}, expected 1", "row", i)
    _check_sign_pattern(a, pattern, name)


def check_column_stochastic(b, pattern=None, name="B"):
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise WeightValidationError(f"{name} must be square, got shape {b.shape}")
    bad = np.flatnonzero(np.abs(b.sum(axis=0) - 1.0) > STOCHASTIC_TOL)
    if bad.size:
        j = int(bad[0]) + 1
        raise WeightValidationError(
            f"{name} column {j} sums to {b[:, j - 1].sum()!r}, expected 1", "column", j)
    _check_sign_pattern(b, pattern, name)


def _check_sign_pattern(w, pattern, name):
    neg = np.argwhere(w < 0)
    if neg.size:
        i, j = (int(v) + 1 for v in neg[0])
        raise WeightValidationError(f"{name}[{i},{j}] is negative", "row", i)
    if pattern is None:
        return
    mismatch = np.argwhere((w > 0) != pattern)
    if mismatch.size:
        i, j = (int(v) + 1 for v in mismatch[0])
        what = "positive off the graph" if w[i - 1, j - 1] > 0 else "zero on a graph link"
        raise WeightValidationError(f"{name}[{i},{j}] is {what}", "row", i)


def validate_weights(g: Digraph, a, b):
    """Check ``a``/``b`` are stochastic with exactly the graph's sparsity pattern."""
    if np.shape(a) != (g.n, g.n) or np.shape(b) != (g.n, g.n):
        raise WeightValidationError(
            f"weights must be {g.n}x{g.n}, got {np.shape(a)} and {np.shape(b)}")
    adj = g.adjacency()
    check_row_stochastic(a, adj, "A")
    check_column_stochastic(b, adj, "B")


def assemble_m(a, b, eps: float) -> np.ndarray:
    """Block matrix ``[[A, eps I], [I - A, B - eps I]]``.

    ``eps = 0`` is accepted so that the epsilon bound can be computed.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise WeightValidationError(f"A and B shapes differ: {a.shape} vs {b.shape}")
    if eps < 0:
        raise InputError(f"epsilon must be non-negative, got {eps}")
    check_row_stochastic(a)
    check_column_stochastic(b)
    n = a.shape[0]
    eye = np.eye(n)
    return np.block([[a, eps * eye], [eye - a, b - eps * eye]])


def epsilon_bound(m0: np.ndarray) -> float:
    """Sufficient upper bound on epsilon: ``(1 - |lambda_3|)^n / (20 + 8n)^n``.

    ``lambda_3`` is the third eigenvalue of the epsilon-free matrix in
    magnitude order (see ``spectral.sorted_eigenvalues``). Tiny for moderate n;
    use it as a conservative diagnostic rather than a tuning rule.
    """
    m0 = np.asarray(m0, dtype=float)
    n = m0.shape[0] // 2
    if m0.shape[0] < 3:
        raise NumericError("epsilon bound needs a third eigenvalue; matrix is smaller than 3x3")
    vals = spectral.sorted_eigenvalues(m0)
    lam3 = abs(vals[2])
    # computed in log space: (20 + 8n)^n overflows past n ~ 150
    return float(np.exp(n * (np.log1p(-min(lam3, 1.0)) - np.log(20 + 8 * n))))


def validate_epsilon(ws: WeightSystem) -> spectral.SpectralVerdict:
    return spectral.certify(ws.m)


def choose_epsilon(a, b, candidates=None) -> tuple[float, spectral.SpectralVerdict]:
    """Pick the certified candidate with the widest spectral margin."""
    if candidates is None:
        candidates = np.concatenate([[1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.02, 0.03],
                                     np.round(np.arange(0.05, 1.0, 0.05), 2)])
    best = None
    for eps in candidates:
        verdict = spectral.certify(assemble_m(a, b, float(eps)))
        if verdict.unit_eigenvalue_simple and (best is None or verdict.margin > best[1].margin):
            best = (float(eps), verdict)
    if best is None:
        raise NumericError("no candidate epsilon yields a simple unit eigenvalue")
    return best


def matrix_to_csv(w: np.ndarray) -> str:
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in np.asarray(w))
