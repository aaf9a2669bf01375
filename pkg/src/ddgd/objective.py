"""Sum-structured convex objectives with per-agent subgradient oracles.

Agents are indexed ``0..n-1`` here (array rows). Objective values follow the
averaged convention ``f(x) = (1/n) sum_i f_i(x)``, so the accumulation point of
the mixing algorithms performs gradient descent on ``f`` with step ``alpha``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import InputError, NumericError

BOUND_SLACK = 1e-9


class Objective:
    """Base class. Subclasses provide ``local_value`` and ``local_subgradient``."""

    n: int
    p: int

    def local_value(self, i: int, x: np.ndarray) -> float:
        raise NotImplementedError

    def local_subgradient(self, i: int, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def subgrad_bound(self) -> float:
        """Bound ``D`` on every local subgradient norm."""
        return np.inf

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(sum(self.local_value(i, x) for i in range(self.n)) / self.n)

    def subgradients(self, xs) -> np.ndarray:
        """Stacked ``n x p`` local subgradients, row ``i`` taken at ``xs[i]``."""
        xs = self._check_stack(xs)
        g = np.array([self.local_subgradient(i, xs[i]) for i in range(self.n)], dtype=float)
        self._check_bound(g)
        return g

    def _check_stack(self, xs):
        xs = np.asarray(xs, dtype=float)
        if xs.shape != (self.n, self.p):
            raise InputError(f"expected agent states of shape {(self.n, self.p)}, got {xs.shape}")
        return xs

    def _check_bound(self, g):
        d = self.subgrad_bound
        if np.isfinite(d):
            worst = float(np.linalg.norm(g, axis=1).max())
            if worst > d * (1 + BOUND_SLACK) + BOUND_SLACK:
                raise NumericError(f"subgradient norm {worst:.6g} exceeds bound D={d:.6g}")

    def closed_form_optimum(self):
        """``(x*, f*)`` when known analytically, else ``None``."""
        return None

    def refine(self, x: np.ndarray) -> np.ndarray:
        """Problem-specific polishing of a near-optimal point; identity by default."""
        return x

    def weighted(self, weights) -> Objective:
        return ScaledObjective(self, weights)

    @cached_property
    def optimum(self):
        return solve_centralized(self)


class FunctionObjective(Objective):
    """Objective assembled from per-agent callables."""

    def __init__(self, fs, grads, p, bound=np.inf, optimum=None):
        if len(fs) != len(grads) or not fs:
            raise InputError("need one value and one subgradient callable per agent")
        self.fs = list(fs)
        self.grads = list(grads)
        self.n = len(fs)
        self.p = int(p)
        self._bound = float(bound)
        self._optimum = optimum

    @property
    def subgrad_bound(self):
        return self._bound

    def local_value(self, i, x):
        return float(self.fs[i](np.asarray(x, dtype=float)))

    def local_subgradient(self, i, x):
        return np.asarray(self.grads[i](np.asarray(x, dtype=float)), dtype=float).reshape(self.p)

    def closed_form_optimum(self):
        if self._optimum is None:
            return None
        x, f = self._optimum
        return np.asarray(x, dtype=float).reshape(self.p), float(f)


class ScaledObjective(Objective):
    """``f_i`` replaced by ``w_i f_i``; wraps any objective."""

    def __init__(self, base: Objective, weights):
        self.base = base
        self.weights = np.asarray(weights, dtype=float)
        self.n, self.p = base.n, base.p

    @property
    def subgrad_bound(self):
        return float(self.weights.max() * self.base.subgrad_bound) if self.n else 0.0

    def local_value(self, i, x):
        return self.weights[i] * self.base.local_value(i, x)

    def local_subgradient(self, i, x):
        return self.weights[i] * self.base.local_subgradient(i, x)


class LeastSquaresProblem(Objective):
    """``f_i(x) = w_i ||R_i x - s_i||`` (or its square when ``squared``).

    The unsquared form is nonsmooth with subgradients bounded by
    ``w_i sigma_max(R_i)``. The squared form has an exact normal-equations
    optimum but an unbounded gradient, so iterates are kept inside a ball of
    ``radius`` around the origin.
    """

    def __init__(self, R, s, squared=False, weights=None, radius=1e3, x_true=None):
        R = [np.atleast_2d(np.asarray(r, dtype=float)) for r in R]
        s = [np.atleast_1d(np.asarray(v, dtype=float)) for v in s]
        if not R or len(R) != len(s):
            raise InputError("need matching, non-empty lists of R_i and s_i")
        p = R[0].shape[1]
        for i, (r, v) in enumerate(zip(R, s)):
            if r.shape[1] != p or r.shape[0] != v.shape[0]:
                raise InputError(f"agent {i}: R_i is {r.shape} but s_i has length {v.shape[0]}")
        self.R, self.s = R, s
        self.n, self.p = len(R), p
        self.squared = bool(squared)
        self.weights = np.ones(self.n) if weights is None else np.asarray(weights, dtype=float)
        if self.weights.shape != (self.n,) or np.any(self.weights < 0):
            raise InputError("weights must be a non-negative vector with one entry per agent")
        self.radius = float(radius)
        self.x_true = None if x_true is None else np.asarray(x_true, dtype=float)
        self._sigma = np.array([np.linalg.norm(r, 2) for r in R])
        if len({r.shape[0] for r in R}) == 1:
            self._Rs = np.stack(R)
            self._Ss = np.stack(s)
        else:
            self._Rs = None

    @property
    def subgrad_bound(self):
        if not self.squared:
            return float(np.max(self.weights * self._sigma))
        snorm = np.array([np.linalg.norm(v) for v in self.s])
        return float(np.max(2 * self.weights * (self._sigma ** 2 * self.radius + self._sigma * snorm)))

    def residual(self, i, x):
        return self.R[i] @ x - self.s[i]

    def local_value(self, i, x):
        r = self.residual(i, np.asarray(x, dtype=float))
        nrm = float(r @ r) if self.squared else float(np.linalg.norm(r))
        return float(self.weights[i] * nrm)

    def local_subgradient(self, i, x):
        x = np.asarray(x, dtype=float)
        self._guard(x[None, :])
        return ls_subgradient(self, i, x)

    def _guard(self, xs):
        if self.squared:
            worst = float(np.linalg.norm(xs, axis=1).max())
            if worst > self.radius:
                raise NumericError(f"iterate norm {worst:.6g} left the radius guard {self.radius:.6g}")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self._Rs is None:
            return super().value(x)
        r = self._Rs @ x - self._Ss
        per = (r * r).sum(axis=1) if self.squared else np.linalg.norm(r, axis=1)
        return float((self.weights * per).sum() / self.n)

    def subgradients(self, xs):
        xs = self._check_stack(xs)
        if self._Rs is None:
            return super().subgradients(xs)
        self._guard(xs)
        r = np.einsum("imp,ip->im", self._Rs, xs) - self._Ss
        if self.squared:
            coef = 2.0 * r
        else:
            nrm = np.linalg.norm(r, axis=1)
            safe = np.where(nrm > 0, nrm, 1.0)
            coef = np.where(nrm[:, None] > 0, r / safe[:, None], 0.0)
        g = self.weights[:, None] * np.einsum("imp,im->ip", self._Rs, coef)
        self._check_bound(g)
        return g

    def closed_form_optimum(self):
        if not self.squared:
            return None
        gram = sum(w * r.T @ r for w, r in zip(self.weights, self.R))
        rhs = sum(w * r.T @ v for w, r, v in zip(self.weights, self.R, self.s))
        x = np.linalg.solve(gram, rhs)
        return x, self.value(x)

    def refine(self, x, iters=200):
        """Iteratively reweighted least squares from ``x``, keeping the best point.

        Converges quickly when no residual vanishes at the optimum; at a kink it
        stalls harmlessly because only improvements are kept.
        """
        if self.squared:
            return x
        best_x, best_f = np.asarray(x, dtype=float), self.value(x)
        cur = best_x
        for delta in (1e-4, 1e-6, 1e-8, 1e-10, 1e-12):
            for _ in range(iters):
                rho = np.array([max(np.linalg.norm(self.residual(i, cur)), delta) for i in range(self.n)])
                c = self.weights / rho
                gram = sum(ci * r.T @ r for ci, r in zip(c, self.R))
                rhs = sum(ci * r.T @ v for ci, r, v in zip(c, self.R, self.s))
                try:
                    nxt = np.linalg.solve(gram, rhs)
                except np.linalg.LinAlgError:
                    break
                f = self.value(nxt)
                if f < best_f:
                    best_x, best_f = nxt, f
                if np.linalg.norm(nxt - cur) <= 1e-15 * (1 + np.linalg.norm(cur)):
                    break
                cur = nxt
            cur = best_x
        return best_x

    def weighted(self, weights):
        return LeastSquaresProblem(self.R, self.s, self.squared, self.weights * np.asarray(weights, dtype=float),
                                   self.radius, self.x_true)

    # -- text serialisation -------------------------------------------------

    def dumps(self) -> str:
        fmt = lambda v: " ".join(repr(float(t)) for t in np.ravel(v))
        lines = ["ddgd-least-squares 1",
                 f"n {self.n} p {self.p} squared {int(self.squared)} radius {self.radius!r}",
                 "weights " + fmt(self.weights)]
        if self.x_true is not None:
            lines.append("x_true " + fmt(self.x_true))
        for i, (r, v) in enumerate(zip(self.R, self.s)):
            lines.append(f"agent {i} m {r.shape[0]}")
            lines += [fmt(row) for row in r]
            lines.append(fmt(v))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> LeastSquaresProblem:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        try:
            if lines[0].split() != ["ddgd-least-squares", "1"]:
                raise InputError("not a ddgd least-squares problem file")
            head = lines[1].split()
            meta = dict(zip(head[::2], head[1::2]))
            n, p = int(meta["n"]), int(meta["p"])
            pos = 2
            weights = np.array(lines[pos].split()[1:], dtype=float)
            pos += 1
            x_true = None
            if lines[pos].startswith("x_true"):
                x_true = np.array(lines[pos].split()[1:], dtype=float)
                pos += 1
            R, s = [], []
            for _ in range(n):
                m = int(lines[pos].split()[3])
                R.append(np.array([ln.split() for ln in lines[pos + 1:pos + 1 + m]], dtype=float).reshape(m, p))
                s.append(np.array(lines[pos + 1 + m].split(), dtype=float))
                pos += m + 2
        except (IndexError, KeyError, ValueError) as exc:
            raise InputError(f"malformed problem file: {exc}") from exc
        return cls(R, s, squared=bool(int(meta["squared"])), weights=weights,
                   radius=float(meta.get("radius", 1e3)), x_true=x_true)


def generate_least_squares(n, p=3, m=3, noise=0.1, heterogeneity=0.0, squared=False, seed=None,
                           radius=1e3) -> LeastSquaresProblem:
    """Seeded instance: ``s_i = R_i (x_true + h_i) + noise_i`` with Gaussian entries.

    ``heterogeneity`` is the standard deviation of the per-agent offset
    ``h_i``; zero gives the plain shared-state model.
    """
    if n < 1 or p < 1 or m < 1:
        raise InputError(f"dimensions must be positive, got n={n}, p={p}, m={m}")
    if noise < 0 or heterogeneity < 0:
        raise InputError("noise and heterogeneity must be non-negative")
    rng = np.random.default_rng(seed)
    x_true = rng.standard_normal(p)
    R, s = [], []
    for _ in range(n):
        r = rng.standard_normal((m, p))
        offset = heterogeneity * rng.standard_normal(p)
        R.append(r)
        s.append(r @ (x_true + offset) + noise * rng.standard_normal(m))
    return LeastSquaresProblem(R, s, squared=squared, x_true=x_true, radius=radius)


def ls_subgradient(prob: LeastSquaresProblem, i: int, x) -> np.ndarray:
    """Subgradient of agent ``i``'s term; zero at the kink of the unsquared norm."""
    if not 0 <= i < prob.n:
        raise InputError(f"agent index {i} out of range [0, {prob.n})")
    x = np.asarray(x, dtype=float)
    r = prob.residual(i, x)
    w = prob.weights[i]
    if prob.squared:
        return w * 2.0 * prob.R[i].T @ r
    nrm = np.linalg.norm(r)
    if nrm == 0:
        return np.zeros(prob.p)
    return w * prob.R[i].T @ r / nrm


def solve_centralized(obj: Objective, iters: int = 5000, scale: float | None = None,
                      x0=None, return_history: bool = False):
    """Optimum oracle ``(x*, f*)``.

    Uses the closed form when the objective has one. Otherwise runs centralized
    subgradient descent on ``f`` with ``alpha_k = scale / sqrt(k + 1)``, tracks
    the best iterate, then hands it to ``obj.refine`` and keeps the result only
    if it improves ``f``.
    """
    exact = obj.closed_form_optimum()
    if exact is not None:
        x, f = exact
        return (x, f, np.array([f])) if return_history else (x, f)
    x = np.zeros(obj.p) if x0 is None else np.asarray(x0, dtype=float).copy()
    if scale is None:
        d = obj.subgrad_bound
        scale = 1.0 / d if np.isfinite(d) and d > 0 else 1.0
    best_x, best_f = x.copy(), obj.value(x)
    history = np.empty(iters + 2)
    history[0] = best_f
    for k in range(iters):
        g = obj.subgradients(np.tile(x, (obj.n, 1))).mean(axis=0)
        if not np.any(g):
            break
        x = x - scale / np.sqrt(k + 1.0) * g
        f = obj.value(x)
        if f < best_f:
            best_x, best_f = x.copy(), f
        history[k + 1] = best_f
    else:
        k = iters
    polished = obj.refine(best_x)
    fp = obj.value(polished)
    if fp < best_f:
        best_x, best_f = polished, fp
    history[k + 1] = best_f
    history = history[:k + 2]
    return (best_x, best_f, history) if return_history else (best_x, best_f)


def weighted_objective(obj: Objective, pi) -> Objective:
    """Objective whose averaged value equals ``sum_i pi_i f_i``.

    Each ``f_i`` is scaled by ``n * pi_i`` to cancel the ``1/n`` averaging.
    """
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (obj.n,):
        raise InputError(f"pi must have length {obj.n}, got shape {pi.shape}")
    if np.any(pi < 0):
        raise InputError(f"pi has negative entries at agents {np.flatnonzero(pi < 0).tolist()}")
    if abs(pi.sum() - 1.0) > 1e-9:
        raise InputError(f"pi must sum to 1, sums to {pi.sum()!r}")
    return obj.weighted(obj.n * pi)


def abs_objective() -> FunctionObjective:
    """Single-agent ``f(x) = |x|`` with sign subgradient (zero at the kink)."""
    return FunctionObjective([lambda x: abs(x[0])], [lambda x: np.sign(x)], p=1, bound=1.0,
                             optimum=([0.0], 0.0))


def constant_objective(n: int, p: int, c: float = 0.0) -> FunctionObjective:
    """All-zero gradients; every point is optimal."""
    return FunctionObjective([lambda x: c] * n, [lambda x: np.zeros(p)] * n, p=p, bound=0.0,
                             optimum=(np.zeros(p), c))
