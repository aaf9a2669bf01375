"""Spectral diagnostics for the augmented mixing matrix.

Dense eigen-decompositions only; intended for a few dozen agents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, InputError, NumericError

UNIT_TOL = 1e-8
# below this the distance series is rounding noise
DISTANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class SpectralVerdict:
    unit_eigenvalue_simple: bool
    second_magnitude: float
    margin: float
    left_pi: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)

    def __bool__(self):
        return self.unit_eigenvalue_simple


@dataclass(frozen=True)
class RateFit:
    gamma_hat: float
    Gamma_hat: float
    max_residual: float
    first_k_below_tol: int | None
    distances: np.ndarray = field(repr=False)
    fit_start: int = 0
    fit_stop: int = 0

    def envelope(self, k):
        return self.Gamma_hat * self.gamma_hat ** np.asarray(k, dtype=float)

    def to_csv(self) -> str:
        lines = ["k,d_k"]
        lines += [f"{k},{float(d)!r}" for k, d in enumerate(self.distances, start=1)]
        return "\n".join(lines) + "\n"


def sorted_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues ordered by magnitude, then real part, then imaginary part (all descending)."""
    try:
        vals = np.linalg.eigvals(np.asarray(m, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise NumericError("eigensolver returned non-finite eigenvalues")
    order = np.lexsort((-vals.imag, -vals.real, -np.abs(vals)))
    return vals[order]


def stationary_distribution(a: np.ndarray) -> np.ndarray:
    """Left Perron vector of a row-stochastic matrix, normalised to sum 1."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    # (A^T - I) pi = 0 with the normalisation row appended
    lhs = np.vstack([a.T - np.eye(n), np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def certify(m: np.ndarray) -> SpectralVerdict:
    """Check that ``m`` has a simple eigenvalue 1 and all others strictly inside the unit circle.

    ``left_pi`` is the stationary distribution of the top-left ``n x n`` block,
    which is the row-stochastic matrix when ``m`` is an augmented matrix.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise InputError(f"expected a 2n x 2n matrix, got shape {m.shape}")
    n = m.shape[0] // 2
    vals = sorted_eigenvalues(m)
    near_one = np.abs(vals - 1.0) <= UNIT_TOL
    unit_idx = int(np.argmin(np.abs(vals - 1.0)))
    rest = np.delete(vals, unit_idx)
    second = float(np.abs(rest).max()) if rest.size else 0.0
    simple = bool(near_one.sum() == 1 and second <= 1.0 - UNIT_TOL)
    return SpectralVerdict(
        unit_eigenvalue_simple=simple,
        second_magnitude=second,
        margin=1.0 - second,
        left_pi=stationary_distribution(m[:n, :n]),
        eigenvalues=vals,
    )


def limit_matrix(n: int) -> np.ndarray:
    """Limit of ``M^k``: top half ``1/n`` everywhere, bottom half zero."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    out = np.zeros((2 * n, 2 * n))
    out[:n, :] = 1.0 / n
    return out


def power_distances(m: np.ndarray, k_max: int) -> np.ndarray:
    """``d_k = ||M^k - limit||_inf`` for ``k = 1..k_max``."""
    m = np.asarray(m, dtype=float)
    lim = limit_matrix(m.shape[0] // 2)
    out = np.empty(k_max)
    power = np.eye(m.shape[0])
    for k in range(k_max):
        power = power @ m
        out[k] = np.abs(power - lim).sum(axis=1).max()
        if not np.isfinite(out[k]):
            raise NumericError(f"matrix powers diverged at k={k + 1}")
    return out


def power_convergence(m: np.ndarray, k_max: int = 10000, tol: float = 1e-8) -> RateFit:
    """Fit ``||M^k - limit||_inf ~ Gamma * gamma^k`` over the tail of the series.

    The first 10% of the usable window is skipped as transient; entries below
    ``DISTANCE_FLOOR`` are treated as rounding noise and excluded. The slope
    comes from least squares on ``log d_k``; ``Gamma_hat`` is then the smallest
    constant making the envelope an upper bound on the fitted window.
    """
    d = power_distances(m, k_max)
    below = np.flatnonzero(d <= tol)
    first_k = int(below[0]) + 1 if below.size else None

    usable = np.flatnonzero(d > DISTANCE_FLOOR)
    if usable.size == 0:
        return RateFit(0.0, 0.0, 0.0, first_k, d)
    stop = int(usable[-1]) + 1
    # contiguous usable prefix; later isolated spikes are rounding noise
    gaps = np.flatnonzero(d[:stop] <= DISTANCE_FLOOR)
    if gaps.size:
        stop = int(gaps[0])
    start = stop // 10
    ks = np.arange(start, stop) + 1
    logs = np.log(d[start:stop])
    if ks.size < 2:
        # decays to the floor within one step
        gamma = float(d[0]) if d[0] < 1 else 0.0
        return RateFit(gamma, 1.0, 0.0, first_k, d, start, stop)
    slope, intercept = np.polyfit(ks, logs, 1)
    if slope >= 0:
        raise FitError(
            f"distances do not decay over k={ks[0]}..{ks[-1]} (slope {slope:.3g}); "
            "the unit eigenvalue is probably not simple"
        )
    resid = logs - (intercept + slope * ks)
    gamma = float(np.exp(slope))
    Gamma = float(np.exp(np.max(logs - slope * ks)))
    return RateFit(gamma, Gamma, float(np.abs(resid).max()), first_k, d, start, stop)
