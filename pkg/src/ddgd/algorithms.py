"""Synchronous iteration engines.

D-DGD keeps a state ``x_i`` and an auxiliary ``y_i`` per agent; the baselines
are plain DGD under a chosen weight regime and gradient-push.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError
from .objective import Objective
from .weights import WeightSystem

# push-sum weights below this mean the mixing matrix lost mass
PUSH_SUM_FLOOR = 1e-300


@dataclass(frozen=True)
class AgentStates:
    x: np.ndarray
    y: np.ndarray
    k: int = 0

    @classmethod
    def initial(cls, x0) -> AgentStates:
        x0 = np.array(x0, dtype=float)
        if x0.ndim != 2:
            raise InputError(f"x0 must be an n x p array, got shape {x0.shape}")
        return cls(x0, np.zeros_like(x0), 0)

    @property
    def z(self) -> np.ndarray:
        """Stacked ``2n x p`` state: x rows first, then y rows."""
        return np.vstack([self.x, self.y])

    @classmethod
    def from_z(cls, z, k=0) -> AgentStates:
        n = z.shape[0] // 2
        return cls(z[:n].copy(), z[n:].copy(), k)

    @property
    def accumulation_point(self) -> np.ndarray:
        """``(sum x_i + sum y_i) / n``."""
        return (self.x.sum(axis=0) + self.y.sum(axis=0)) / self.x.shape[0]

    def consensus_error(self) -> float:
        return float(np.linalg.norm(self.x - self.accumulation_point, axis=1).max())

    def y_norm(self) -> float:
        return float(np.linalg.norm(self.y, axis=1).max())


@dataclass(frozen=True)
class PushSumState:
    w: np.ndarray
    v: np.ndarray
    x: np.ndarray
    k: int = 0

    @classmethod
    def initial(cls, x0) -> PushSumState:
        x0 = np.array(x0, dtype=float)
        return cls(x0.copy(), np.ones(x0.shape[0]), x0.copy(), 0)


def _check_dims(x, n, obj):
    if x.shape != (n, obj.p) or obj.n != n:
        raise InputError(
            f"state shape {x.shape} incompatible with {n} agents and objective (n={obj.n}, p={obj.p})")


def ddgd_step(st: AgentStates, ws: WeightSystem, obj: Objective, alpha: float) -> AgentStates:
    """One D-DGD round in per-agent block form.

    ``x+ = A x + eps y - alpha grad(x)`` and ``y+ = x - A x + B y - eps y``,
    with subgradients taken at the current ``x_i``.
    """
    _check_dims(st.x, ws.n, obj)
    g = obj.subgradients(st.x)
    ax = ws.a @ st.x
    x_new = ax + ws.eps * st.y - alpha * g
    y_new = st.x - ax + ws.b @ st.y - ws.eps * st.y
    return AgentStates(x_new, y_new, st.k + 1)


def ddgd_step_matrix(st: AgentStates, ws: WeightSystem, obj: Objective, alpha: float) -> AgentStates:
    """Same round as ``ddgd_step`` via ``z+ = M z - alpha g`` (g zero on the y rows)."""
    _check_dims(st.x, ws.n, obj)
    g = np.zeros_like(st.z)
    g[:ws.n] = obj.subgradients(st.x)
    return AgentStates.from_z(ws.m @ st.z - alpha * g, st.k + 1)


def dgd_step(x, w, obj: Objective, alpha: float) -> np.ndarray:
    """``x_i+ = sum_j w_ij x_j - alpha grad f_i(x_i)``."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    _check_dims(x, w.shape[0], obj)
    return w @ x - alpha * obj.subgradients(x)


def column_stochastic_average_track(x) -> np.ndarray:
    """Network average of the agent states (rows)."""
    return np.asarray(x, dtype=float).mean(axis=0)


def gradient_push_step(st: PushSumState, b, obj: Objective, alpha: float) -> PushSumState:
    """Gradient-push round: ``w+ = B (w - alpha grad(x))``, ``v+ = B v``, ``x+ = w+ / v+``."""
    b = np.asarray(b, dtype=float)
    _check_dims(st.w, b.shape[0], obj)
    w_new = b @ (st.w - alpha * obj.subgradients(st.x))
    v_new = b @ st.v
    if np.any(v_new <= PUSH_SUM_FLOOR):
        raise NumericError(
            f"push-sum weight vanished at agent {int(np.argmin(v_new))}; "
            "B must be column stochastic on a strongly connected graph")
    return PushSumState(w_new, v_new, w_new / v_new[:, None], st.k + 1)
