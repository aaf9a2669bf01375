"""Diminishing step sizes ``alpha_k = a / (k + 1)^q``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

KINDS = ("inverse_sqrt", "inverse", "inverse_pow")

SATISFIES_BOTH = "satisfies_both"
DIVERGING_SUM_ONLY = "diverging_sum_only"
NEITHER = "neither"


@dataclass(frozen=True)
class StepSchedule:
    kind: str = "inverse_sqrt"
    scale: float = 1.0
    exponent: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"schedule.kind must be one of {KINDS}, got {self.kind!r}")
        if not self.scale > 0:
            raise InputError(f"schedule.scale must be positive, got {self.scale!r}")
        fixed = {"inverse_sqrt": 0.5, "inverse": 1.0}.get(self.kind)
        if fixed is not None:
            if self.exponent is not None and self.exponent != fixed:
                raise InputError(
                    f"schedule.exponent {self.exponent} conflicts with kind {self.kind!r}")
            object.__setattr__(self, "exponent", fixed)
        elif self.exponent is None or not self.exponent > 0:
            raise InputError(f"schedule.exponent must be positive for inverse_pow, got {self.exponent!r}")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "exponent", float(self.exponent))

    @classmethod
    def power(cls, q: float, scale: float = 1.0) -> StepSchedule:
        return cls("inverse_pow", scale, q)

    def alpha(self, k):
        return alpha(self, k)

    def alphas(self, k_max: int) -> np.ndarray:
        """``alpha_0 .. alpha_{k_max - 1}``."""
        return self.scale / np.arange(1, k_max + 1, dtype=float) ** self.exponent

    def to_dict(self) -> dict:
        return {"kind": self.kind, "scale": self.scale, "exponent": self.exponent}


def alpha(s: StepSchedule, k):
    ks = np.asarray(k, dtype=float)
    if np.any(ks < 0):
        raise InputError(f"iteration index must be >= 0, got {k}")
    out = s.scale / (ks + 1.0) ** s.exponent
    return float(out) if out.ndim == 0 else out


def persistence_check(s: StepSchedule) -> str:
    """Classify against ``sum alpha = inf`` and ``sum alpha^2 < inf`` by the exponent."""
    q = s.exponent
    if q > 1.0:
        return NEITHER
    if q > 0.5:
        return SATISFIES_BOTH
    return DIVERGING_SUM_ONLY
