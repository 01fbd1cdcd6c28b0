"""Dopamine volume transmission and receptor-class gain functions.

Dopamine is modelled as a single global level trace: a tonic baseline plus
exponentially decaying bursts.  The level re-weights D1- and D2-marked
pathways multiplicatively at spike-delivery time; plain glutamate and GABA
synapses are untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .receptors import Receptor


@dataclass(frozen=True)
class DopamineBurst:
    t_start: float  # ms
    amplitude: float  # level units, added on top of baseline at onset
    tau_decay: float  # ms

    def __post_init__(self) -> None:
        if self.amplitude < 0:
            raise ValueError(f"burst amplitude must be >= 0, got {self.amplitude}")
        if self.tau_decay <= 0:
            raise ValueError(f"burst tau_decay must be positive, got {self.tau_decay}")


@dataclass(frozen=True)
class DopamineTrace:
    baseline: float = 0.2
    bursts: tuple[DopamineBurst, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not 0.0 <= self.baseline <= 1.0:
            raise ValueError(f"baseline must lie in [0, 1], got {self.baseline}")
        object.__setattr__(self, "bursts", tuple(self.bursts))

    def level(self, t):
        return dopamine_level(self, t)


def dopamine_level(trace: DopamineTrace, t):
    """Dopamine level at time t (ms); accepts scalars or numpy arrays.

    Baseline plus the superposed decaying bursts that have started by t,
    clamped to [0, 1].
    """
    t = np.asarray(t, dtype=float)
    level = np.full_like(t, trace.baseline)
    for burst in trace.bursts:
        active = t >= burst.t_start
        level = level + np.where(
            active,
            burst.amplitude * np.exp(-np.where(active, t - burst.t_start, 0.0) / burst.tau_decay),
            0.0,
        )
    level = np.clip(level, 0.0, 1.0)
    return float(level) if level.ndim == 0 else level


@dataclass(frozen=True)
class ReceptorGainParams:
    """Slopes of the linear D1/D2 gain functions."""

    alpha_d1: float = 1.0
    beta_d2: float = 0.8

    def __post_init__(self) -> None:
        if self.alpha_d1 < 0:
            raise ValueError(f"alpha_d1 must be >= 0, got {self.alpha_d1}")
        if not 0.0 <= self.beta_d2 <= 1.0:
            raise ValueError(f"beta_d2 must lie in [0, 1], got {self.beta_d2}")


def receptor_gain(
    receptor: Receptor,
    level: float,
    params: ReceptorGainParams,
    baseline: float,
) -> float:
    """Multiplicative weight gain for one receptor class at the given level.

    Above-baseline dopamine boosts D1-marked pathways (gain >= 1) and
    suppresses D2-marked ones (gain <= 1, floored at 0), so the direct
    pathway is favoured.  Unmarked receptor classes pass through unchanged.
    """
    delta = level - baseline
    if receptor is Receptor.DOPAMINE_D1:
        return 1.0 + params.alpha_d1 * delta
    if receptor is Receptor.DOPAMINE_D2:
        return max(0.0, 1.0 - params.beta_d2 * delta)
    return 1.0
