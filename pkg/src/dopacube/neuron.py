"""Leaky integrate-and-fire point neurons with exact exponential stepping.

The membrane equation

    tau_m * dV/dt = -(V - v_rest) + r_m * I

is advanced with the closed-form solution over each step, so the update is
exact for piecewise-constant input current and unconditionally stable for
any step size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

# r_m is specified in megaohm and currents in picoampere; their product is
# microvolt, so a factor of 1e-3 brings the drive term to millivolt.
MOHM_PA_TO_MV = 1e-3


@dataclass(frozen=True)
class NeuronParams:
    """Membrane constants of one LIF cell.

    Units: potentials in mV, tau_m and t_refractory in ms, r_m in MOhm.
    """

    v_rest: float = -70.0
    v_threshold: float = -55.0
    v_reset: float = -70.0
    tau_m: float = 10.0
    r_m: float = 100.0
    t_refractory: float = 2.0

    def __post_init__(self) -> None:
        if not (self.v_reset <= self.v_rest < self.v_threshold):
            raise ValueError(
                f"require v_reset <= v_rest < v_threshold, got "
                f"{self.v_reset}, {self.v_rest}, {self.v_threshold}"
            )
        if self.tau_m <= 0:
            raise ValueError(f"tau_m must be positive, got {self.tau_m}")
        if self.r_m <= 0:
            raise ValueError(f"r_m must be positive, got {self.r_m}")
        if self.t_refractory < 0:
            raise ValueError(f"t_refractory must be >= 0, got {self.t_refractory}")

    @property
    def drive_scale(self) -> float:
        """mV of steady-state depolarisation per pA of input current."""
        return self.r_m * MOHM_PA_TO_MV


@dataclass(frozen=True)
class NeuronState:
    """Mutable-by-replacement membrane state of one cell."""

    v: float
    refractory_until: float = -math.inf
    last_spike: float | None = None


def resting_state(params: NeuronParams) -> NeuronState:
    return NeuronState(v=params.v_rest)


def step_neuron(
    state: NeuronState,
    params: NeuronParams,
    input_current: float,
    t: float,
    dt: float,
) -> tuple[NeuronState, bool]:
    """Advance one neuron by one step of length dt starting at time t.

    input_current (pA) is held constant over the step.  Returns the new
    state and whether a spike was emitted.  During refractoriness the
    membrane is clamped to v_reset and no spike can be emitted.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not math.isfinite(input_current):
        raise ValueError(f"non-finite input current: {input_current}")
    if not math.isfinite(state.v):
        raise ValueError(f"non-finite membrane potential: {state.v}")

    if t < state.refractory_until:
        return replace(state, v=params.v_reset), False

    v_eq = params.v_rest + params.drive_scale * input_current
    v_new = v_eq + (state.v - v_eq) * math.exp(-dt / params.tau_m)

    if state.v >= params.v_threshold or v_new >= params.v_threshold:
        new_state = NeuronState(
            v=params.v_reset,
            refractory_until=t + params.t_refractory,
            last_spike=t,
        )
        return new_state, True

    return replace(state, v=v_new), False


def poisson_generator(rate: float, dt: float, rng: np.random.Generator) -> int:
    """Number of Poisson events of the given rate (Hz) within one dt (ms)."""
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return int(rng.poisson(rate * dt * 1e-3))
