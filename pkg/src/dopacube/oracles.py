"""Independent verification oracles and micro-network fixtures.

Everything here deliberately avoids the simulation kernel's internals: the
analytic LIF solution is evaluated in closed form, the inverse-mapping
check solves the normal equations directly, and fixtures replay hand-traced
micro-networks through the public network API and diff the spike times.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .network import Network, PopulationSpec, AllToAll
from .neuron import MOHM_PA_TO_MV, NeuronParams
from .receptors import Receptor


def analytic_lif(v0: float, current: float, params: NeuronParams, t: float) -> float:
    """Closed-form membrane potential after time t of constant current.

    V(t) = v_rest + r_m*I + (v0 - v_rest - r_m*I) * exp(-t / tau_m),
    ignoring threshold and refractoriness.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    v_inf = params.v_rest + params.r_m * MOHM_PA_TO_MV * current
    return v_inf + (v0 - v_inf) * math.exp(-t / params.tau_m)


def solve_normal_equations(matrix, rhs) -> np.ndarray:
    """Least-squares solve via explicit normal equations (A^T A) x = A^T b."""
    matrix = np.asarray(matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    gram = matrix.T @ matrix
    return np.linalg.solve(gram, matrix.T @ rhs)


@dataclass(frozen=True)
class FixtureSynapse:
    source: tuple[str, int]
    target: tuple[str, int]
    weight: float
    delay: float
    receptor: Receptor


@dataclass(frozen=True)
class MicroNetFixture:
    """An explicit micro-network with hand-computed expected spike times.

    The `notes` field records the hand trace that produced the expected
    times; expected spikes are (time ms, population, neuron index).
    """

    description: str
    duration: float
    dt: float = 0.1
    populations: tuple[tuple[str, int], ...] = ()
    params: NeuronParams = field(default_factory=NeuronParams)
    synapses: tuple[FixtureSynapse, ...] = ()
    forced_spikes: tuple[tuple[str, int, tuple[float, ...]], ...] = ()
    expected_spikes: tuple[tuple[float, str, int], ...] = ()
    notes: str = ""


def load_fixture(path) -> MicroNetFixture:
    with open(path) as fh:
        data = json.load(fh)
    params = NeuronParams(**data.get("params", {}))
    return MicroNetFixture(
        description=data["description"],
        duration=data["duration"],
        dt=data.get("dt", 0.1),
        populations=tuple((p["name"], p["size"]) for p in data["populations"]),
        params=params,
        synapses=tuple(
            FixtureSynapse(
                source=tuple(s["source"]),
                target=tuple(s["target"]),
                weight=s["weight"],
                delay=s["delay"],
                receptor=Receptor(s["receptor"]),
            )
            for s in data.get("synapses", [])
        ),
        forced_spikes=tuple(
            (f["population"], f["neuron"], tuple(f["times"]))
            for f in data.get("forced_spikes", [])
        ),
        expected_spikes=tuple((e[0], e[1], e[2]) for e in data.get("expected_spikes", [])),
        notes=data.get("notes", ""),
    )


@dataclass(frozen=True)
class FixtureResult:
    passed: bool
    first_divergence: str | None
    actual: tuple[tuple[float, str, int], ...]


def run_fixture(fixture: MicroNetFixture) -> FixtureResult:
    """Replay a fixture through the kernel and diff spikes at dt resolution."""
    net = Network(dt=fixture.dt, seed=0)
    for name, size in fixture.populations:
        net.add_population(PopulationSpec(name=name, size=size, params=fixture.params))
    for syn in fixture.synapses:
        # single-neuron populations wired pairwise via all-to-all on size-1 blocks
        src_pop, src_idx = syn.source
        tgt_pop, tgt_idx = syn.target
        if net.populations[src_pop].size != 1 or net.populations[tgt_pop].size != 1:
            raise ValueError("fixture synapses require size-1 populations")
        if src_idx != 0 or tgt_idx != 0:
            raise ValueError("fixture synapse indices must be 0 for size-1 populations")
        net.connect(src_pop, tgt_pop, AllToAll(), syn.weight, syn.delay, syn.receptor)
    for pop, idx, times in fixture.forced_spikes:
        net.force_spikes(pop, idx, times)

    record = net.simulate(fixture.duration)
    actual = tuple(record.events)
    expected = tuple(sorted(fixture.expected_spikes, key=lambda e: (e[0], e[1], e[2])))

    tolerance = fixture.dt / 2
    for i in range(max(len(actual), len(expected))):
        if i >= len(actual):
            return FixtureResult(False, f"missing expected spike {expected[i]}", actual)
        if i >= len(expected):
            return FixtureResult(False, f"unexpected extra spike {actual[i]}", actual)
        ta, pa, ia = actual[i]
        te, pe, ie = expected[i]
        if abs(ta - te) > tolerance or pa != pe or ia != ie:
            return FixtureResult(
                False,
                f"first divergence at event {i}: expected {expected[i]}, got {actual[i]}",
                actual,
            )
    return FixtureResult(True, None, actual)
