"""Builder for the nigrostriatal pathway network.

The canonical edge set has a direct chain (cortex excites D1 striatum,
which inhibits the GPi/SNr complex, disinhibiting the thalamus) and an
indirect chain (cortex excites D2 striatum, which inhibits GPe, releasing
the STN to excite GPi/SNr).  Dopamine favours the direct chain through the
D1/D2 receptor marks on the corticostriatal edges.  Population sizes,
connection probability and weights are desk-scale calibration choices.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .network import Network, PairwiseBernoulli, Population, PopulationSpec
from .neuromodulation import DopamineTrace, ReceptorGainParams
from .neuron import NeuronParams
from .receptors import Receptor

POPULATION_NAMES = (
    "Cortex",
    "Striatum_D1",
    "Striatum_D2",
    "GPe",
    "GPi_SNr",
    "STN",
    "SNc",
    "Thalamus",
    "MotorCortex",
)

DEFAULT_SIZES = {
    "Cortex": 400,
    "Striatum_D1": 200,
    "Striatum_D2": 200,
    "GPe": 150,
    "GPi_SNr": 160,
    "STN": 120,
    "SNc": 40,
    "Thalamus": 200,
    "MotorCortex": 400,
}

# Background Poisson drive per population: (rate Hz, amplitude pA).  The
# tonic GPi/SNr drive keeps the thalamus under inhibition at rest so the
# dopamine burst has something to release.
DEFAULT_NOISE = {
    "Cortex": (850.0, 1000.0),
    "Striatum_D1": (750.0, 1000.0),
    "Striatum_D2": (750.0, 1000.0),
    "GPe": (1200.0, 1000.0),
    "GPi_SNr": (1400.0, 1000.0),
    "STN": (1000.0, 1000.0),
    "SNc": (850.0, 1000.0),
    "Thalamus": (1400.0, 1000.0),
    "MotorCortex": (850.0, 1000.0),
}


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    receptor: Receptor
    weight: float  # pA, sign fixed by receptor class
    p: float | None = None  # connection probability; None uses the config default


# Direct chain plus the motor output edges.  High-impact edges use a denser
# wiring with weaker weights so that single spikes perturb the target less.
DIRECT_EDGES = (
    Edge("Cortex", "Striatum_D1", Receptor.DOPAMINE_D1, 800.0),
    Edge("Striatum_D1", "GPi_SNr", Receptor.GABA, -640.0, p=0.3),
    Edge("GPi_SNr", "Thalamus", Receptor.GABA, -320.0, p=0.3),
    Edge("Thalamus", "Cortex", Receptor.GLUTAMATE, 75.0),
    Edge("Thalamus", "MotorCortex", Receptor.GLUTAMATE, 230.0, p=0.3),
    Edge("Cortex", "MotorCortex", Receptor.GLUTAMATE, 400.0),
)

# Indirect chain.
INDIRECT_EDGES = (
    Edge("Cortex", "Striatum_D2", Receptor.DOPAMINE_D2, 800.0),
    Edge("Striatum_D2", "GPe", Receptor.GABA, -525.0, p=0.3),
    Edge("GPe", "STN", Receptor.GABA, -640.0),
    Edge("STN", "GPi_SNr", Receptor.GLUTAMATE, 600.0, p=0.3),
)

DEFAULT_EDGES = DIRECT_EDGES + INDIRECT_EDGES


@dataclass(frozen=True)
class EdgeOverride:
    """Per-edge tuning hook; weight 0 or p 0 removes the edge entirely."""

    weight: float | None = None
    p: float | None = None
    delay: float | None = None


@dataclass(frozen=True)
class StimulusSpec:
    population: str
    t0: float
    t1: float
    rate: float
    amplitude: float


@dataclass
class CircuitConfig:
    sizes: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_SIZES))
    noise: dict[str, tuple[float, float]] = field(default_factory=lambda: dict(DEFAULT_NOISE))
    neuron_params: NeuronParams = field(default_factory=NeuronParams)
    connection_p: float = 0.1
    delay: float = 1.0
    dt: float = 0.1
    edge_overrides: dict[tuple[str, str], EdgeOverride] = field(default_factory=dict)
    # hook for additional, non-default edges (feed-back loops etc.)
    extra_edges: list[Edge] = field(default_factory=list)
    dopamine: DopamineTrace = field(default_factory=DopamineTrace)
    gains: ReceptorGainParams = field(default_factory=ReceptorGainParams)
    stimuli: list[StimulusSpec] = field(default_factory=list)

    def validate(self) -> None:
        for name in POPULATION_NAMES:
            if name not in self.sizes:
                raise ValueError(f"missing size for population {name!r}")
            if self.sizes[name] < 1:
                raise ValueError(f"size of {name!r} must be >= 1, got {self.sizes[name]}")
        known = {(e.source, e.target) for e in DEFAULT_EDGES}
        for key in self.edge_overrides:
            if key not in known:
                raise ValueError(f"override names unknown edge {key[0]} -> {key[1]}")

    def without_indirect(self) -> "CircuitConfig":
        """Copy with the indirect chain severed (direct-only circuit)."""
        overrides = dict(self.edge_overrides)
        for e in INDIRECT_EDGES:
            overrides[(e.source, e.target)] = EdgeOverride(p=0.0)
        return replace(self, edge_overrides=overrides)

    def without_direct(self) -> "CircuitConfig":
        """Copy with the corticostriatal D1 entry severed (indirect-only)."""
        overrides = dict(self.edge_overrides)
        for e in DIRECT_EDGES[:2]:
            overrides[(e.source, e.target)] = EdgeOverride(p=0.0)
        return replace(self, edge_overrides=overrides)


def build_nigrostriatal(config: CircuitConfig, seed: int = 0) -> Network:
    """Instantiate the pathway network for the given config and seed."""
    config.validate()
    net = Network(dt=config.dt, seed=seed)
    for name in POPULATION_NAMES:
        rate, amp = config.noise.get(name, (0.0, 0.0))
        net.add_population(
            PopulationSpec(
                name=name,
                size=config.sizes[name],
                params=config.neuron_params,
                noise_rate=rate,
                noise_amplitude=amp,
            )
        )

    for edge in DEFAULT_EDGES:
        override = config.edge_overrides.get((edge.source, edge.target), EdgeOverride())
        weight = override.weight if override.weight is not None else edge.weight
        default_p = edge.p if edge.p is not None else config.connection_p
        p = override.p if override.p is not None else default_p
        delay = override.delay if override.delay is not None else config.delay
        if weight == 0.0 or p == 0.0:
            continue  # silenced edge
        net.connect(edge.source, edge.target, PairwiseBernoulli(p), weight, delay, edge.receptor)

    for edge in config.extra_edges:
        net.connect(
            edge.source,
            edge.target,
            PairwiseBernoulli(edge.p if edge.p is not None else config.connection_p),
            edge.weight,
            config.delay,
            edge.receptor,
        )

    net.set_neuromodulation(config.dopamine, config.gains)
    for stim in config.stimuli:
        apply_stimulus(net, stim.population, (stim.t0, stim.t1), stim.rate, stim.amplitude)
    return net


DEFAULT_STIMULUS_AMPLITUDE = 1000.0


def apply_stimulus(
    net: Network,
    population: Population | str,
    window: tuple[float, float],
    rate: float,
    amplitude: float = DEFAULT_STIMULUS_AMPLITUDE,
) -> None:
    """Add windowed Poisson drive to a population; empty windows are no-ops."""
    net.add_stimulus(population, window, rate, amplitude)
