"""Monoamine emotion cube: affect classification and the bidirectional
mapping between monoamine levels and five computing-system parameters.

The three monoamine axes (serotonin, dopamine, noradrenaline) span a unit
cube whose eight octants carry the eight basic affects.  A 5x3 influence
matrix maps deviations from the cube's neutral centre onto signed deltas of
the computing-system metrics; the inverse direction is a least-squares
solve.  `compute_metrics` derives the same five parameters from simulated
spiking activity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .network import Network, SpikeRecord

NEUTRAL = (0.5, 0.5, 0.5)

METRIC_NAMES = (
    "computing_utilization",
    "computing_distribution",
    "memory_distribution",
    "storage_volume",
    "storage_bandwidth",
)

MONOAMINE_NAMES = ("serotonin", "dopamine", "noradrenaline")


class AffectLabel(Enum):
    ENJOYMENT_JOY = "ENJOYMENT_JOY"
    INTEREST_EXCITEMENT = "INTEREST_EXCITEMENT"
    SURPRISE = "SURPRISE"
    ANGER_RAGE = "ANGER_RAGE"
    DISGUST = "DISGUST"
    DISTRESS_ANGUISH = "DISTRESS_ANGUISH"
    FEAR_TERROR = "FEAR_TERROR"
    SHAME_HUMILIATION = "SHAME_HUMILIATION"


@dataclass(frozen=True)
class MonoamineCoordinate:
    serotonin: float
    dopamine: float
    noradrenaline: float

    def __post_init__(self) -> None:
        for name in MONOAMINE_NAMES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} level must lie in [0, 1], got {value}")

    def as_array(self) -> np.ndarray:
        return np.array([self.serotonin, self.dopamine, self.noradrenaline])

    def octant(self) -> tuple[bool, bool, bool]:
        """High/low flag per axis; a value of exactly 0.5 counts as LOW."""
        return tuple(v > 0.5 for v in self.as_array())


@dataclass
class MetricsVector:
    """The five computing-system parameters (also used for signed deltas)."""

    computing_utilization: float = 0.0
    computing_distribution: float = 0.0
    memory_distribution: float = 0.0
    storage_volume: float = 0.0
    storage_bandwidth: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in METRIC_NAMES])

    @staticmethod
    def from_array(values) -> "MetricsVector":
        values = np.asarray(values, dtype=float)
        if values.shape != (5,):
            raise ValueError(f"expected 5 metric values, got shape {values.shape}")
        return MetricsVector(**dict(zip(METRIC_NAMES, values)))

    def validate(self) -> "MetricsVector":
        if not 0.0 <= self.computing_utilization <= 1.0:
            raise ValueError(f"utilization out of [0, 1]: {self.computing_utilization}")
        for name in METRIC_NAMES[1:]:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        return self


# Octant keys are (serotonin-high, dopamine-high, noradrenaline-high).
# Fear sits on the high-dopamine, high-noradrenaline vertex (fight-or-flight
# axis); the table is loadable configuration, not a hard-wired constant.
DEFAULT_AFFECT_TABLE: dict[tuple[bool, bool, bool], AffectLabel] = {
    (False, False, False): AffectLabel.SHAME_HUMILIATION,
    (False, False, True): AffectLabel.DISTRESS_ANGUISH,
    (False, True, False): AffectLabel.ANGER_RAGE,
    (False, True, True): AffectLabel.FEAR_TERROR,
    (True, False, False): AffectLabel.DISGUST,
    (True, False, True): AffectLabel.SURPRISE,
    (True, True, False): AffectLabel.ENJOYMENT_JOY,
    (True, True, True): AffectLabel.INTEREST_EXCITEMENT,
}


@dataclass(frozen=True)
class AffectTable:
    mapping: dict[tuple[bool, bool, bool], AffectLabel] = field(
        default_factory=lambda: dict(DEFAULT_AFFECT_TABLE)
    )

    def __post_init__(self) -> None:
        octants = {(s, d, n) for s in (False, True) for d in (False, True) for n in (False, True)}
        if set(self.mapping) != octants:
            raise ValueError("affect table must cover exactly the 8 octants")
        if len(set(self.mapping.values())) != 8:
            raise ValueError("affect table must assign 8 distinct labels")


def classify_affect(coord: MonoamineCoordinate, table: AffectTable | None = None) -> AffectLabel:
    """Affect of the cube octant containing the coordinate."""
    if table is None:
        table = AffectTable()
    return table.mapping[coord.octant()]


# Rows follow METRIC_NAMES, columns MONOAMINE_NAMES.  Nonzero entries sit
# exactly where a monoamine influences a metric: utilization by serotonin
# and dopamine, both distribution metrics by noradrenaline, storage volume
# by serotonin and dopamine, storage bandwidth by serotonin.  All influences
# are positive; magnitudes are equal-weight defaults.
DEFAULT_INFLUENCE_MATRIX = np.array(
    [
        [1.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
        [1.0, 0.0, 0.0],
    ]
)


def _check_matrix(influence: np.ndarray) -> np.ndarray:
    influence = np.asarray(influence, dtype=float)
    if influence.shape != (5, 3):
        raise ValueError(f"influence matrix must be 5x3, got shape {influence.shape}")
    return influence


def monoamines_to_metric_deltas(
    coord: MonoamineCoordinate, influence: np.ndarray | None = None
) -> MetricsVector:
    """Signed metric deltas caused by a deviation from the neutral centre."""
    if influence is None:
        influence = DEFAULT_INFLUENCE_MATRIX
    influence = _check_matrix(influence)
    deltas = influence @ (coord.as_array() - np.array(NEUTRAL))
    return MetricsVector.from_array(deltas)


def metric_deltas_to_monoamines(
    deltas: MetricsVector, influence: np.ndarray | None = None
) -> MonoamineCoordinate:
    """Least-squares inverse of the influence mapping, clamped to the cube."""
    if influence is None:
        influence = DEFAULT_INFLUENCE_MATRIX
    influence = _check_matrix(influence)
    if np.linalg.matrix_rank(influence) < 3:
        raise ValueError("influence matrix is rank-deficient; inverse mapping is ambiguous")
    x, *_ = np.linalg.lstsq(influence, deltas.as_array(), rcond=None)
    levels = np.clip(x + np.array(NEUTRAL), 0.0, 1.0)
    return MonoamineCoordinate(*levels)


@dataclass(frozen=True)
class MetricsConfig:
    """Normalisation constants for spiking-activity metrics."""

    rate_ceiling_hz: float = 60.0  # per-neuron rate mapping to utilization 1.0
    # pA of delivered charge per second above which a synapse counts as a
    # persistent memory trace
    persistence_threshold: float = 6000.0


def compute_metrics(
    record: SpikeRecord,
    net: Network,
    window: tuple[float, float],
    config: MetricsConfig | None = None,
) -> MetricsVector:
    """Derive the five computing-system parameters from spiking activity.

    Utilization and the distribution metrics come from windowed firing
    rates and spike-buffer occupancies; the storage metrics count synapses
    by their delivered charge (weight magnitude times the receptor gain in
    force at delivery time).
    """
    if config is None:
        config = MetricsConfig()
    t0, t1 = window
    if not t0 < t1:
        raise ValueError(f"metrics window must satisfy t0 < t1, got {window}")
    duration_s = (t1 - t0) * 1e-3
    steps = max(1, round((t1 - t0) / net.dt))

    net.ensure_built()
    pops = sorted(net.populations.values(), key=lambda p: p.start)
    counts = {p.name: 0 for p in pops}
    spike_times: list[float] = []
    spike_gids: list[int] = []
    for t, name, idx in record.events:
        if t0 <= t < t1:
            counts[name] += 1
            spike_times.append(t)
            spike_gids.append(net.populations[name].start + idx)

    total_spikes = sum(counts.values())
    mean_rate = total_spikes / net.n_neurons / duration_s
    utilization = min(1.0, mean_rate / config.rate_ceiling_hz)

    norm_rates = np.array(
        [counts[p.name] / p.size / duration_s / config.rate_ceiling_hz for p in pops]
    )
    computing_distribution = float(np.var(norm_rates))
    occupancy = np.array([counts[p.name] / (p.size * steps) for p in pops])
    memory_distribution = float(np.var(occupancy))

    n_syn = net.syn_src.size
    charge = np.zeros(n_syn)
    touched = np.zeros(n_syn, dtype=bool)
    if spike_gids and n_syn:
        gids = np.asarray(spike_gids, dtype=np.int64)
        times = np.asarray(spike_times)
        starts = net._indptr[gids]
        fan = net._indptr[gids + 1] - starts
        total = int(fan.sum())
        if total:
            cum = np.cumsum(fan)
            sel = np.arange(total) + np.repeat(starts - np.concatenate(([0], cum[:-1])), fan)
            t_del = np.repeat(times, fan) + net.syn_dsteps[sel] * net.dt
            in_window = (t_del >= t0) & (t_del < t1)
            sel = sel[in_window]
            t_del = t_del[in_window]
            if net.trace is not None:
                level = net.trace.level(t_del)
                delta = level - net.trace.baseline
                g1 = 1.0 + net.gains.alpha_d1 * delta
                g2 = np.maximum(0.0, 1.0 - net.gains.beta_d2 * delta)
            else:
                g1 = g2 = np.ones_like(t_del)
            cls = net.syn_cls[sel]
            gain = np.where(cls == 1, g1, np.where(cls == 2, g2, 1.0))
            np.add.at(charge, sel, np.abs(net.syn_w[sel]) * gain)
            touched[sel] = True

    storage_volume = int(np.count_nonzero(charge / duration_s > config.persistence_threshold))
    storage_bandwidth = int(np.count_nonzero(touched))

    return MetricsVector(
        computing_utilization=utilization,
        computing_distribution=computing_distribution,
        memory_distribution=memory_distribution,
        storage_volume=float(storage_volume),
        storage_bandwidth=float(storage_bandwidth),
    ).validate()
