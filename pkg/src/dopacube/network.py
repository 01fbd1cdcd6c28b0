"""Population containers, synaptic wiring and the fixed-step simulation loop.

The kernel is synchronous: every neuron advances in lockstep with the exact
exponential LIF update, spikes are bucketed into a delay ring buffer, and
delayed deliveries are re-weighted by the dopamine receptor gains in force
at delivery time.  One seeded counter-based RNG per network is split into a
wiring stream and a noise stream, so recording choices can never perturb
dynamics.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .neuromodulation import DopamineTrace, ReceptorGainParams, receptor_gain
from .neuron import NeuronParams
from .receptors import Receptor

_STATIC, _D1, _D2 = 0, 1, 2

_RECEPTOR_CLASS = {
    Receptor.GLUTAMATE: _STATIC,
    Receptor.GABA: _STATIC,
    Receptor.DOPAMINE_D1: _D1,
    Receptor.DOPAMINE_D2: _D2,
}


@dataclass(frozen=True)
class AllToAll:
    def describe(self) -> str:
        return "all_to_all"


@dataclass(frozen=True)
class FixedOutdegree:
    k: int

    def describe(self) -> str:
        return f"fixed_outdegree({self.k})"


@dataclass(frozen=True)
class PairwiseBernoulli:
    p: float

    def describe(self) -> str:
        return f"pairwise_bernoulli({self.p:g})"


ConnectionRule = AllToAll | FixedOutdegree | PairwiseBernoulli


@dataclass(frozen=True)
class PopulationSpec:
    name: str
    size: int
    params: NeuronParams = field(default_factory=NeuronParams)
    noise_rate: float = 0.0  # Hz of background Poisson drive per neuron
    noise_amplitude: float = 0.0  # pA per background event

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"population size must be >= 1, got {self.size}")
        if self.noise_rate < 0:
            raise ValueError(f"noise_rate must be >= 0, got {self.noise_rate}")


@dataclass(frozen=True)
class Population:
    """Handle to a registered population: a contiguous block of neuron ids."""

    name: str
    start: int
    size: int

    @property
    def slice(self) -> slice:
        return slice(self.start, self.start + self.size)


@dataclass(frozen=True)
class ConnectionInfo:
    """Per-projection metadata kept for topology dumps and tests."""

    source: str
    target: str
    receptor: Receptor
    rule: ConnectionRule
    weight: float
    delay: float
    count: int


@dataclass
class SpikeRecord:
    """Ordered spike events: (time ms, population name, neuron index)."""

    events: list[tuple[float, str, int]] = field(default_factory=list)

    def for_population(self, name: str) -> list[tuple[float, int]]:
        return [(t, idx) for t, pop, idx in self.events if pop == name]

    def times(self, name: str) -> np.ndarray:
        return np.array([t for t, pop, _ in self.events if pop == name], dtype=float)

    def count_in_window(self, name: str, t0: float, t1: float) -> int:
        return sum(1 for t, pop, _ in self.events if pop == name and t0 <= t < t1)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_ms", "population", "neuron"])
            for t, pop, idx in self.events:
                writer.writerow([f"{t:.1f}", pop, idx])

    @staticmethod
    def read_csv(path) -> "SpikeRecord":
        events = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["t_ms", "population", "neuron"]:
                raise ValueError(f"unexpected raster header: {header}")
            for row in reader:
                events.append((float(row[0]), row[1], int(row[2])))
        return SpikeRecord(events)


@dataclass(frozen=True)
class _Stimulus:
    population: Population
    t0: float
    t1: float
    rate: float
    amplitude: float


class Network:
    """A fixed-step spiking network with delayed, modulated deliveries."""

    def __init__(self, dt: float = 0.1, seed: int = 0):
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.dt = dt
        self.seed = seed
        wiring_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
        self._wiring_rng = np.random.default_rng(wiring_ss)
        self._noise_rng = np.random.default_rng(noise_ss)

        self.populations: dict[str, Population] = {}
        self._pop_specs: dict[str, PopulationSpec] = {}
        self.connections: list[ConnectionInfo] = []
        self.n_neurons = 0
        self._step = 0
        self._started = False

        # per-synapse growing lists, finalized into arrays before simulation
        self._syn_src: list[int] = []
        self._syn_tgt: list[int] = []
        self._syn_w: list[float] = []
        self._syn_dsteps: list[int] = []
        self._syn_cls: list[int] = []
        self._syn_receptor: list[Receptor] = []

        self._stimuli: list[_Stimulus] = []
        self._forced: dict[int, list[int]] = {}

        self.trace: DopamineTrace | None = None
        self.gains: ReceptorGainParams = ReceptorGainParams()

        self._log_steps: list[np.ndarray] = []
        self._log_gids: list[np.ndarray] = []

    # ------------------------------------------------------------------
    # construction

    def _require_not_started(self) -> None:
        if self._started:
            raise RuntimeError("network structure is frozen once simulation has started")

    def add_population(self, spec: PopulationSpec) -> Population:
        self._require_not_started()
        if spec.name in self.populations:
            raise ValueError(f"duplicate population name: {spec.name!r}")
        pop = Population(spec.name, self.n_neurons, spec.size)
        self.populations[spec.name] = pop
        self._pop_specs[spec.name] = spec
        self.n_neurons += spec.size
        return pop

    def _resolve(self, population: Population | str) -> Population:
        if isinstance(population, Population):
            population = population.name
        if population not in self.populations:
            raise ValueError(f"unknown population: {population!r}")
        return self.populations[population]

    def connect(
        self,
        source: Population | str,
        target: Population | str,
        rule: ConnectionRule,
        weight: float,
        delay: float,
        receptor: Receptor,
    ) -> int:
        """Instantiate synapses from every source neuron per the rule.

        Returns the number of synapses created.  Bernoulli and outdegree
        draws consume the network's wiring stream deterministically.
        """
        self._require_not_started()
        src = self._resolve(source)
        tgt = self._resolve(target)
        if receptor is Receptor.GABA:
            if weight >= 0:
                raise ValueError(f"GABA weight must be negative, got {weight}")
        elif weight <= 0:
            raise ValueError(f"{receptor.name} weight must be positive, got {weight}")
        if delay < self.dt - 1e-9:
            raise ValueError(f"delay must be >= dt ({self.dt} ms), got {delay}")
        dsteps = round(delay / self.dt)

        pairs_src: list[int] = []
        pairs_tgt: list[int] = []
        if isinstance(rule, AllToAll):
            for s in range(src.start, src.start + src.size):
                pairs_src.extend([s] * tgt.size)
                pairs_tgt.extend(range(tgt.start, tgt.start + tgt.size))
        elif isinstance(rule, FixedOutdegree):
            if not 1 <= rule.k <= tgt.size:
                raise ValueError(f"outdegree k must lie in [1, {tgt.size}], got {rule.k}")
            for s in range(src.start, src.start + src.size):
                chosen = self._wiring_rng.choice(tgt.size, size=rule.k, replace=False)
                pairs_src.extend([s] * rule.k)
                pairs_tgt.extend(int(c) + tgt.start for c in np.sort(chosen))
        elif isinstance(rule, PairwiseBernoulli):
            if not 0.0 <= rule.p <= 1.0:
                raise ValueError(f"connection probability must lie in [0, 1], got {rule.p}")
            mask = self._wiring_rng.random((src.size, tgt.size)) < rule.p
            ss, tt = np.nonzero(mask)
            pairs_src = list(ss + src.start)
            pairs_tgt = list(tt + tgt.start)
        else:
            raise TypeError(f"unknown connection rule: {rule!r}")

        n = len(pairs_src)
        self._syn_src.extend(int(s) for s in pairs_src)
        self._syn_tgt.extend(int(t) for t in pairs_tgt)
        self._syn_w.extend([weight] * n)
        self._syn_dsteps.extend([dsteps] * n)
        self._syn_cls.extend([_RECEPTOR_CLASS[receptor]] * n)
        self._syn_receptor.extend([receptor] * n)
        self.connections.append(
            ConnectionInfo(src.name, tgt.name, receptor, rule, weight, delay, n)
        )
        return n

    def add_stimulus(
        self,
        population: Population | str,
        window: tuple[float, float],
        rate: float,
        amplitude: float,
    ) -> None:
        """Add windowed Poisson drive to one population.

        Overlapping stimulus windows on the same population are rejected:
        the additive intent would be ambiguous.
        """
        pop = self._resolve(population)
        t0, t1 = window
        if t0 > t1:
            raise ValueError(f"stimulus window must satisfy t0 <= t1, got {window}")
        if rate < 0:
            raise ValueError(f"stimulus rate must be >= 0, got {rate}")
        for other in self._stimuli:
            if other.population.name == pop.name and t0 < other.t1 and other.t0 < t1:
                raise ValueError(
                    f"overlapping stimulus on population {pop.name!r}: "
                    f"{(other.t0, other.t1)} vs {(t0, t1)}"
                )
        self._stimuli.append(_Stimulus(pop, t0, t1, rate, amplitude))

    def force_spikes(self, population: Population | str, neuron_index: int, times) -> None:
        """Schedule unconditional spikes of one neuron (test/fixture plumbing)."""
        pop = self._resolve(population)
        if not 0 <= neuron_index < pop.size:
            raise ValueError(f"neuron index {neuron_index} out of range for {pop.name!r}")
        gid = pop.start + neuron_index
        for t in times:
            self._forced.setdefault(round(t / self.dt), []).append(gid)

    def set_neuromodulation(self, trace: DopamineTrace, gains: ReceptorGainParams) -> None:
        self.trace = trace
        self.gains = gains

    # ------------------------------------------------------------------
    # finalized state

    def _finalize(self) -> None:
        if self._started:
            return
        n = self.n_neurons
        self._v = np.empty(n)
        self._v_rest = np.empty(n)
        self._v_reset = np.empty(n)
        self._v_thr = np.empty(n)
        self._drive = np.empty(n)
        self._decay = np.empty(n)
        self._tref_steps = np.empty(n, dtype=np.int64)
        self._noise_lam = np.zeros(n)
        self._noise_amp = np.zeros(n)
        for name, pop in self.populations.items():
            spec = self._pop_specs[name]
            p = spec.params
            sl = pop.slice
            self._v[sl] = p.v_rest
            self._v_rest[sl] = p.v_rest
            self._v_reset[sl] = p.v_reset
            self._v_thr[sl] = p.v_threshold
            self._drive[sl] = p.drive_scale
            self._decay[sl] = math.exp(-self.dt / p.tau_m)
            self._tref_steps[sl] = round(p.t_refractory / self.dt)
            self._noise_lam[sl] = spec.noise_rate * self.dt * 1e-3
            self._noise_amp[sl] = spec.noise_amplitude
        self._refr_until_step = np.full(n, -1, dtype=np.int64)

        order = np.lexsort((np.asarray(self._syn_tgt), np.asarray(self._syn_src)))
        self.syn_src = np.asarray(self._syn_src, dtype=np.int64)[order]
        self.syn_tgt = np.asarray(self._syn_tgt, dtype=np.int64)[order]
        self.syn_w = np.asarray(self._syn_w, dtype=float)[order]
        self.syn_dsteps = np.asarray(self._syn_dsteps, dtype=np.int64)[order]
        self.syn_cls = np.asarray(self._syn_cls, dtype=np.int64)[order]
        self.syn_receptor = [self._syn_receptor[i] for i in order]
        self._indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self._indptr, self.syn_src + 1, 1)
        self._indptr = np.cumsum(self._indptr)

        ring = int(self.syn_dsteps.max()) + 1 if self.syn_dsteps.size else 1
        self._ring = ring
        self._buf = np.zeros((3, ring, n))
        self._stim_lam = np.zeros(n)
        self._stim_amp = np.zeros(n)
        self._started = True

    def ensure_built(self) -> None:
        """Finalize per-neuron and per-synapse arrays without advancing time."""
        self._finalize()

    def gain_for(self, receptor: Receptor, t: float) -> float:
        """Weight gain in force for the receptor class at delivery time t."""
        if self.trace is None:
            return 1.0
        level = self.trace.level(t)
        return receptor_gain(receptor, level, self.gains, self.trace.baseline)

    def _gains_at(self, t: float) -> tuple[float, float]:
        if self.trace is None:
            return 1.0, 1.0
        level = self.trace.level(t)
        base = self.trace.baseline
        return (
            receptor_gain(Receptor.DOPAMINE_D1, level, self.gains, base),
            receptor_gain(Receptor.DOPAMINE_D2, level, self.gains, base),
        )

    @property
    def now(self) -> float:
        """Current simulation time in ms."""
        return self._step * self.dt

    # ------------------------------------------------------------------
    # simulation

    def simulate(self, duration: float, recorders=None) -> SpikeRecord:
        """Advance the network by `duration` ms and return recorded spikes.

        `recorders` is an iterable of population names (default: all).
        Repeated calls continue from the current simulation time; the
        returned record covers only this call's interval.
        """
        if duration < 0:
            raise ValueError(f"duration must be >= 0, got {duration}")
        n_steps = round(duration / self.dt)
        if abs(n_steps * self.dt - duration) > 1e-9:
            raise ValueError(f"duration {duration} ms is not a multiple of dt {self.dt} ms")
        if recorders is None:
            recorded = set(self.populations)
        else:
            recorded = set(recorders)
            unknown = recorded - set(self.populations)
            if unknown:
                raise ValueError(f"unknown recorder population(s): {sorted(unknown)}")
        self._finalize()

        dt = self.dt
        buf = self._buf
        ring = self._ring
        indptr = self._indptr
        start = self._step
        log_start = len(self._log_steps)

        for k in range(start, start + n_steps):
            t = k * dt
            cur = k % ring
            g1, g2 = self._gains_at(t)
            current = buf[_STATIC, cur] + g1 * buf[_D1, cur] + g2 * buf[_D2, cur]
            buf[:, cur, :] = 0.0

            counts = self._noise_rng.poisson(self._noise_lam)
            current = current + counts * self._noise_amp
            self._stim_lam[:] = 0.0
            self._stim_amp[:] = 0.0
            for stim in self._stimuli:
                if stim.t0 <= t < stim.t1:
                    sl = stim.population.slice
                    self._stim_lam[sl] = stim.rate * dt * 1e-3
                    self._stim_amp[sl] = stim.amplitude
            stim_counts = self._noise_rng.poisson(self._stim_lam)
            current = current + stim_counts * self._stim_amp

            v_eq = self._v_rest + self._drive * current
            v_new = v_eq + (self._v - v_eq) * self._decay
            refr = self._refr_until_step > k
            v_new = np.where(refr, self._v_reset, v_new)
            spiked = ~refr & (v_new >= self._v_thr)
            forced = self._forced.get(k)
            if forced is not None:
                spiked[forced] = True
            ids = np.nonzero(spiked)[0]
            if ids.size:
                v_new[ids] = self._v_reset[ids]
                self._refr_until_step[ids] = k + self._tref_steps[ids]
                self._log_steps.append(np.full(ids.size, k, dtype=np.int64))
                self._log_gids.append(ids.astype(np.int64))
                parts = [
                    np.arange(indptr[s], indptr[s + 1])
                    for s in ids
                    if indptr[s + 1] > indptr[s]
                ]
                if parts:
                    sel = np.concatenate(parts)
                    slots = (k + self.syn_dsteps[sel]) % ring
                    np.add.at(buf, (self.syn_cls[sel], slots, self.syn_tgt[sel]), self.syn_w[sel])
            self._v = v_new

        self._step += n_steps
        return self._build_record(log_start, recorded)

    def _gid_population(self) -> list[Population]:
        pops = sorted(self.populations.values(), key=lambda p: p.start)
        return pops

    def _build_record(self, log_start: int, recorded: set[str]) -> SpikeRecord:
        events: list[tuple[float, str, int]] = []
        pops = self._gid_population()
        starts = np.array([p.start for p in pops])
        for steps, gids in zip(self._log_steps[log_start:], self._log_gids[log_start:]):
            pidx = np.searchsorted(starts, gids, side="right") - 1
            for step, gid, pi in zip(steps, gids, pidx):
                pop = pops[pi]
                if pop.name in recorded:
                    events.append((step * self.dt, pop.name, int(gid - pop.start)))
        events.sort(key=lambda e: (e[0], e[1], e[2]))
        return SpikeRecord(events)

    def spike_log(self) -> tuple[np.ndarray, np.ndarray]:
        """Full internal spike log (times ms, global neuron ids), all populations."""
        if not self._log_steps:
            return np.empty(0), np.empty(0, dtype=np.int64)
        steps = np.concatenate(self._log_steps)
        gids = np.concatenate(self._log_gids)
        return steps * self.dt, gids

    def full_record(self) -> SpikeRecord:
        """All spikes of all populations since t = 0."""
        return self._build_record(0, set(self.populations))
