"""Experiment runner: dopamine-burst protocol, windowed analysis, report.

A run builds the pathway circuit, drives the cortex with a full-duration
Poisson stimulus, triggers an optional dopamine burst, and compares firing
rates, activity metrics and the classified affect between a baseline window
and an effect window.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .circuit import (
    CircuitConfig,
    DEFAULT_STIMULUS_AMPLITUDE,
    apply_stimulus,
    build_nigrostriatal,
)
from .cube import (
    AffectLabel,
    AffectTable,
    DEFAULT_INFLUENCE_MATRIX,
    MetricsConfig,
    MetricsVector,
    MonoamineCoordinate,
    classify_affect,
    compute_metrics,
)
from .network import Network, SpikeRecord
from .neuromodulation import DopamineBurst, DopamineTrace


@dataclass
class ExperimentConfig:
    circuit: CircuitConfig = field(default_factory=CircuitConfig)
    duration: float = 1000.0  # ms
    seed: int = 42
    burst: DopamineBurst | None = field(
        default_factory=lambda: DopamineBurst(t_start=400.0, amplitude=0.8, tau_decay=80.0)
    )
    baseline_window: tuple[float, float] = (100.0, 400.0)
    effect_window: tuple[float, float] = (400.0, 550.0)
    stimulus_rate: float = 200.0  # Hz of cortical drive over the full duration
    stimulus_amplitude: float = DEFAULT_STIMULUS_AMPLITUDE
    serotonin: float = 0.2
    noradrenaline: float = 0.7
    elevation_threshold: float = 1.3
    baseline_epsilon: float = 1e-3  # Hz floor for rate ratios
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    affect_table: AffectTable = field(default_factory=AffectTable)
    influence: np.ndarray = field(default_factory=lambda: DEFAULT_INFLUENCE_MATRIX.copy())
    out_dir: str = "out"

    def validate(self) -> None:
        self.circuit.validate()
        for name, window in (("baseline", self.baseline_window), ("effect", self.effect_window)):
            t0, t1 = window
            if not (0.0 <= t0 < t1 <= self.duration):
                raise ValueError(f"{name} window {window} must lie within [0, {self.duration}]")
        if self.burst is not None and self.effect_window[0] < self.burst.t_start:
            raise ValueError(
                f"effect window {self.effect_window} must start at or after the "
                f"burst onset {self.burst.t_start} ms"
            )
        if self.stimulus_rate < 0:
            raise ValueError(f"stimulus rate must be >= 0, got {self.stimulus_rate}")

    def dopamine_trace(self) -> DopamineTrace:
        bursts = (self.burst,) if self.burst is not None else ()
        return replace(self.circuit.dopamine, bursts=bursts)

    def without_burst(self) -> "ExperimentConfig":
        return replace(self, burst=None)


@dataclass
class Report:
    """Windowed comparison of one run; `schema.md` documents the JSON form."""

    seed: int
    duration: float
    burst_enabled: bool
    baseline_window: tuple[float, float]
    effect_window: tuple[float, float]
    baseline_rates: dict[str, float]
    effect_rates: dict[str, float]
    rate_ratios: dict[str, float]
    metrics_baseline: MetricsVector
    metrics_effect: MetricsVector
    coordinate_baseline: MonoamineCoordinate
    coordinate_effect: MonoamineCoordinate
    affect_baseline: AffectLabel
    affect_effect: AffectLabel
    elevation_threshold: float
    elevation_pass: bool

    def to_dict(self) -> dict:
        rnd = lambda x: round(float(x), 6)
        coord = lambda c: {
            "serotonin": rnd(c.serotonin),
            "dopamine": rnd(c.dopamine),
            "noradrenaline": rnd(c.noradrenaline),
        }
        metrics = lambda m: {name: rnd(value) for name, value in zip(
            ("computing_utilization", "computing_distribution", "memory_distribution",
             "storage_volume", "storage_bandwidth"),
            m.as_array(),
        )}
        return {
            "seed": self.seed,
            "duration_ms": rnd(self.duration),
            "burst_enabled": self.burst_enabled,
            "baseline_window_ms": [rnd(self.baseline_window[0]), rnd(self.baseline_window[1])],
            "effect_window_ms": [rnd(self.effect_window[0]), rnd(self.effect_window[1])],
            "baseline_rates_hz": {k: rnd(v) for k, v in sorted(self.baseline_rates.items())},
            "effect_rates_hz": {k: rnd(v) for k, v in sorted(self.effect_rates.items())},
            "rate_ratios": {k: rnd(v) for k, v in sorted(self.rate_ratios.items())},
            "metrics_baseline": metrics(self.metrics_baseline),
            "metrics_effect": metrics(self.metrics_effect),
            "coordinate_baseline": coord(self.coordinate_baseline),
            "coordinate_effect": coord(self.coordinate_effect),
            "affect_baseline": self.affect_baseline.value,
            "affect_effect": self.affect_effect.value,
            "elevation_threshold": rnd(self.elevation_threshold),
            "elevation_pass": self.elevation_pass,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @staticmethod
    def from_dict(data: dict) -> "Report":
        mv = lambda d: MetricsVector(**d)
        mc = lambda d: MonoamineCoordinate(**d)
        return Report(
            seed=data["seed"],
            duration=data["duration_ms"],
            burst_enabled=data["burst_enabled"],
            baseline_window=tuple(data["baseline_window_ms"]),
            effect_window=tuple(data["effect_window_ms"]),
            baseline_rates=dict(data["baseline_rates_hz"]),
            effect_rates=dict(data["effect_rates_hz"]),
            rate_ratios=dict(data["rate_ratios"]),
            metrics_baseline=mv(data["metrics_baseline"]),
            metrics_effect=mv(data["metrics_effect"]),
            coordinate_baseline=mc(data["coordinate_baseline"]),
            coordinate_effect=mc(data["coordinate_effect"]),
            affect_baseline=AffectLabel(data["affect_baseline"]),
            affect_effect=AffectLabel(data["affect_effect"]),
            elevation_threshold=data["elevation_threshold"],
            elevation_pass=data["elevation_pass"],
        )

    @staticmethod
    def from_json(text: str) -> "Report":
        return Report.from_dict(json.loads(text))


@dataclass
class ExperimentResult:
    report: Report
    record: SpikeRecord  # all populations, full duration
    net: Network
    config: ExperimentConfig


def window_rate(record: SpikeRecord, net: Network, population: str, window: tuple[float, float]) -> float:
    """Mean per-neuron rate (Hz) of one population within the window."""
    t0, t1 = window
    count = record.count_in_window(population, t0, t1)
    size = net.populations[population].size
    return count / size / ((t1 - t0) * 1e-3)


def _window_dopamine(trace: DopamineTrace, window: tuple[float, float], dt: float) -> float:
    t0, t1 = window
    grid = np.arange(t0, t1, dt)
    return float(np.mean(trace.level(grid)))


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute the burst protocol and compute the windowed report."""
    config.validate()
    trace = config.dopamine_trace()
    circuit = replace(config.circuit, dopamine=trace)
    net = build_nigrostriatal(circuit, seed=config.seed)
    apply_stimulus(
        net, "Cortex", (0.0, config.duration), config.stimulus_rate, config.stimulus_amplitude
    )
    record = net.simulate(config.duration)

    baseline_rates = {
        name: window_rate(record, net, name, config.baseline_window) for name in net.populations
    }
    effect_rates = {
        name: window_rate(record, net, name, config.effect_window) for name in net.populations
    }
    ratios = {
        name: effect_rates[name] / max(baseline_rates[name], config.baseline_epsilon)
        for name in net.populations
    }

    metrics_baseline = compute_metrics(record, net, config.baseline_window, config.metrics)
    metrics_effect = compute_metrics(record, net, config.effect_window, config.metrics)

    coord = lambda window: MonoamineCoordinate(
        serotonin=config.serotonin,
        dopamine=_window_dopamine(trace, window, net.dt),
        noradrenaline=config.noradrenaline,
    )
    coordinate_baseline = coord(config.baseline_window)
    coordinate_effect = coord(config.effect_window)

    elevation_pass = (
        ratios["Thalamus"] > config.elevation_threshold
        and ratios["MotorCortex"] > config.elevation_threshold
    )

    report = Report(
        seed=config.seed,
        duration=config.duration,
        burst_enabled=config.burst is not None,
        baseline_window=config.baseline_window,
        effect_window=config.effect_window,
        baseline_rates=baseline_rates,
        effect_rates=effect_rates,
        rate_ratios=ratios,
        metrics_baseline=metrics_baseline,
        metrics_effect=metrics_effect,
        coordinate_baseline=coordinate_baseline,
        coordinate_effect=coordinate_effect,
        affect_baseline=classify_affect(coordinate_baseline, config.affect_table),
        affect_effect=classify_affect(coordinate_effect, config.affect_table),
        elevation_threshold=config.elevation_threshold,
        elevation_pass=elevation_pass,
    )
    return ExperimentResult(report=report, record=record, net=net, config=config)


RATE_BIN_MS = 10.0


def binned_rates(record: SpikeRecord, net: Network, duration: float) -> list[tuple[float, str, float]]:
    """Per-population rates (Hz) in fixed 10 ms bins over [0, duration)."""
    n_bins = int(round(duration / RATE_BIN_MS))
    counts = {name: np.zeros(n_bins, dtype=int) for name in net.populations}
    for t, name, _ in record.events:
        b = int(t // RATE_BIN_MS)
        if 0 <= b < n_bins:
            counts[name][b] += 1
    rows = []
    for b in range(n_bins):
        for name in sorted(net.populations):
            size = net.populations[name].size
            rate = counts[name][b] / size / (RATE_BIN_MS * 1e-3)
            rows.append((b * RATE_BIN_MS, name, rate))
    return rows


def write_outputs(result: ExperimentResult, out_dir) -> list[Path]:
    """Write raster/rates/topology CSVs, the JSON report and figures."""
    from . import plotting

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    written = []

    def _write(name: str, writer) -> None:
        path = out / name
        try:
            writer(path)
        except OSError as exc:
            raise OSError(f"failed writing {path}: {exc}") from exc
        written.append(path)

    _write("raster.csv", result.record.write_csv)
    _write("rates.csv", lambda p: _write_rates_csv(p, result))
    _write("report.json", lambda p: p.write_text(result.report.to_json()))
    _write("topology.csv", lambda p: _write_topology_csv(p, result.net))
    _write("raster.png", lambda p: plotting.plot_raster(result, p))
    _write("rates.png", lambda p: plotting.plot_rates(result, p))
    return written


def _write_rates_csv(path: Path, result: ExperimentResult) -> None:
    rows = binned_rates(result.record, result.net, result.config.duration)
    with open(path, "w", newline="") as fh:
        fh.write("bin_start_ms,population,rate_hz\n")
        for bin_start, name, rate in rows:
            fh.write(f"{bin_start:.1f},{name},{rate:.6f}\n")


def _write_topology_csv(path: Path, net: Network) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("source,target,receptor,rule,weight,delay\n")
        for conn in net.connections:
            fh.write(
                f"{conn.source},{conn.target},{conn.receptor.name},"
                f"{conn.rule.describe()},{conn.weight:g},{conn.delay:g}\n"
            )
