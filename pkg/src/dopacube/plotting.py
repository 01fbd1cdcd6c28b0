"""Matplotlib figure output for experiment runs (headless Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_raster(result, path) -> None:
    """Spike raster of all populations, neurons stacked by global index."""
    net = result.net
    pops = sorted(net.populations.values(), key=lambda p: p.start)
    fig, ax = plt.subplots(figsize=(10, 6))
    cmap = plt.get_cmap("tab10")
    for i, pop in enumerate(pops):
        pts = result.record.for_population(pop.name)
        if pts:
            times, idx = zip(*pts)
            ax.scatter(times, np.asarray(idx) + pop.start, s=1.5, color=cmap(i % 10), label=pop.name)
        else:
            ax.scatter([], [], s=1.5, color=cmap(i % 10), label=pop.name)
    burst = result.config.burst
    if burst is not None:
        ax.axvline(burst.t_start, color="k", linestyle="--", linewidth=1, label="dopamine burst")
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("neuron (global index)")
    ax.set_xlim(0, result.config.duration)
    ax.legend(loc="upper right", fontsize=7, markerscale=4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_rates(result, path) -> None:
    """Binned per-population firing rates with the analysis windows shaded."""
    from .harness import RATE_BIN_MS, binned_rates

    rows = binned_rates(result.record, result.net, result.config.duration)
    series: dict[str, list[float]] = {}
    bins: list[float] = []
    for bin_start, name, rate in rows:
        series.setdefault(name, []).append(rate)
        if name == sorted(result.net.populations)[0]:
            bins.append(bin_start)
    fig, ax = plt.subplots(figsize=(10, 5))
    for name, rates in sorted(series.items()):
        lw = 2.0 if name in ("Thalamus", "MotorCortex") else 0.8
        ax.plot(bins, rates, linewidth=lw, label=name)
    ax.axvspan(*result.config.baseline_window, color="0.9", label="baseline window")
    ax.axvspan(*result.config.effect_window, color="gold", alpha=0.25, label="effect window")
    burst = result.config.burst
    if burst is not None:
        ax.axvline(burst.t_start, color="k", linestyle="--", linewidth=1)
    ax.set_xlabel(f"time (ms), {RATE_BIN_MS:g} ms bins")
    ax.set_ylabel("rate (Hz)")
    ax.legend(loc="upper right", fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
