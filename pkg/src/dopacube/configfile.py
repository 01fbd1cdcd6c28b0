"""INI-style experiment configuration files.

Every key is optional; omitted keys keep the built-in defaults.  The full
schema with the default values can be generated with `default_config_text`
(or `dopacube run --dump-config`).
"""

from __future__ import annotations

import configparser

from .circuit import (
    CircuitConfig,
    DEFAULT_EDGES,
    EdgeOverride,
    POPULATION_NAMES,
    StimulusSpec,
)
from .cube import (
    AffectLabel,
    AffectTable,
    METRIC_NAMES,
    MetricsConfig,
)
from .harness import ExperimentConfig
from .neuromodulation import DopamineBurst, DopamineTrace, ReceptorGainParams
from .neuron import NeuronParams

_OCTANT_KEYS = [
    "".join("H" if flag else "L" for flag in (s, d, n))
    for s in (False, True)
    for d in (False, True)
    for n in (False, True)
]


def _octant_from_key(key: str) -> tuple[bool, bool, bool]:
    key = key.upper()
    if len(key) != 3 or any(c not in "LH" for c in key):
        raise ValueError(f"affect table octant must match [LH][LH][LH], got {key!r}")
    return tuple(c == "H" for c in key)


def _floats(raw: str) -> list[float]:
    return [float(part.strip()) for part in raw.split(",")]


def load_config(path) -> ExperimentConfig:
    """Read an experiment config file, overlaying it on the defaults."""
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)

    config = ExperimentConfig()
    circuit = config.circuit

    if parser.has_section("experiment"):
        sec = parser["experiment"]
        config.duration = sec.getfloat("duration_ms", config.duration)
        config.seed = sec.getint("seed", config.seed)
        if "baseline_window_ms" in sec:
            config.baseline_window = tuple(_floats(sec["baseline_window_ms"]))
        if "effect_window_ms" in sec:
            config.effect_window = tuple(_floats(sec["effect_window_ms"]))
        config.stimulus_rate = sec.getfloat("stimulus_rate_hz", config.stimulus_rate)
        config.stimulus_amplitude = sec.getfloat(
            "stimulus_amplitude_pa", config.stimulus_amplitude
        )
        config.serotonin = sec.getfloat("serotonin", config.serotonin)
        config.noradrenaline = sec.getfloat("noradrenaline", config.noradrenaline)
        config.elevation_threshold = sec.getfloat(
            "elevation_threshold", config.elevation_threshold
        )
        config.baseline_epsilon = sec.getfloat("baseline_epsilon_hz", config.baseline_epsilon)
        config.out_dir = sec.get("out_dir", config.out_dir)

    if parser.has_section("dopamine"):
        sec = parser["dopamine"]
        baseline = sec.getfloat("baseline", circuit.dopamine.baseline)
        circuit.dopamine = DopamineTrace(baseline=baseline)
        if sec.getboolean("burst_enabled", True):
            default = config.burst or DopamineBurst(400.0, 0.8, 80.0)
            config.burst = DopamineBurst(
                t_start=sec.getfloat("burst_start_ms", default.t_start),
                amplitude=sec.getfloat("burst_amplitude", default.amplitude),
                tau_decay=sec.getfloat("burst_tau_ms", default.tau_decay),
            )
        else:
            config.burst = None
        circuit.gains = ReceptorGainParams(
            alpha_d1=sec.getfloat("alpha_d1", circuit.gains.alpha_d1),
            beta_d2=sec.getfloat("beta_d2", circuit.gains.beta_d2),
        )

    if parser.has_section("neuron"):
        sec = parser["neuron"]
        p = circuit.neuron_params
        circuit.neuron_params = NeuronParams(
            v_rest=sec.getfloat("v_rest_mv", p.v_rest),
            v_threshold=sec.getfloat("v_threshold_mv", p.v_threshold),
            v_reset=sec.getfloat("v_reset_mv", p.v_reset),
            tau_m=sec.getfloat("tau_m_ms", p.tau_m),
            r_m=sec.getfloat("r_m_mohm", p.r_m),
            t_refractory=sec.getfloat("t_refractory_ms", p.t_refractory),
        )

    if parser.has_section("circuit"):
        sec = parser["circuit"]
        circuit.connection_p = sec.getfloat("connection_p", circuit.connection_p)
        circuit.delay = sec.getfloat("delay_ms", circuit.delay)
        circuit.dt = sec.getfloat("dt_ms", circuit.dt)

    if parser.has_section("metrics"):
        sec = parser["metrics"]
        config.metrics = MetricsConfig(
            rate_ceiling_hz=sec.getfloat("rate_ceiling_hz", config.metrics.rate_ceiling_hz),
            persistence_threshold=sec.getfloat(
                "persistence_threshold_pa_per_s", config.metrics.persistence_threshold
            ),
        )

    if parser.has_section("populations"):
        for name, raw in parser["populations"].items():
            # configparser lowercases keys; match case-insensitively
            matches = [p for p in POPULATION_NAMES if p.lower() == name.lower()]
            if not matches:
                raise ValueError(f"unknown population in config: {name!r}")
            pop = matches[0]
            values = _floats(raw)
            if len(values) != 3:
                raise ValueError(
                    f"population {pop} needs 'size, noise_rate_hz, noise_amplitude_pa', got {raw!r}"
                )
            circuit.sizes[pop] = int(values[0])
            circuit.noise[pop] = (values[1], values[2])

    if parser.has_section("edges"):
        known = {f"{e.source}->{e.target}".lower(): (e.source, e.target) for e in DEFAULT_EDGES}
        for name, raw in parser["edges"].items():
            if name.lower() not in known:
                raise ValueError(f"unknown edge in config: {name!r}")
            fields = {}
            for token in raw.split():
                key, _, value = token.partition("=")
                if key not in ("weight", "p", "delay"):
                    raise ValueError(f"unknown edge field {key!r} in {raw!r}")
                fields[key] = float(value)
            circuit.edge_overrides[known[name.lower()]] = EdgeOverride(**fields)

    if parser.has_section("stimuli"):
        for name, raw in parser["stimuli"].items():
            matches = [p for p in POPULATION_NAMES if p.lower() == name.lower()]
            if not matches:
                raise ValueError(f"unknown stimulus population in config: {name!r}")
            values = _floats(raw)
            if len(values) != 4:
                raise ValueError(
                    f"stimulus needs 't0_ms, t1_ms, rate_hz, amplitude_pa', got {raw!r}"
                )
            circuit.stimuli.append(StimulusSpec(matches[0], *values))

    if parser.has_section("affect_table"):
        mapping = dict(AffectTable().mapping)
        for key, raw in parser["affect_table"].items():
            mapping[_octant_from_key(key)] = AffectLabel(raw.strip().upper())
        config.affect_table = AffectTable(mapping)

    if parser.has_section("influence"):
        from .cube import DEFAULT_INFLUENCE_MATRIX

        matrix = DEFAULT_INFLUENCE_MATRIX.copy()
        for key, raw in parser["influence"].items():
            names = [m.lower() for m in METRIC_NAMES]
            if key.lower() not in names:
                raise ValueError(f"unknown influence row: {key!r}")
            row = _floats(raw)
            if len(row) != 3:
                raise ValueError(f"influence row needs 3 values, got {raw!r}")
            matrix[names.index(key.lower())] = row
        config.influence = matrix

    return config


def default_config_text() -> str:
    """A complete config file mirroring the built-in defaults."""
    config = ExperimentConfig()
    circuit = config.circuit
    burst = config.burst
    p = circuit.neuron_params
    lines = [
        "[experiment]",
        f"duration_ms = {config.duration:g}",
        f"seed = {config.seed}",
        f"baseline_window_ms = {config.baseline_window[0]:g}, {config.baseline_window[1]:g}",
        f"effect_window_ms = {config.effect_window[0]:g}, {config.effect_window[1]:g}",
        f"stimulus_rate_hz = {config.stimulus_rate:g}",
        f"stimulus_amplitude_pa = {config.stimulus_amplitude:g}",
        f"serotonin = {config.serotonin:g}",
        f"noradrenaline = {config.noradrenaline:g}",
        f"elevation_threshold = {config.elevation_threshold:g}",
        f"baseline_epsilon_hz = {config.baseline_epsilon:g}",
        f"out_dir = {config.out_dir}",
        "",
        "[dopamine]",
        f"baseline = {circuit.dopamine.baseline:g}",
        "burst_enabled = true",
        f"burst_start_ms = {burst.t_start:g}",
        f"burst_amplitude = {burst.amplitude:g}",
        f"burst_tau_ms = {burst.tau_decay:g}",
        f"alpha_d1 = {circuit.gains.alpha_d1:g}",
        f"beta_d2 = {circuit.gains.beta_d2:g}",
        "",
        "[neuron]",
        f"v_rest_mv = {p.v_rest:g}",
        f"v_threshold_mv = {p.v_threshold:g}",
        f"v_reset_mv = {p.v_reset:g}",
        f"tau_m_ms = {p.tau_m:g}",
        f"r_m_mohm = {p.r_m:g}",
        f"t_refractory_ms = {p.t_refractory:g}",
        "",
        "[circuit]",
        f"connection_p = {circuit.connection_p:g}",
        f"delay_ms = {circuit.delay:g}",
        f"dt_ms = {circuit.dt:g}",
        "",
        "[metrics]",
        f"rate_ceiling_hz = {config.metrics.rate_ceiling_hz:g}",
        f"persistence_threshold_pa_per_s = {config.metrics.persistence_threshold:g}",
        "",
        "[populations]",
        "# name = size, noise_rate_hz, noise_amplitude_pa",
    ]
    for name in POPULATION_NAMES:
        rate, amp = circuit.noise[name]
        lines.append(f"{name} = {circuit.sizes[name]}, {rate:g}, {amp:g}")
    lines += [
        "",
        "[edges]",
        "# Source->Target = weight=<pA> p=<prob> delay=<ms>   (any subset; 0 removes the edge)",
    ]
    for e in DEFAULT_EDGES:
        edge_p = e.p if e.p is not None else circuit.connection_p
        lines.append(
            f"{e.source}->{e.target} = weight={e.weight:g} p={edge_p:g} "
            f"delay={circuit.delay:g}"
        )
    lines += [
        "",
        "[affect_table]",
        "# octant keys are serotonin/dopamine/noradrenaline, L = level <= 0.5, H = level > 0.5",
    ]
    table = config.affect_table.mapping
    for key in _OCTANT_KEYS:
        lines.append(f"{key} = {table[_octant_from_key(key)].value}")
    lines += [
        "",
        "[influence]",
        "# metric = serotonin, dopamine, noradrenaline coefficients",
    ]
    from .cube import DEFAULT_INFLUENCE_MATRIX

    for name, row in zip(METRIC_NAMES, DEFAULT_INFLUENCE_MATRIX):
        lines.append(f"{name} = {row[0]:g}, {row[1]:g}, {row[2]:g}")
    return "\n".join(lines) + "\n"
