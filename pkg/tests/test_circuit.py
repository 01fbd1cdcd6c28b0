"""Circuit builder invariants: topology, severing helpers, stimulus handling."""

from dataclasses import replace

import pytest

from dopacube.circuit import (
    CircuitConfig,
    DEFAULT_EDGES,
    DEFAULT_SIZES,
    DIRECT_EDGES,
    Edge,
    EdgeOverride,
    INDIRECT_EDGES,
    POPULATION_NAMES,
    StimulusSpec,
    apply_stimulus,
    build_nigrostriatal,
)
from dopacube.receptors import Receptor


def _edge_set(net):
    return {(c.source, c.target) for c in net.connections}


def test_default_topology_matches_edge_table():
    net = build_nigrostriatal(CircuitConfig(), seed=0)
    assert set(net.populations) == set(POPULATION_NAMES)
    for name, pop in net.populations.items():
        assert pop.size == DEFAULT_SIZES[name]
    assert len(net.connections) == len(DEFAULT_EDGES) == 10
    by_pair = {(c.source, c.target): c for c in net.connections}
    for edge in DEFAULT_EDGES:
        conn = by_pair[(edge.source, edge.target)]
        assert conn.receptor is edge.receptor
        assert conn.weight == edge.weight
        assert conn.count > 0


def test_pathway_chain_receptors():
    """The two corticostriatal entries carry the dopamine receptor marks."""
    receptors = {(e.source, e.target): e.receptor for e in DEFAULT_EDGES}
    assert receptors[("Cortex", "Striatum_D1")] is Receptor.DOPAMINE_D1
    assert receptors[("Cortex", "Striatum_D2")] is Receptor.DOPAMINE_D2
    assert receptors[("Striatum_D1", "GPi_SNr")] is Receptor.GABA
    assert receptors[("GPi_SNr", "Thalamus")] is Receptor.GABA
    assert receptors[("STN", "GPi_SNr")] is Receptor.GLUTAMATE


def test_without_indirect_severs_exactly_the_indirect_chain():
    net = build_nigrostriatal(CircuitConfig().without_indirect(), seed=0)
    pairs = _edge_set(net)
    for edge in INDIRECT_EDGES:
        assert (edge.source, edge.target) not in pairs
    for edge in DIRECT_EDGES:
        assert (edge.source, edge.target) in pairs


def test_without_direct_severs_the_d1_entry():
    net = build_nigrostriatal(CircuitConfig().without_direct(), seed=0)
    pairs = _edge_set(net)
    assert ("Cortex", "Striatum_D1") not in pairs
    assert ("Striatum_D1", "GPi_SNr") not in pairs
    for edge in INDIRECT_EDGES:
        assert (edge.source, edge.target) in pairs


def test_edge_override_weight_and_removal():
    overrides = {
        ("Cortex", "Striatum_D1"): EdgeOverride(weight=123.0, delay=2.0),
        ("Thalamus", "Cortex"): EdgeOverride(weight=0.0),
    }
    net = build_nigrostriatal(CircuitConfig(edge_overrides=overrides), seed=0)
    by_pair = {(c.source, c.target): c for c in net.connections}
    assert by_pair[("Cortex", "Striatum_D1")].weight == 123.0
    assert by_pair[("Cortex", "Striatum_D1")].delay == 2.0
    assert ("Thalamus", "Cortex") not in by_pair


def test_unknown_override_rejected():
    config = CircuitConfig(edge_overrides={("Cortex", "SNc"): EdgeOverride(weight=1.0)})
    with pytest.raises(ValueError):
        config.validate()


def test_size_validation():
    config = CircuitConfig()
    del config.sizes["STN"]
    with pytest.raises(ValueError):
        config.validate()
    config = CircuitConfig()
    config.sizes["STN"] = 0
    with pytest.raises(ValueError):
        config.validate()


def test_extra_edges_hook():
    extra = [Edge("SNc", "Thalamus", Receptor.GLUTAMATE, 50.0, p=0.5)]
    net = build_nigrostriatal(CircuitConfig(extra_edges=extra), seed=0)
    assert ("SNc", "Thalamus") in _edge_set(net)


def test_zero_noise_circuit_is_silent():
    config = CircuitConfig(noise={name: (0.0, 0.0) for name in POPULATION_NAMES})
    net = build_nigrostriatal(config, seed=0)
    record = net.simulate(200.0)
    assert record.events == []


def test_stimulus_monotonicity():
    """More cortical drive must yield more cortical spikes, every seed."""
    for seed in range(3):
        counts = []
        # 2000 Hz of 1000 pA events averages 20 mV of drive, 6000 Hz is 60 mV,
        # giving clearly separated firing regimes above the 15 mV threshold gap
        for rate in (0.0, 2000.0, 6000.0):
            config = CircuitConfig(noise={name: (0.0, 0.0) for name in POPULATION_NAMES})
            net = build_nigrostriatal(config, seed=seed)
            apply_stimulus(net, "Cortex", (0.0, 200.0), rate)
            record = net.simulate(200.0, recorders=["Cortex"])
            counts.append(len(record.events))
        assert counts[0] < counts[1] < counts[2]
        assert counts[0] == 0


def test_stimulus_specs_in_config_are_applied():
    config = CircuitConfig(
        noise={name: (0.0, 0.0) for name in POPULATION_NAMES},
        stimuli=[StimulusSpec("Thalamus", 10.0, 50.0, 5000.0, 1000.0)],
    )
    net = build_nigrostriatal(config, seed=0)
    record = net.simulate(100.0)
    assert record.events
    assert {pop for _, pop, _ in record.events} <= {"Thalamus", "Cortex", "MotorCortex"}
    assert all(t >= 10.0 for t, _, _ in record.events)


def test_silencing_gpi_disinhibits_thalamus():
    """Removing pallidal inhibition raises the tonic thalamic rate."""
    base_cfg = CircuitConfig()
    silenced_cfg = replace(
        base_cfg,
        edge_overrides={("GPi_SNr", "Thalamus"): EdgeOverride(p=0.0)},
    )
    base = build_nigrostriatal(base_cfg, seed=0)
    silenced = build_nigrostriatal(silenced_cfg, seed=0)
    n_base = base.simulate(400.0, recorders=["Thalamus"]).count_in_window("Thalamus", 100, 400)
    n_silenced = silenced.simulate(400.0, recorders=["Thalamus"]).count_in_window(
        "Thalamus", 100, 400
    )
    assert n_silenced > 1.5 * n_base
