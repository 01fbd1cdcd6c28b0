"""Kernel contracts: timing, determinism, wiring rules, record round-trips.

The two-neuron integration test recomputes the target's membrane with a
scalar math.exp loop that shares no code with the vectorized kernel.
"""

import math

import numpy as np
import pytest

from dopacube.network import (
    AllToAll,
    FixedOutdegree,
    Network,
    PairwiseBernoulli,
    PopulationSpec,
    SpikeRecord,
)
from dopacube.neuromodulation import DopamineBurst, DopamineTrace, ReceptorGainParams
from dopacube.neuron import NeuronParams
from dopacube.receptors import Receptor


def _two_neuron_net(weight, delay=1.0, receptor=Receptor.GLUTAMATE):
    net = Network(dt=0.1, seed=0)
    net.add_population(PopulationSpec(name="A", size=1))
    net.add_population(PopulationSpec(name="B", size=1))
    net.connect("A", "B", AllToAll(), weight, delay, receptor)
    return net


def test_forced_chain_matches_scalar_reference():
    """B's spike times must match an independent scalar membrane trace."""
    params = NeuronParams()
    dt, delay, weight = 0.1, 1.0, 4000.0
    forced = [5.0, 6.0, 7.0, 8.0, 9.0]

    net = _two_neuron_net(weight, delay)
    net.force_spikes("A", 0, forced)
    record = net.simulate(30.0)

    # scalar replay of B: deliveries arrive delay/dt steps after each A spike
    delivery_steps = {round(t / dt) + round(delay / dt) for t in forced}
    decay = math.exp(-dt / params.tau_m)
    v = params.v_rest
    refr_until = -1
    expected_b = []
    for k in range(300):
        current = weight if k in delivery_steps else 0.0
        v_eq = params.v_rest + params.drive_scale * current
        v_new = v_eq + (v - v_eq) * decay
        if refr_until > k:
            v_new = params.v_reset
        elif v_new >= params.v_threshold:
            expected_b.append(round(k * dt, 10))
            v_new = params.v_reset
            refr_until = k + round(params.t_refractory / dt)
        v = v_new

    assert expected_b, "reference trace should produce at least one spike"
    actual_b = [t for t, _ in record.for_population("B")]
    assert actual_b == pytest.approx(expected_b)
    assert [t for t, _ in record.for_population("A")] == pytest.approx(forced)


def test_single_kick_amplitude_is_subthreshold_bookkeeping():
    """One 3500 pA pulse moves B by about 3.48 mV and must not fire it."""
    net = _two_neuron_net(3500.0)
    net.force_spikes("A", 0, [5.0])
    record = net.simulate(20.0)
    assert record.for_population("B") == []


def test_determinism_same_seed_identical_different_seed_not():
    def run(seed):
        net = Network(dt=0.1, seed=seed)
        net.add_population(PopulationSpec(name="P", size=30, noise_rate=2000.0, noise_amplitude=1000.0))
        return net.simulate(200.0).events

    assert run(3) == run(3)
    assert run(3) != run(4)


def test_recorder_choice_does_not_perturb_dynamics():
    def run(recorders):
        net = Network(dt=0.1, seed=1)
        net.add_population(PopulationSpec(name="A", size=20, noise_rate=2000.0, noise_amplitude=1000.0))
        net.add_population(PopulationSpec(name="B", size=20, noise_rate=2000.0, noise_amplitude=1000.0))
        net.connect("A", "B", PairwiseBernoulli(0.3), 500.0, 1.0, Receptor.GLUTAMATE)
        return net.simulate(200.0, recorders=recorders)

    full = run(None)
    only_b = run(["B"])
    assert only_b.for_population("A") == []
    assert only_b.for_population("B") == full.for_population("B")


def test_simulation_continues_across_calls():
    def build():
        net = Network(dt=0.1, seed=9)
        net.add_population(PopulationSpec(name="P", size=25, noise_rate=2000.0, noise_amplitude=1000.0))
        return net

    net_a = build()
    first = net_a.simulate(100.0)
    assert net_a.now == pytest.approx(100.0)
    second = net_a.simulate(100.0)
    assert all(t >= 100.0 for t, _, _ in second.events)

    net_b = build()
    whole = net_b.simulate(200.0)
    assert first.events + second.events == whole.events
    assert net_a.full_record().events == whole.events


def test_connection_sign_and_delay_validation():
    net = Network(dt=0.1, seed=0)
    net.add_population(PopulationSpec(name="A", size=2))
    net.add_population(PopulationSpec(name="B", size=2))
    with pytest.raises(ValueError):
        net.connect("A", "B", AllToAll(), 100.0, 1.0, Receptor.GABA)
    with pytest.raises(ValueError):
        net.connect("A", "B", AllToAll(), -100.0, 1.0, Receptor.GLUTAMATE)
    with pytest.raises(ValueError):
        net.connect("A", "B", AllToAll(), 100.0, 0.05, Receptor.GLUTAMATE)
    with pytest.raises(ValueError):
        net.connect("A", "C", AllToAll(), 100.0, 1.0, Receptor.GLUTAMATE)


def test_wiring_rule_counts():
    net = Network(dt=0.1, seed=0)
    net.add_population(PopulationSpec(name="A", size=10))
    net.add_population(PopulationSpec(name="B", size=7))
    assert net.connect("A", "B", AllToAll(), 10.0, 1.0, Receptor.GLUTAMATE) == 70
    assert net.connect("A", "B", FixedOutdegree(3), 10.0, 1.0, Receptor.GLUTAMATE) == 30
    n = net.connect("A", "B", PairwiseBernoulli(0.5), 10.0, 1.0, Receptor.GLUTAMATE)
    assert 0 < n < 70
    with pytest.raises(ValueError):
        net.connect("A", "B", FixedOutdegree(8), 10.0, 1.0, Receptor.GLUTAMATE)
    with pytest.raises(ValueError):
        net.connect("A", "B", PairwiseBernoulli(1.5), 10.0, 1.0, Receptor.GLUTAMATE)


def test_structure_frozen_after_simulation_starts():
    net = Network(dt=0.1, seed=0)
    net.add_population(PopulationSpec(name="A", size=1))
    net.simulate(1.0)
    with pytest.raises(RuntimeError):
        net.add_population(PopulationSpec(name="B", size=1))


def test_duration_must_be_step_multiple():
    net = Network(dt=0.1, seed=0)
    net.add_population(PopulationSpec(name="A", size=1))
    with pytest.raises(ValueError):
        net.simulate(10.05)
    with pytest.raises(ValueError):
        net.simulate(-1.0)
    with pytest.raises(ValueError):
        net.simulate(10.0, recorders=["missing"])


def test_inhibition_monotonicity():
    """Stronger GABA weight onto a noisy population lowers its spike count."""
    counts = []
    for weight in (-0.0001, -1000.0, -4000.0):
        net = Network(dt=0.1, seed=11)
        net.add_population(PopulationSpec(name="Src", size=20, noise_rate=3000.0, noise_amplitude=1000.0))
        net.add_population(PopulationSpec(name="Tgt", size=40, noise_rate=1500.0, noise_amplitude=1000.0))
        net.connect("Src", "Tgt", PairwiseBernoulli(0.5), weight, 1.0, Receptor.GABA)
        record = net.simulate(400.0)
        counts.append(len(record.for_population("Tgt")))
    assert counts[0] > counts[1] > counts[2]


def test_d1_gain_applies_at_delivery_time():
    """A D1 pulse that is subthreshold at baseline fires under a burst."""
    # kick is weight * 0.1 * (1 - exp(-0.01)); threshold gap is 15 mV, so
    # 15500 pA gives 15.42 mV at gain 1.0 and 13.88 mV at gain 0.9
    weight = 15500.0

    def run(trace):
        net = _two_neuron_net(weight, receptor=Receptor.DOPAMINE_D1)
        net.set_neuromodulation(trace, ReceptorGainParams(alpha_d1=1.0, beta_d2=0.8))
        net.force_spikes("A", 0, [5.0])
        return net.simulate(20.0).for_population("B")

    flat = DopamineTrace(baseline=0.2)
    dipped = DopamineTrace(baseline=0.2, bursts=())
    burst = DopamineTrace(baseline=0.2, bursts=(DopamineBurst(0.0, 0.5, 1000.0),))
    assert run(flat) != []  # gain 1.0, barely suprathreshold
    assert run(burst) != []  # gain above 1, clearly suprathreshold
    # now a weight that only works with the burst gain
    weight = 12000.0  # 11.94 mV at gain 1.0, 17.9 mV at gain 1.5
    assert run(dipped) == []
    assert run(burst) != []


def test_d2_gain_suppresses_at_delivery_time():
    weight = 17000.0  # 16.92 mV at gain 1.0, 10.1 mV at gain 0.6

    def run(trace):
        net = _two_neuron_net(weight, receptor=Receptor.DOPAMINE_D2)
        net.set_neuromodulation(trace, ReceptorGainParams(alpha_d1=1.0, beta_d2=0.8))
        net.force_spikes("A", 0, [5.0])
        return net.simulate(20.0).for_population("B")

    flat = DopamineTrace(baseline=0.2)
    burst = DopamineTrace(baseline=0.2, bursts=(DopamineBurst(0.0, 0.5, 1000.0),))
    assert run(flat) != []
    assert run(burst) == []


def test_stimulus_window_and_overlap_rejection(tmp_path):
    net = Network(dt=0.1, seed=2)
    net.add_population(PopulationSpec(name="P", size=30))
    net.add_stimulus("P", (50.0, 100.0), 5000.0, 1000.0)
    with pytest.raises(ValueError):
        net.add_stimulus("P", (80.0, 120.0), 1000.0, 1000.0)
    net.add_stimulus("P", (100.0, 150.0), 5000.0, 1000.0)  # abutting is fine
    with pytest.raises(ValueError):
        net.add_stimulus("P", (10.0, 5.0), 1000.0, 1000.0)
    record = net.simulate(200.0)
    times = [t for t, _, _ in record.events]
    assert times, "stimulus should drive spikes"
    assert all(50.0 <= t < 150.2 for t in times)


def test_force_spikes_validation():
    net = Network(dt=0.1, seed=0)
    net.add_population(PopulationSpec(name="P", size=3))
    with pytest.raises(ValueError):
        net.force_spikes("P", 3, [1.0])
    with pytest.raises(ValueError):
        net.force_spikes("Q", 0, [1.0])


def test_spike_record_csv_round_trip(tmp_path):
    record = SpikeRecord([(0.5, "A", 1), (1.0, "B", 0), (1.5, "A", 2)])
    path = tmp_path / "raster.csv"
    record.write_csv(path)
    loaded = SpikeRecord.read_csv(path)
    assert loaded.events == record.events
    assert loaded.count_in_window("A", 0.0, 1.0) == 1
    assert loaded.count_in_window("A", 0.0, 2.0) == 2
    assert list(loaded.times("B")) == [1.0]


def test_spike_record_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,pop,cell\n1.0,A,0\n")
    with pytest.raises(ValueError):
        SpikeRecord.read_csv(path)


def test_duplicate_population_rejected():
    net = Network(dt=0.1, seed=0)
    net.add_population(PopulationSpec(name="P", size=1))
    with pytest.raises(ValueError):
        net.add_population(PopulationSpec(name="P", size=2))
    with pytest.raises(ValueError):
        Network(dt=0.0)
