"""dopacube: spiking nigrostriatal dopamine-pathway simulation coupled to a
monoamine emotion-cube mapping onto computing-system parameters."""

from .circuit import (
    CircuitConfig,
    Edge,
    EdgeOverride,
    StimulusSpec,
    apply_stimulus,
    build_nigrostriatal,
)
from .cube import (
    AffectLabel,
    AffectTable,
    MetricsConfig,
    MetricsVector,
    MonoamineCoordinate,
    classify_affect,
    compute_metrics,
    metric_deltas_to_monoamines,
    monoamines_to_metric_deltas,
)
from .harness import ExperimentConfig, ExperimentResult, Report, run_experiment, write_outputs
from .network import (
    AllToAll,
    FixedOutdegree,
    Network,
    PairwiseBernoulli,
    Population,
    PopulationSpec,
    SpikeRecord,
)
from .neuromodulation import (
    DopamineBurst,
    DopamineTrace,
    ReceptorGainParams,
    dopamine_level,
    receptor_gain,
)
from .neuron import NeuronParams, NeuronState, poisson_generator, resting_state, step_neuron
from .receptors import Receptor

__version__ = "0.1.0"
