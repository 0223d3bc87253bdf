"""bornlab: a statevector laboratory for Born-rule generative models.

Two model families share one training and evaluation stack: feed-forward
networks of post-selected quantum neurons (non-linear activations via
repeat-until-success blocks) and layered hardware-efficient circuits.
Everything is exact linear algebra; sampling is layered on top.
"""

from .models import (
    ModelSpec,
    QcbmConfig,
    QnbmTopology,
    linear_qnbm_distribution,
    linear_qnbm_spec,
    qcbm_distribution,
    qcbm_spec,
    qnbm_distribution,
    qnbm_param_count,
    qnbm_spec,
)
from .neuron import (
    NeuronParams,
    activation,
    apply_linear_neuron,
    apply_quantum_neuron,
    pre_activation,
    success_probability,
)
from .statevector import ImpossibleBranch, ProbDist, Statevector, new_zero, sample
from .targets import (
    TargetSpec,
    build_target,
    cardinality_target,
    kl_divergence,
    precision,
    uniform_target,
)
from .training import (
    AdamState,
    MultiSeedResult,
    TrainConfig,
    TrainTrace,
    adam_step,
    finite_diff_gradient,
    loss,
    multi_seed_train,
    train,
)
from .verification import run_verify

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "ImpossibleBranch",
    "ModelSpec",
    "MultiSeedResult",
    "NeuronParams",
    "ProbDist",
    "QcbmConfig",
    "QnbmTopology",
    "Statevector",
    "TargetSpec",
    "TrainConfig",
    "TrainTrace",
    "activation",
    "adam_step",
    "apply_linear_neuron",
    "apply_quantum_neuron",
    "pre_activation",
    "build_target",
    "cardinality_target",
    "finite_diff_gradient",
    "kl_divergence",
    "linear_qnbm_distribution",
    "linear_qnbm_spec",
    "loss",
    "multi_seed_train",
    "new_zero",
    "precision",
    "qcbm_distribution",
    "qcbm_spec",
    "qnbm_distribution",
    "qnbm_param_count",
    "qnbm_spec",
    "run_verify",
    "sample",
    "success_probability",
    "train",
    "uniform_target",
]
