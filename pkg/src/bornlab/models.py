"""Born machine constructors and exact forward evaluation.

Three models, each mapping a flat parameter vector to the exact output
distribution of its circuit:

* QNBM - feed-forward network of quantum neurons over an input layer, an
  optional single hidden layer, and an output layer, sharing one ancilla.
  Inputs start in uniform superposition; only output qubits are measured.
* linearized QNBM - same wiring with each neuron replaced by plain
  controlled Y-rotations (no ancilla, no non-linearity).
* QCBM - hardware-efficient ansatz: per layer, RX then RZ on every qubit
  followed by XX entanglers on every qubit pair.

Evaluation is exact (dense statevector), so identical inputs give
bit-identical outputs; shot noise is layered on in :mod:`bornlab.training`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .neuron import NeuronParams, apply_linear_neuron, apply_quantum_neuron
from .statevector import ProbDist, Statevector


@dataclass(frozen=True)
class QnbmTopology:
    """Layer sizes (n_in, n_hid, n_out); n_hid = 0 means no hidden layer."""

    n_in: int
    n_hid: int
    n_out: int

    def __post_init__(self):
        if self.n_in < 1 or self.n_out < 1 or self.n_hid < 0:
            raise ValueError(f"invalid topology {self}")

    @property
    def qubit_count(self) -> int:
        # one reusable ancilla on top of the neuron qubits
        return self.n_in + self.n_hid + self.n_out + 1

    @property
    def param_count(self) -> int:
        if self.n_hid > 0:
            return (
                self.n_in * self.n_hid
                + self.n_hid * self.n_out
                + self.n_hid
                + self.n_out
            )
        return self.n_in * self.n_out + self.n_out

    @property
    def input_qubits(self) -> list:
        return list(range(self.n_in))

    @property
    def hidden_qubits(self) -> list:
        return list(range(self.n_in, self.n_in + self.n_hid))

    @property
    def output_qubits(self) -> list:
        base = self.n_in + self.n_hid
        return list(range(base, base + self.n_out))

    @property
    def ancilla(self) -> int:
        return self.n_in + self.n_hid + self.n_out

    def split_params(self, params: np.ndarray) -> list:
        """Unpack the flat vector into per-stage (weights, biases) pairs.

        Layout: stage-1 weights in input-major order (W[i, j] connects
        input i to target j, flattened with i outermost), stage-1 biases,
        then the same for stage 2 when a hidden layer is present.
        """
        params = np.asarray(params, dtype=float)
        if params.shape != (self.param_count,):
            raise ValueError(
                f"expected {self.param_count} parameters for {self}, got {params.shape}"
            )
        stages = []
        pos = 0
        layer_sizes = (
            [(self.n_in, self.n_hid), (self.n_hid, self.n_out)]
            if self.n_hid > 0
            else [(self.n_in, self.n_out)]
        )
        for n_prev, n_next in layer_sizes:
            w = params[pos : pos + n_prev * n_next].reshape(n_prev, n_next)
            pos += n_prev * n_next
            b = params[pos : pos + n_next]
            pos += n_next
            stages.append((w, b))
        return stages


@dataclass(frozen=True)
class QcbmConfig:
    """Hardware-efficient ansatz shape: qubit count and layer count."""

    n_qubits: int
    layers: int

    def __post_init__(self):
        if self.n_qubits < 1 or self.layers < 1:
            raise ValueError(f"invalid config {self}")

    @property
    def param_count(self) -> int:
        n = self.n_qubits
        return (2 * n + n * (n - 1) // 2) * self.layers


def qnbm_param_count(topology: QnbmTopology) -> int:
    return topology.param_count


def qnbm_distribution(topology: QnbmTopology, params) -> tuple:
    """Exact output distribution and post-selection acceptance probability.

    Builds the full network state (H on inputs, then every hidden neuron,
    then every output neuron, each through the shared ancilla), returning
    the marginal over the output qubits and the product of per-neuron
    success probabilities - i.e. the fraction of pre-post-selection shots
    in which every mid-circuit measurement comes out favorable.
    """
    stages = topology.split_params(params)
    sv = Statevector.zero(topology.qubit_count)
    for q in topology.input_qubits:
        sv.h(q)

    acceptance = 1.0
    prev = topology.input_qubits
    layer_targets = (
        [topology.hidden_qubits, topology.output_qubits]
        if topology.n_hid > 0
        else [topology.output_qubits]
    )
    for (w, b), targets in zip(stages, layer_targets):
        for j, tq in enumerate(targets):
            p = apply_quantum_neuron(
                sv, prev, NeuronParams(w[:, j], float(b[j])), tq, topology.ancilla
            )
            acceptance *= p
        prev = targets

    return sv.marginal_distribution(topology.output_qubits), acceptance


def linear_qnbm_distribution(topology: QnbmTopology, params) -> ProbDist:
    """Exact output distribution of the linearized network (no ancilla)."""
    stages = topology.split_params(params)
    sv = Statevector.zero(topology.qubit_count - 1)
    for q in topology.input_qubits:
        sv.h(q)

    prev = topology.input_qubits
    layer_targets = (
        [topology.hidden_qubits, topology.output_qubits]
        if topology.n_hid > 0
        else [topology.output_qubits]
    )
    for (w, b), targets in zip(stages, layer_targets):
        for j, tq in enumerate(targets):
            apply_linear_neuron(sv, prev, NeuronParams(w[:, j], float(b[j])), tq)
        prev = targets

    return sv.marginal_distribution(topology.output_qubits)


def qcbm_distribution(config: QcbmConfig, params) -> ProbDist:
    """Exact output distribution of the hardware-efficient ansatz.

    Per layer: RX(theta) then RZ(theta) on each qubit, then XX(theta_ij)
    for every pair i < j in lexicographic order; all qubits measured.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (config.param_count,):
        raise ValueError(
            f"expected {config.param_count} parameters for {config}, got {params.shape}"
        )
    n = config.n_qubits
    sv = Statevector.zero(n)
    pos = 0
    for _ in range(config.layers):
        for q in range(n):
            sv.rx(q, params[pos])
            pos += 1
        for q in range(n):
            sv.rz(q, params[pos])
            pos += 1
        for i in range(n):
            for j in range(i + 1, n):
                sv.apply_xx(i, j, params[pos])
                pos += 1
    return sv.marginal_distribution(range(n))


@dataclass(frozen=True)
class ModelSpec:
    """One trainable model: kind plus its shape, with a uniform interface."""

    kind: str  # 'qnbm' | 'linear_qnbm' | 'qcbm'
    topology: QnbmTopology | None = None
    qcbm: QcbmConfig | None = None

    def __post_init__(self):
        if self.kind in ("qnbm", "linear_qnbm"):
            if self.topology is None:
                raise ValueError(f"{self.kind} needs a topology")
        elif self.kind == "qcbm":
            if self.qcbm is None:
                raise ValueError("qcbm needs a QcbmConfig")
        else:
            raise ValueError(f"unknown model kind {self.kind!r}")

    @property
    def param_count(self) -> int:
        if self.kind == "qcbm":
            return self.qcbm.param_count
        return self.topology.param_count

    @property
    def n_out(self) -> int:
        if self.kind == "qcbm":
            return self.qcbm.n_qubits
        return self.topology.n_out

    @property
    def label(self) -> str:
        if self.kind == "qcbm":
            return f"qcbm_{self.qcbm.n_qubits}q_{self.qcbm.layers}l"
        t = self.topology
        return f"{self.kind}_{t.n_in}_{t.n_hid}_{t.n_out}"

    def init_params(self, rng: np.random.Generator) -> np.ndarray:
        # Neuron weights/biases start in (-1, 1); QCBM angles get the full
        # rotation range.
        if self.kind == "qcbm":
            return rng.uniform(-math.pi, math.pi, size=self.param_count)
        return rng.uniform(-1.0, 1.0, size=self.param_count)

    def distribution(self, params) -> tuple:
        """(ProbDist, acceptance probability or None)."""
        if self.kind == "qnbm":
            return qnbm_distribution(self.topology, params)
        if self.kind == "linear_qnbm":
            return linear_qnbm_distribution(self.topology, params), None
        return qcbm_distribution(self.qcbm, params), None


def qnbm_spec(n_in: int, n_hid: int, n_out: int) -> ModelSpec:
    return ModelSpec("qnbm", topology=QnbmTopology(n_in, n_hid, n_out))


def linear_qnbm_spec(n_in: int, n_hid: int, n_out: int) -> ModelSpec:
    return ModelSpec("linear_qnbm", topology=QnbmTopology(n_in, n_hid, n_out))


def qcbm_spec(n_qubits: int, layers: int) -> ModelSpec:
    return ModelSpec("qcbm", qcbm=QcbmConfig(n_qubits, layers))
