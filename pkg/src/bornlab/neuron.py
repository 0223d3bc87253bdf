"""Quantum neuron primitive.

A neuron connects a register of input qubits to one target qubit through a
repeat-until-success block built from Y-rotations on a shared ancilla.  On a
basis input ``x`` the block computes the pre-activation

    theta(x) = w . x + b

and, once the ancilla is projected onto |0>, rotates the target by
``RY(2*q(theta))`` where ``q(theta) = arctan(tan^2(theta))`` is the sigmoid
activation.  The projection succeeds with probability
``cos(theta)^4 + sin(theta)^4 >= 1/2``.

Post-selection (project the ancilla to |0> and renormalize) is the canonical
semantics here; classically-controlled retry loops are not simulated.  Under
our gate convention (the neuron-to-target gate is controlled-RY(pi)) the
discarded failure branch corresponds to RY(-pi/2) on the target, recoverable
by RY(+pi/2); this is pinned down by the recovery-algebra check in
:mod:`bornlab.verification`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .statevector import Statevector


@dataclass
class NeuronParams:
    """Weights (one per incoming neuron) and a bias, all dimensionless angles."""

    weights: np.ndarray
    bias: float


def activation(theta):
    """Sigmoid activation q(theta) = arctan(tan^2(theta)).

    Defined for all theta; the limit value pi/2 applies at the poles of tan.
    Accepts scalars or arrays.
    """
    return np.arctan(np.tan(theta) ** 2)


def success_probability(theta):
    """Ancilla-|0> probability cos^4(theta) + sin^4(theta) for a basis input."""
    return np.cos(theta) ** 4 + np.sin(theta) ** 4


def pre_activation(params: NeuronParams, bits) -> float:
    """Weighted input sum theta(x) = w . x + b for a basis input bitstring."""
    return float(np.dot(params.weights, np.asarray(bits, dtype=float)) + params.bias)


def _check_distinct(indices) -> None:
    if len(set(indices)) != len(indices):
        raise ValueError(f"qubit indices must be distinct, got {indices}")


def apply_quantum_neuron(
    state: Statevector,
    input_qubits,
    params: NeuronParams,
    target: int,
    ancilla: int,
) -> float:
    """Run one RUS neuron block under post-selection; returns the success probability.

    The ancilla must hold |0> on entry (guaranteed after any previous call,
    since the block ends by projecting it back to |0>).  Basis-state branches
    of the input register each receive their own rotation RY(2*q(theta_i))
    on the target; the implicit amplitude reweighting across branches comes
    from the final renormalization.
    """
    inputs = list(input_qubits)
    if len(inputs) != len(params.weights):
        raise ValueError(
            f"{len(params.weights)} weights for {len(inputs)} input qubits"
        )
    _check_distinct(inputs + [target, ancilla])

    state.ry(ancilla, 2.0 * params.bias)
    for q, w in zip(inputs, params.weights):
        state.cry(q, ancilla, 2.0 * w)
    state.cry(ancilla, target, math.pi)
    for q, w in zip(reversed(inputs), reversed(params.weights)):
        state.cry(q, ancilla, -2.0 * w)
    state.ry(ancilla, -2.0 * params.bias)
    return state.project_qubit(ancilla, 0)


def apply_linear_neuron(
    state: Statevector,
    input_qubits,
    params: NeuronParams,
    target: int,
) -> None:
    """Ablation neuron: plain controlled rotations, no ancilla, no activation.

    Rotates the target by exactly 2*theta(x) on each basis input, i.e. the
    quantum-neuron block with q(theta) replaced by theta.
    """
    inputs = list(input_qubits)
    if len(inputs) != len(params.weights):
        raise ValueError(
            f"{len(params.weights)} weights for {len(inputs)} input qubits"
        )
    _check_distinct(inputs + [target])

    state.ry(target, 2.0 * params.bias)
    for q, w in zip(inputs, params.weights):
        state.cry(q, target, 2.0 * w)
