"""A tour of the quantum neuron: its activation function and its circuit.

The neuron maps a weighted input angle theta to a Y-rotation by
q(theta) = arctan(tan^2 theta) on its target qubit, implemented with an
ancilla that must be measured in |0>. Run this to see the activation's
sigmoid shape, the success probabilities, and the circuit-level effect.
"""

import math

import numpy as np

from bornlab import (
    NeuronParams,
    Statevector,
    activation,
    apply_quantum_neuron,
    pre_activation,
    success_probability,
)

print("activation q(theta) = arctan(tan^2 theta)")
print(f"{'theta':>8}  {'q(theta)':>10}  {'p_success':>10}")
for theta in [0.0, 0.2, 0.4, math.pi / 4, 1.0, 1.3, 1.5]:
    print(f"{theta:8.3f}  {activation(theta):10.6f}  {success_probability(theta):10.6f}")

print()
print("theta = pi/4 is the fixed point: q(pi/4) =", activation(math.pi / 4))
print("the success probability is lowest there:",
      success_probability(math.pi / 4))

# Now the same thing at the circuit level. Take one input qubit (qubit 0),
# a target (qubit 1), and the ancilla (qubit 2). Force the input to |1> so
# the neuron sees theta = w + b.
w, b = 0.9, -0.2
theta = pre_activation(NeuronParams(weights=np.array([w]), bias=b), bits=1)
print()
print(f"single input on: w={w}, b={b} -> theta = {theta}")

sv = Statevector.zero(3)
sv.x(0)
p = apply_quantum_neuron(sv, input_qubits=[0], params=NeuronParams(np.array([w]), b),
                         target=1, ancilla=2)

# The target qubit should now read cos(q), sin(q) in its two branches.
q = activation(theta)
amp_t0 = sv.amps[0b001]  # input 1, target 0
amp_t1 = sv.amps[0b011]  # input 1, target 1
print(f"success probability from the circuit: {p:.12f}")
print(f"                     closed form:     {success_probability(theta):.12f}")
print(f"target amplitudes: ({amp_t0.real:+.9f}, {amp_t1.real:+.9f})")
print(f"expected (cos q, sin q): ({math.cos(q):+.9f}, {math.sin(q):+.9f})")

# The ancilla came back to |0> and is disentangled: the upper half of the
# statevector is exactly zero.
print("ancilla-|1> amplitude mass:", float(np.abs(sv.amps[4:]).sum()))
