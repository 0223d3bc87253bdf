"""Dense-matrix reference simulator (tests and the verify suite only).

Everything here is built from explicit tensor products of 2x2 factors and
control projectors on the full 2^n-dimensional space, then applied by plain
matrix-vector products.  It deliberately shares no gate-application code
with :mod:`bornlab.statevector`; the two are checked against each other.

Hard cap of 8 qubits keeps every operator at or below 256 x 256.

Circuits are plain step lists::

    ('h', q)  ('x', q)  ('rx', q, phi)  ('ry', q, phi)  ('rz', q, phi)
    ('cry', control, target, phi)  ('cx', control, target)
    ('xx', q1, q2, phi)  ('project0', q)
"""

import cmath
import math

import numpy as np

from .statevector import IMPOSSIBLE_BRANCH_THRESHOLD, ImpossibleBranch, ProbDist

MAX_ORACLE_QUBITS = 8

_I2 = np.eye(2, dtype=np.complex128)
_P0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.complex128)
_P1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=np.complex128)

# Independent copies of the gate definitions: a convention slip on either
# side shows up as an engine/oracle mismatch.
_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


def _rx(phi: float) -> np.ndarray:
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def _ry(phi: float) -> np.ndarray:
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz(phi: float) -> np.ndarray:
    e = cmath.exp(-0.5j * phi)
    return np.array([[e, 0.0], [0.0, e.conjugate()]], dtype=np.complex128)


def _check_size(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_ORACLE_QUBITS:
        raise ValueError(f"oracle supports 1..{MAX_ORACLE_QUBITS} qubits, got {n_qubits}")


def embed_1q(gate: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Identity-tensor a 2x2 gate onto one qubit of the full space.

    Little-endian: qubit n-1 is the leftmost (most significant) tensor
    factor, so the chain runs from qubit n-1 down to 0.
    """
    _check_size(n_qubits)
    if not 0 <= qubit < n_qubits:
        raise IndexError(f"qubit {qubit} out of range")
    op = np.eye(1, dtype=np.complex128)
    for q in range(n_qubits - 1, -1, -1):
        op = np.kron(op, gate if q == qubit else _I2)
    return op


def embed_gate(gate: np.ndarray, target: int, controls, n_qubits: int) -> np.ndarray:
    """Full-space matrix of a (multi-)controlled 2x2 gate.

    controlled-U = I + (prod of |1><1| on the controls) (U_target - I);
    the projector product vanishes unless every control bit is set.
    """
    _check_size(n_qubits)
    controls = list(controls)
    if target in controls or len(set(controls)) != len(controls):
        raise ValueError(f"index collision: target {target}, controls {controls}")
    full = embed_1q(gate, target, n_qubits)
    if not controls:
        return full
    proj = np.eye(1 << n_qubits, dtype=np.complex128)
    for c in controls:
        proj = proj @ embed_1q(_P1, c, n_qubits)
    return np.eye(1 << n_qubits, dtype=np.complex128) + proj @ (full - np.eye(1 << n_qubits))


def xx_full(q1: int, q2: int, phi: float, n_qubits: int) -> np.ndarray:
    """exp(-i*(phi/2)*X_q1 X_q2) on the full space."""
    if q1 == q2:
        raise ValueError("q1 and q2 must differ")
    xpair = embed_1q(_X, q1, n_qubits) @ embed_1q(_X, q2, n_qubits)
    eye = np.eye(1 << n_qubits, dtype=np.complex128)
    return math.cos(phi / 2.0) * eye - 1j * math.sin(phi / 2.0) * xpair


def step_operator(step, n_qubits: int) -> np.ndarray:
    """Full-space unitary for one non-projector circuit step."""
    op = step[0]
    if op == "h":
        return embed_gate(_H, step[1], (), n_qubits)
    if op == "x":
        return embed_gate(_X, step[1], (), n_qubits)
    if op == "rx":
        return embed_gate(_rx(step[2]), step[1], (), n_qubits)
    if op == "ry":
        return embed_gate(_ry(step[2]), step[1], (), n_qubits)
    if op == "rz":
        return embed_gate(_rz(step[2]), step[1], (), n_qubits)
    if op == "cry":
        return embed_gate(_ry(step[3]), step[2], (step[1],), n_qubits)
    if op == "cx":
        return embed_gate(_X, step[2], (step[1],), n_qubits)
    if op == "xx":
        return xx_full(step[1], step[2], step[3], n_qubits)
    raise ValueError(f"unknown circuit step {step!r}")


def reference_state(n_qubits: int, steps) -> tuple:
    """Evolve |0...0> through the step list; returns (state, acceptance).

    ('project0', q) steps apply the explicit |0><0| projector on q and
    renormalize; acceptance accumulates the projector norms.
    """
    _check_size(n_qubits)
    state = np.zeros(1 << n_qubits, dtype=np.complex128)
    state[0] = 1.0
    acceptance = 1.0
    for step in steps:
        if step[0] == "project0":
            proj = embed_1q(_P0, step[1], n_qubits)
            state = proj @ state
            p = float(np.real(np.vdot(state, state)))
            if p < IMPOSSIBLE_BRANCH_THRESHOLD:
                raise ImpossibleBranch(
                    f"projector on qubit {step[1]} has probability {p:.3e}"
                )
            state = state / math.sqrt(p)
            acceptance *= p
        else:
            state = step_operator(step, n_qubits) @ state
    return state, acceptance


def reference_distribution(n_qubits: int, steps, measured_qubits) -> tuple:
    """(ProbDist over the measured qubits, acceptance probability).

    The marginal is an exhaustive sum: every amplitude is assigned to the
    output bitstring read off its measured bits, one index at a time.
    """
    state, acceptance = reference_state(n_qubits, steps)
    measured = list(measured_qubits)
    probs = np.zeros(1 << len(measured))
    for i in range(state.size):
        y = 0
        for k, q in enumerate(measured):
            if (i >> q) & 1:
                y |= 1 << k
        probs[y] += abs(state[i]) ** 2
    return ProbDist(len(measured), probs), acceptance
