import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bornlab import oracle
from bornlab.statevector import ImpossibleBranch


def test_qubit_count_limits():
    with pytest.raises(ValueError):
        oracle.reference_state(0, [])
    with pytest.raises(ValueError):
        oracle.reference_state(9, [])


def test_embed_x_on_each_qubit():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    for q in range(3):
        full = oracle.embed_1q(x, q, 3)
        state = np.zeros(8, dtype=complex)
        state[0] = 1.0
        flipped = full @ state
        assert flipped[1 << q] == pytest.approx(1.0)


def test_embed_1q_index_range():
    with pytest.raises(IndexError):
        oracle.embed_1q(np.eye(2, dtype=complex), 3, 3)


def test_controlled_gate_block_structure():
    # CRY(pi) on (control=0, target=1): identity on control-0 columns,
    # RY(pi) = [[0,-1],[1,0]] on control-1 columns
    m = oracle.embed_gate(
        np.array([[0, -1], [1, 0]], dtype=complex), 1, (0,), 2
    )
    expected = np.array(
        [
            [1, 0, 0, 0],
            [0, 0, 0, -1],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
        ],
        dtype=complex,
    )
    assert_allclose(m, expected, atol=1e-15)


def test_embed_gate_rejects_collisions():
    g = np.eye(2, dtype=complex)
    with pytest.raises(ValueError):
        oracle.embed_gate(g, 1, (1,), 3)
    with pytest.raises(ValueError):
        oracle.embed_gate(g, 0, (1, 1), 3)


def test_step_operators_are_unitary():
    rng = np.random.default_rng(9)
    steps = [
        ("h", 1),
        ("x", 2),
        ("rx", 0, rng.uniform(-3, 3)),
        ("ry", 2, rng.uniform(-3, 3)),
        ("rz", 1, rng.uniform(-3, 3)),
        ("cry", 0, 2, rng.uniform(-3, 3)),
        ("cx", 2, 0),
        ("xx", 0, 1, rng.uniform(-3, 3)),
    ]
    eye = np.eye(8)
    for step in steps:
        u = oracle.step_operator(step, 3)
        assert_allclose(u @ u.conj().T, eye, atol=1e-12)


def test_unknown_step_rejected():
    with pytest.raises(ValueError):
        oracle.step_operator(("swap", 0, 1), 2)


def test_xx_pi_creates_odd_parity():
    state, _ = oracle.reference_state(2, [("xx", 0, 1, math.pi)])
    assert state[3] == pytest.approx(-1j)
    with pytest.raises(ValueError):
        oracle.xx_full(1, 1, 0.3, 2)


def test_reference_bell_state():
    state, acc = oracle.reference_state(2, [("h", 0), ("cx", 0, 1)])
    assert acc == 1.0
    r = 1 / math.sqrt(2)
    assert_allclose(state, [r, 0, 0, r], atol=1e-15)


def test_projection_acceptance_and_renormalization():
    # RY(pi/2) puts |1> mass at sin^2(pi/4) = 1/2; projecting on |0> keeps
    # half the norm and leaves |0> exactly
    state, acc = oracle.reference_state(
        1, [("ry", 0, math.pi / 2), ("project0", 0)]
    )
    assert acc == pytest.approx(0.5, abs=1e-12)
    assert_allclose(state, [1.0, 0.0], atol=1e-12)


def test_projection_on_impossible_branch():
    with pytest.raises(ImpossibleBranch):
        oracle.reference_state(1, [("x", 0), ("project0", 0)])


def test_neuron_success_probability_at_fixed_point():
    # single neuron with the input forced to |1>, weight pi/4, bias 0:
    # acceptance = cos^4 + sin^4 at theta = pi/4 -> 1/2
    theta = math.pi / 4
    steps = [
        ("x", 0),
        ("cry", 0, 2, 2 * theta),
        ("cry", 2, 1, math.pi),
        ("cry", 0, 2, -2 * theta),
        ("project0", 2),
    ]
    _, acc = oracle.reference_state(3, steps)
    assert acc == pytest.approx(0.5, abs=1e-12)


def test_marginal_reads_out_the_right_bits():
    # state |q1=1, q0=0> = index 2; measuring [q1] alone gives P(1) = 1
    dist, _ = oracle.reference_distribution(2, [("x", 1)], [1])
    assert_allclose(dist.probs, [0.0, 1.0])
    # measured-qubit order defines the output bit order
    dist01, _ = oracle.reference_distribution(2, [("x", 1)], [0, 1])
    dist10, _ = oracle.reference_distribution(2, [("x", 1)], [1, 0])
    assert_allclose(dist01.probs, [0, 0, 1, 0])
    assert_allclose(dist10.probs, [0, 1, 0, 0])


def test_distribution_is_normalized_after_projections():
    rng = np.random.default_rng(31)
    steps = [
        ("h", 0),
        ("h", 1),
        ("cry", 0, 2, rng.uniform(-2, 2)),
        ("project0", 2),
        ("xx", 0, 1, rng.uniform(-2, 2)),
    ]
    dist, acc = oracle.reference_distribution(3, steps, [0, 1])
    dist.validate()
    assert 0.0 < acc <= 1.0
