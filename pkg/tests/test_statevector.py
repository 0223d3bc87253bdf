import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bornlab.statevector import (
    ImpossibleBranch,
    ProbDist,
    Statevector,
    new_zero,
    sample,
)

# arctan(tan^2(0.7)) and its cos/sin, evaluated at 50-digit precision
Q07 = 0.61703994062461367046170104680545379429343348243072
COS_Q07 = 0.81559478714612026519059153234312950196681739568249
SIN_Q07 = 0.57862349000025463695713491756950156955110293297327


def test_zero_state_one_qubit():
    sv = new_zero(1)
    assert_allclose(sv.amps, [1.0, 0.0])


def test_zero_state_three_qubits():
    sv = new_zero(3)
    assert sv.amps.size == 8
    assert sv.amps[0] == 1.0
    assert np.count_nonzero(sv.amps) == 1


def test_zero_state_eleven_qubits():
    # largest network in the sweep needs 11 qubits
    assert new_zero(11).amps.size == 2048


@pytest.mark.parametrize("n", [0, -1, 25])
def test_zero_state_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        new_zero(n)


def test_hadamard_on_zero():
    sv = new_zero(1)
    sv.h(0)
    assert_allclose(sv.amps, np.array([1.0, 1.0]) / math.sqrt(2.0), atol=1e-15)


def test_ry_pi_is_not_gate_up_to_convention():
    sv = new_zero(1)
    sv.ry(0, math.pi)
    assert_allclose(sv.amps, [0.0, 1.0], atol=1e-15)


def test_ry_twice_activation_angle():
    sv = new_zero(1)
    sv.ry(0, 2.0 * Q07)
    assert_allclose(sv.amps, [COS_Q07, SIN_Q07], atol=1e-14)


def test_rx_convention():
    # exp(-i(pi/2)X)|0> = -i|1>
    sv = new_zero(1)
    sv.rx(0, math.pi)
    assert_allclose(sv.amps, [0.0, -1.0j], atol=1e-15)


def test_rz_convention():
    sv = new_zero(1)
    sv.h(0)
    sv.rz(0, math.pi / 2.0)
    expected = np.array([np.exp(-1j * math.pi / 4.0), np.exp(1j * math.pi / 4.0)])
    assert_allclose(sv.amps, expected / math.sqrt(2.0), atol=1e-15)


def test_gate_on_out_of_range_qubit():
    sv = new_zero(2)
    with pytest.raises(IndexError):
        sv.h(2)


def test_controlled_gate_inactive_control():
    sv = new_zero(2)
    before = sv.amps.copy()
    sv.cry(0, 1, 1.3)
    assert_allclose(sv.amps, before)


def test_controlled_gate_active_control():
    sv = new_zero(2)
    sv.x(0)
    sv.cry(0, 1, math.pi)
    # qubit 0 = control = 1, qubit 1 flipped: index 3
    expected = np.zeros(4)
    expected[3] = 1.0
    assert_allclose(sv.amps, expected, atol=1e-15)


def test_controlled_gate_index_collision():
    sv = new_zero(2)
    with pytest.raises(ValueError):
        sv.cry(1, 1, 0.5)


def test_cx_bell_state():
    sv = new_zero(2)
    sv.h(0)
    sv.cx(0, 1)
    assert_allclose(sv.amps, np.array([1, 0, 0, 1]) / math.sqrt(2.0), atol=1e-15)


def test_xx_zero_angle_is_identity():
    rng = np.random.default_rng(3)
    amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    amps /= np.linalg.norm(amps)
    sv = Statevector(3, amps.copy())
    sv.apply_xx(0, 2, 0.0)
    assert_allclose(sv.amps, amps)


def test_xx_pi_on_zeros():
    # exp(-i(pi/2) X(x)X) = -i X(x)X
    sv = new_zero(2)
    sv.apply_xx(0, 1, math.pi)
    assert_allclose(sv.amps, [0, 0, 0, -1j], atol=1e-15)


def test_xx_general_angle_on_zeros():
    phi = 1.234
    sv = new_zero(2)
    sv.apply_xx(0, 1, phi)
    expected = np.zeros(4, dtype=complex)
    expected[0] = math.cos(phi / 2.0)
    expected[3] = -1j * math.sin(phi / 2.0)
    assert_allclose(sv.amps, expected, atol=1e-15)


def test_xx_same_qubit_rejected():
    with pytest.raises(ValueError):
        new_zero(2).apply_xx(1, 1, 0.3)


def test_project_certain_outcome():
    sv = new_zero(1)
    p = sv.project_qubit(0, 0)
    assert p == pytest.approx(1.0, abs=1e-15)
    assert_allclose(sv.amps, [1.0, 0.0])


def test_project_superposition():
    sv = new_zero(1)
    sv.h(0)
    p = sv.project_qubit(0, 0)
    assert p == pytest.approx(0.5, abs=1e-15)
    assert_allclose(sv.amps, [1.0, 0.0], atol=1e-15)


def test_project_impossible_branch():
    sv = new_zero(1)
    with pytest.raises(ImpossibleBranch):
        sv.project_qubit(0, 1)
    assert_allclose(sv.amps, [0.0, 0.0])


def test_project_probabilities_sum_to_one():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(1, 6))
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        amps /= np.linalg.norm(amps)
        q = int(rng.integers(n))
        p0 = Statevector(n, amps.copy()).project_qubit(q, 0)
        p1 = Statevector(n, amps.copy()).project_qubit(q, 1)
        assert p0 + p1 == pytest.approx(1.0, abs=1e-12)


def test_project_then_marginal_is_point_mass():
    sv = new_zero(3)
    for q in range(3):
        sv.h(q)
    sv.project_qubit(1, 1)
    dist = sv.marginal_distribution([1])
    assert_allclose(dist.probs, [0.0, 1.0], atol=1e-15)


def test_marginal_full_point_mass():
    sv = new_zero(2)
    sv.x(0)  # |01> in (q1 q0) order: index 1
    dist = sv.marginal_distribution([0, 1])
    assert_allclose(dist.probs, [0, 1, 0, 0])


def test_marginal_bell_single_qubit():
    sv = new_zero(2)
    sv.h(0)
    sv.cx(0, 1)
    dist = sv.marginal_distribution([0])
    assert_allclose(dist.probs, [0.5, 0.5], atol=1e-15)


def test_marginal_output_bit_order():
    sv = new_zero(2)
    sv.x(0)
    # listed order defines output bits: qubit 0 -> bit 0 vs bit 1
    assert_allclose(sv.marginal_distribution([0, 1]).probs, [0, 1, 0, 0])
    assert_allclose(sv.marginal_distribution([1, 0]).probs, [0, 0, 1, 0])


def test_marginal_rejects_duplicates():
    with pytest.raises(ValueError):
        new_zero(2).marginal_distribution([0, 0])


def test_marginal_rejects_out_of_range():
    with pytest.raises(IndexError):
        new_zero(2).marginal_distribution([0, 2])


def test_marginal_sums_to_one_on_random_states():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        amps /= np.linalg.norm(amps)
        k = int(rng.integers(1, n + 1))
        measured = [int(q) for q in rng.choice(n, size=k, replace=False)]
        dist = Statevector(n, amps).marginal_distribution(measured)
        dist.validate()


def test_sample_point_mass():
    dist = ProbDist(2, np.array([0.0, 0.0, 1.0, 0.0]))
    counts = sample(dist, 100, rng_seed=0)
    assert counts.tolist() == [0, 0, 100, 0]


def test_sample_deterministic():
    dist = ProbDist(2, np.full(4, 0.25))
    a = sample(dist, 1000, rng_seed=42)
    b = sample(dist, 1000, rng_seed=42)
    assert np.array_equal(a, b)


def test_sample_uniform_within_five_sigma():
    n = 1_000_000
    dist = ProbDist(2, np.full(4, 0.25))
    counts = sample(dist, n, rng_seed=7)
    assert counts.sum() == n
    sigma = math.sqrt(n * 0.25 * 0.75)
    assert np.all(np.abs(counts - n * 0.25) < 5 * sigma)


def test_sample_rejects_invalid_dist():
    with pytest.raises(ValueError):
        sample(ProbDist(1, np.array([0.7, 0.7])), 10, 0)


def test_probdist_validate_rejects_negative():
    with pytest.raises(ValueError):
        ProbDist(1, np.array([1.2, -0.2])).validate()


def test_norm_preserved_by_long_random_circuit():
    rng = np.random.default_rng(23)
    sv = new_zero(5)
    for _ in range(60):
        op = rng.choice(["h", "rx", "ry", "rz", "cry", "xx"])
        if op == "h":
            sv.h(int(rng.integers(5)))
        elif op in ("rx", "ry", "rz"):
            getattr(sv, op)(int(rng.integers(5)), float(rng.uniform(-3, 3)))
        else:
            a, b = rng.choice(5, size=2, replace=False)
            if op == "cry":
                sv.cry(int(a), int(b), float(rng.uniform(-3, 3)))
            else:
                sv.apply_xx(int(a), int(b), float(rng.uniform(-3, 3)))
    assert sv.norm_sq() == pytest.approx(1.0, abs=1e-10)
