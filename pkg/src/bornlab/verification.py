"""Self-checks tying the fast engine, the neuron algebra, and the dense oracle together.

Each check returns a :class:`CheckResult` with the worst deviation it saw;
:func:`run_verify` bundles them into one pass/fail report.  These run in
seconds and back the ``verify`` CLI subcommand.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from .models import qnbm_spec
from .neuron import NeuronParams, activation, apply_quantum_neuron, success_probability
from .statevector import ImpossibleBranch, Statevector
from .targets import cardinality_target
from .training import finite_diff_gradient, loss


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    detail: str = ""


@dataclass
class VerifyReport:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


# ---------------------------------------------------------------------------


def _neuron_block_state(n_inputs: int, bits, weights, bias) -> Statevector:
    """Basis input -> post-selected state of a single neuron block.

    Qubits: inputs 0..n-1, target n, ancilla n+1.
    """
    sv = Statevector.zero(n_inputs + 2)
    for q, bit in enumerate(bits):
        if bit:
            sv.x(q)
    apply_quantum_neuron(
        sv, range(n_inputs), NeuronParams(np.asarray(weights, float), bias), n_inputs, n_inputs + 1
    )
    return sv


def check_activation_identity(trials: int = 50, seed: int = 7) -> CheckResult:
    """Circuit-extracted target rotation vs arctan(tan^2(theta)) on basis inputs."""
    rng = np.random.default_rng(seed)
    tol = 1e-10
    worst = 0.0
    for trial in range(trials):
        n_inputs = int(rng.integers(1, 4))
        weights = rng.uniform(-1.0, 1.0, size=n_inputs)
        bias = float(rng.uniform(-1.0, 1.0))
        for x in range(1 << n_inputs):
            bits = [(x >> i) & 1 for i in range(n_inputs)]
            sv = _neuron_block_state(n_inputs, bits, weights, bias)
            theta = float(np.dot(weights, bits) + bias)
            q = float(activation(theta))
            expected = np.zeros(sv.amps.size, dtype=np.complex128)
            expected[x] = math.cos(q)
            expected[x | (1 << n_inputs)] = math.sin(q)
            worst = max(worst, float(np.abs(sv.amps - expected).max()))
    # fixed point q(pi/4) = pi/4, realized with a bias-only neuron
    sv = _neuron_block_state(1, [0], [0.0], math.pi / 4)
    q_circ = math.atan2(float(sv.amps[2].real), float(sv.amps[0].real))
    worst = max(worst, abs(q_circ - math.pi / 4))
    return CheckResult("activation_identity", worst <= tol, worst, tol,
                       f"{trials} random neurons, all basis inputs")


def check_success_probability(trials: int = 50, seed: int = 11) -> CheckResult:
    """Projection probability of the block vs cos^4 + sin^4, plus its 1/2 floor."""
    rng = np.random.default_rng(seed)
    tol = 1e-10
    worst = 0.0
    for trial in range(trials):
        n_inputs = int(rng.integers(1, 4))
        weights = rng.uniform(-1.0, 1.0, size=n_inputs)
        bias = float(rng.uniform(-1.0, 1.0))
        x = int(rng.integers(0, 1 << n_inputs))
        bits = [(x >> i) & 1 for i in range(n_inputs)]
        sv = Statevector.zero(n_inputs + 2)
        for q, bit in enumerate(bits):
            if bit:
                sv.x(q)
        p = apply_quantum_neuron(
            sv, range(n_inputs), NeuronParams(weights, bias), n_inputs, n_inputs + 1
        )
        theta = float(np.dot(weights, bits) + bias)
        worst = max(worst, abs(p - float(success_probability(theta))))
    grid = np.linspace(0.0, math.pi, 2001)
    floor_dev = abs(float(success_probability(grid).min()) - 0.5)
    worst = max(worst, floor_dev)
    return CheckResult("success_probability", worst <= tol, worst, tol,
                       f"{trials} random blocks + grid floor at 1/2")


def random_circuit(rng: np.random.Generator, n_qubits: int, n_steps: int) -> list:
    """Random step list over the supported gate vocabulary."""
    steps = []
    n_projections = 0
    for _ in range(n_steps):
        kind = rng.choice(
            ["h", "x", "rx", "ry", "rz", "cry", "cx", "xx", "project0"],
            p=[0.12, 0.08, 0.12, 0.15, 0.12, 0.15, 0.08, 0.12, 0.06],
        )
        if kind == "project0" and (n_projections >= 2 or n_qubits < 2):
            kind = "ry"
        if kind in ("h", "x"):
            steps.append((kind, int(rng.integers(n_qubits))))
        elif kind in ("rx", "ry", "rz"):
            steps.append((kind, int(rng.integers(n_qubits)), float(rng.uniform(-math.pi, math.pi))))
        elif kind == "project0":
            steps.append((kind, int(rng.integers(n_qubits))))
            n_projections += 1
        elif kind in ("cry", "cx", "xx"):
            a, b = rng.choice(n_qubits, size=2, replace=False)
            if kind == "cx":
                steps.append((kind, int(a), int(b)))
            else:
                steps.append((kind, int(a), int(b), float(rng.uniform(-math.pi, math.pi))))
    return steps


def run_circuit_fast(n_qubits: int, steps) -> tuple:
    """Drive the fast engine from a step list; returns (Statevector, acceptance)."""
    sv = Statevector.zero(n_qubits)
    acceptance = 1.0
    for step in steps:
        op = step[0]
        if op == "h":
            sv.h(step[1])
        elif op == "x":
            sv.x(step[1])
        elif op == "rx":
            sv.rx(step[1], step[2])
        elif op == "ry":
            sv.ry(step[1], step[2])
        elif op == "rz":
            sv.rz(step[1], step[2])
        elif op == "cry":
            sv.cry(step[1], step[2], step[3])
        elif op == "cx":
            sv.cx(step[1], step[2])
        elif op == "xx":
            sv.apply_xx(step[1], step[2], step[3])
        elif op == "project0":
            acceptance *= sv.project_qubit(step[1], 0)
        else:
            raise ValueError(f"unknown circuit step {step!r}")
    return sv, acceptance


def check_oracle_equivalence(n_circuits: int = 500, seed: int = 13) -> CheckResult:
    """Fast-engine distributions vs dense-oracle distributions on random circuits."""
    rng = np.random.default_rng(seed)
    tol = 1e-10
    worst = 0.0
    mismatches = 0
    for _ in range(n_circuits):
        n = int(rng.integers(2, oracle.MAX_ORACLE_QUBITS + 1))
        steps = random_circuit(rng, n, int(rng.integers(4, 21)))
        n_measured = int(rng.integers(1, n + 1))
        measured = [int(q) for q in rng.choice(n, size=n_measured, replace=False)]
        try:
            ref_dist, ref_acc = oracle.reference_distribution(n, steps, measured)
        except ImpossibleBranch:
            try:
                run_circuit_fast(n, steps)
                mismatches += 1  # oracle impossible, engine not
            except ImpossibleBranch:
                pass
            continue
        try:
            sv, acc = run_circuit_fast(n, steps)
        except ImpossibleBranch:
            mismatches += 1  # engine impossible, oracle not
            continue
        dist = sv.marginal_distribution(measured)
        worst = max(worst, float(np.abs(dist.probs - ref_dist.probs).max()))
        worst = max(worst, abs(acc - ref_acc))
    passed = worst <= tol and mismatches == 0
    return CheckResult("oracle_equivalence", passed, worst, tol,
                       f"{n_circuits} random circuits <= {oracle.MAX_ORACLE_QUBITS} qubits, "
                       f"{mismatches} branch mismatches")


def check_normalization(trials: int = 100, seed: int = 17) -> CheckResult:
    """Unit norm after every unitary op on random states up to 6 qubits."""
    rng = np.random.default_rng(seed)
    tol = 1e-10
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 7))
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        amps /= np.linalg.norm(amps)
        for op in ("h", "x", "rx", "ry", "rz", "cry", "cx", "xx"):
            sv = Statevector(n, amps.copy())
            if op in ("h", "x"):
                getattr(sv, op)(int(rng.integers(n)))
            elif op in ("rx", "ry", "rz"):
                getattr(sv, op)(int(rng.integers(n)), float(rng.uniform(-math.pi, math.pi)))
            else:
                a, b = rng.choice(n, size=2, replace=False)
                if op == "cx":
                    sv.cx(int(a), int(b))
                elif op == "cry":
                    sv.cry(int(a), int(b), float(rng.uniform(-math.pi, math.pi)))
                else:
                    sv.apply_xx(int(a), int(b), float(rng.uniform(-math.pi, math.pi)))
            worst = max(worst, abs(sv.norm_sq() - 1.0))
    return CheckResult("normalization", worst <= tol, worst, tol,
                       f"{trials} random states, every unitary op")


def recovery_algebra_deviation(neuron_gate_angle: float = math.pi) -> float:
    """Worst distance of (recovery rotation) o (failure branch) from a scalar matrix.

    The failure branch is read off the dense bias-only block: the 2x2 map
    from ancilla-|0> input components to ancilla-|1> output components.
    Composing it with RY(+pi/2) must land back on a multiple of the
    identity; flipping the neuron gate sign breaks this.
    """
    worst = 0.0
    for bias in (0.3, 0.7, 1.1):
        # target = qubit 0, ancilla = qubit 1
        block = (
            oracle.step_operator(("ry", 1, -2.0 * bias), 2)
            @ oracle.step_operator(("cry", 1, 0, neuron_gate_angle), 2)
            @ oracle.step_operator(("ry", 1, 2.0 * bias), 2)
        )
        failure = block[2:4, 0:2]  # <1_a| block |0_a>, acting on the target
        scale = np.abs(failure).max()
        composed = oracle.step_operator(("ry", 0, math.pi / 2.0), 1) @ (failure / scale)
        residual = composed - (np.trace(composed) / 2.0) * np.eye(2)
        worst = max(worst, float(np.abs(residual).max()))
    return worst


def check_recovery_algebra() -> CheckResult:
    tol = 1e-12
    dev = recovery_algebra_deviation()
    return CheckResult("recovery_algebra", dev <= tol, dev, tol,
                       "failure branch x RY(+pi/2) proportional to identity")


def check_gradient_sanity(seed: int = 19) -> CheckResult:
    """Central differences exact on quadratics; step-size stable on a real loss."""
    rng = np.random.default_rng(seed)
    tol = 1e-9
    worst = 0.0
    for _ in range(10):
        x = rng.uniform(-2.0, 2.0, size=6)
        grad = finite_diff_gradient(lambda p: float(np.sum(p**2)), x, 0.1)
        worst = max(worst, float(np.abs(grad - 2.0 * x).max()))

    model = qnbm_spec(1, 0, 2)
    target = cardinality_target(2, 1)
    min_cosine = 1.0
    for _ in range(5):
        params = rng.uniform(-1.0, 1.0, size=model.param_count)
        loss_fn = lambda p: loss(model.distribution, p, target, None)
        g_coarse = finite_diff_gradient(loss_fn, params, 0.1)
        g_fine = finite_diff_gradient(loss_fn, params, 1e-4)
        denom = np.linalg.norm(g_coarse) * np.linalg.norm(g_fine)
        if denom > 0:
            min_cosine = min(min_cosine, float(np.dot(g_coarse, g_fine) / denom))
    passed = worst <= tol and min_cosine > 0.9
    return CheckResult("gradient_sanity", passed, worst, tol,
                       f"quadratic exactness + step-size cosine {min_cosine:.4f}")


def run_verify() -> VerifyReport:
    """Run every check; any failure flips the report to failed."""
    return VerifyReport([
        check_activation_identity(),
        check_success_probability(),
        check_oracle_equivalence(),
        check_normalization(),
        check_recovery_algebra(),
        check_gradient_sanity(),
    ])
