"""Dense statevector engine with in-place gate application.

Qubit-to-bit mapping is little-endian throughout: qubit ``q`` corresponds to
bit ``q`` of the amplitude index, so basis state ``|...b1 b0>`` lives at
index ``sum_q b_q * 2**q``.

Rotation gates follow the exp(-i*phi*P/2) convention, e.g.
``RY(phi) = [[cos(phi/2), -sin(phi/2)], [sin(phi/2), cos(phi/2)]]``.

Gates are applied by bit-masked index iteration over amplitude pairs
(numba-compiled); no full 2^n x 2^n matrix is ever built here.  The dense
construction lives only in :mod:`bornlab.oracle`.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

MAX_QUBITS = 24

# Projection probabilities below this are treated as analytically zero
# rather than round-off.
IMPOSSIBLE_BRANCH_THRESHOLD = 1e-14


class ImpossibleBranch(Exception):
    """Raised when a projection outcome has (numerically) zero probability."""


# ---------------------------------------------------------------------------
# Gate matrices (2x2), used as arguments to apply_1q / apply_controlled_1q.

H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


def rx(phi: float) -> np.ndarray:
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def ry(phi: float) -> np.ndarray:
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz(phi: float) -> np.ndarray:
    e = np.exp(-0.5j * phi)
    return np.array([[e, 0.0], [0.0, e.conjugate()]], dtype=np.complex128)


# ---------------------------------------------------------------------------
# Numba kernels: pairwise amplitude updates selected by bit masks.


@njit(cache=True)
def _apply_1q_kernel(amps, qubit, m00, m01, m10, m11):
    half = amps.size >> 1
    low = (1 << qubit) - 1
    tbit = 1 << qubit
    for g in range(half):
        i0 = ((g >> qubit) << (qubit + 1)) | (g & low)
        i1 = i0 | tbit
        a0 = amps[i0]
        a1 = amps[i1]
        amps[i0] = m00 * a0 + m01 * a1
        amps[i1] = m10 * a0 + m11 * a1


@njit(cache=True)
def _apply_c1q_kernel(amps, cbit, tbit, m00, m01, m10, m11):
    for i in range(amps.size):
        if (i & cbit) != 0 and (i & tbit) == 0:
            j = i | tbit
            a0 = amps[i]
            a1 = amps[j]
            amps[i] = m00 * a0 + m01 * a1
            amps[j] = m10 * a0 + m11 * a1


@njit(cache=True)
def _apply_xx_kernel(amps, b1, b2, c, s):
    # XX(phi) = cos(phi/2) I - i sin(phi/2) X(x)X: mixes i with i^(b1|b2).
    m = b1 | b2
    for i in range(amps.size):
        if (i & b1) == 0:
            j = i ^ m
            a = amps[i]
            b = amps[j]
            amps[i] = c * a - 1j * s * b
            amps[j] = c * b - 1j * s * a


@njit(cache=True)
def _project_kernel(amps, qbit, outcome):
    p = 0.0
    for i in range(amps.size):
        has_bit = (i & qbit) != 0
        if has_bit == (outcome == 1):
            a = amps[i]
            p += a.real * a.real + a.imag * a.imag
        else:
            amps[i] = 0.0
    return p


@njit(cache=True)
def _norm_sq_kernel(amps):
    p = 0.0
    for i in range(amps.size):
        a = amps[i]
        p += a.real * a.real + a.imag * a.imag
    return p


# ---------------------------------------------------------------------------


@dataclass
class ProbDist:
    """Dense probability vector over the 2^n_bits bitstrings."""

    n_bits: int
    probs: np.ndarray

    def validate(self, atol: float = 1e-10) -> None:
        if self.probs.shape != (1 << self.n_bits,):
            raise ValueError(
                f"probs has shape {self.probs.shape}, expected ({1 << self.n_bits},)"
            )
        if np.any(self.probs < -atol):
            raise ValueError("probabilities must be nonnegative")
        total = float(self.probs.sum())
        if abs(total - 1.0) > atol:
            raise ValueError(f"probabilities sum to {total}, expected 1")


class Statevector:
    """Dense complex amplitude array over ``n_qubits`` qubits."""

    __slots__ = ("n_qubits", "amps")

    def __init__(self, n_qubits: int, amps: np.ndarray):
        if amps.shape != (1 << n_qubits,):
            raise ValueError(f"amps has length {amps.size}, expected {1 << n_qubits}")
        self.n_qubits = n_qubits
        self.amps = amps

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        """The all-zeros basis state |0...0>."""
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amps.copy())

    def norm_sq(self) -> float:
        return float(_norm_sq_kernel(self.amps))

    def _check_index(self, qubit: int) -> None:
        if not 0 <= qubit < self.n_qubits:
            raise IndexError(f"qubit {qubit} out of range for {self.n_qubits} qubits")

    # -- unitary operations -------------------------------------------------

    def apply_1q(self, qubit: int, gate: np.ndarray) -> None:
        """Apply a 2x2 gate to one qubit, in place."""
        self._check_index(qubit)
        _apply_1q_kernel(
            self.amps, qubit, gate[0, 0], gate[0, 1], gate[1, 0], gate[1, 1]
        )

    def apply_controlled_1q(self, control: int, target: int, gate: np.ndarray) -> None:
        """Apply a 2x2 gate to ``target`` on the subspace where ``control`` is 1."""
        self._check_index(control)
        self._check_index(target)
        if control == target:
            raise ValueError("control and target must differ")
        _apply_c1q_kernel(
            self.amps,
            1 << control,
            1 << target,
            gate[0, 0],
            gate[0, 1],
            gate[1, 0],
            gate[1, 1],
        )

    def apply_xx(self, q1: int, q2: int, phi: float) -> None:
        """Apply XX(phi) = exp(-i*(phi/2)*X(x)X) to the qubit pair."""
        self._check_index(q1)
        self._check_index(q2)
        if q1 == q2:
            raise ValueError("q1 and q2 must differ")
        _apply_xx_kernel(self.amps, 1 << q1, 1 << q2, math.cos(phi / 2.0), math.sin(phi / 2.0))

    # Named single-qubit shorthands.

    def h(self, qubit: int) -> None:
        self.apply_1q(qubit, H)

    def x(self, qubit: int) -> None:
        self.apply_1q(qubit, X)

    def rx(self, qubit: int, phi: float) -> None:
        self.apply_1q(qubit, rx(phi))

    def ry(self, qubit: int, phi: float) -> None:
        self.apply_1q(qubit, ry(phi))

    def rz(self, qubit: int, phi: float) -> None:
        self.apply_1q(qubit, rz(phi))

    def cry(self, control: int, target: int, phi: float) -> None:
        self.apply_controlled_1q(control, target, ry(phi))

    def cx(self, control: int, target: int) -> None:
        self.apply_controlled_1q(control, target, X)

    # -- measurement-like operations ----------------------------------------

    def project_qubit(self, qubit: int, outcome: int) -> float:
        """Project one qubit onto ``outcome`` and renormalize.

        Returns the pre-projection probability of ``outcome``.  If that
        probability is below 1e-14 the state is left zeroed and
        :class:`ImpossibleBranch` is raised.
        """
        self._check_index(qubit)
        if outcome not in (0, 1):
            raise ValueError(f"outcome must be 0 or 1, got {outcome}")
        p = float(_project_kernel(self.amps, 1 << qubit, outcome))
        if p < IMPOSSIBLE_BRANCH_THRESHOLD:
            self.amps[:] = 0.0
            raise ImpossibleBranch(
                f"outcome {outcome} on qubit {qubit} has probability {p:.3e}"
            )
        self.amps *= 1.0 / math.sqrt(p)
        return p

    def marginal_distribution(self, measured_qubits) -> ProbDist:
        """Probability distribution over the listed qubits.

        Output bit ``k`` of the result corresponds to ``measured_qubits[k]``;
        unmeasured qubits are summed out.
        """
        measured = list(measured_qubits)
        if len(set(measured)) != len(measured):
            raise ValueError(f"duplicate qubit in {measured}")
        for q in measured:
            self._check_index(q)
        probs = np.abs(self.amps) ** 2
        idx = np.arange(self.amps.size)
        key = np.zeros(self.amps.size, dtype=np.int64)
        for k, q in enumerate(measured):
            key |= ((idx >> q) & 1) << k
        acc = np.bincount(key, weights=probs, minlength=1 << len(measured))
        return ProbDist(len(measured), acc)


def new_zero(n_qubits: int) -> Statevector:
    """Fresh |0...0> state."""
    return Statevector.zero(n_qubits)


def sample(dist: ProbDist, n_samples: int, rng_seed: int) -> np.ndarray:
    """Multinomial draw from ``dist``; returns per-bitstring counts.

    Deterministic given ``rng_seed``; counts sum to ``n_samples``.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    dist.validate()
    probs = np.maximum(dist.probs, 0.0)
    probs = probs / probs.sum()
    rng = np.random.default_rng(rng_seed)
    return rng.multinomial(n_samples, probs)
