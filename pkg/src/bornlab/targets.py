"""Target distributions and evaluation metrics.

Two target families: uniform over all bitstrings, and uniform over the
bitstrings of a fixed Hamming weight (cardinality constraint).  Metrics are
the clipped KL divergence used as the training loss and the precision of
generated samples (fraction landing in the valid set).
"""

from dataclasses import dataclass

import numpy as np

from .statevector import ProbDist

# Zero-probability clipping for the KL model term.
KL_CLIP = 1e-16


@dataclass(frozen=True)
class TargetSpec:
    """Which distribution to aim for: 'uniform' or 'cardinality' over n_bits.

    For cardinality targets the weight defaults to floor(n_bits / 2).
    """

    kind: str
    n_bits: int
    cardinality: int | None = None

    def __post_init__(self):
        if self.kind not in ("uniform", "cardinality"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.n_bits < 1:
            raise ValueError(f"n_bits must be >= 1, got {self.n_bits}")
        if self.kind == "cardinality":
            c = self.effective_cardinality
            if not 0 <= c <= self.n_bits:
                raise ValueError(f"cardinality {c} out of range for {self.n_bits} bits")

    @property
    def effective_cardinality(self) -> int:
        if self.cardinality is None:
            return self.n_bits // 2
        return self.cardinality

    @property
    def label(self) -> str:
        if self.kind == "uniform":
            return f"uniform_{self.n_bits}"
        return f"cardinality_{self.n_bits}_{self.effective_cardinality}"


def hamming_weight_mask(n_bits: int, weight: int) -> np.ndarray:
    """Boolean mask over all 2^n_bits indices with popcount == weight."""
    idx = np.arange(1 << n_bits)
    counts = np.zeros(idx.size, dtype=np.int64)
    for b in range(n_bits):
        counts += (idx >> b) & 1
    return counts == weight


def build_target(spec: TargetSpec) -> ProbDist:
    size = 1 << spec.n_bits
    if spec.kind == "uniform":
        probs = np.full(size, 1.0 / size)
    else:
        mask = hamming_weight_mask(spec.n_bits, spec.effective_cardinality)
        n_valid = int(mask.sum())
        probs = np.where(mask, 1.0 / n_valid, 0.0)
    return ProbDist(spec.n_bits, probs)


def target_support_mask(target: ProbDist) -> np.ndarray:
    """Valid set of a target: the bitstrings it assigns nonzero probability."""
    return target.probs > 0.0


def kl_divergence(target: ProbDist, model: ProbDist, clip: float = KL_CLIP) -> float:
    """sum_x P_t(x) ln(P_t(x) / max(P_m(x), clip)); zero-target terms drop out."""
    if target.n_bits != model.n_bits:
        raise ValueError(
            f"dimension mismatch: target {target.n_bits} bits, model {model.n_bits}"
        )
    pt = target.probs
    pm = np.maximum(model.probs, clip)
    mask = pt > 0.0
    return float(np.sum(pt[mask] * np.log(pt[mask] / pm[mask])))


def precision(model, valid_mask: np.ndarray) -> float:
    """Probability mass (or sample fraction) on the valid set.

    ``model`` is either a ProbDist (exact precision, sum of valid
    probabilities) or an integer count array from :func:`bornlab.sample`
    (sampled precision, fraction of valid draws).
    """
    valid_mask = np.asarray(valid_mask, dtype=bool)
    if isinstance(model, ProbDist):
        if valid_mask.shape != model.probs.shape:
            raise ValueError("valid mask length does not match distribution")
        return float(model.probs[valid_mask].sum())
    counts = np.asarray(model)
    if valid_mask.shape != counts.shape:
        raise ValueError("valid mask length does not match counts")
    total = int(counts.sum())
    if total == 0:
        raise ValueError("empty sample")
    return float(counts[valid_mask].sum()) / total


def cardinality_target(n_bits: int, cardinality: int | None = None) -> ProbDist:
    return build_target(TargetSpec("cardinality", n_bits, cardinality))


def uniform_target(n_bits: int) -> ProbDist:
    return build_target(TargetSpec("uniform", n_bits))
