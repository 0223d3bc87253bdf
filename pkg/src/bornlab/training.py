"""Gradient-based distribution learning.

The loss is the clipped KL divergence between the target and the model's
output distribution, evaluated either exactly or from a finite number of
simulated shots.  Gradients come from central finite differences (the
mid-circuit measurements rule out a parameter-shift rule), and updates from
a standard bias-corrected Adam.

Every run is fully determined by (model, target, config, seed): parameters
initialize from the seed, and in shot mode every loss evaluation draws its
shots from an rng stream keyed by the seed and a per-run evaluation counter.
"""

from dataclasses import dataclass, field

import numpy as np

from .models import ModelSpec
from .statevector import ProbDist, sample
from .targets import kl_divergence, precision, target_support_mask


class TrainingError(Exception):
    """A training run hit a non-finite loss or other unrecoverable state."""


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer hyperparameters; the defaults match the experimental protocol."""

    max_iterations: int
    learning_rate: float = 0.2
    fd_step: float = 0.1
    shots: int | None = None  # None = exact distribution
    seeds: tuple = (6, 7, 8, 9, 10)  # keep in sync with experiments.DEFAULT_SEEDS
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0 or self.fd_step <= 0 or self.max_iterations < 1:
            raise ValueError(f"invalid training config {self}")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be >= 1 or None, got {self.shots}")


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n_params: int) -> "AdamState":
        return cls(np.zeros(n_params), np.zeros(n_params))


@dataclass
class TrainTrace:
    """Everything one seeded run produced."""

    seed: int
    loss_history: np.ndarray
    final_params: np.ndarray
    final_kl: float
    final_precision: float
    acceptance_history: np.ndarray | None = None  # QNBM only

    @property
    def last_loss(self) -> float:
        return float(self.loss_history[-1])


@dataclass
class MultiSeedResult:
    traces: list
    failures: dict = field(default_factory=dict)  # seed -> error message

    @property
    def best(self) -> TrainTrace:
        # best run = lowest last training loss
        return min(self.traces, key=lambda tr: tr.last_loss)

    def _stats(self, values) -> tuple:
        arr = np.array(values, dtype=float)
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        return float(arr.mean()), std

    @property
    def kl_mean_std(self) -> tuple:
        return self._stats([tr.final_kl for tr in self.traces])

    @property
    def precision_mean_std(self) -> tuple:
        return self._stats([tr.final_precision for tr in self.traces])


def _shot_seed(seed: int, eval_index: int) -> int:
    # Independent, reproducible stream per loss evaluation within a run.
    return int(np.random.SeedSequence((seed, eval_index)).generate_state(1)[0])


def loss(model_eval, params, target: ProbDist, shots: int | None, shot_seed: int | None = None) -> float:
    """KL(target || model at params), exact or estimated from sampled shots.

    ``model_eval`` maps a parameter vector to a ProbDist (or a
    (ProbDist, acceptance) pair, whose second element is ignored here).
    """
    out = model_eval(params)
    dist = out[0] if isinstance(out, tuple) else out
    if shots is None:
        return kl_divergence(target, dist)
    counts = sample(dist, shots, 0 if shot_seed is None else shot_seed)
    empirical = ProbDist(dist.n_bits, counts / shots)
    return kl_divergence(target, empirical)


def finite_diff_gradient(loss_fn, params: np.ndarray, fd_step: float) -> np.ndarray:
    """Central differences: g_k = [L(p + eps e_k) - L(p - eps e_k)] / (2 eps)."""
    if fd_step <= 0:
        raise ValueError(f"fd_step must be positive, got {fd_step}")
    grad = np.empty(params.size)
    for k in range(params.size):
        shifted = params.copy()
        shifted[k] = params[k] + fd_step
        up = loss_fn(shifted)
        shifted[k] = params[k] - fd_step
        down = loss_fn(shifted)
        grad[k] = (up - down) / (2.0 * fd_step)
    return grad


def adam_step(
    state: AdamState, params: np.ndarray, gradient: np.ndarray, config: TrainConfig
) -> tuple:
    """One bias-corrected Adam update; returns (new params, new state)."""
    t = state.t + 1
    m = config.adam_beta1 * state.m + (1.0 - config.adam_beta1) * gradient
    v = config.adam_beta2 * state.v + (1.0 - config.adam_beta2) * gradient**2
    m_hat = m / (1.0 - config.adam_beta1**t)
    v_hat = v / (1.0 - config.adam_beta2**t)
    new_params = params - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_epsilon)
    return new_params, AdamState(m, v, t)


def train(model: ModelSpec, target: ProbDist, config: TrainConfig, seed: int) -> TrainTrace:
    """One seeded training run; returns the full trace.

    ``loss_history[i]`` is the loss at the parameters entering iteration i.
    Final KL and precision always come from the exact final distribution
    (precision against the target's support), regardless of shot mode.
    """
    rng = np.random.default_rng(seed)
    params = model.init_params(rng)

    track_acceptance = model.kind == "qnbm"
    eval_counter = 0

    def loss_at(p) -> float:
        nonlocal eval_counter
        shot_seed = _shot_seed(seed, eval_counter) if config.shots is not None else None
        eval_counter += 1
        return loss(model.distribution, p, target, config.shots, shot_seed)

    state = AdamState.zeros(params.size)
    loss_history = np.empty(config.max_iterations)
    acceptance_history = np.empty(config.max_iterations) if track_acceptance else None

    for it in range(config.max_iterations):
        current = loss_at(params)
        if not np.isfinite(current):
            raise TrainingError(
                f"non-finite loss {current} at iteration {it} (seed {seed}, model {model.label})"
            )
        loss_history[it] = current
        if track_acceptance:
            _, acc = model.distribution(params)
            acceptance_history[it] = acc
        gradient = finite_diff_gradient(loss_at, params, config.fd_step)
        params, state = adam_step(state, params, gradient, config)

    final_dist, _ = _exact_dist(model, params)
    final_kl = kl_divergence(target, final_dist)
    final_precision = precision(final_dist, target_support_mask(target))
    return TrainTrace(
        seed=seed,
        loss_history=loss_history,
        final_params=params,
        final_kl=final_kl,
        final_precision=final_precision,
        acceptance_history=acceptance_history,
    )


def _exact_dist(model: ModelSpec, params) -> tuple:
    out = model.distribution(params)
    return (out[0], out[1]) if isinstance(out, tuple) else (out, None)


def multi_seed_train(
    model: ModelSpec, target: ProbDist, config: TrainConfig, seeds=None, jobs: int = 1
) -> MultiSeedResult:
    """Independent runs over the seed list; failed seeds are recorded, not fatal."""
    seed_list = list(config.seeds if seeds is None else seeds)
    if not seed_list:
        raise ValueError("need at least one seed")

    traces, failures = [], {}
    if jobs > 1 and len(seed_list) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {s: pool.submit(train, model, target, config, s) for s in seed_list}
            for s in seed_list:
                try:
                    traces.append(futures[s].result())
                except Exception as exc:  # noqa: BLE001 - per-seed isolation
                    failures[s] = str(exc)
    else:
        for s in seed_list:
            try:
                traces.append(train(model, target, config, s))
            except Exception as exc:  # noqa: BLE001 - per-seed isolation
                failures[s] = str(exc)

    if not traces:
        raise TrainingError(f"all seeds failed: {failures}")
    return MultiSeedResult(traces=traces, failures=failures)
