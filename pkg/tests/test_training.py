import numpy as np
import pytest
from numpy.testing import assert_allclose

from bornlab.models import qcbm_spec, qnbm_spec
from bornlab.statevector import ProbDist
from bornlab.targets import cardinality_target, uniform_target
from bornlab.training import (
    AdamState,
    TrainConfig,
    TrainingError,
    _shot_seed,
    adam_step,
    finite_diff_gradient,
    loss,
    multi_seed_train,
    train,
)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(max_iterations=0)
    with pytest.raises(ValueError):
        TrainConfig(max_iterations=10, learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(max_iterations=10, fd_step=-0.1)
    with pytest.raises(ValueError):
        TrainConfig(max_iterations=10, shots=0)
    cfg = TrainConfig(max_iterations=10)
    assert cfg.learning_rate == 0.2
    assert cfg.fd_step == 0.1
    assert cfg.shots is None


def test_adam_zero_gradient_is_a_no_op():
    cfg = TrainConfig(max_iterations=1)
    params = np.array([0.3, -0.7])
    new, state = adam_step(AdamState.zeros(2), params, np.zeros(2), cfg)
    assert_allclose(new, params)
    assert state.t == 1


def test_adam_first_step_is_signed_learning_rate():
    # bias correction makes m_hat = g and v_hat = g^2 on step one, so the
    # update is alpha * sign(g) up to epsilon
    cfg = TrainConfig(max_iterations=1, learning_rate=0.2)
    g = np.array([3.0, -0.5, 1e-3])
    new, _ = adam_step(AdamState.zeros(3), np.zeros(3), g, cfg)
    assert_allclose(new, -0.2 * np.sign(g), atol=1e-5)


def test_adam_minimizes_a_quadratic():
    cfg = TrainConfig(max_iterations=1, learning_rate=0.2)
    c = np.array([1.3, -0.4, 2.0])
    params = np.zeros(3)
    state = AdamState.zeros(3)
    for _ in range(800):
        grad = 2.0 * (params - c)
        params, state = adam_step(state, params, grad, cfg)
    assert_allclose(params, c, atol=1e-3)


def test_finite_diff_exact_on_quadratics():
    # central differences have no error on polynomials of degree <= 2
    rng = np.random.default_rng(5)
    a = rng.normal(size=(4, 4))
    a = a + a.T
    b = rng.normal(size=4)

    def f(x):
        return float(x @ a @ x + b @ x + 1.7)

    x0 = rng.normal(size=4)
    grad = finite_diff_gradient(f, x0, fd_step=0.1)
    assert_allclose(grad, 2.0 * a @ x0 + b, atol=1e-9)


def test_finite_diff_rejects_bad_step():
    with pytest.raises(ValueError):
        finite_diff_gradient(lambda x: 0.0, np.zeros(2), fd_step=0.0)


def test_loss_zero_at_target():
    target = cardinality_target(2, 1)
    assert loss(lambda p: target, np.zeros(1), target, shots=None) == pytest.approx(
        0.0, abs=1e-15
    )


def test_loss_accepts_distribution_acceptance_pairs():
    target = uniform_target(2)
    spec = qnbm_spec(1, 0, 2)
    params = np.full(spec.param_count, 0.2)
    v = loss(spec.distribution, params, target, shots=None)
    assert np.isfinite(v) and v > 0.0


def test_shot_loss_converges_to_exact_loss():
    spec = qnbm_spec(1, 0, 2)
    target = cardinality_target(2, 1)
    rng = np.random.default_rng(23)
    params = spec.init_params(rng)
    exact = loss(spec.distribution, params, target, shots=None)
    for k in range(20):
        noisy = loss(spec.distribution, params, target, shots=1_000_000, shot_seed=k)
        assert abs(noisy - exact) < 0.02


def test_shot_loss_is_seed_deterministic():
    spec = qnbm_spec(1, 0, 2)
    target = uniform_target(2)
    params = np.full(spec.param_count, 0.4)
    a = loss(spec.distribution, params, target, shots=500, shot_seed=42)
    b = loss(spec.distribution, params, target, shots=500, shot_seed=42)
    c = loss(spec.distribution, params, target, shots=500, shot_seed=43)
    assert a == b
    assert a != c


def test_shot_seed_stream_is_distinct():
    seen = {_shot_seed(s, e) for s in range(4) for e in range(50)}
    assert len(seen) == 200


def test_train_is_deterministic():
    spec = qnbm_spec(1, 0, 2)
    target = cardinality_target(2, 1)
    cfg = TrainConfig(max_iterations=15)
    tr1 = train(spec, target, cfg, seed=3)
    tr2 = train(spec, target, cfg, seed=3)
    assert np.array_equal(tr1.loss_history, tr2.loss_history)
    assert np.array_equal(tr1.final_params, tr2.final_params)
    assert tr1.final_kl == tr2.final_kl
    assert tr1.final_precision == tr2.final_precision


def test_train_improves_the_loss():
    spec = qnbm_spec(1, 0, 2)
    target = cardinality_target(2, 1)
    tr = train(spec, target, TrainConfig(max_iterations=60), seed=0)
    assert tr.loss_history.shape == (60,)
    assert tr.last_loss < tr.loss_history[0]
    assert tr.final_kl < 0.05
    assert tr.final_precision > 0.95


def test_train_tracks_acceptance_only_for_post_selected_models():
    target = uniform_target(2)
    cfg = TrainConfig(max_iterations=3)
    with_anc = train(qnbm_spec(1, 0, 2), target, cfg, seed=1)
    assert with_anc.acceptance_history is not None
    assert with_anc.acceptance_history.shape == (3,)
    assert np.all(with_anc.acceptance_history > 0.25)
    no_anc = train(qcbm_spec(2, 1), target, cfg, seed=1)
    assert no_anc.acceptance_history is None


def test_shot_mode_training_runs_and_differs_from_exact():
    spec = qnbm_spec(1, 0, 2)
    target = cardinality_target(2, 1)
    exact = train(spec, target, TrainConfig(max_iterations=10), seed=2)
    shot = train(spec, target, TrainConfig(max_iterations=10, shots=200), seed=2)
    assert shot.loss_history.shape == (10,)
    assert not np.array_equal(exact.loss_history, shot.loss_history)


def test_multi_seed_statistics():
    spec = qnbm_spec(1, 0, 2)
    target = cardinality_target(2, 1)
    cfg = TrainConfig(max_iterations=25)
    res = multi_seed_train(spec, target, cfg, seeds=[0, 1, 2])
    assert [tr.seed for tr in res.traces] == [0, 1, 2]
    assert res.best.last_loss == min(tr.last_loss for tr in res.traces)
    kls = np.array([tr.final_kl for tr in res.traces])
    mean, std = res.kl_mean_std
    assert mean == pytest.approx(kls.mean())
    assert std == pytest.approx(kls.std(ddof=1))


def test_repeated_seed_gives_identical_traces():
    spec = qnbm_spec(1, 0, 2)
    target = uniform_target(2)
    cfg = TrainConfig(max_iterations=8)
    res = multi_seed_train(spec, target, cfg, seeds=[7, 7, 7])
    h0 = res.traces[0].loss_history
    assert all(np.array_equal(tr.loss_history, h0) for tr in res.traces)
    _, std = res.kl_mean_std
    assert std == pytest.approx(0.0, abs=1e-15)


def test_single_trace_std_is_zero():
    spec = qnbm_spec(1, 0, 2)
    res = multi_seed_train(
        spec, uniform_target(2), TrainConfig(max_iterations=3), seeds=[5]
    )
    assert res.kl_mean_std[1] == 0.0
    assert res.precision_mean_std[1] == 0.0


class _BrittleModel:
    """Test double: evaluation blows up when the init draw is negative."""

    kind = "qcbm"
    label = "brittle"
    param_count = 1

    def init_params(self, rng):
        return rng.uniform(-1.0, 1.0, size=1)

    def distribution(self, params):
        if params[0] < 0.0:
            raise RuntimeError("boom")
        return ProbDist(1, np.array([1.0, 0.0]))


def _split_seeds_by_init_sign(limit=20):
    good, bad = [], []
    for s in range(limit):
        draw = np.random.default_rng(s).uniform(-1.0, 1.0, size=1)[0]
        (good if draw >= 0.0 else bad).append(s)
    return good, bad


def test_failed_seeds_are_recorded_not_fatal():
    good, bad = _split_seeds_by_init_sign()
    assert good and bad
    model = _BrittleModel()
    target = uniform_target(1)
    cfg = TrainConfig(max_iterations=2)
    res = multi_seed_train(model, target, cfg, seeds=[good[0], bad[0]])
    assert len(res.traces) == 1
    assert res.traces[0].seed == good[0]
    assert list(res.failures) == [bad[0]]
    assert "boom" in res.failures[bad[0]]


def test_all_seeds_failing_raises():
    _, bad = _split_seeds_by_init_sign()
    with pytest.raises(TrainingError):
        multi_seed_train(
            _BrittleModel(), uniform_target(1), TrainConfig(max_iterations=2),
            seeds=bad[:2],
        )


def test_empty_seed_list_rejected():
    with pytest.raises(ValueError):
        multi_seed_train(
            qnbm_spec(1, 0, 2), uniform_target(2), TrainConfig(max_iterations=2),
            seeds=[],
        )


def test_parallel_jobs_match_serial():
    spec = qnbm_spec(1, 0, 2)
    target = cardinality_target(2, 1)
    cfg = TrainConfig(max_iterations=6)
    serial = multi_seed_train(spec, target, cfg, seeds=[0, 1], jobs=1)
    parallel = multi_seed_train(spec, target, cfg, seeds=[0, 1], jobs=2)
    for a, b in zip(serial.traces, parallel.traces):
        assert a.seed == b.seed
        assert np.array_equal(a.loss_history, b.loss_history)
        assert np.array_equal(a.final_params, b.final_params)
