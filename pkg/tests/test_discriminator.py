import numpy as np
import pytest

from freqdenoise import (
    LinearDisc,
    SpectralVector,
    TrainConfig,
    disc_from_csv,
    disc_to_csv,
    evaluate,
    forward,
    train,
)
from freqdenoise.discriminator import batch_loss, loss_gradient


def vecs(rows: np.ndarray):
    return [SpectralVector(row) for row in rows]


def random_sets(seed, n_clean=6, n_noisy=6, dim=8):
    rng = np.random.default_rng(seed)
    return rng.random((n_clean, dim)), rng.random((n_noisy, dim)) + 1.0


def lipschitz_bound(clean: np.ndarray, noisy: np.ndarray) -> float:
    # Largest Hessian eigenvalue of the quadratic in (weights, bias).
    xc = np.hstack([clean, np.ones((clean.shape[0], 1))])
    xn = np.hstack([noisy, np.ones((noisy.shape[0], 1))])
    h = (2.0 / xc.shape[0]) * xc.T @ xc + (2.0 / xn.shape[0]) * xn.T @ xn
    return float(np.linalg.eigvalsh(h)[-1])


def test_forward_zero_disc():
    d = LinearDisc(np.zeros(5), 0.0)
    assert forward(d, SpectralVector(np.arange(5, dtype=float))) == 0.0


def test_forward_basis_weight():
    w = np.zeros(6)
    w[3] = 1.0
    d = LinearDisc(w, 0.25)
    v = SpectralVector(np.array([0.0, 1, 2, 3, 4, 5]))
    assert forward(d, v) == 3.25


def test_forward_matches_dot_product():
    rng = np.random.default_rng(0)
    for _ in range(10):
        w, x = rng.standard_normal(7), rng.random(7)
        d = LinearDisc(w, float(rng.standard_normal()))
        want = sum(wi * xi for wi, xi in zip(w, x)) + d.bias
        assert abs(forward(d, SpectralVector(x)) - want) < 1e-12


def test_forward_length_mismatch():
    with pytest.raises(ValueError):
        forward(LinearDisc(np.zeros(5), 0.0), SpectralVector(np.zeros(4)))


def test_forward_linearity():
    rng = np.random.default_rng(1)
    d = LinearDisc(rng.standard_normal(5), 0.7)
    u, v = rng.random(5), rng.random(5)
    a, b = 0.3, 1.4
    left = forward(d, SpectralVector(a * u + b * v))
    right = a * forward(d, SpectralVector(u)) + b * forward(d, SpectralVector(v)) - (a + b - 1) * d.bias
    assert abs(left - right) < 1e-12


def test_train_zero_epochs():
    clean, noisy = random_sets(2)
    d, history = train(vecs(clean), vecs(noisy), TrainConfig(epochs=0))
    assert np.array_equal(d.weights, np.zeros(8))
    assert d.bias == 0.0
    assert history == []


def test_train_separable_synthetic_data():
    dim = 6
    clean_train = vecs(np.zeros((8, dim)))
    noisy_train = vecs(np.ones((8, dim)))
    cfg = TrainConfig(learning_rate=0.1, epochs=200)
    d, history = train(clean_train, noisy_train, cfg)
    assert len(history) == 200
    rng = np.random.default_rng(3)
    clean_held = vecs(0.05 * rng.random((6, dim)))
    noisy_held = vecs(1.0 + 0.05 * rng.random((6, dim)))
    assert evaluate(d, clean_held, noisy_held) == 1.0


def test_history_non_increasing_at_safe_rate():
    clean, noisy = random_sets(4)
    lr = 1.0 / (2.0 * lipschitz_bound(clean, noisy))
    _, history = train(vecs(clean), vecs(noisy), TrainConfig(learning_rate=lr, epochs=300))
    diffs = np.diff(history)
    assert np.all(diffs <= 1e-14)  # a few ulps of slack once converged


def test_training_is_bit_reproducible():
    clean, noisy = random_sets(5)
    cfg = TrainConfig(learning_rate=0.01, epochs=50)
    d1, h1 = train(vecs(clean), vecs(noisy), cfg)
    d2, h2 = train(vecs(clean), vecs(noisy), cfg)
    assert np.array_equal(d1.weights, d2.weights)
    assert d1.bias == d2.bias
    assert h1 == h2


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(6)
    for _ in range(20):
        dim = int(rng.integers(2, 10))
        clean = rng.random((int(rng.integers(1, 6)), dim))
        noisy = rng.random((int(rng.integers(1, 6)), dim)) * 2
        w = rng.standard_normal(dim)
        b = float(rng.standard_normal())
        rt, ft = float(rng.standard_normal()), float(rng.standard_normal())
        grad_w, grad_b = loss_gradient(LinearDisc(w, b), clean, noisy, rt, ft)
        h = 1e-6
        fd = np.empty(dim + 1)
        for i in range(dim):
            wp, wm = w.copy(), w.copy()
            wp[i] += h
            wm[i] -= h
            fd[i] = (
                batch_loss(LinearDisc(wp, b), clean, noisy, rt, ft)
                - batch_loss(LinearDisc(wm, b), clean, noisy, rt, ft)
            ) / (2 * h)
        fd[dim] = (
            batch_loss(LinearDisc(w, b + h), clean, noisy, rt, ft)
            - batch_loss(LinearDisc(w, b - h), clean, noisy, rt, ft)
        ) / (2 * h)
        analytic = np.append(grad_w, grad_b)
        rel = np.linalg.norm(analytic - fd) / max(np.linalg.norm(fd), 1e-12)
        assert rel < 1e-6


def test_evaluate_perfect_separator():
    d = LinearDisc(np.array([1.0, 0.0]), 0.0)
    clean = vecs(np.array([[1.0, 0.3], [0.9, 0.1]]))
    noisy = vecs(np.array([[0.0, 0.5], [0.1, 0.9]]))
    assert evaluate(d, clean, noisy) == 1.0


def test_evaluate_zero_disc_balanced():
    clean, noisy = random_sets(7, n_clean=5, n_noisy=5)
    d = LinearDisc(np.zeros(8), 0.0)
    # All scores are 0: ties go to the fake side, so only noisy are correct.
    assert evaluate(d, vecs(clean), vecs(noisy)) == 0.5


def test_empty_sets_rejected():
    clean, _ = random_sets(8)
    with pytest.raises(ValueError):
        train([], vecs(clean), TrainConfig())
    with pytest.raises(ValueError):
        train(vecs(clean), [], TrainConfig())
    with pytest.raises(ValueError):
        evaluate(LinearDisc(np.zeros(8), 0.0), vecs(clean), [])


def test_mixed_lengths_rejected():
    bad = [SpectralVector(np.zeros(3)), SpectralVector(np.zeros(4))]
    with pytest.raises(ValueError):
        train(bad, [SpectralVector(np.zeros(3))], TrainConfig())


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(epochs=-1)


def test_disc_csv_round_trip():
    rng = np.random.default_rng(9)
    d = LinearDisc(rng.standard_normal(11), float(rng.standard_normal()))
    back = disc_from_csv(disc_to_csv(d))
    assert np.array_equal(back.weights, d.weights)
    assert back.bias == d.bias


def test_disc_csv_malformed():
    with pytest.raises(ValueError):
        disc_from_csv("1.0,2.0\n")
    with pytest.raises(ValueError):
        disc_from_csv("1.0,2.0\n0.5\nextra\n")
