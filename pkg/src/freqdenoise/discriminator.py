"""A single linear unit scoring high-pass spectral vectors as clean or noisy.

The model is score = dot(weights, v) + bias with no nonlinearity. Training
is deterministic full-batch gradient descent on the least-squares objective
from zero-initialized parameters, so identical inputs and config reproduce
bit-identical parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .spectrum import SpectralVector


@dataclass(frozen=True, eq=False)
class LinearDisc:
    weights: np.ndarray
    bias: float

    def __post_init__(self):
        arr = np.asarray(self.weights, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError(f"weights must be a non-empty vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or not np.isfinite(self.bias):
            raise ValueError("parameters must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)
        object.__setattr__(self, "bias", float(self.bias))


@dataclass(frozen=True)
class TrainConfig:
    """Descent settings. seed only matters to callers that split data."""

    learning_rate: float = 3e-4
    epochs: int = 500
    seed: int = 0
    real_target: float = 1.0
    fake_target: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}")


def forward(d: LinearDisc, v: SpectralVector) -> float:
    """Score one vector: dot(weights, values) + bias."""
    if d.weights.size != len(v):
        raise ValueError(f"length mismatch: disc {d.weights.size} vs vector {len(v)}")
    return float(np.dot(d.weights, v.values) + d.bias)


def _stack(vecs: Sequence[SpectralVector], label: str) -> np.ndarray:
    if len(vecs) == 0:
        raise ValueError(f"{label} vector set is empty")
    lengths = {len(v) for v in vecs}
    if len(lengths) != 1:
        raise ValueError(f"{label} vectors have mixed lengths {sorted(lengths)}")
    return np.stack([v.values for v in vecs])


def batch_loss(
    d: LinearDisc,
    clean: np.ndarray,
    noisy: np.ndarray,
    real_target: float,
    fake_target: float,
) -> float:
    s_clean = clean @ d.weights + d.bias
    s_noisy = noisy @ d.weights + d.bias
    return float(
        np.mean((s_clean - real_target) ** 2) + np.mean((s_noisy - fake_target) ** 2)
    )


def loss_gradient(
    d: LinearDisc,
    clean: np.ndarray,
    noisy: np.ndarray,
    real_target: float,
    fake_target: float,
) -> Tuple[np.ndarray, float]:
    """Analytic gradient of batch_loss in (weights, bias)."""
    r_clean = clean @ d.weights + d.bias - real_target
    r_noisy = noisy @ d.weights + d.bias - fake_target
    grad_w = (2.0 / clean.shape[0]) * (clean.T @ r_clean) + (2.0 / noisy.shape[0]) * (
        noisy.T @ r_noisy
    )
    grad_b = 2.0 * float(r_clean.mean()) + 2.0 * float(r_noisy.mean())
    return grad_w, grad_b


def train(
    clean_vecs: Sequence[SpectralVector],
    noisy_vecs: Sequence[SpectralVector],
    cfg: TrainConfig,
) -> Tuple[LinearDisc, List[float]]:
    """Full-batch gradient descent from zero parameters.

    The history holds the loss measured at the start of each epoch, before
    that epoch's update, so its length equals cfg.epochs. The objective is a
    convex quadratic; with a small enough rate the history never increases.
    """
    clean = _stack(clean_vecs, "clean")
    noisy = _stack(noisy_vecs, "noisy")
    if clean.shape[1] != noisy.shape[1]:
        raise ValueError(f"length mismatch: clean {clean.shape[1]} vs noisy {noisy.shape[1]}")
    w = np.zeros(clean.shape[1])
    b = 0.0
    history: List[float] = []
    for _ in range(cfg.epochs):
        d = LinearDisc(w, b)
        history.append(batch_loss(d, clean, noisy, cfg.real_target, cfg.fake_target))
        grad_w, grad_b = loss_gradient(d, clean, noisy, cfg.real_target, cfg.fake_target)
        w = w - cfg.learning_rate * grad_w
        b = b - cfg.learning_rate * grad_b
    return LinearDisc(w, b), history


def evaluate(
    d: LinearDisc,
    clean_vecs: Sequence[SpectralVector],
    noisy_vecs: Sequence[SpectralVector],
    real_target: float = 1.0,
    fake_target: float = 0.0,
) -> float:
    """Fraction of vectors whose score lands nearer its class target.

    Ties at the midpoint count as noisy, so a zero discriminator scores 0.5
    on balanced sets.
    """
    clean = _stack(clean_vecs, "clean")
    noisy = _stack(noisy_vecs, "noisy")
    s_clean = clean @ d.weights + d.bias
    s_noisy = noisy @ d.weights + d.bias
    pred_real_clean = np.abs(s_clean - real_target) < np.abs(s_clean - fake_target)
    pred_real_noisy = np.abs(s_noisy - real_target) < np.abs(s_noisy - fake_target)
    correct = int(pred_real_clean.sum()) + int((~pred_real_noisy).sum())
    return correct / (clean.shape[0] + noisy.shape[0])


def disc_to_csv(d: LinearDisc) -> str:
    """Two lines: comma-joined weights, then the bias."""
    line_w = ",".join(repr(float(x)) for x in d.weights)
    return f"{line_w}\n{repr(float(d.bias))}\n"


def disc_from_csv(text: str) -> LinearDisc:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise ValueError(f"expected 2 lines (weights, bias), got {len(lines)}")
    weights = np.array([float(x) for x in lines[0].split(",")])
    return LinearDisc(weights, float(lines[1]))
