"""Denoising by per-radius spectral gains, fit without clean references.

The model multiplies every Fourier coefficient of an image by the gain of
its rounded centered radius bin, so the whole denoiser is a vector of
floor(min(W,H)/2)+1 numbers in [0, 1]. Fitting pushes the azimuthal profile
of the masked spectrum toward a clean-set mean profile on the high band
while a small total-variation term discourages ringing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .image import Image
from .spectrum import SpectrumStats, default_r_tau, radius_bins

# Per-bin basis images (one inverse transform per radius bin) are cached
# during fitting while they fit comfortably in memory.
_BASIS_BYTES_LIMIT = 1 << 29


@dataclass(frozen=True, eq=False)
class RadialGain:
    """Multiplicative gain per radius bin, each within [0, 1]."""

    gains: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.gains, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError(f"gains must be a non-empty vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("gains must be finite")
        if np.any(arr < 0) or np.any(arr > 1):
            raise ValueError("gains must lie in [0, 1]")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "gains", arr)


@dataclass(frozen=True)
class FitConfig:
    """Projected-descent settings; seed is reserved for callers that sample."""

    learning_rate: float = 0.01
    iterations: int = 40
    seed: int = 0
    weight_tv: float = 0.2
    weight_spec: float = 1.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.iterations < 0:
            raise ValueError(f"iterations must be non-negative, got {self.iterations}")
        if self.weight_tv < 0 or self.weight_spec < 0:
            raise ValueError("loss weights must be non-negative")


def _capped_bins(height: int, width: int) -> np.ndarray:
    # Coefficients beyond R (the rectangle's corners) reuse the last gain.
    r_max = min(height, width) // 2
    return np.minimum(radius_bins(height, width), r_max)


def apply_gains(img: Image, g: RadialGain) -> Image:
    """Scale each coefficient by its bin gain, invert, clamp to [0, 1]."""
    r_max = min(img.height, img.width) // 2
    if g.gains.size != r_max + 1:
        raise ValueError(
            f"gain length {g.gains.size} does not match {r_max + 1} bins for "
            f"{img.width}x{img.height}"
        )
    gain_map = g.gains[_capped_bins(img.height, img.width)]
    out = [
        np.fft.ifft2(np.fft.fft2(img.data[c]) * gain_map).real for c in range(img.channels)
    ]
    return Image(np.clip(np.stack(out), 0.0, 1.0))


def wiener_oracle(noisy: Image, clean: Image) -> RadialGain:
    """Least-squares per-bin gains given the clean reference (for tests).

    gain[r] = sum Re(F_clean * conj(F_noisy)) / sum |F_noisy|^2 over the bin,
    channels pooled, clamped to [0, 1]; bins with zero noisy energy get 0.
    """
    if noisy.data.shape != clean.data.shape:
        raise ValueError(f"shape mismatch: {noisy.data.shape} vs {clean.data.shape}")
    r_max = min(noisy.height, noisy.width) // 2
    bins = _capped_bins(noisy.height, noisy.width).ravel()
    num = np.zeros(r_max + 1)
    den = np.zeros(r_max + 1)
    for c in range(noisy.channels):
        f_noisy = np.fft.fft2(noisy.data[c])
        f_clean = np.fft.fft2(clean.data[c])
        # Same expression form for both sums so clean == noisy gives exactly 1.
        cross = (f_clean * np.conj(f_noisy)).real
        power = (f_noisy * np.conj(f_noisy)).real
        num += np.bincount(bins, weights=cross.ravel(), minlength=r_max + 1)[: r_max + 1]
        den += np.bincount(bins, weights=power.ravel(), minlength=r_max + 1)[: r_max + 1]
    gains = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return RadialGain(np.clip(gains, 0.0, 1.0))


def fit_unsupervised(
    noisy_set: Sequence[Image],
    clean_stats: SpectrumStats,
    cfg: FitConfig = FitConfig(),
) -> Tuple[RadialGain, List[float]]:
    """Fit gains to noisy images using only clean spectral statistics.

    Objective, averaged over all channel planes of the set:

        weight_spec * mean over bins r > r_tau of (g[r]*AI(r) - clean_mean(r))^2
      + weight_tv   * tv(reconstruction)

    AI here is the azimuthal profile of the masked spectrum, which scales
    bin-wise by the gains, so the spectral term has a closed form. The TV
    term is evaluated on the unclamped reconstruction to keep the landscape
    smooth for the central finite differences (step 1e-4) used as gradients.
    Updates are projected onto [0, 1]; on any loss increase the step is
    halved and retried, so the recorded history never increases. Everything
    is deterministic, no randomness is consumed.

    Returns the gains and the loss history (initial value plus one entry per
    iteration).
    """
    if len(noisy_set) == 0:
        raise ValueError("noisy set is empty")
    height, width = noisy_set[0].height, noisy_set[0].width
    for img in noisy_set:
        if (img.height, img.width) != (height, width):
            raise ValueError("all images in the set must share dimensions")
    r_max = min(height, width) // 2
    n_bins = r_max + 1
    if len(clean_stats.mean) != n_bins:
        raise ValueError(
            f"clean stats have {len(clean_stats.mean)} bins, images need {n_bins}"
        )
    r_tau = default_r_tau(height)
    band = np.arange(n_bins) > r_tau
    bins = _capped_bins(height, width)
    flat_bins = bins.ravel()
    counts = np.bincount(flat_bins, minlength=n_bins)[:n_bins]

    planes = [img.data[c] for img in noisy_set for c in range(img.channels)]
    specs = [np.fft.fft2(p) for p in planes]
    profiles = np.stack(
        [
            np.bincount(flat_bins, weights=np.abs(f).ravel(), minlength=n_bins)[:n_bins]
            / counts
            for f in specs
        ]
    )
    clean_mean = clean_stats.mean.values
    pixel_count = width * height

    need_tv = cfg.weight_tv > 0
    basis = None
    if need_tv:
        basis_bytes = len(specs) * n_bins * pixel_count * 8
        if basis_bytes <= _BASIS_BYTES_LIMIT:
            # basis[p, r] = ifft of plane p restricted to bin r; reconstructions
            # are then linear in the gains: recon = tensordot(g, basis).
            basis = np.empty((len(specs), n_bins, height, width))
            for p, f in enumerate(specs):
                for r in range(n_bins):
                    basis[p, r] = np.fft.ifft2(np.where(bins == r, f, 0.0)).real

    def reconstructions(g: np.ndarray) -> np.ndarray:
        if basis is not None:
            return np.tensordot(g, basis, axes=([0], [1]))
        gain_map = g[bins]
        return np.stack([np.fft.ifft2(f * gain_map).real for f in specs])

    def spectral_term(g: np.ndarray) -> float:
        if cfg.weight_spec == 0:
            return 0.0
        dev = g[np.newaxis, :] * profiles - clean_mean[np.newaxis, :]
        return cfg.weight_spec * float(np.mean(dev[:, band] ** 2))

    def tv_term(recons: np.ndarray) -> float:
        if not need_tv:
            return 0.0
        total = np.abs(np.diff(recons, axis=2)).sum() + np.abs(np.diff(recons, axis=1)).sum()
        return cfg.weight_tv * float(total) / (pixel_count * len(specs))

    def loss_at(g: np.ndarray, recons=None) -> float:
        if recons is None and need_tv:
            recons = reconstructions(g)
        return spectral_term(g) + tv_term(recons)

    def fd_gradient(g: np.ndarray, base_recons) -> np.ndarray:
        step = 1e-4
        grad = np.empty(n_bins)
        for i in range(n_bins):
            gp = g.copy()
            gp[i] += step
            gm = g.copy()
            gm[i] -= step
            if need_tv and basis is not None:
                delta = step * basis[:, i]
                lp = spectral_term(gp) + tv_term(base_recons + delta)
                lm = spectral_term(gm) + tv_term(base_recons - delta)
            else:
                lp = loss_at(gp)
                lm = loss_at(gm)
            grad[i] = (lp - lm) / (2.0 * step)
        return grad

    g = np.ones(n_bins)
    cur_recons = reconstructions(g) if need_tv else None
    cur_loss = loss_at(g, cur_recons)
    history = [cur_loss]
    lr = cfg.learning_rate
    for _ in range(cfg.iterations):
        grad = fd_gradient(g, cur_recons)
        while True:
            cand = np.clip(g - lr * grad, 0.0, 1.0)
            cand_recons = reconstructions(cand) if need_tv else None
            cand_loss = loss_at(cand, cand_recons)
            if cand_loss <= cur_loss or lr <= 1e-20:
                break
            lr *= 0.5
        if cand_loss <= cur_loss:
            g, cur_loss, cur_recons = cand, cand_loss, cand_recons
        history.append(cur_loss)
    return RadialGain(g), history


def gains_to_csv(g: RadialGain) -> str:
    """Serialize as ascending `r,gain` rows with a header."""
    lines = ["r,gain"]
    lines += [f"{r},{repr(float(x))}" for r, x in enumerate(g.gains)]
    return "\n".join(lines) + "\n"


def gains_from_csv(text: str) -> RadialGain:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0] != "r,gain":
        raise ValueError("gains file must start with an `r,gain` header")
    values = []
    for expected, line in enumerate(lines[1:]):
        r_str, _, g_str = line.partition(",")
        try:
            r, val = int(r_str), float(g_str)
        except ValueError as exc:
            raise ValueError(f"bad gains row {line!r}") from exc
        if r != expected:
            raise ValueError(f"gains rows must be ascending from 0, got r={r} at {expected}")
        values.append(val)
    if not values:
        raise ValueError("gains file has no rows")
    return RadialGain(np.array(values))
