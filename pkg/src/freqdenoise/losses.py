"""Scalar loss functionals over images and discriminator scores.

Image losses default to per-sample normalized (mean) form so values do not
grow with resolution and the objective weights keep their meaning across
patch sizes; the raw-sum variants sit behind ``normalize=False``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .filters import gaussian_kernel, guided_filter
from .image import Image

_SSIM_WINDOW = gaussian_kernel(11, 1.5).weights
_SSIM_C1 = (0.01 * 1.0) ** 2
_SSIM_C2 = (0.03 * 1.0) ** 2


@dataclass(frozen=True)
class LossWeights:
    """Objective weights; defaults are the empirically chosen values."""

    lambda_vgg: float = 2.0
    lambda_bg: float = 2.0
    lambda_tv: float = 0.2
    lambda_recon: float = 0.2

    def __post_init__(self):
        for name in ("lambda_vgg", "lambda_bg", "lambda_tv", "lambda_recon"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Each term of the full objective plus the weighted total.

    The vgg slot is None when no feature hook was supplied; it then
    contributes nothing to the total.
    """

    adv_clean: float
    adv_texture: float
    adv_spectral: float
    cc: float
    vgg: Optional[float]
    bg: float
    tv: float
    recon: float
    total: float

    CSV_HEADER = "adv_clean,adv_texture,adv_spectral,cc,vgg,bg,tv,recon,total"

    def csv_row(self) -> str:
        parts = [
            self.adv_clean,
            self.adv_texture,
            self.adv_spectral,
            self.cc,
            self.vgg,
            self.bg,
            self.tv,
            self.recon,
            self.total,
        ]
        return ",".join("" if p is None else repr(float(p)) for p in parts)


def _windowed_mean(plane: np.ndarray) -> np.ndarray:
    # Valid-mode 11x11 Gaussian-weighted local mean; no padding, so every
    # window sees real samples only.
    windows = sliding_window_view(plane, (11, 11))
    return np.einsum("hwij,ij->hw", windows, _SSIM_WINDOW)


def ssim(a: Image, b: Image) -> float:
    """Mean local structural similarity, per channel then averaged.

    11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, dynamic range 1.0,
    valid windows only. Identical inputs give exactly 1.0. The negative of
    this value is the SSIM loss term.
    """
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")
    if a.height < 11 or a.width < 11:
        raise ValueError(f"image {a.width}x{a.height} smaller than the 11x11 window")
    vals = []
    for c in range(a.channels):
        pa, pb = a.data[c], b.data[c]
        mu_a = _windowed_mean(pa)
        mu_b = _windowed_mean(pb)
        var_a = _windowed_mean(pa * pa) - mu_a * mu_a
        var_b = _windowed_mean(pb * pb) - mu_b * mu_b
        cov = _windowed_mean(pa * pb) - mu_a * mu_b
        num = (2.0 * mu_a * mu_b + _SSIM_C1) * (2.0 * cov + _SSIM_C2)
        den = (mu_a * mu_a + mu_b * mu_b + _SSIM_C1) * (var_a + var_b + _SSIM_C2)
        vals.append(float(np.mean(num / den)))
    return float(np.mean(vals))


def freq_recon_loss(a: Image, b: Image, normalize: bool = True) -> float:
    """Log-damped spectral difference: log(1 + mean |F_a - F_b|) per channel.

    With normalize=False the inner term is the raw coefficient sum instead
    of the mean.
    """
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")
    vals = []
    for c in range(a.channels):
        diff = np.abs(np.fft.fft2(a.data[c]) - np.fft.fft2(b.data[c]))
        inner = float(diff.mean()) if normalize else float(diff.sum())
        vals.append(math.log1p(inner))
    return float(np.mean(vals))


def tv_loss(img: Image, normalize: bool = True) -> float:
    """Anisotropic total variation: summed absolute forward differences.

    Summed over channels; divided by the pixel count W*H when normalized.
    Degenerate single-row or single-column images simply drop the missing
    direction.
    """
    total = 0.0
    for c in range(img.channels):
        plane = img.data[c]
        if img.width >= 2:
            total += float(np.abs(plane[:, 1:] - plane[:, :-1]).sum())
        if img.height >= 2:
            total += float(np.abs(plane[1:, :] - plane[:-1, :]).sum())
    if normalize:
        total /= img.width * img.height
    return total


def cycle_l1(a: Image, b: Image, normalize: bool = True) -> float:
    """Mean absolute difference over all samples (sum if not normalized)."""
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")
    diff = np.abs(a.data - b.data)
    return float(diff.mean()) if normalize else float(diff.sum())


def background_loss(a: Image, b: Image, radius: int = 8, eps: float = 0.01) -> float:
    """Mean absolute difference between self-guided filterings of a and b.

    Smoothing both sides first makes the comparison insensitive to
    uncorrelated per-pixel noise, leaving the structural background.
    """
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")
    fa = guided_filter(a, a, radius=radius, eps=eps)
    fb = guided_filter(b, b, radius=radius, eps=eps)
    return float(np.abs(fa.data - fb.data).mean())


def recon_loss(a: Image, b: Image) -> float:
    """Frequency reconstruction loss plus negative SSIM; -1.0 at identity."""
    return freq_recon_loss(a, b) + (-ssim(a, b))


def lsgan_terms(
    d_real: Sequence[float],
    d_fake: Sequence[float],
    real_target: float = 1.0,
    fake_target: float = 0.0,
    *,
    swap_targets: bool = False,
) -> float:
    """Least-squares adversarial loss over batches of discriminator scores.

    mean((d_real - real_target)^2) + mean((d_fake - fake_target)^2). The
    default targets (1, 0) are the canonical discriminator objective; some
    formulations print the targets the other way around, and swap_targets
    reproduces that literal (0 real, 1 fake) variant.
    """
    real = np.asarray(d_real, dtype=np.float64)
    fake = np.asarray(d_fake, dtype=np.float64)
    if real.size == 0 or fake.size == 0:
        raise ValueError("both score batches must be non-empty")
    if swap_targets:
        real_target, fake_target = 0.0, 1.0
    return float(np.mean((real - real_target) ** 2) + np.mean((fake - fake_target) ** 2))


def feature_distance(a: Image, b: Image, feature_fn: Callable[[Image], np.ndarray]) -> float:
    """Mean absolute distance between externally computed feature vectors.

    Hook for perceptual losses: any callable mapping an image to a feature
    array can be plugged in; nothing pretrained ships here.
    """
    fa = np.asarray(feature_fn(a), dtype=np.float64)
    fb = np.asarray(feature_fn(b), dtype=np.float64)
    if fa.shape != fb.shape:
        raise ValueError(f"feature shape mismatch: {fa.shape} vs {fb.shape}")
    return float(np.abs(fa - fb).mean())


def full_objective(
    adv_clean: float,
    adv_texture: float,
    adv_spectral: float,
    cc: float,
    bg: float,
    tv: float,
    recon: float,
    vgg: Optional[float] = None,
    weights: LossWeights = LossWeights(),
) -> ObjectiveBreakdown:
    """Weighted sum of all terms; adversarial and cycle terms are unweighted.

    The total is the correctly rounded sum of the weighted terms
    (math.fsum), so desk arithmetic such as 8.4 for all-unit parts is exact.
    """
    parts = [adv_clean, adv_texture, adv_spectral, cc, bg, tv, recon]
    if vgg is not None:
        parts.append(vgg)
    if not all(math.isfinite(p) for p in parts):
        raise ValueError("objective parts must be finite")
    terms = [adv_clean, adv_texture, adv_spectral, cc]
    if vgg is not None:
        terms.append(weights.lambda_vgg * vgg)
    terms += [weights.lambda_bg * bg, weights.lambda_tv * tv, weights.lambda_recon * recon]
    return ObjectiveBreakdown(
        adv_clean=adv_clean,
        adv_texture=adv_texture,
        adv_spectral=adv_spectral,
        cc=cc,
        vgg=vgg,
        bg=bg,
        tv=tv,
        recon=recon,
        total=math.fsum(terms),
    )
