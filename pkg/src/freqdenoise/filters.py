"""Classical filters: convolution, the guided filter, and a low-pass baseline.

Every windowed operation uses reflect borders, mirroring without duplicating
the edge sample (so a row [a, b, c] padded by one becomes [b, a, b, c, b]).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image import Image
from .spectrum import radius_bins


@dataclass(frozen=True, eq=False)
class Kernel:
    """Square odd-sided stencil of real weights, row-major."""

    weights: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.weights, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"kernel must be square, got shape {arr.shape}")
        if arr.shape[0] % 2 == 0:
            raise ValueError(f"kernel size must be odd, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("kernel weights must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)

    @property
    def size(self) -> int:
        return self.weights.shape[0]


def gaussian_kernel(size: int, sigma: float) -> Kernel:
    """Sampled 2D Gaussian, normalized to sum exactly 1."""
    if size % 2 == 0 or size < 1:
        raise ValueError(f"kernel size must be odd and positive, got {size}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    off = np.arange(size, dtype=np.float64) - size // 2
    g = np.exp(-(off[:, np.newaxis] ** 2 + off[np.newaxis, :] ** 2) / (2.0 * sigma * sigma))
    return Kernel(g / g.sum())


def _correlate2d(plane: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # Reflect padding needs pad < side; desk-scale images satisfy this.
    pad = weights.shape[0] // 2
    padded = np.pad(plane, pad, mode="reflect")
    windows = sliding_window_view(padded, weights.shape)
    return np.einsum("hwij,ij->hw", windows, weights)


def convolve2d(img: Image, k: Kernel) -> Image:
    """Cross-correlate each channel with the kernel; output size equals input."""
    return Image(np.stack([_correlate2d(img.data[c], k.weights) for c in range(img.channels)]))


def _box_mean(plane: np.ndarray, radius: int) -> np.ndarray:
    side = 2 * radius + 1
    padded = np.pad(plane, radius, mode="reflect")
    windows = sliding_window_view(padded, (side, side))
    return windows.mean(axis=(-2, -1))


def guided_filter(guide: Image, inp: Image, radius: int = 8, eps: float = 0.01) -> Image:
    """Edge-preserving smoothing of ``inp`` steered by ``guide``.

    Per window of side 2*radius+1: a = cov(guide, inp) / (var(guide) + eps)
    and b = mean(inp) - a*mean(guide); the output is mean(a)*guide + mean(b)
    with the coefficient means taken over the same windows. Self-guided use
    (guide is inp) gives the usual edge-aware denoiser. Output is not
    clamped; large eps drives it toward a cascaded box mean of the input.
    """
    if guide.data.shape != inp.data.shape:
        raise ValueError(f"shape mismatch: {guide.data.shape} vs {inp.data.shape}")
    if radius < 1:
        raise ValueError(f"radius must be at least 1, got {radius}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    out = []
    for c in range(inp.channels):
        i_plane = guide.data[c]
        p_plane = inp.data[c]
        mean_i = _box_mean(i_plane, radius)
        mean_p = _box_mean(p_plane, radius)
        var_i = _box_mean(i_plane * i_plane, radius) - mean_i * mean_i
        cov_ip = _box_mean(i_plane * p_plane, radius) - mean_i * mean_p
        a = cov_ip / (var_i + eps)
        b = mean_p - a * mean_i
        out.append(_box_mean(a, radius) * i_plane + _box_mean(b, radius))
    return Image(np.stack(out))


def lpf_denoise(img: Image, cutoff: int) -> Image:
    """Zero every coefficient whose centered radius bin exceeds the cutoff.

    The surviving disc is inverse transformed per channel and the real part
    clamped to [0, 1]. cutoff 0 keeps only the DC term.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be non-negative, got {cutoff}")
    bins = radius_bins(img.height, img.width)
    keep = bins <= cutoff
    out = []
    for c in range(img.channels):
        coeffs = np.fft.fft2(img.data[c]) * keep
        out.append(np.fft.ifft2(coeffs).real)
    return Image(np.clip(np.stack(out), 0.0, 1.0))
