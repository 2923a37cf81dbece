"""Fourier analysis: 2D DFT, radial magnitude profiles, and spectral distance.

The transform convention is the plain unnormalized double sum

    F(k, l) = sum_w sum_h f(w, h) * exp(-2*pi*i*k*w/W) * exp(-2*pi*i*l*h/H)

with the 1/(W*H) factor on the inverse. Coefficients are stored un-centered
as ``coeffs[l, k]``; radial binning shifts the zero frequency to the center
(floor(W/2), floor(H/2)) first, because a radius measured from the corner
has no high-frequency meaning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .image import Image, to_grayscale


@dataclass(frozen=True, eq=False)
class SpectrumMap:
    """Complex DFT coefficients of one channel, un-centered, row-major in l."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.ndim != 2:
            raise ValueError(f"coefficients must be 2D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def width(self) -> int:
        return self.coeffs.shape[1]

    @property
    def height(self) -> int:
        return self.coeffs.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralVector:
    """Azimuthally integrated magnitudes AI(r), r = 0..floor(min(W,H)/2)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError(f"spectral vector must be 1D and non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("spectral vector values must be finite and non-negative")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class SpectrumStats:
    """Per-bin mean and population variance of AI curves over an image set."""

    mean: SpectralVector
    variance: SpectralVector
    count: int

    def __post_init__(self):
        if len(self.mean) != len(self.variance):
            raise ValueError("mean and variance must have the same length")
        if self.count < 1:
            raise ValueError("count must be at least 1")


def radius_bins(height: int, width: int) -> np.ndarray:
    """Rounded distance of every un-centered coefficient from the spectrum center.

    Entry [l, k] is round(sqrt((k - cx)^2 + (l - cy)^2)) measured after the
    zero frequency is shifted to (cx, cy) = (floor(W/2), floor(H/2)). Computed
    without materializing the shift: ((k + W//2) mod W) - W//2 is exactly the
    signed offset the shifted layout would give. Bins are not capped here.
    """
    kc = (np.arange(width) + width // 2) % width - width // 2
    lc = (np.arange(height) + height // 2) % height - height // 2
    # Ties at .5 cannot occur: (r + 0.5)^2 is never an integer, so the
    # rounding mode is immaterial for integer lattices.
    return np.rint(np.hypot(kc[np.newaxis, :], lc[:, np.newaxis])).astype(np.intp)


def dft2(channel: Image) -> SpectrumMap:
    """Unnormalized 2D DFT of a single-channel image.

    Internally uses a fast transform; the contract is bit-level agreement
    (to 1e-9) with the direct double sum above.
    """
    if channel.channels != 1:
        raise ValueError(f"dft2 takes a 1-channel image, got {channel.channels} channels")
    return SpectrumMap(np.fft.fft2(channel.data[0]))


def idft2(spec: SpectrumMap) -> Image:
    """Inverse DFT with the 1/(W*H) factor; returns the real part.

    A warning is emitted if the discarded imaginary residue exceeds 1e-6,
    which indicates the spectrum did not come from real-valued data.
    """
    full = np.fft.ifft2(spec.coeffs)
    residue = float(np.max(np.abs(full.imag))) if full.size else 0.0
    if residue > 1e-6:
        warnings.warn(f"idft2 dropped imaginary residue {residue:.3e}", stacklevel=2)
    return Image(full.real)


def azimuthal_integral(spec: SpectrumMap) -> SpectralVector:
    """Mean coefficient magnitude per integer radius bin.

    Bins beyond R = floor(min(W, H)/2) are discarded so every retained
    annulus is fully sampled by the rectangular lattice.
    """
    bins = radius_bins(spec.height, spec.width)
    r_max = min(spec.width, spec.height) // 2
    mag = np.abs(spec.coeffs)
    counts = np.bincount(bins.ravel())
    sums = np.bincount(bins.ravel(), weights=mag.ravel())
    return SpectralVector(sums[: r_max + 1] / counts[: r_max + 1])


def highpass_vector(v: SpectralVector, r_tau: int) -> SpectralVector:
    """Zero all bins with r <= r_tau; strictly greater radii survive."""
    if not 0 <= r_tau < len(v):
        raise ValueError(f"r_tau={r_tau} out of range for vector of length {len(v)}")
    out = v.values.copy()
    out[: r_tau + 1] = 0.0
    return SpectralVector(out)


def default_r_tau(height: int) -> int:
    """Threshold radius floor(H / (2*sqrt(2))); 45 for H=128."""
    if height < 1:
        raise ValueError("height must be at least 1")
    return math.floor(height / (2.0 * math.sqrt(2.0)))


def spectrum_stats(images: Sequence[Image]) -> SpectrumStats:
    """Per-bin mean and population variance of AI over a set of images.

    RGB inputs are reduced to luma first. The curves integrate |F|, not the
    squared power, and images must share dimensions after conversion.
    """
    if len(images) == 0:
        raise ValueError("spectrum_stats needs at least one image")
    grays = [to_grayscale(img) for img in images]
    shape = grays[0].data.shape
    for g in grays[1:]:
        if g.data.shape != shape:
            raise ValueError(f"mismatched dimensions: {g.data.shape} vs {shape}")
    curves = np.stack([azimuthal_integral(dft2(g)).values for g in grays])
    return SpectrumStats(
        mean=SpectralVector(curves.mean(axis=0)),
        variance=SpectralVector(curves.var(axis=0)),
        count=len(images),
    )


def lfd(a: Image, b: Image) -> float:
    """Log frequency distance: log(1 + mean squared spectral difference).

    Per channel log(1 + (1/(W*H)) * sum |F_a - F_b|^2), then averaged over
    channels. This squared form is the contract for every reported LFD value,
    so it is stated here rather than left to the reader.
    """
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")
    vals = []
    for c in range(a.channels):
        diff = np.fft.fft2(a.data[c]) - np.fft.fft2(b.data[c])
        vals.append(math.log1p(float(np.mean(diff.real**2 + diff.imag**2))))
    return float(np.mean(vals))


def vector_to_csv(v: SpectralVector) -> str:
    """Serialize as ascending `r,value` rows with a header."""
    lines = ["r,value"]
    lines += [f"{r},{_fmt(x)}" for r, x in enumerate(v.values)]
    return "\n".join(lines) + "\n"


def stats_to_csv(s: SpectrumStats) -> str:
    """Serialize as ascending `r,mean,variance` rows with a header."""
    lines = ["r,mean,variance"]
    lines += [
        f"{r},{_fmt(m)},{_fmt(v)}"
        for r, (m, v) in enumerate(zip(s.mean.values, s.variance.values))
    ]
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))
