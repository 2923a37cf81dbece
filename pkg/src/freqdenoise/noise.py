"""Seedable synthesis of white Gaussian, Poisson, and spatially smoothed noise.

Reproducibility contract: all randomness flows from numpy's PCG64 stream
(np.random.default_rng). Gaussian variates are produced by an explicit
Box-Muller transform over that stream rather than the generator's native
normal method, with a fixed call order documented on _standard_normals, so
identical (image, parameters, seed) always yields bit-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .filters import convolve2d, gaussian_kernel
from .image import Image


@dataclass(frozen=True)
class AWGN:
    """Additive white Gaussian noise; sigma quoted on the 0-255 scale."""

    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")


@dataclass(frozen=True)
class Poisson:
    """Shot noise: samples Poisson(pixel * peak) / peak."""

    peak: float = 255.0

    def __post_init__(self):
        if self.peak <= 0:
            raise ValueError(f"peak must be positive, got {self.peak}")


@dataclass(frozen=True)
class Structured:
    """White noise smoothed by a Gaussian kernel, then rescaled to a target std."""

    kernel_size: int = 21
    kernel_sigma: float = 3.0
    target_std: float = 25.0

    def __post_init__(self):
        if self.kernel_size % 2 == 0 or self.kernel_size < 1:
            raise ValueError(f"kernel size must be odd, got {self.kernel_size}")
        if self.kernel_sigma <= 0:
            raise ValueError(f"kernel sigma must be positive, got {self.kernel_sigma}")
        if self.target_std < 0:
            raise ValueError(f"target std must be non-negative, got {self.target_std}")


NoiseSpec = Union[AWGN, Poisson, Structured]

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Per-item seed: XOR the base seed with a splitmix64 hash of the index.

    This is the documented seed-split rule for fanning one run seed out over
    many images without correlated streams.
    """
    return (seed ^ _splitmix64(index & _MASK64)) & _MASK64


def _standard_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """n standard normals via Box-Muller over PCG64 uniform doubles.

    The call order is part of the determinism contract: ceil(n/2) radius
    uniforms are drawn first, then the same number of angle uniforms; pair j
    emits r*cos(theta) then r*sin(theta), interleaved. log1p(-u) keeps the
    radius finite since u is in [0, 1).
    """
    m = (n + 1) // 2
    u1 = rng.random(m)
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    theta = (2.0 * np.pi) * u2
    out = np.empty(2 * m, dtype=np.float64)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:n]


def _noise_field(img: Image, seed: int) -> np.ndarray:
    # One flat draw in C order covering every sample, reshaped to (C, H, W).
    rng = np.random.default_rng(seed)
    z = _standard_normals(rng, img.data.size)
    return z.reshape(img.data.shape)


def add_awgn(img: Image, sigma: float, seed: int, *, clamp: bool = True) -> Image:
    """Add i.i.d. Normal(0, (sigma/255)^2) per sample and clamp to [0, 1].

    clamp=False skips the clip for callers that need the raw corrupted
    values; the same noise field is injected either way.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return img
    noisy = img.data + (sigma / 255.0) * _noise_field(img, seed)
    return Image(np.clip(noisy, 0.0, 1.0) if clamp else noisy)


def add_poisson(img: Image, peak: float, seed: int, *, clamp: bool = True) -> Image:
    """Replace each sample v with Poisson(v * peak) / peak, clamped to [0, 1].

    Poisson sampling is delegated to numpy's generator; that delegation is
    pinned here as the semantics (peak-scaled counts, default peak 255).
    """
    if peak <= 0:
        raise ValueError(f"peak must be positive, got {peak}")
    if np.any(img.data < 0):
        raise ValueError("Poisson noise requires non-negative samples")
    rng = np.random.default_rng(seed)
    scaled = rng.poisson(img.data * peak) / peak
    return Image(np.clip(scaled, 0.0, 1.0) if clamp else scaled)


def add_structured(img: Image, spec: Structured, seed: int, *, clamp: bool = True) -> Image:
    """Add spatially correlated noise: blurred white noise at a target std.

    A standard-normal field is convolved with the configured Gaussian kernel
    (reflect borders), rescaled so its empirical std equals target_std/255,
    then added and clamped.
    """
    if spec.target_std == 0:
        return img
    field = Image(_noise_field(img, seed))
    kernel = gaussian_kernel(spec.kernel_size, spec.kernel_sigma)
    smooth = convolve2d(field, kernel).data
    std = float(smooth.std())
    if std == 0.0:
        raise ValueError("degenerate noise field (zero variance)")
    noisy = img.data + smooth * ((spec.target_std / 255.0) / std)
    return Image(np.clip(noisy, 0.0, 1.0) if clamp else noisy)


def apply_noise(img: Image, spec: NoiseSpec, seed: int, *, clamp: bool = True) -> Image:
    """Dispatch on the spec kind; pure function of (img, spec, seed)."""
    if isinstance(spec, AWGN):
        return add_awgn(img, spec.sigma, seed, clamp=clamp)
    if isinstance(spec, Poisson):
        return add_poisson(img, spec.peak, seed, clamp=clamp)
    if isinstance(spec, Structured):
        return add_structured(img, spec, seed, clamp=clamp)
    raise TypeError(f"unknown noise spec: {spec!r}")


def parse_noise_spec(text: str) -> NoiseSpec:
    """Parse the CLI grammar `kind:key=value,...`.

    Kinds and keys:
      awgn:sigma=S            sigma required, 0-255 scale
      poisson[:peak=P]        peak defaults to 255
      structured[:std=S,size=K,sigma=G]   defaults 25, 21, 3

    format_noise_spec is the inverse.
    """
    kind, _, argstr = text.strip().partition(":")
    kind = kind.lower()
    kv = {}
    if argstr:
        for part in argstr.split(","):
            key, eq, val = part.partition("=")
            if not eq or not key:
                raise ValueError(f"bad noise parameter {part!r} in {text!r}")
            kv[key.strip().lower()] = val.strip()
    try:
        if kind == "awgn":
            if "sigma" not in kv:
                raise ValueError(f"awgn needs sigma=..., got {text!r}")
            return AWGN(sigma=float(kv.pop("sigma")), **_reject_extras(kv, text))
        if kind == "poisson":
            return Poisson(peak=float(kv.pop("peak", "255")), **_reject_extras(kv, text))
        if kind == "structured":
            return Structured(
                target_std=float(kv.pop("std", "25")),
                kernel_size=int(kv.pop("size", "21")),
                kernel_sigma=float(kv.pop("sigma", "3")),
                **_reject_extras(kv, text),
            )
    except ValueError:
        raise
    raise ValueError(f"unknown noise kind {kind!r} in {text!r}")


def _reject_extras(kv: dict, text: str) -> dict:
    if kv:
        raise ValueError(f"unknown noise parameters {sorted(kv)} in {text!r}")
    return {}


def format_noise_spec(spec: NoiseSpec) -> str:
    """Round-trippable text form of a spec."""
    if isinstance(spec, AWGN):
        return f"awgn:sigma={spec.sigma:g}"
    if isinstance(spec, Poisson):
        return f"poisson:peak={spec.peak:g}"
    if isinstance(spec, Structured):
        return (
            f"structured:std={spec.target_std:g},"
            f"size={spec.kernel_size},sigma={spec.kernel_sigma:g}"
        )
    raise TypeError(f"unknown noise spec: {spec!r}")
