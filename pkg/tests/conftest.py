"""Shared helpers: synthetic test imagery with natural-style spectra."""

import os

import numpy as np

from freqdenoise import Image, save_image


def natural_patch(size: int, seed: int, power: float = 1.8, lo: float = 0.15, hi: float = 0.85) -> Image:
    """Random patch whose amplitude spectrum falls off like 1/(1+r)^power.

    Random phases plus a power-law radial envelope give the 1/f-style
    spectra of photographic content, so directional claims about clean vs
    noisy spectra are exercised on representative curves. Values are min-max
    mapped into [lo, hi] to leave headroom for additive noise.
    """
    rng = np.random.default_rng(seed)
    kc = (np.arange(size) + size // 2) % size - size // 2
    r = np.hypot(kc[np.newaxis, :], kc[:, np.newaxis])
    amp = 1.0 / (1.0 + r) ** power
    phase = rng.uniform(0.0, 2.0 * np.pi, (size, size))
    x = np.fft.ifft2(amp * np.exp(1j * phase)).real
    x = (x - x.min()) / (x.max() - x.min())
    return Image(lo + (hi - lo) * x)


def natural_patches(n: int, size: int, seed: int) -> list:
    return [natural_patch(size, seed + i) for i in range(n)]


def write_image_dir(path, n: int, size: int, seed: int, prefix: str = "img") -> list:
    """Write n natural patches as PNGs; returns the sorted filenames."""
    os.makedirs(path, exist_ok=True)
    names = []
    for i in range(n):
        name = f"{prefix}{i:02d}.png"
        save_image(natural_patch(size, seed + i), os.path.join(path, name))
        names.append(name)
    return names
