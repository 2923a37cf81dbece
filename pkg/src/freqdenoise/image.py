"""Image values, file I/O, color conversion, cropping, and fidelity reporting.

Images are immutable channel-planar rasters of float64 samples with nominal
range [0, 1]. Pixel (i, j) means column i, row j; channel c of that pixel
lives at ``data[c, j, i]``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError


class ImageError(Exception):
    """Base class for image I/O failures."""


class MissingFileError(ImageError):
    """The path does not exist."""


class UnsupportedFormatError(ImageError):
    """The file is readable but not an 8-bit PNG or binary PGM/PPM."""


class CorruptImageError(ImageError):
    """The file claims a supported format but cannot be decoded."""


class UnwritablePathError(ImageError):
    """The destination cannot be created or written."""


_LOADABLE_SUFFIXES = {".png", ".pgm", ".ppm"}
_ACCEPTED_PIL_FORMATS = {"PNG", "PPM"}


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable raster: ``data`` has shape (channels, height, width).

    Channels must be 1 or 3 and every sample finite. Values outside [0, 1]
    are tolerated (loss code needs unclamped intermediates); operations that
    clamp say so.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[np.newaxis, :, :]
        if arr.ndim != 3 or arr.shape[0] not in (1, 3):
            raise ValueError(
                f"expected (channels, height, width) with 1 or 3 channels, got shape {arr.shape}"
            )
        if arr.shape[1] < 1 or arr.shape[2] < 1:
            raise ValueError("image must have at least one row and one column")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image samples must be finite")
        # Private copy, locked against writes, so instances are safely shareable.
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def channel(self, c: int) -> np.ndarray:
        """Read-only (height, width) view of one channel plane."""
        return self.data[c]


@dataclass(frozen=True)
class MetricsReport:
    """Fidelity triple for one image pair; one CSV row."""

    psnr: float
    ssim: float
    lfd: float

    CSV_HEADER = "psnr,ssim,lfd"

    def csv_row(self) -> str:
        return ",".join(format_float(v) for v in (self.psnr, self.ssim, self.lfd))


def format_float(x: float) -> str:
    """Shortest round-trip decimal; infinities become the literal 'inf'."""
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return repr(float(x))


def load_image(path) -> Image:
    """Read an 8-bit PNG or binary PGM/PPM into a float image in [0, 1].

    Raises MissingFileError, UnsupportedFormatError, or CorruptImageError;
    the three cases are distinct so callers can map them to exit codes.
    """
    path = os.fspath(path)
    if not os.path.exists(path):
        raise MissingFileError(f"no such file: {path}")
    suffix = os.path.splitext(path)[1].lower()
    try:
        with PILImage.open(path) as im:
            fmt = im.format
            if fmt not in _ACCEPTED_PIL_FORMATS:
                raise UnsupportedFormatError(f"unsupported format {fmt!r}: {path}")
            if im.mode not in ("L", "RGB"):
                raise UnsupportedFormatError(
                    f"unsupported sample layout {im.mode!r} (need 8-bit gray or RGB): {path}"
                )
            arr = np.asarray(im, dtype=np.float64)
    except UnidentifiedImageError as exc:
        if suffix in _LOADABLE_SUFFIXES:
            raise CorruptImageError(f"cannot decode {path}: {exc}") from exc
        raise UnsupportedFormatError(f"unsupported format: {path}") from exc
    except OSError as exc:
        # Pillow decodes lazily; truncated pixel data surfaces here.
        raise CorruptImageError(f"cannot decode {path}: {exc}") from exc
    arr = arr / 255.0
    if arr.ndim == 2:
        return Image(arr[np.newaxis, :, :])
    return Image(np.transpose(arr, (2, 0, 1)))


def save_image(img: Image, path) -> None:
    """Write PNG or binary PGM/PPM, clamping to [0, 1] and rounding to 8 bits.

    Round trip through load_image agrees within 1/510 per sample.
    """
    path = os.fspath(path)
    suffix = os.path.splitext(path)[1].lower()
    if suffix not in _LOADABLE_SUFFIXES:
        raise UnsupportedFormatError(f"unsupported output format: {path}")
    q = np.rint(np.clip(img.data, 0.0, 1.0) * 255.0).astype(np.uint8)
    if img.channels == 1:
        pil = PILImage.fromarray(q[0], mode="L")
    else:
        pil = PILImage.fromarray(np.transpose(q, (1, 2, 0)), mode="RGB")
    try:
        pil.save(path)
    except (OSError, ValueError) as exc:
        raise UnwritablePathError(f"cannot write {path}: {exc}") from exc


def to_grayscale(img: Image) -> Image:
    """Collapse RGB to luma with weights 0.299/0.587/0.114; identity on gray."""
    if img.channels == 1:
        return img
    r, g, b = img.data[0], img.data[1], img.data[2]
    return Image(0.299 * r + 0.587 * g + 0.114 * b)


def crop_patch(img: Image, x: int, y: int, w: int, h: int) -> Image:
    """Copy the w-by-h rectangle whose top-left pixel is (x, y)."""
    if w < 1 or h < 1:
        raise ValueError(f"patch size must be positive, got {w}x{h}")
    if x < 0 or y < 0 or x + w > img.width or y + h > img.height:
        raise ValueError(
            f"crop rectangle x={x} y={y} w={w} h={h} exceeds {img.width}x{img.height} image"
        )
    return Image(img.data[:, y : y + h, x : x + w])


def hflip(img: Image) -> Image:
    """Mirror left-right: pixel (i, j) moves to (width-1-i, j)."""
    return Image(img.data[:, :, ::-1])


def psnr(a: Image, b: Image) -> float:
    """Peak signal-to-noise ratio in dB against peak 1.0; inf for identical."""
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")
    mse = float(np.mean((a.data - b.data) ** 2))
    if mse == 0.0:
        return math.inf
    return -10.0 * math.log10(mse)
