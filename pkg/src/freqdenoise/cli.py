"""Command-line harness: dataset ingestion, experiments, CSV/PNG artifacts.

Grammar:

    freqdenoise <command> --in DIR --out DIR [--noise SPEC] [--patch N]
                [--seed N] [--grayscale on|off] [--random-patches N]
                [--augment-hflip] [per-command flags]

Commands: spectrum-stats, denoise, train-sd, ablate. Exit codes: 0 success,
2 usage or input error, 3 data error; one diagnostic line goes to stderr.
Reruns with identical flags and inputs produce byte-identical artifacts:
files are processed in sorted-filename order, per-image noise seeds derive
from --seed and the image index, and floats serialize via repr. Input
directories are never written to.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .discriminator import TrainConfig, disc_to_csv, evaluate, train
from .filters import guided_filter, lpf_denoise
from .image import (
    Image,
    ImageError,
    MetricsReport,
    crop_patch,
    format_float,
    hflip,
    load_image,
    psnr,
    save_image,
    to_grayscale,
)
from .losses import ssim
from .noise import NoiseSpec, apply_noise, derive_seed, parse_noise_spec
from .radial import FitConfig, apply_gains, fit_unsupervised, gains_from_csv, gains_to_csv
from .spectrum import (
    azimuthal_integral,
    default_r_tau,
    dft2,
    highpass_vector,
    lfd,
    spectrum_stats,
    stats_to_csv,
)

_SUFFIXES = {".png", ".pgm", ".ppm"}


class UsageError(Exception):
    """Bad flags or unusable input specification; exit code 2."""


class DataError(Exception):
    """Input data exists but cannot be processed; exit code 3."""


@dataclass(frozen=True)
class RunConfig:
    input_dir: str
    output_dir: str
    patch: int = 128
    seed: int = 0
    noise: Optional[NoiseSpec] = None
    grayscale: bool = True
    random_patches: int = 0
    augment_hflip: bool = False

    def __post_init__(self):
        if self.patch < 16:
            raise UsageError(f"--patch must be at least 16, got {self.patch}")
        if self.random_patches < 0:
            raise UsageError("--random-patches must be non-negative")
        if os.path.realpath(self.input_dir) == os.path.realpath(self.output_dir):
            raise UsageError("input and output directories must be distinct")


Entry = Tuple[str, Image]


def _collect_patches(cfg: RunConfig) -> List[Entry]:
    """Load, convert, and crop every image, in sorted filename order.

    Centered patch by default; --random-patches N takes N seeded crops per
    image instead (offsets drawn from one PCG64 stream over files in order).
    Flipped copies, when requested, follow the originals.
    """
    try:
        names = sorted(
            f
            for f in os.listdir(cfg.input_dir)
            if os.path.splitext(f)[1].lower() in _SUFFIXES
        )
    except (FileNotFoundError, NotADirectoryError):
        raise UsageError(f"input directory not found: {cfg.input_dir}")
    if not names:
        raise UsageError(f"no images (.png/.pgm/.ppm) in {cfg.input_dir}")
    rng = np.random.default_rng(cfg.seed)
    entries: List[Entry] = []
    for name in names:
        try:
            img = load_image(os.path.join(cfg.input_dir, name))
        except ImageError as exc:
            raise DataError(str(exc))
        if cfg.grayscale:
            img = to_grayscale(img)
        if img.width < cfg.patch or img.height < cfg.patch:
            raise DataError(
                f"{name}: image {img.width}x{img.height} smaller than patch {cfg.patch}"
            )
        stem, ext = os.path.splitext(name)
        if cfg.random_patches > 0:
            for j in range(cfg.random_patches):
                x = int(rng.integers(0, img.width - cfg.patch + 1))
                y = int(rng.integers(0, img.height - cfg.patch + 1))
                entries.append(
                    (f"{stem}_p{j}{ext}", crop_patch(img, x, y, cfg.patch, cfg.patch))
                )
        else:
            x = (img.width - cfg.patch) // 2
            y = (img.height - cfg.patch) // 2
            entries.append((name, crop_patch(img, x, y, cfg.patch, cfg.patch)))
    if cfg.augment_hflip:
        flipped = []
        for name, img in entries:
            stem, ext = os.path.splitext(name)
            flipped.append((f"{stem}__hflip{ext}", hflip(img)))
        entries += flipped
    return entries


def _noisy_counterparts(cfg: RunConfig, entries: List[Entry]) -> List[Entry]:
    # Seed rule: entry index in final processing order, mixed with --seed.
    if cfg.noise is None:
        raise UsageError("this command requires --noise")
    return [
        (name, apply_noise(img, cfg.noise, derive_seed(cfg.seed, i)))
        for i, (name, img) in enumerate(entries)
    ]


def _write_text(cfg: RunConfig, filename: str, text: str) -> None:
    os.makedirs(cfg.output_dir, exist_ok=True)
    with open(os.path.join(cfg.output_dir, filename), "w", newline="\n") as fh:
        fh.write(text)


def _metrics_csv(pairs: List[Tuple[str, Image, Image]]) -> str:
    lines = ["filename," + MetricsReport.CSV_HEADER]
    for name, reference, candidate in pairs:
        report = MetricsReport(
            psnr=psnr(reference, candidate),
            ssim=ssim(reference, candidate),
            lfd=lfd(reference, candidate),
        )
        lines.append(f"{name},{report.csv_row()}")
    return "\n".join(lines) + "\n"


def cmd_spectrum_stats(cfg: RunConfig, args) -> int:
    """Emit clean_stats.csv and noisy_stats.csv over the patch set."""
    entries = _collect_patches(cfg)
    noisy = _noisy_counterparts(cfg, entries)
    _write_text(cfg, "clean_stats.csv", stats_to_csv(spectrum_stats([im for _, im in entries])))
    _write_text(cfg, "noisy_stats.csv", stats_to_csv(spectrum_stats([im for _, im in noisy])))
    return 0


def _parse_method(text: str, patch: int):
    """Parse --method into a denoising callable.

    lpf[:cutoff=R]          spectral low-pass, default cutoff floor(patch/(2*sqrt(2)))
    radial:gains=FILE       gains from an `r,gain` CSV
    guided[:radius=R,eps=E] self-guided filter, defaults 8 and 0.01
    """
    kind, _, argstr = text.partition(":")
    kind = kind.lower()
    kv = {}
    if argstr:
        for part in argstr.split(","):
            key, eq, val = part.partition("=")
            if not eq or not key:
                raise UsageError(f"bad method parameter {part!r} in {text!r}")
            kv[key.strip().lower()] = val.strip()
    try:
        if kind == "lpf":
            cutoff = int(kv.pop("cutoff", default_r_tau(patch)))
            _no_extras(kv, text)
            if cutoff < 0:
                raise UsageError("lpf cutoff must be non-negative")
            return lambda img: lpf_denoise(img, cutoff)
        if kind == "radial":
            if "gains" not in kv:
                raise UsageError("radial method needs gains=FILE")
            path = kv.pop("gains")
            _no_extras(kv, text)
            try:
                with open(path) as fh:
                    gains = gains_from_csv(fh.read())
            except (OSError, ValueError) as exc:
                raise DataError(f"cannot use gains file {path}: {exc}")
            return lambda img: apply_gains(img, gains)
        if kind == "guided":
            radius = int(kv.pop("radius", 8))
            eps = float(kv.pop("eps", 0.01))
            _no_extras(kv, text)
            return lambda img: guided_filter(img, img, radius=radius, eps=eps)
    except ValueError as exc:
        raise UsageError(f"bad method {text!r}: {exc}")
    raise UsageError(f"unknown method {kind!r} (expected lpf, radial, or guided)")


def _no_extras(kv: dict, text: str) -> None:
    if kv:
        raise UsageError(f"unknown method parameters {sorted(kv)} in {text!r}")


def cmd_denoise(cfg: RunConfig, args) -> int:
    """Denoise every patch; write images plus metrics when clean refs exist.

    With --noise the loaded patches are the clean references and the noise
    is injected first; metrics.csv scores denoised-vs-clean rows and
    metrics_noisy.csv scores the uncorrupted baseline noisy-vs-clean.
    Without --noise the inputs are taken as already noisy and only images
    are written.
    """
    method = _parse_method(args.method, cfg.patch)
    entries = _collect_patches(cfg)
    if cfg.noise is not None:
        noisy = _noisy_counterparts(cfg, entries)
    else:
        noisy = entries
    os.makedirs(cfg.output_dir, exist_ok=True)
    denoised: List[Entry] = []
    for name, img in noisy:
        out = method(img)
        save_image(out, os.path.join(cfg.output_dir, name))
        denoised.append((name, out))
    if cfg.noise is not None:
        _write_text(
            cfg,
            "metrics.csv",
            _metrics_csv(
                [(n, clean, den) for (n, clean), (_, den) in zip(entries, denoised)]
            ),
        )
        _write_text(
            cfg,
            "metrics_noisy.csv",
            _metrics_csv([(n, clean, noi) for (n, clean), (_, noi) in zip(entries, noisy)]),
        )
    return 0


def cmd_train_sd(cfg: RunConfig, args) -> int:
    """Train the linear spectral discriminator; report held-out accuracy.

    Patches are split into train/held-out halves by a seeded permutation.
    Artifacts: disc.csv (weights, bias), train_loss.csv (epoch,loss), and
    accuracy.txt with the single held-out accuracy line.
    """
    entries = _collect_patches(cfg)
    if len(entries) < 4:
        raise UsageError(f"train-sd needs at least 4 images, got {len(entries)}")
    noisy = _noisy_counterparts(cfg, entries)
    r_tau = default_r_tau(cfg.patch)

    def hp_vec(img: Image):
        return highpass_vector(azimuthal_integral(dft2(to_grayscale(img))), r_tau)

    clean_vecs = [hp_vec(im) for _, im in entries]
    noisy_vecs = [hp_vec(im) for _, im in noisy]
    perm = np.random.default_rng(cfg.seed).permutation(len(entries))
    train_idx, held_idx = perm[: len(entries) // 2], perm[len(entries) // 2 :]
    tcfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs, seed=cfg.seed)
    disc, history = train(
        [clean_vecs[i] for i in train_idx], [noisy_vecs[i] for i in train_idx], tcfg
    )
    acc = evaluate(
        disc,
        [clean_vecs[i] for i in held_idx],
        [noisy_vecs[i] for i in held_idx],
        tcfg.real_target,
        tcfg.fake_target,
    )
    _write_text(cfg, "disc.csv", disc_to_csv(disc))
    loss_lines = ["epoch,loss"] + [f"{e},{format_float(l)}" for e, l in enumerate(history)]
    _write_text(cfg, "train_loss.csv", "\n".join(loss_lines) + "\n")
    report = f"held_out_accuracy={format_float(acc)}"
    _write_text(cfg, "accuracy.txt", report + "\n")
    print(report)
    return 0


def cmd_ablate(cfg: RunConfig, args) -> int:
    """Compare denoiser variants on one noisy set; write ablation.csv.

    Rows, in order: identity (no denoising), lpf, radial-no-spec (spectral
    term disabled, TV only), radial-full. Columns are mean psnr/ssim/lfd
    against the clean patches. The fitted gain vectors are also written for
    reuse with `denoise --method radial:gains=...`.
    """
    entries = _collect_patches(cfg)
    noisy = _noisy_counterparts(cfg, entries)
    clean_imgs = [im for _, im in entries]
    noisy_imgs = [im for _, im in noisy]
    clean_stats = spectrum_stats(clean_imgs)
    cutoff = args.cutoff if args.cutoff is not None else default_r_tau(cfg.patch)

    gains_tv, _ = fit_unsupervised(
        noisy_imgs,
        clean_stats,
        FitConfig(learning_rate=args.lr, iterations=args.iters, seed=cfg.seed, weight_spec=0.0),
    )
    gains_full, _ = fit_unsupervised(
        noisy_imgs,
        clean_stats,
        FitConfig(learning_rate=args.lr, iterations=args.iters, seed=cfg.seed),
    )
    variants = [
        ("identity", noisy_imgs),
        ("lpf", [lpf_denoise(im, cutoff) for im in noisy_imgs]),
        ("radial-no-spec", [apply_gains(im, gains_tv) for im in noisy_imgs]),
        ("radial-full", [apply_gains(im, gains_full) for im in noisy_imgs]),
    ]
    lines = ["variant,psnr,ssim,lfd"]
    for name, outs in variants:
        scores = np.array(
            [
                (psnr(c, o), ssim(c, o), lfd(c, o))
                for c, o in zip(clean_imgs, outs)
            ]
        )
        means = scores.mean(axis=0)
        lines.append(
            f"{name},{format_float(means[0])},{format_float(means[1])},{format_float(means[2])}"
        )
    _write_text(cfg, "ablation.csv", "\n".join(lines) + "\n")
    _write_text(cfg, "radial_no_spec_gains.csv", gains_to_csv(gains_tv))
    _write_text(cfg, "radial_full_gains.csv", gains_to_csv(gains_full))
    return 0


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--in", dest="input_dir", required=True, metavar="DIR")
    sp.add_argument("--out", dest="output_dir", required=True, metavar="DIR")
    sp.add_argument(
        "--noise",
        metavar="SPEC",
        help="awgn:sigma=S | poisson[:peak=P] | structured[:std=S,size=K,sigma=G]",
    )
    sp.add_argument("--patch", type=int, default=128, metavar="N")
    sp.add_argument("--seed", type=int, default=0, metavar="N")
    sp.add_argument("--grayscale", choices=["on", "off"], default="on")
    sp.add_argument(
        "--random-patches",
        type=int,
        default=0,
        metavar="N",
        help="seeded random crops per image instead of the centered patch",
    )
    sp.add_argument(
        "--augment-hflip",
        action="store_true",
        help="append a horizontally flipped copy of every patch",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freqdenoise",
        description="Frequency-domain denoising toolkit: spectra, losses, baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum-stats", help="mean/variance radial spectra, clean vs noisy")
    _add_common(sp)
    sp.set_defaults(func=cmd_spectrum_stats)

    sp = sub.add_parser("denoise", help="run one denoiser over a directory")
    _add_common(sp)
    sp.add_argument(
        "--method",
        required=True,
        metavar="M",
        help="lpf[:cutoff=R] | radial:gains=FILE | guided[:radius=R,eps=E]",
    )
    sp.set_defaults(func=cmd_denoise)

    sp = sub.add_parser("train-sd", help="train the linear spectral discriminator")
    _add_common(sp)
    sp.add_argument("--epochs", type=int, default=500, metavar="N")
    sp.add_argument("--lr", type=float, default=3e-4, metavar="RATE")
    sp.set_defaults(func=cmd_train_sd)

    sp = sub.add_parser("ablate", help="identity/lpf/radial variant comparison table")
    _add_common(sp)
    sp.add_argument("--iters", type=int, default=40, metavar="N")
    sp.add_argument("--lr", type=float, default=0.01, metavar="RATE")
    sp.add_argument("--cutoff", type=int, default=None, metavar="R")
    sp.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        noise = parse_noise_spec(args.noise) if args.noise else None
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = RunConfig(
            input_dir=args.input_dir,
            output_dir=args.output_dir,
            patch=args.patch,
            seed=args.seed,
            noise=noise,
            grayscale=args.grayscale == "on",
            random_patches=args.random_patches,
            augment_hflip=args.augment_hflip,
        )
        return args.func(cfg, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, ImageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
