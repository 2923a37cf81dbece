"""Frequency-domain machinery for unsupervised image denoising.

Modules:
    image           raster values, PNG/PGM/PPM I/O, PSNR
    spectrum        2D DFT, azimuthal profiles, high-pass vectors, LFD
    noise           seedable AWGN / Poisson / structured noise
    filters         convolution, guided filter, low-pass baseline
    losses          SSIM, frequency/TV/cycle/background losses, LSGAN terms
    discriminator   single linear unit over high-pass spectral vectors
    radial          per-radius spectral-gain denoiser and its fitting loop
    cli             the `freqdenoise` command
"""

from .discriminator import (
    LinearDisc,
    TrainConfig,
    disc_from_csv,
    disc_to_csv,
    evaluate,
    forward,
    train,
)
from .filters import Kernel, convolve2d, gaussian_kernel, guided_filter, lpf_denoise
from .image import (
    CorruptImageError,
    Image,
    ImageError,
    MetricsReport,
    MissingFileError,
    UnsupportedFormatError,
    crop_patch,
    hflip,
    load_image,
    psnr,
    save_image,
    to_grayscale,
)
from .losses import (
    LossWeights,
    ObjectiveBreakdown,
    background_loss,
    cycle_l1,
    feature_distance,
    freq_recon_loss,
    full_objective,
    lsgan_terms,
    recon_loss,
    ssim,
    tv_loss,
)
from .noise import (
    AWGN,
    NoiseSpec,
    Poisson,
    Structured,
    add_awgn,
    add_poisson,
    add_structured,
    apply_noise,
    derive_seed,
    format_noise_spec,
    parse_noise_spec,
)
from .radial import (
    FitConfig,
    RadialGain,
    apply_gains,
    fit_unsupervised,
    gains_from_csv,
    gains_to_csv,
    wiener_oracle,
)
from .spectrum import (
    SpectralVector,
    SpectrumMap,
    SpectrumStats,
    azimuthal_integral,
    default_r_tau,
    dft2,
    highpass_vector,
    idft2,
    lfd,
    spectrum_stats,
    stats_to_csv,
    vector_to_csv,
)

__version__ = "0.1.0"
