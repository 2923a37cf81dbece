import numpy as np
import pytest

from freqdenoise import (
    AWGN,
    Image,
    Poisson,
    Structured,
    add_awgn,
    add_poisson,
    add_structured,
    apply_noise,
    azimuthal_integral,
    derive_seed,
    dft2,
    format_noise_spec,
    parse_noise_spec,
)

MID = Image(np.full((1, 128, 128), 0.5))


def injected(noisy: Image, clean: Image) -> np.ndarray:
    return (noisy.data - clean.data)[0]


def test_awgn_zero_sigma_identity():
    out = add_awgn(MID, 0, 123)
    assert np.array_equal(out.data, MID.data)


def test_awgn_deterministic_and_seeded():
    a = add_awgn(MID, 25, 7)
    b = add_awgn(MID, 25, 7)
    c = add_awgn(MID, 25, 8)
    assert np.array_equal(a.data, b.data)
    assert not np.array_equal(a.data, c.data)


def test_awgn_empirical_std():
    out = add_awgn(MID, 25, 42)
    std = injected(out, MID).std() * 255
    assert abs(std - 25) / 25 < 0.05


def test_awgn_negative_sigma():
    with pytest.raises(ValueError):
        add_awgn(MID, -1, 0)


def test_awgn_clamps():
    bright = Image(np.full((1, 64, 64), 0.99))
    out = add_awgn(bright, 50, 3)
    assert out.data.max() <= 1.0 and out.data.min() >= 0.0


def test_poisson_zero_image():
    zero = Image(np.zeros((1, 16, 16)))
    out = add_poisson(zero, 255, 9)
    assert np.array_equal(out.data, zero.data)


def test_poisson_deterministic():
    a = add_poisson(MID, 255, 11)
    b = add_poisson(MID, 255, 11)
    assert np.array_equal(a.data, b.data)


def test_poisson_variance():
    out = add_poisson(MID, 255, 42)
    expected = 0.5 / 255  # Var[Poisson(lambda)/peak] with lambda = 0.5*255
    assert abs(out.data.var() - expected) / expected < 0.10


def test_poisson_bad_args():
    with pytest.raises(ValueError):
        add_poisson(MID, 0, 0)
    with pytest.raises(ValueError):
        add_poisson(Image(np.full((1, 4, 4), -0.1)), 255, 0)


def test_structured_zero_std_identity():
    out = add_structured(MID, Structured(target_std=0), 5)
    assert np.array_equal(out.data, MID.data)


def test_structured_deterministic():
    a = add_structured(MID, Structured(), 21)
    b = add_structured(MID, Structured(), 21)
    assert np.array_equal(a.data, b.data)


def test_structured_even_kernel_rejected():
    with pytest.raises(ValueError):
        Structured(kernel_size=20)


def test_structured_std_and_autocorrelation():
    out = add_structured(MID, Structured(target_std=25), 42)
    field = injected(out, MID)
    assert abs(field.std() * 255 - 25) < 1e-9  # rescaled exactly, mid-gray avoids clamping
    centered = field - field.mean()
    lag1 = (centered[:, 1:] * centered[:, :-1]).mean() / (centered**2).mean()
    assert lag1 > 0.5


def test_awgn_spectrum_flat_structured_decays():
    r_max = 64
    second = slice(r_max // 4, r_max // 2 + 1)
    top = slice(3 * r_max // 4, None)
    flat_curves, shaped_curves = [], []
    for i in range(20):
        w = injected(add_awgn(MID, 25, derive_seed(100, i)), MID)
        s = injected(add_structured(MID, Structured(), derive_seed(200, i)), MID)
        flat_curves.append(azimuthal_integral(dft2(Image(w))).values)
        shaped_curves.append(azimuthal_integral(dft2(Image(s))).values)
    flat = np.mean(flat_curves, axis=0)
    shaped = np.mean(shaped_curves, axis=0)
    assert abs(flat[slice(r_max // 2, None)].mean() - flat[second].mean()) < 0.10 * flat[second].mean()
    assert shaped[top].mean() < 0.25 * shaped[second].mean()


def test_apply_noise_dispatch():
    assert np.array_equal(apply_noise(MID, AWGN(25), 7).data, add_awgn(MID, 25, 7).data)
    assert np.array_equal(apply_noise(MID, Poisson(255), 7).data, add_poisson(MID, 255, 7).data)
    spec = Structured(target_std=10)
    assert np.array_equal(apply_noise(MID, spec, 7).data, add_structured(MID, spec, 7).data)


def test_clamp_flag_disables_clipping():
    bright = Image(np.full((1, 64, 64), 0.95))
    for spec in (AWGN(80.0), Poisson(20.0), Structured(target_std=60)):
        raw = apply_noise(bright, spec, 11, clamp=False)
        clipped = apply_noise(bright, spec, 11)
        assert raw.data.max() > 1.0  # heavy noise on a bright image must overshoot
        assert np.array_equal(clipped.data, np.clip(raw.data, 0.0, 1.0))


def test_derive_seed_is_stable_and_spread():
    assert derive_seed(0, 0) == derive_seed(0, 0)
    seeds = {derive_seed(12345, i) for i in range(100)}
    assert len(seeds) == 100
    assert all(0 <= s < 2**64 for s in seeds)


def test_noise_spec_grammar_round_trip():
    for text, expected in [
        ("awgn:sigma=25", AWGN(25.0)),
        ("poisson:peak=100", Poisson(100.0)),
        ("poisson", Poisson(255.0)),
        ("structured:std=25,size=21,sigma=3", Structured(21, 3.0, 25.0)),
        ("structured", Structured()),
    ]:
        assert parse_noise_spec(text) == expected
        assert parse_noise_spec(format_noise_spec(expected)) == expected


def test_noise_spec_grammar_errors():
    for bad in ("gauss:sigma=1", "awgn", "awgn:sigma=x", "awgn:sigma=25,extra=1", "poisson:peak=0"):
        with pytest.raises(ValueError):
            parse_noise_spec(bad)
