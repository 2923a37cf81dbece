import numpy as np
import pytest

from freqdenoise import (
    Image,
    Kernel,
    convolve2d,
    gaussian_kernel,
    guided_filter,
    lpf_denoise,
    psnr,
    add_awgn,
)
from conftest import natural_patch
from oracles import box_mean_direct, correlate2d_direct


def test_kernel_validation():
    with pytest.raises(ValueError):
        Kernel(np.ones((2, 2)))
    with pytest.raises(ValueError):
        Kernel(np.ones((3, 5)))
    Kernel(np.ones((5, 5)))


def test_gaussian_kernel_normalized_and_peaked():
    k = gaussian_kernel(11, 1.5)
    assert k.weights.shape == (11, 11)
    assert abs(k.weights.sum() - 1.0) < 1e-12
    assert k.weights[5, 5] == k.weights.max()
    assert np.allclose(k.weights, k.weights.T)


def test_convolve_identity_kernel():
    img = Image(np.random.default_rng(0).random((3, 12, 10)))
    ident = np.zeros((3, 3))
    ident[1, 1] = 1.0
    out = convolve2d(img, Kernel(ident))
    assert np.allclose(out.data, img.data, atol=1e-15)


def test_convolve_constant_plane():
    img = Image(np.full((1, 9, 9), 0.37))
    out = convolve2d(img, gaussian_kernel(5, 2.0))
    assert np.allclose(out.data, 0.37, atol=1e-12)


def test_convolve_matches_reference_loops():
    rng = np.random.default_rng(3)
    plane = rng.random((11, 13))
    for size in (3, 5):
        k = rng.random((size, size))
        got = convolve2d(Image(plane[None]), Kernel(k)).data[0]
        want = correlate2d_direct(plane, k)
        assert np.max(np.abs(got - want)) < 1e-12


def test_convolve_linearity():
    rng = np.random.default_rng(4)
    a = Image(rng.random((1, 16, 16)))
    b = Image(rng.random((1, 16, 16)))
    k = gaussian_kernel(5, 1.0)
    left = convolve2d(Image(2 * a.data + 3 * b.data), k).data
    right = 2 * convolve2d(a, k).data + 3 * convolve2d(b, k).data
    assert np.max(np.abs(left - right)) < 1e-10


def test_guided_constant_input_unchanged():
    guide = Image(np.random.default_rng(5).random((1, 32, 32)))
    flat = Image(np.full((1, 32, 32), 0.25))
    out = guided_filter(guide, flat)
    assert np.max(np.abs(out.data - 0.25)) < 1e-10


def test_guided_large_eps_is_double_box_mean():
    # With eps >> local variance the local models collapse to a = 0,
    # b = mean(p), and the output is a box mean applied twice.
    rng = np.random.default_rng(6)
    plane = rng.random((24, 24))
    out = guided_filter(Image(plane[None]), Image(plane[None]), radius=4, eps=1e6)
    want = box_mean_direct(box_mean_direct(plane, 4), 4)
    assert np.max(np.abs(out.data[0] - want)) < 1e-6


def test_guided_self_guidance_preserves_step_edge():
    plane = np.zeros((40, 40))
    plane[:, 20:] = 1.0
    img = Image(plane[None])
    out = guided_filter(img, img, radius=8, eps=0.01)
    dev = np.max(np.abs(out.data - img.data))
    assert dev <= 0.1


def test_guided_near_constant_guide_stays_bounded():
    guide = Image(np.full((1, 20, 20), 0.5) + 1e-9 * np.random.default_rng(7).random((1, 20, 20)))
    inp = Image(np.random.default_rng(8).random((1, 20, 20)))
    out = guided_filter(guide, inp)
    assert np.isfinite(out.data).all()
    assert out.data.min() > -1e-3 and out.data.max() < 1.0 + 1e-3


def test_guided_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        guided_filter(Image(np.zeros((1, 8, 8))), Image(np.zeros((1, 9, 9))))
    with pytest.raises(ValueError):
        guided_filter(Image(np.zeros((1, 8, 8))), Image(np.zeros((3, 8, 8))))


def test_lpf_high_cutoff_is_identity():
    img = natural_patch(32, seed=10)
    out = lpf_denoise(img, cutoff=64)  # beyond the largest corner radius
    assert np.max(np.abs(out.data - img.data)) < 1e-9


def test_lpf_cutoff_zero_is_channel_mean():
    img = Image(np.random.default_rng(11).random((3, 16, 16)))
    out = lpf_denoise(img, cutoff=0)
    for c in range(3):
        assert np.allclose(out.data[c], img.data[c].mean(), atol=1e-12)


def test_lpf_idempotent():
    img = natural_patch(32, seed=12)
    once = lpf_denoise(img, cutoff=6)
    twice = lpf_denoise(once, cutoff=6)
    assert np.max(np.abs(once.data - twice.data)) < 1e-9


def test_lpf_negative_cutoff_rejected():
    with pytest.raises(ValueError):
        lpf_denoise(Image(np.zeros((1, 8, 8))), cutoff=-1)


def test_lpf_improves_noisy_psnr():
    clean = natural_patch(64, seed=13)
    noisy = add_awgn(clean, 50, 99)
    den = lpf_denoise(noisy, cutoff=8)
    assert psnr(clean, den) > psnr(clean, noisy) + 3
