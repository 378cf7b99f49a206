import numpy as np
import pytest

from simple_maxiset.errors import InvalidArgumentError, KernelWraparoundError, UnderResolvedBandwidthError
from simple_maxiset.kernels import box_kernel, higher_order_kernel
from simple_maxiset.noise_model import (
    GridFunction,
    ModelParams,
    NoiseField,
    check_bandwidth,
    circular_convolve,
    kernel_stencil,
    mix_seed,
    observe,
    sample_noise,
    stochastic_convolution,
)

BOX = box_kernel(1)


def test_sample_noise_is_deterministic_in_seed():
    first = sample_noise(2, 8, seed=11)
    second = sample_noise(2, 8, seed=11)

    assert first.increments.shape == (8, 8)
    np.testing.assert_array_equal(first.increments, second.increments)
    assert first.seed == 11


def test_sample_noise_differs_between_seeds():
    assert not np.array_equal(sample_noise(1, 64, 1).increments, sample_noise(1, 64, 2).increments)


def test_sample_noise_moments():
    pooled = sample_noise(1, 2**20, seed=3).increments
    assert abs(pooled.mean()) < 4 / 1000

    entries = sample_noise(1, 2**14, seed=4).increments
    assert 0.95 <= entries.var(ddof=1) <= 1.05


@pytest.mark.parametrize("dim, resolution", [(0, 8), (1, 1)])
def test_sample_noise_rejects_bad_grids(dim, resolution):
    with pytest.raises(InvalidArgumentError):
        sample_noise(dim, resolution, seed=0)


def test_mix_seed_is_a_pure_function_of_its_keys():
    assert mix_seed(7, 1024, 3) == mix_seed(7, 1024, 3)
    assert len({mix_seed(7, 1024, r) for r in range(100)}) == 100
    assert mix_seed(7, 1024, 3) != mix_seed(7, 3, 1024)

    with pytest.raises(InvalidArgumentError):
        mix_seed(-1, 2)


def test_model_params_validation():
    params = ModelParams(1.0, 100)
    assert params.p == 2.0

    for sigma, n, p in [(-1.0, 100, 2.0), (1.0, 1, 2.0), (1.0, 100, 0.5)]:
        with pytest.raises(InvalidArgumentError):
            ModelParams(sigma, n, p)


def test_grid_function_rejects_wrong_shape():
    with pytest.raises(InvalidArgumentError):
        GridFunction(1, 8, np.zeros(7))

    with pytest.raises(InvalidArgumentError):
        GridFunction(2, 4, np.zeros(16))


def test_grid_function_arithmetic_and_shift():
    f = GridFunction(1, 4, np.array([0.0, 1.0, 2.0, 3.0]))
    g = GridFunction(1, 4, np.ones(4))

    np.testing.assert_array_equal((f + g).values, [1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal((f - g).values, [-1.0, 0.0, 1.0, 2.0])
    np.testing.assert_array_equal((2 * f).values, [0.0, 2.0, 4.0, 6.0])
    np.testing.assert_array_equal(f.shift(1).values, [3.0, 0.0, 1.0, 2.0])

    with pytest.raises(InvalidArgumentError):
        f + GridFunction(1, 8, np.zeros(8))


def test_check_bandwidth_under_resolved():
    with pytest.raises(UnderResolvedBandwidthError, match="under-resolved-bandwidth"):
        check_bandwidth(BOX, 1 / 32, 256)

    check_bandwidth(BOX, 1 / 16, 256)


def test_check_bandwidth_wraparound():
    with pytest.raises(KernelWraparoundError, match="kernel-wraparound"):
        check_bandwidth(higher_order_kernel(1, 1), 0.5, 256)


def test_box_stencil_has_exact_mass():
    stencil = kernel_stencil(BOX, 1 / 16, 256)

    assert stencil.shape[0] % 2 == 1
    assert stencil.sum() == pytest.approx(16.0, abs=1e-12)
    assert stencil[stencil.shape[0] // 2] == 1.0


def test_fft_and_direct_convolution_agree():
    values = sample_noise(1, 512, seed=5).increments

    np.testing.assert_allclose(
        circular_convolve(values, BOX, 1 / 16, "fft"),
        circular_convolve(values, BOX, 1 / 16, "direct"),
        atol=1e-10,
    )


def test_unknown_convolution_method():
    with pytest.raises(InvalidArgumentError):
        circular_convolve(np.zeros(256), BOX, 1 / 16, "spline")


def test_zero_increments_give_zero_process():
    noise = NoiseField.from_increments(np.zeros(256))
    xi = stochastic_convolution(noise, BOX, 1 / 8)

    np.testing.assert_array_equal(xi.values, np.zeros(256))


@pytest.mark.parametrize("method", ["fft", "direct"])
def test_stochastic_convolution_is_circular(method):
    increments = sample_noise(1, 256, seed=6).increments
    base = stochastic_convolution(NoiseField.from_increments(increments), BOX, 1 / 8, method)
    shifted = stochastic_convolution(NoiseField.from_increments(np.roll(increments, 37)), BOX, 1 / 8, method)

    np.testing.assert_allclose(shifted.values, np.roll(base.values, 37), atol=1e-12)


def test_stochastic_convolution_is_linear():
    first = np.sin(np.arange(256))
    second = np.cos(3 * np.arange(256)) ** 2
    alpha = -2.5

    combined = stochastic_convolution(NoiseField.from_increments(alpha * first + second), BOX, 1 / 8)
    separate = alpha * stochastic_convolution(NoiseField.from_increments(first), BOX, 1 / 8) + stochastic_convolution(
        NoiseField.from_increments(second), BOX, 1 / 8
    )

    np.testing.assert_allclose(combined.values, separate.values, atol=1e-12)


def test_stochastic_convolution_is_linear_in_two_dimensions():
    kernel = box_kernel(2)
    first = sample_noise(2, 64, seed=1).increments
    second = sample_noise(2, 64, seed=2).increments

    combined = stochastic_convolution(NoiseField.from_increments(first + 3 * second), kernel, 1 / 4)
    separate = stochastic_convolution(NoiseField.from_increments(first), kernel, 1 / 4) + 3 * stochastic_convolution(
        NoiseField.from_increments(second), kernel, 1 / 4
    )

    np.testing.assert_allclose(combined.values, separate.values, atol=1e-12)


def test_stochastic_convolution_variance_matches_riemann_sum():
    # Exact variance of each entry on the grid
    resolution, h = 4096, 1 / 64
    stencil = kernel_stencil(BOX, h, resolution)
    exact = float(np.sum(stencil**2)) / (resolution * h)

    assert exact == pytest.approx(BOX.l2_norm**2, rel=0.02)

    pooled = np.concatenate(
        [stochastic_convolution(sample_noise(1, resolution, seed), BOX, h).values for seed in range(200)]
    )

    assert abs(pooled.mean()) < 4 * np.sqrt(64 / pooled.size)
    assert 0.95 <= pooled.var() / BOX.l2_norm**2 <= 1.05


def test_disjoint_support_outputs_are_uncorrelated():
    resolution, h, reps = 1024, 1 / 32, 2000
    pairs = np.array(
        [
            stochastic_convolution(sample_noise(1, resolution, mix_seed(9, r)), BOX, h).values[[0, resolution // 2]]
            for r in range(reps)
        ]
    )

    correlation = np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1]

    assert abs(correlation) < 5 / np.sqrt(reps)


def test_observe_adds_scaled_noise_to_the_cell_mass():
    f = GridFunction(1, 64, np.full(64, 2.0))
    noise = sample_noise(1, 64, seed=8)
    dY = observe(f, ModelParams(0.5, 100), noise)

    expected = 2.0 / 64 + 0.5 / 10 * noise.increments / 8
    np.testing.assert_allclose(dY.values, expected, atol=1e-15)


def test_observe_rejects_mismatched_noise():
    f = GridFunction(1, 64, np.zeros(64))

    with pytest.raises(InvalidArgumentError, match="resolution mismatch"):
        observe(f, ModelParams(1.0, 100), sample_noise(1, 128, seed=0))
