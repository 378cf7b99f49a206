import math

import numpy as np
import pytest

from simple_maxiset.errors import AliasingError, InvalidArgumentError
from simple_maxiset.estimator import sup_norm
from simple_maxiset.function_zoo import (
    approximation_errors,
    besov_seminorm,
    cosine,
    derivatives,
    higher_holder_seminorm,
    holder_seminorm,
    is_divergent,
    partial_sum,
    seminorm_diagnostic,
    step_function,
    triangle_wave,
    weierstrass,
    zero,
    zygmund_seminorm,
)
from simple_maxiset.noise_model import GridFunction
from simple_maxiset.registry import signal_builder

LADDER = [1024, 2048, 4096]


def test_weierstrass_single_term_is_a_cosine():
    zoo = weierstrass(0.5, 0, 1, 256)

    np.testing.assert_allclose(zoo.signal.values, cosine(1, 256).signal.values, atol=1e-15)
    assert zoo.true_regularity == 0.5
    assert zoo.name == "weierstrass:beta=0.5:J=0"
    assert math.isfinite(holder_seminorm(zoo.signal, 0.5))


def test_weierstrass_flags_integer_regularity():
    assert weierstrass(2.0, 3, 1, 256).is_integer_boundary
    assert not weierstrass(1.5, 3, 1, 256).is_integer_boundary


def test_weierstrass_aliasing():
    weierstrass(0.5, 7, 1, 1024)

    with pytest.raises(AliasingError):
        weierstrass(0.5, 8, 1, 1024)


def test_weierstrass_in_two_dimensions():
    zoo = weierstrass(0.5, 3, 2, 64)

    assert zoo.signal.values.shape == (64, 64)
    assert zoo.signal.values[0, 0] == pytest.approx(sum(2 ** (-j * 0.5) for j in range(4)))


def test_zoo_rejects_three_dimensions():
    with pytest.raises(InvalidArgumentError):
        cosine(3, 16)


def test_partial_sums_approximate_at_the_besov_rate():
    beta = 0.5
    errors = approximation_errors(beta, 10, 1, 8192)

    assert len(errors) == 11
    assert errors[-1] == 0.0
    assert all(error <= 1 / (1 - 2**-beta) for error in errors)


def test_partial_sum_bounds():
    full = weierstrass(0.5, 6, 1, 1024).signal
    np.testing.assert_allclose(partial_sum(0.5, 6, 6, 1, 1024).values, full.values)

    with pytest.raises(InvalidArgumentError):
        partial_sum(0.5, 6, 7, 1, 1024)


def test_weierstrass_seminorm_at_its_regularity_is_stable():
    build = signal_builder("weierstrass:beta=0.5", 1)
    coarse = holder_seminorm(build(2048), 0.5)
    fine = holder_seminorm(build(4096), 0.5)

    assert fine / coarse <= 1.3


def test_weierstrass_seminorm_above_its_regularity_diverges():
    build = signal_builder("weierstrass:beta=0.5", 1)

    assert not seminorm_diagnostic(build, 0.5, LADDER).besov_divergent
    assert seminorm_diagnostic(build, 0.7, LADDER).besov_divergent


def test_smooth_weierstrass_higher_order_seminorms():
    build = signal_builder("weierstrass:beta=1.5", 1)

    assert not seminorm_diagnostic(build, 1.5, LADDER).besov_divergent
    assert seminorm_diagnostic(build, 1.8, LADDER).besov_divergent


def test_triangle_wave_seminorms():
    zoo = triangle_wave(1024)

    assert zoo.true_regularity == 1.0
    assert zoo.is_integer_boundary
    assert holder_seminorm(zoo.signal, 1.0) == pytest.approx(4.0, rel=1e-9)
    assert zygmund_seminorm(zoo.signal) == pytest.approx(8.0, rel=1e-9)
    assert zygmund_seminorm(zoo.signal) <= 16


def test_triangle_wave_is_not_smoother_than_lipschitz():
    values = [higher_holder_seminorm(triangle_wave(resolution).signal, 1.2) for resolution in LADDER]

    assert is_divergent(values)
    assert is_divergent([higher_holder_seminorm(triangle_wave(resolution).signal, 1.5) for resolution in LADDER])


def test_triangle_wave_at_integer_regularity_is_stable_in_both_seminorms():
    diagnostic = seminorm_diagnostic(lambda resolution: triangle_wave(resolution).signal, 1.0, LADDER)

    assert diagnostic.besov_values == pytest.approx([8.0] * 3)
    assert diagnostic.holder_values == pytest.approx([4.0] * 3)
    assert not diagnostic.besov_divergent
    assert not diagnostic.holder_divergent


@pytest.mark.parametrize("beta", [0.25, 0.5])
def test_step_function_seminorm_diverges(beta):
    values = [holder_seminorm(step_function(resolution).signal, beta) for resolution in LADDER]

    assert is_divergent(values)
    assert values[-1] / values[-2] == pytest.approx(2**beta)


def test_step_function_basics():
    zoo = step_function(64)

    assert zoo.true_regularity == "none"
    assert sup_norm(zoo.signal) == 1.0
    assert is_divergent([zygmund_seminorm(step_function(resolution).signal) for resolution in LADDER])


def test_holder_seminorm_of_constant_is_zero():
    assert holder_seminorm(GridFunction(1, 64, np.full(64, 2.5)), 0.5) == 0.0
    assert holder_seminorm(zero(2, 32).signal, 1.0) == 0.0


def test_holder_seminorm_of_cosine_is_its_slope():
    assert 2 * math.pi * 0.95 <= holder_seminorm(cosine(1, 1024).signal, 1.0) <= 2 * math.pi * 1.05


def test_holder_seminorm_uses_the_diagonal_in_two_dimensions():
    assert holder_seminorm(cosine(2, 128).signal, 1.0) == pytest.approx(4 * math.pi, rel=0.01)


def test_holder_seminorm_is_monotone_in_beta():
    f = weierstrass(0.5, 6, 1, 1024).signal
    values = [holder_seminorm(f, beta) for beta in (0.25, 0.5, 0.75, 1.0)]

    assert all(later >= earlier for earlier, later in zip(values, values[1:]))


def test_holder_seminorm_range():
    f = cosine(1, 64).signal

    with pytest.raises(InvalidArgumentError):
        holder_seminorm(f, 1.2)

    with pytest.raises(InvalidArgumentError):
        holder_seminorm(f, 0.0)


@pytest.mark.parametrize("build", [lambda: weierstrass(0.5, 6, 1, 1024).signal, lambda: step_function(256).signal])
def test_zygmund_is_dominated_by_lipschitz(build):
    f = build()

    assert zygmund_seminorm(f) <= 2 * holder_seminorm(f, 1.0) + 1e-9


def test_zygmund_of_affine_pieces_vanishes_away_from_corners():
    f = triangle_wave(64).signal
    second = f.values[2:] + f.values[:-2] - 2 * f.values[1:-1]

    assert np.count_nonzero(np.abs(second) > 1e-12) == 1


def test_higher_holder_of_cosine():
    value = higher_holder_seminorm(cosine(1, 1024).signal, 1.5)

    assert value == pytest.approx(2 * math.pi * 2 * math.sin(math.pi / 4) / math.sqrt(1 / 4), rel=0.01)


def test_higher_holder_needs_enough_cells():
    with pytest.raises(InvalidArgumentError):
        derivatives(cosine(1, 8).signal, 2)

    with pytest.raises(InvalidArgumentError):
        higher_holder_seminorm(cosine(1, 64).signal, 0.8)


def test_derivatives_in_two_dimensions():
    assert len(derivatives(cosine(2, 32).signal, 2)) == 3


def test_besov_seminorm_dispatch():
    f = triangle_wave(256).signal

    assert besov_seminorm(f, 0.5) == holder_seminorm(f, 0.5)
    assert besov_seminorm(f, 1.0) == zygmund_seminorm(f)
    assert besov_seminorm(f, 1.5) == higher_holder_seminorm(f, 1.5)


def test_is_divergent():
    assert is_divergent([1.0, 2.0, 4.0])
    assert not is_divergent([1.0, 1.01, 1.02])
    assert not is_divergent([0.0, 0.0, 0.0])

    with pytest.raises(InvalidArgumentError):
        is_divergent([1.0, 2.0])


def test_seminorm_diagnostic_requires_doubling():
    with pytest.raises(InvalidArgumentError):
        seminorm_diagnostic(lambda resolution: triangle_wave(resolution).signal, 1.0, [256, 1024, 2048])
