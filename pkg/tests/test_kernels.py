import math
from dataclasses import replace

import numpy as np
import pytest

from simple_maxiset.constants import DEFAULT_N_GRID, DEFAULT_SHIFTS
from simple_maxiset.errors import InvalidArgumentError, ScheduleAssertionError
from simple_maxiset.kernels import (
    box_kernel,
    check_conditions,
    dyadic_schedule,
    higher_order_kernel,
    integrate,
    l2_modulus_exponent,
    poly_kernel,
)


def test_box_kernel_constants():
    K = box_kernel(1)

    assert K.support_radius == 0.5
    assert K.order == 1
    assert K.gamma == 0.5
    assert K.l2_norm == 1.0
    assert integrate(K) == pytest.approx(1.0, abs=1e-12)


def test_box_kernel_vanishes_outside_support():
    K = box_kernel(2)
    values = K(np.array([[0.0, 0.0], [0.6, 0.0], [0.0, -0.7], [0.49, 0.49]]))

    np.testing.assert_array_equal(values, [1.0, 0.0, 0.0, 1.0])


def test_box_kernel_two_dimensional_norm():
    assert integrate(box_kernel(2), power=2) == pytest.approx(1.0, abs=1e-12)


def test_box_kernel_shift_modulus_is_linear():
    K = box_kernel(1)
    u = np.linspace(-2, 2, 2**16, endpoint=False)[:, None]
    step = 4 / 2**16

    for t in (1 / 4, 1 / 8, 1 / 16):
        modulus = np.sum((K(u + t) - K(u)) ** 2) * step
        assert modulus == pytest.approx(2 * t, rel=2e-3)


def test_box_kernel_rejects_bad_dimension():
    with pytest.raises(InvalidArgumentError):
        box_kernel(0)


def test_poly_kernel_triangle_has_unit_constant():
    K = poly_kernel(1, 1, 1)

    assert K.order == 1
    assert integrate(K) == pytest.approx(1.0, abs=1e-10)
    assert K(np.array([[0.0]]))[0] == pytest.approx(1.0, abs=1e-9)


def test_poly_kernel_symmetric_first_moment():
    K = poly_kernel(2, 1, 1)

    assert K.order == 2
    assert abs(integrate(K, weight=lambda u: u[..., 0])) < 1e-10


@pytest.mark.parametrize("beta_param, power", [(1, 1), (2, 1), (3, 2), (1.5, 2)])
def test_poly_kernel_is_nonnegative(beta_param, power):
    K = poly_kernel(beta_param, power, 1)
    points = np.linspace(-1.5, 1.5, 3001)[:, None]

    assert np.all(K(points) >= 0)


def test_poly_kernel_rejects_small_exponent():
    with pytest.raises(InvalidArgumentError):
        poly_kernel(0.5, 1, 1)

    with pytest.raises(InvalidArgumentError):
        poly_kernel(2, 3, 1)


def test_higher_order_kernel_of_order_one_has_unit_mass():
    assert integrate(higher_order_kernel(1, 1)) == pytest.approx(1.0, abs=1e-10)


def test_higher_order_kernel_moments_vanish():
    K = higher_order_kernel(4, 1)

    assert integrate(K) == pytest.approx(1.0, abs=1e-10)

    for k in (1, 2, 3):
        assert abs(integrate(K, weight=lambda u, k=k: u[..., 0] ** k)) <= 1e-8


def test_higher_order_kernel_product_form():
    K = higher_order_kernel(2, 2)

    assert abs(integrate(K, weight=lambda u: u[..., 0])) <= 1e-8
    assert abs(integrate(K, weight=lambda u: u[..., 1])) <= 1e-8
    assert integrate(K) == pytest.approx(integrate(higher_order_kernel(2, 1)) ** 2, rel=1e-8)


def test_higher_order_kernel_gamma_is_measured():
    K = higher_order_kernel(3, 1)

    assert 0 < K.gamma <= 1
    assert K.gamma == l2_modulus_exponent(K, DEFAULT_SHIFTS)


def test_l2_modulus_exponent_of_box():
    assert 0.45 <= l2_modulus_exponent(box_kernel(1), DEFAULT_SHIFTS) <= 0.55


def test_l2_modulus_exponent_of_triangle_is_capped():
    gamma = l2_modulus_exponent(poly_kernel(1, 1, 1), DEFAULT_SHIFTS)

    assert 0.9 <= gamma <= 1.0


def test_l2_modulus_exponent_is_sign_invariant():
    K = box_kernel(1)

    assert l2_modulus_exponent(K.scaled(-1.0), DEFAULT_SHIFTS) == pytest.approx(l2_modulus_exponent(K, DEFAULT_SHIFTS))


def translated(K, offset: float):
    return replace(
        K,
        name=f"{K.name}+{offset:g}",
        evaluator=lambda points: K.evaluator(points - offset),
        support_radius=K.support_radius + offset,
    )


@pytest.mark.parametrize("K", [box_kernel(1), poly_kernel(1, 1, 1)], ids=["box", "triangle"])
def test_l2_modulus_exponent_is_translation_invariant(K):
    shifted = translated(K, 0.25)

    np.testing.assert_array_equal(shifted(np.array([[0.25]])), K(np.array([[0.0]])))
    assert l2_modulus_exponent(shifted, DEFAULT_SHIFTS) == pytest.approx(l2_modulus_exponent(K, DEFAULT_SHIFTS), abs=0.02)


def test_l2_modulus_exponent_preconditions():
    K = box_kernel(1)

    with pytest.raises(InvalidArgumentError):
        l2_modulus_exponent(K, [0.25, 0.125])

    with pytest.raises(InvalidArgumentError):
        l2_modulus_exponent(K, [0.25, 0.125, 0.0])


@pytest.mark.parametrize(
    "kernel, N",
    [
        (box_kernel(1), 1),
        (poly_kernel(2, 1, 1), 2),
        (poly_kernel(1, 1, 1), 1),
        (higher_order_kernel(4, 1), 4),
    ],
    ids=["box", "poly-2", "triangle", "order-4"],
)
def test_kernels_pass_their_declared_order(kernel, N):
    report = check_conditions(kernel, N, 1e-6)

    assert report.all_hold, report.failures()
    assert set(report.entries) == {"A1", "A2", "A3", "A4", "A5", "A6"}


def test_box_kernel_first_moment_vanishes_at_order_two():
    report = check_conditions(box_kernel(1), 2, 1e-6)

    assert report.entries["A6"].holds


def test_box_kernel_second_moment_fails_at_order_three():
    report = check_conditions(box_kernel(1), 3, 1e-6)

    assert not report.entries["A6"].holds
    assert report.entries["A6"].measured == pytest.approx(1 / 12, rel=1e-6)
    assert "A6" in report.failures()


def test_scaled_kernel_fails_unit_mass():
    report = check_conditions(box_kernel(1).scaled(2.0), 1, 1e-6)

    assert not report.entries["A4"].holds
    assert report.entries["A4"].measured == pytest.approx(1.0, abs=1e-9)
    assert report.entries["A2"].holds


def test_check_conditions_rejects_bad_tolerance():
    with pytest.raises(InvalidArgumentError):
        check_conditions(box_kernel(1), 1, 0.0)


def test_dyadic_schedule_default_grid():
    schedule = dyadic_schedule(DEFAULT_N_GRID, beta=1.0, d=1, C=1.0)
    exponents = [-math.log2(h) for h in schedule]

    assert all(m.is_integer() for m in exponents)
    assert all(0 <= later - earlier <= 1 for earlier, later in zip(exponents, exponents[1:]))
    assert exponents[-1] > exponents[0]


@pytest.mark.parametrize("beta", [0.5, 1.5, 2.5])
def test_dyadic_schedule_is_admissible_on_acceptance_grid(beta):
    exponents = [-math.log2(h) for h in dyadic_schedule(DEFAULT_N_GRID, beta, 1, 1.0)]

    assert all(later >= earlier for earlier, later in zip(exponents, exponents[1:]))
    assert max(later - earlier for earlier, later in zip(exponents, exponents[1:])) <= 4


def test_dyadic_schedule_single_n_within_rounding():
    n = 5000
    target = (math.log(n) / n) ** (1 / 3)
    (h,) = dyadic_schedule([n], beta=1.0, d=1, C=1.0)

    assert target / math.sqrt(2) <= h <= target * math.sqrt(2)


def test_dyadic_schedule_rejects_repeated_n():
    with pytest.raises(InvalidArgumentError):
        dyadic_schedule([2, 2], beta=1.0, d=1, C=1.0)

    with pytest.raises(InvalidArgumentError):
        dyadic_schedule([100, 150], beta=1.0, d=1, C=1.0)


def test_dyadic_schedule_rejects_bandwidths_above_one_half():
    with pytest.raises(ScheduleAssertionError):
        dyadic_schedule([4, 16], beta=1.0, d=1, C=10.0)
