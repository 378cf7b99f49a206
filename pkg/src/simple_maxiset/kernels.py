"""Kernels and their class conditions

This module builds compactly supported kernels and checks them against the six conditions that define the kernel classes 𝒦(N):

- (A1) K has a compact support, K ≡ 0 outside [-A, A]^d
- (A2) ‖K‖₂² = ∫ K² < ∞
- (A3) ∫ (K(t + u) - K(u))² du ≤ C ‖t‖^(2γ) for some γ in (0, 1]
- (A4) ∫ K = 1
- (A5) the derivatives of K up to total order N are integrable
- (A6) ∫ P K = 0 for every polynomial P of degree at most N - 1 with P(0) = 0

Integrals are computed with a composite midpoint rule.  Norms on ℝ^d are sup-norms, and the shift used by (A3) is the diagonal vector (t, ..., t).

It also builds the dyadic bandwidth schedules h_n = 2^(-m_n) of the admissible bandwidth class.
"""

import functools
import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import special

from .constants import (
    DEFAULT_SHIFTS,
    DERIVATIVE_GROWTH_TOLERANCE,
    DERIVATIVE_NODES,
    GAMMA_TOLERANCE,
    MAX_DYADIC_STEP,
    QUADRATURE_NODES,
)
from .errors import InvalidArgumentError, ScheduleAssertionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Kernel:
    """A compactly supported kernel with its constants

    Kernels are immutable and hashable, so they can be shared between workers and used as cache keys.

    Attributes:
        name (str): The registry name of the kernel
        dim (int): The dimension d
        evaluator (Callable): Maps points of shape (..., d) to values of shape (...)
        support_radius (float): A such that K vanishes outside [-A, A]^d
        order (int): The claimed order N
        gamma (float): The claimed exponent of the L₂ modulus, in (0, 1]
        l2_norm (float): ‖K‖₂
    """

    name: str
    dim: int
    evaluator: Callable[[NDArray[np.float64]], NDArray[np.float64]] = field(repr=False)
    support_radius: float
    order: int
    gamma: float
    l2_norm: float

    def __call__(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        points = np.asarray(points, dtype=np.float64)

        if points.shape[-1] != self.dim:
            raise InvalidArgumentError(f"points must have trailing axis {self.dim}, got shape {points.shape}")

        return self.evaluator(points)

    def scaled(self, factor: float) -> "Kernel":
        """Return the kernel multiplied by a constant, the claimed constants are kept"""
        return replace(
            self,
            name=f"{self.name}*{factor:g}",
            evaluator=functools.partial(_scaled, self.evaluator, factor),
            l2_norm=abs(factor) * self.l2_norm,
        )


@dataclass(frozen=True)
class ConditionEntry:
    """The outcome of one kernel condition

    Attributes:
        holds (bool): Whether the measured residual is within tolerance
        measured (float): The numeric residual
        tolerance (float): The tolerance used
    """

    holds: bool
    measured: float
    tolerance: float


@dataclass(frozen=True)
class ConditionReport:
    """Conditions A1 to A6 for one kernel at one order

    Attributes:
        kernel (str): The kernel name
        order (int): The order N checked
        entries (dict[str, ConditionEntry]): The entries keyed "A1" to "A6"
    """

    kernel: str
    order: int
    entries: dict[str, ConditionEntry]

    @property
    def all_hold(self) -> bool:
        """True when every condition holds"""
        return all(entry.holds for entry in self.entries.values())

    def failures(self) -> list[str]:
        """The names of the conditions that fail"""
        return [name for name, entry in self.entries.items() if not entry.holds]


def _entry(measured: float, tolerance: float) -> ConditionEntry:
    return ConditionEntry(bool(measured <= tolerance), float(measured), float(tolerance))


def _scaled(evaluator: Callable, factor: float, points: NDArray[np.float64]) -> NDArray[np.float64]:
    return factor * evaluator(points)


def _box(points: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.all(np.abs(points) <= 0.5, axis=-1).astype(np.float64)


def _poly(points: NDArray[np.float64], beta_param: float, power: int, constant: float) -> NDArray[np.float64]:
    base = 1.0 - np.sum(np.abs(points) ** beta_param, axis=-1)
    return constant * np.clip(base, 0.0, None) ** power


def _gegenbauer_1d(u: NDArray[np.float64], order: int, smoothness: int) -> NDArray[np.float64]:
    lam = smoothness + 0.5
    inside = np.abs(u) <= 1.0
    total = np.zeros_like(u)

    for m in range(order):
        log_norm = (
            math.log(math.pi)
            + (1 - 2 * lam) * math.log(2)
            + special.gammaln(m + 2 * lam)
            - special.gammaln(m + 1)
            - math.log(m + lam)
            - 2 * special.gammaln(lam)
        )
        total += special.eval_gegenbauer(m, lam, 0.0) * special.eval_gegenbauer(m, lam, u) / math.exp(log_norm)

    weight = np.clip(1.0 - u**2, 0.0, None) ** smoothness
    return np.where(inside, weight * total, 0.0)


def _product_gegenbauer(points: NDArray[np.float64], order: int, smoothness: int) -> NDArray[np.float64]:
    return np.prod(_gegenbauer_1d(points, order, smoothness), axis=-1)


def midpoint_grid(radius: float, nodes: int, dim: int) -> tuple[NDArray[np.float64], float]:
    """Nodes of the composite midpoint rule on [-radius, radius]^d

    Args:
        radius (float): The half side of the box
        nodes (int): The number of nodes per axis
        dim (int): The dimension

    Returns:
        tuple[NDArray[np.float64], float]: The nodes of shape (nodes,) * d + (d,) and the node spacing
    """
    step = 2.0 * radius / nodes
    axis = -radius + (np.arange(nodes) + 0.5) * step
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1), step


def integrate(
    kernel: Kernel,
    weight: Callable[[NDArray[np.float64]], NDArray[np.float64]] | None = None,
    power: int = 1,
    nodes: int | None = None,
) -> float:
    """Integrate K^power times a weight over the support box with the midpoint rule

    Args:
        kernel (Kernel): The kernel
        weight (Callable, optional): A weight function of the points. Defaults to None.
        power (int, optional): The power of K. Defaults to 1.
        nodes (int, optional): The number of nodes per axis. Defaults to the quadrature default for the dimension.

    Returns:
        float: The integral
    """
    nodes = nodes or QUADRATURE_NODES.get(kernel.dim, 2**6)
    points, step = midpoint_grid(kernel.support_radius, nodes, kernel.dim)
    values = kernel(points) ** power

    if weight is not None:
        values = values * weight(points)

    return float(np.sum(values) * step**kernel.dim)


def _finish(kernel: Kernel) -> Kernel:
    return replace(kernel, l2_norm=math.sqrt(integrate(kernel, power=2)))


def box_kernel(d: int) -> Kernel:
    """The indicator of [-1/2, 1/2]^d, a kernel of order 1

    Args:
        d (int): The dimension

    Returns:
        Kernel: The box kernel
    """
    if d < 1:
        raise InvalidArgumentError(f"d must be >= 1, got {d}")

    return Kernel("box", d, _box, support_radius=0.5, order=1, gamma=0.5, l2_norm=1.0)


def poly_kernel(beta_param: float, power: int, d: int) -> Kernel:
    """The kernel c (1 - Σ|x_i|^β)₊^power normalized to unit mass

    The order is 2 for power 1 and β ≥ 2, and 1 otherwise.

    Args:
        beta_param (float): The exponent β, at least 1
        power (int): The outer power, 1 or 2
        d (int): The dimension

    Returns:
        Kernel: The polynomial kernel
    """
    if beta_param < 1:
        raise InvalidArgumentError(f"beta_param must be >= 1, got {beta_param}")

    if power not in (1, 2):
        raise InvalidArgumentError(f"power must be 1 or 2, got {power}")

    if d < 1:
        raise InvalidArgumentError(f"d must be >= 1, got {d}")

    order = 2 if power == 1 and beta_param >= 2 else 1
    name = f"poly:beta={beta_param:g}:pow={power}"

    raw = Kernel(name, d, functools.partial(_poly, beta_param=beta_param, power=power, constant=1.0), 1.0, order, 1.0, 1.0)
    constant = 1.0 / integrate(raw)

    kernel = replace(raw, evaluator=functools.partial(_poly, beta_param=beta_param, power=power, constant=constant))
    return _finish(kernel)


def higher_order_kernel(N: int, d: int) -> Kernel:
    """A kernel of order N on [-1, 1]^d built from orthonormal polynomials

    The one dimensional kernel is K(u) = w(u) Σ_{m<N} p_m(0) p_m(u), where the p_m are the polynomials orthonormal for the weight w(u) = (1 - u²)^(N+1) on [-1, 1].  It has unit mass and vanishing moments of orders 1 to N - 1, and its derivatives up to order N are continuous.  In dimension d the kernel is the product of one dimensional kernels.

    Args:
        N (int): The order, at least 1
        d (int): The dimension

    Returns:
        Kernel: The higher order kernel, with γ as measured by `l2_modulus_exponent`
    """
    if N < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {N}")

    if d < 1:
        raise InvalidArgumentError(f"d must be >= 1, got {d}")

    evaluator = functools.partial(_product_gegenbauer, order=N, smoothness=N + 1)
    kernel = _finish(Kernel(f"order:N={N}", d, evaluator, 1.0, N, 1.0, 1.0))

    return replace(kernel, gamma=l2_modulus_exponent(kernel, DEFAULT_SHIFTS))


def l2_modulus_exponent(K: Kernel, shifts: Sequence[float]) -> float:
    """Estimate the exponent γ of the L₂ modulus of continuity of K

    Fits the least-squares slope of log ∫ (K(u + t) - K(u))² du against log t and halves it.  The result is capped at 1.

    Args:
        K (Kernel): The kernel
        shifts (Sequence[float]): At least three shifts in (0, 1]

    Returns:
        float: The estimated γ
    """
    if len(shifts) < 3:
        raise InvalidArgumentError(f"at least 3 shifts are required, got {len(shifts)}")

    if any(not 0 < t <= 1 for t in shifts):
        raise InvalidArgumentError(f"shifts must lie in (0, 1], got {list(shifts)}")

    radius = K.support_radius + 1.0
    nodes = 2 * QUADRATURE_NODES.get(K.dim, 2**6)
    points, step = midpoint_grid(radius, nodes, K.dim)
    base = K(points)

    moduli = []
    for t in shifts:
        shifted = K(points + t)
        moduli.append(np.sum((shifted - base) ** 2) * step**K.dim)

    moduli = np.asarray(moduli)
    if np.any(moduli <= 0):
        raise InvalidArgumentError("the kernel coincides with a shift of itself")

    slope = np.polyfit(np.log(shifts), np.log(moduli), 1)[0]

    return float(min(slope / 2.0, 1.0))


def _multi_indices(dim: int, low: int, high: int) -> list[tuple[int, ...]]:
    return [alpha for alpha in itertools.product(range(high + 1), repeat=dim) if low <= sum(alpha) <= high]


def _difference_integral(K: Kernel, alpha: tuple[int, ...], nodes: int) -> float:
    radius = 1.25 * K.support_radius
    points, step = midpoint_grid(radius, nodes, K.dim)
    values = K(points)

    for axis, order in enumerate(alpha):
        if order:
            values = np.diff(values, n=order, axis=axis) / step**order

    return float(np.sum(np.abs(values)) * step**K.dim)


def _derivative_growth(K: Kernel, N: int) -> float:
    nodes = DERIVATIVE_NODES.get(K.dim, 2**5)
    growth = 0.0

    for alpha in _multi_indices(K.dim, 1, N):
        coarse = _difference_integral(K, alpha, nodes)
        fine = _difference_integral(K, alpha, 2 * nodes)

        if coarse > 0:
            growth = max(growth, fine / coarse - 1.0)
        elif fine > 0:
            growth = math.inf

    return growth


def _support_leak(K: Kernel) -> float:
    radius = K.support_radius + 1.0
    points, _ = midpoint_grid(radius, 4 * DERIVATIVE_NODES.get(K.dim, 2**5), K.dim)
    outside = np.any(np.abs(points) > K.support_radius, axis=-1)

    return float(np.max(np.abs(K(points[outside]))))


def check_conditions(K: Kernel, N: int, tol: float) -> ConditionReport:
    """Check a kernel numerically against the conditions of the class 𝒦(N)

    - A1 samples the kernel outside its support box.
    - A2 and A4 use the midpoint quadrature.
    - A3 compares the measured L₂ modulus exponent with the claimed one.
    - A5 integrates difference quotients of every order up to N and fails when the integral grows under a doubling of the number of nodes, so kernels that are differentiable almost everywhere with integrable jumps in lower derivatives pass.
    - A6 checks the monomials u^α with 1 ≤ |α| ≤ N - 1.

    Args:
        K (Kernel): The kernel
        N (int): The order to check
        tol (float): The tolerance for A1, A2, A4 and A6

    Returns:
        ConditionReport: The report, failures are reported rather than raised
    """
    if not tol > 0:
        raise InvalidArgumentError(f"tol must be positive, got {tol}")

    entries: dict[str, ConditionEntry] = {}

    # Support, norm, modulus, mass and smoothness
    entries["A1"] = _entry(_support_leak(K), tol)
    entries["A2"] = _entry(abs(K.l2_norm**2 - integrate(K, power=2)), tol)
    entries["A3"] = _entry(abs(l2_modulus_exponent(K, DEFAULT_SHIFTS) - K.gamma), GAMMA_TOLERANCE)
    entries["A4"] = _entry(abs(integrate(K) - 1.0), tol)
    entries["A5"] = _entry(_derivative_growth(K, N), DERIVATIVE_GROWTH_TOLERANCE)

    # Vanishing moments
    moments = [
        abs(integrate(K, weight=functools.partial(_monomial, alpha=alpha)))
        for alpha in _multi_indices(K.dim, 1, N - 1)
    ]
    entries["A6"] = _entry(max(moments, default=0.0), tol)

    report = ConditionReport(K.name, N, entries)
    logger.debug("conditions for %s at N=%d: failures %s", K.name, N, report.failures())

    return report


def _monomial(points: NDArray[np.float64], alpha: tuple[int, ...]) -> NDArray[np.float64]:
    return np.prod(points ** np.asarray(alpha), axis=-1)


def dyadic_schedule(n_grid: Sequence[int], beta: float, d: int, C: float) -> list[float]:
    """Dyadic bandwidths h_n = 2^(-m_n) for the rule C (log n / n)^(1 / (2β + d))

    The grid must be geometric with ratio at least 2 so the rounding keeps m_n non decreasing.

    Args:
        n_grid (Sequence[int]): Strictly increasing sample sizes, all at least 2
        beta (float): The regularity
        d (int): The dimension
        C (float): The constant of the bandwidth rule

    Returns:
        list[float]: The bandwidths

    Raises:
        InvalidArgumentError: If the grid is not strictly increasing with ratio at least 2
        ScheduleAssertionError: If the rounded exponents leave the admissible class
    """
    if not n_grid:
        raise InvalidArgumentError("n_grid must not be empty")

    if any(n < 2 for n in n_grid):
        raise InvalidArgumentError(f"all sample sizes must be >= 2, got {list(n_grid)}")

    if any(later <= earlier for earlier, later in zip(n_grid, n_grid[1:])):
        raise InvalidArgumentError(f"n_grid must be strictly increasing, got {list(n_grid)}")

    if any(later < 2 * earlier for earlier, later in zip(n_grid, n_grid[1:])):
        raise InvalidArgumentError(f"n_grid must be geometric with ratio >= 2, got {list(n_grid)}")

    if not C > 0 or not beta > 0:
        raise InvalidArgumentError(f"C and beta must be positive, got C={C}, beta={beta}")

    # Round the rule to the nearest power of two
    exponents = [round(-math.log2(C * (math.log(n) / n) ** (1.0 / (2 * beta + d)))) for n in n_grid]

    # Check the schedule stays in the admissible class
    steps = [later - earlier for earlier, later in zip(exponents, exponents[1:])]

    if any(step < 0 for step in steps):
        raise ScheduleAssertionError(f"dyadic exponents are not non decreasing: {exponents}")

    if any(step > MAX_DYADIC_STEP for step in steps):
        raise ScheduleAssertionError(f"dyadic exponents jump by more than {MAX_DYADIC_STEP}: {exponents}")

    if exponents[0] < 1:
        raise ScheduleAssertionError(f"dyadic bandwidths must be below 1, got exponents {exponents}")

    return [2.0**-m for m in exponents]
