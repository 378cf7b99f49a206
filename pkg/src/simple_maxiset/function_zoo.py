"""Test signals of known regularity and their seminorm diagnostics

The zoo holds signals whose Hölder and Besov regularity is known analytically:

- lacunary Weierstrass series Σ 2^(-jβ) cos(2π 2^j ⟨v_j, t⟩) of exact regularity β,
- the triangle wave, Lipschitz with corners (regularity 1, an integer boundary case),
- the square wave, a discontinuous negative control,
- the cosine and the zero function, smooth positive controls.

Seminorms are grid versions of the Hölder and Zygmund quotients computed over offsets of up to M/4 cells with periodic distances.  In dimension 2 the offsets run along the two axes and the two diagonals.  A seminorm diverges when it grows by at least 2^0.1 per grid doubling across two doublings.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from .constants import (
    DIVERGENCE_FACTOR,
    HIGHER_HOLDER_CELLS_PER_ORDER,
    SEMINORM_WINDOW_FRACTION,
    WEIERSTRASS_ALIASING_FACTOR,
)
from .errors import AliasingError, InvalidArgumentError
from .noise_model import GridFunction, grid_points

logger = logging.getLogger(__name__)

Regularity = float | Literal["infinite", "none"]

_DIRECTIONS = {
    1: [(1,)],
    2: [(1, 0), (0, 1), (1, 1), (1, -1)],
}

_WEIERSTRASS_VECTORS = [(1, 0), (0, 1), (1, 1)]


@dataclass(frozen=True, eq=False)
class ZooFunction:
    """A test signal with its known regularity

    Attributes:
        signal (GridFunction): The sampled signal
        name (str): The registry name of the signal
        true_regularity (float | str): The regularity β, "infinite" for smooth signals or "none" for discontinuous ones
        is_integer_boundary (bool): True when the regularity is an integer
    """

    signal: GridFunction
    name: str
    true_regularity: Regularity
    is_integer_boundary: bool


@dataclass(frozen=True)
class SeminormDiagnostic:
    """Seminorm values of one signal across a grid refinement ladder

    Attributes:
        beta (float): The regularity tested
        resolutions (list[int]): The grid resolutions, each double the previous one
        besov_values (list[float]): The seminorm characterizing the Besov space at β
        holder_values (list[float]): The seminorm characterizing the Hölder space at β
        besov_divergent (bool): True if the Besov seminorm diverges
        holder_divergent (bool): True if the Hölder seminorm diverges
    """

    beta: float
    resolutions: list[int]
    besov_values: list[float]
    holder_values: list[float]
    besov_divergent: bool
    holder_divergent: bool


def _check_dim(dim: int) -> None:
    if dim not in (1, 2):
        raise InvalidArgumentError(f"zoo functions exist for dim 1 and 2, got {dim}")


def _weierstrass_values(beta: float, J: int, dim: int, resolution: int, first: int = 0) -> np.ndarray:
    points = grid_points(dim, resolution)
    values = np.zeros((resolution,) * dim)

    for j in range(first, J + 1):
        direction = np.asarray(_WEIERSTRASS_VECTORS[j % 3][:dim] if dim == 2 else (1,), dtype=np.float64)
        values += 2.0 ** (-j * beta) * np.cos(2 * np.pi * 2**j * (points @ direction))

    return values


def weierstrass(beta: float, J: int, dim: int, resolution: int) -> ZooFunction:
    """The lacunary series f(t) = Σ_{j=0}^{J} 2^(-jβ) cos(2π 2^j ⟨v_j, t⟩)

    The direction vectors cycle through (1, 0), (0, 1) and (1, 1) in dimension 2.

    Args:
        beta (float): The regularity β
        J (int): The index of the last term
        dim (int): The dimension, 1 or 2
        resolution (int): The number of points per axis

    Returns:
        ZooFunction: The series with regularity β

    Raises:
        AliasingError: If 2^J exceeds resolution / 8
    """
    if not beta > 0:
        raise InvalidArgumentError(f"beta must be positive, got {beta}")

    if J < 0:
        raise InvalidArgumentError(f"J must be >= 0, got {J}")

    _check_dim(dim)

    if 2**J * WEIERSTRASS_ALIASING_FACTOR > resolution:
        raise AliasingError(f"2^J = {2**J} exceeds resolution/{WEIERSTRASS_ALIASING_FACTOR} = {resolution // WEIERSTRASS_ALIASING_FACTOR}")

    signal = GridFunction(dim, resolution, _weierstrass_values(beta, J, dim, resolution))

    return ZooFunction(signal, f"weierstrass:beta={beta:g}:J={J}", float(beta), float(beta).is_integer())


def partial_sum(beta: float, J: int, j: int, dim: int, resolution: int) -> GridFunction:
    """The partial sum f_j of the first j + 1 terms of the lacunary series"""
    if not 0 <= j <= J:
        raise InvalidArgumentError(f"j must lie in [0, {J}], got {j}")

    _check_dim(dim)

    return GridFunction(dim, resolution, _weierstrass_values(beta, j, dim, resolution))


def approximation_errors(beta: float, J: int, dim: int, resolution: int) -> list[float]:
    """The normalized approximation errors 2^(jβ) ‖f - f_j‖∞ of the partial sums, for j = 0 to J

    Every value is at most 1 / (1 - 2^(-β)).
    """
    f = weierstrass(beta, J, dim, resolution).signal
    errors = []

    for j in range(J + 1):
        tail = _weierstrass_values(beta, J, dim, resolution, first=j + 1)
        errors.append(2.0 ** (j * beta) * float(np.max(np.abs(tail))) if j < J else 0.0)

    logger.debug("approximation errors of %d partial sums, sup |f| = %.6g", J + 1, np.max(np.abs(f.values)))

    return errors


def triangle_wave(resolution: int) -> ZooFunction:
    """The 1-periodic triangle wave f(t) = 4|t - 1/2| - 1 of unit amplitude and slope 4"""
    if resolution < 4:
        raise InvalidArgumentError(f"resolution must be >= 4, got {resolution}")

    t = np.arange(resolution) / resolution
    signal = GridFunction(1, resolution, 4.0 * np.abs(t - 0.5) - 1.0)

    return ZooFunction(signal, "triangle", 1.0, True)


def step_function(resolution: int) -> ZooFunction:
    """The 1-periodic square wave, +1 on [0, 1/2) and -1 on [1/2, 1)"""
    if resolution < 2:
        raise InvalidArgumentError(f"resolution must be >= 2, got {resolution}")

    t = np.arange(resolution) / resolution
    signal = GridFunction(1, resolution, np.where(t < 0.5, 1.0, -1.0))

    return ZooFunction(signal, "step", "none", False)


def cosine(dim: int, resolution: int) -> ZooFunction:
    """The smooth signal cos(2π Σ t_i)"""
    _check_dim(dim)
    signal = GridFunction.from_callable(lambda t: np.cos(2 * np.pi * np.sum(t, axis=-1)), dim, resolution)

    return ZooFunction(signal, "cosine", "infinite", False)


def zero(dim: int, resolution: int) -> ZooFunction:
    """The zero signal, for pure noise experiments"""
    _check_dim(dim)

    return ZooFunction(GridFunction(dim, resolution, np.zeros((resolution,) * dim)), "zero", "infinite", False)


def _window(f: GridFunction) -> int:
    return max(1, f.resolution // SEMINORM_WINDOW_FRACTION)


def _shifted(values: np.ndarray, direction: tuple[int, ...], k: int) -> np.ndarray:
    return np.roll(values, tuple(-k * step for step in direction), axis=tuple(range(values.ndim)))


def holder_seminorm(f: GridFunction, beta: float) -> float:
    """The grid Hölder quotient max |f(x) - f(y)| / ‖x - y‖^β over the pair window

    Args:
        f (GridFunction): The signal
        beta (float): The exponent, in (0, 1]

    Returns:
        float: The seminorm
    """
    if not 0 < beta <= 1:
        raise InvalidArgumentError(f"beta must lie in (0, 1], got {beta}")

    best = 0.0

    for direction in _DIRECTIONS[f.dim]:
        for k in range(1, _window(f) + 1):
            difference = np.max(np.abs(_shifted(f.values, direction, k) - f.values))
            best = max(best, float(difference) / (k / f.resolution) ** beta)

    return best


def zygmund_seminorm(f: GridFunction) -> float:
    """The grid Zygmund quotient max |f(x + y) + f(x - y) - 2 f(x)| / ‖y‖ over the offset window"""
    best = 0.0

    for direction in _DIRECTIONS[f.dim]:
        for k in range(1, _window(f) + 1):
            second = _shifted(f.values, direction, k) + _shifted(f.values, direction, -k) - 2 * f.values
            best = max(best, float(np.max(np.abs(second))) / (k / f.resolution))

    return best


def _split(beta: float) -> tuple[int, float]:
    m = math.ceil(beta) - 1
    return m, beta - m


def derivatives(f: GridFunction, m: int) -> list[GridFunction]:
    """All forward difference partial derivatives of total order m"""
    if f.resolution < HIGHER_HOLDER_CELLS_PER_ORDER * m:
        raise InvalidArgumentError(
            f"resolution {f.resolution} is too coarse for order {m} differences, "
            f"need at least {HIGHER_HOLDER_CELLS_PER_ORDER * m} cells"
        )

    orders = [alpha for alpha in np.ndindex(*((m + 1,) * f.dim)) if sum(alpha) == m]
    result = []

    for alpha in orders:
        values = f.values
        for axis, order in enumerate(alpha):
            for _ in range(order):
                values = (np.roll(values, -1, axis=axis) - values) * f.resolution
        result.append(f.like(values))

    return result


def higher_holder_seminorm(f: GridFunction, beta: float) -> float:
    """The Hölder seminorm of the m-th derivatives, with β = m + α and α in (0, 1]

    The Zygmund seminorm replaces the Hölder one when α = 1.

    Args:
        f (GridFunction): The signal
        beta (float): The regularity, greater than 1

    Returns:
        float: The largest seminorm over the derivatives of order m
    """
    if not beta > 1:
        raise InvalidArgumentError(f"beta must be > 1, got {beta}")

    m, alpha = _split(beta)
    seminorm = zygmund_seminorm if alpha == 1 else (lambda g: holder_seminorm(g, alpha))

    return max(seminorm(derivative) for derivative in derivatives(f, m))


def besov_seminorm(f: GridFunction, beta: float) -> float:
    """The seminorm whose finiteness characterizes the Besov space of regularity β"""
    if beta < 1:
        return holder_seminorm(f, beta)

    if beta == 1:
        return zygmund_seminorm(f)

    return higher_holder_seminorm(f, beta)


def hoelder_space_seminorm(f: GridFunction, beta: float) -> float:
    """The seminorm whose finiteness characterizes the Hölder space of regularity β"""
    if beta <= 1:
        return holder_seminorm(f, beta)

    m, alpha = _split(beta)

    return max(holder_seminorm(derivative, alpha) for derivative in derivatives(f, m))


def is_divergent(values: Sequence[float]) -> bool:
    """True if a seminorm grows by at least 2^0.1 per grid doubling across the last two doublings

    Args:
        values (Sequence[float]): Seminorm values on successively doubled grids, at least three

    Returns:
        bool: The divergence verdict
    """
    if len(values) < 3:
        raise InvalidArgumentError(f"divergence needs at least 3 resolutions, got {len(values)}")

    last = values[-3:]

    return all(earlier > 0 and later >= DIVERGENCE_FACTOR * earlier for earlier, later in zip(last, last[1:]))


def seminorm_diagnostic(
    build: Callable[[int], GridFunction], beta: float, resolutions: Sequence[int]
) -> SeminormDiagnostic:
    """Besov and Hölder seminorms of a signal on a ladder of doubled grids

    Args:
        build (Callable[[int], GridFunction]): Builds the signal at a resolution
        beta (float): The regularity tested
        resolutions (Sequence[int]): At least three resolutions, each double the previous one

    Returns:
        SeminormDiagnostic: The seminorm values and their divergence verdicts
    """
    if any(later != 2 * earlier for earlier, later in zip(resolutions, resolutions[1:])):
        raise InvalidArgumentError(f"resolutions must double at every step, got {list(resolutions)}")

    besov_values = []
    holder_values = []

    # Measure the seminorms on every grid of the ladder
    for resolution in resolutions:
        signal = build(resolution)
        besov_values.append(besov_seminorm(signal, beta))
        holder_values.append(
            hoelder_space_seminorm(signal, beta) if float(beta).is_integer() else besov_values[-1]
        )

    diagnostic = SeminormDiagnostic(
        beta,
        list(resolutions),
        besov_values,
        holder_values,
        is_divergent(besov_values),
        is_divergent(holder_values),
    )

    logger.debug("seminorm diagnostic at beta=%g: %s", beta, diagnostic)

    return diagnostic
