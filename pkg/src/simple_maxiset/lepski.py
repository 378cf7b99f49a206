"""Adaptive choice of the regularity by pairwise comparison of kernel estimates

For a finite grid β₁ < ... < β_L the selected regularity is

    β̂ = max{u : ‖f̂_u - f̂_γ‖∞ ≤ η_n(γ) for every γ ≤ u}

with thresholds η_n(γ) = C₁ ψ_n(γ).  All estimates of one selection share a single noise field.

When no C₁ is given it is calibrated from pure noise: the 95th percentile of max_{γ ≤ u} ‖f̂_u - f̂_γ‖∞ / ψ_n(γ) over 200 replications with f ≡ 0, times 1.2.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .constants import (
    CALIBRATION_QUANTILE,
    CALIBRATION_REPLICATIONS,
    CALIBRATION_SAFETY,
    DEFAULT_C,
)
from .errors import InvalidArgumentError
from .estimator import BandwidthRule, EstimateRealization, bandwidth, kernel_estimate, psi, sup_norm
from .kernels import Kernel
from .noise_model import GridFunction, ModelParams, NoiseField, mix_seed, sample_noise

logger = logging.getLogger(__name__)

# Seed stream of the pure noise calibration, apart from the replication streams
CALIBRATION_STREAM = 2**31 - 1


@dataclass(frozen=True)
class RegularityGrid:
    """The finite grid of candidate regularities with one kernel per regularity

    Args:
        betas (tuple[float, ...]): Strictly increasing positive non integers
        kernels (tuple[Kernel, ...]): The kernel for each regularity, of order at least ⌈β⌉
        C (float, optional): The constant of the bandwidth rule. Defaults to 1.0.
        C1 (float | None, optional): The threshold constant, None until calibrated. Defaults to None.
        dyadic_snap (bool, optional): Snap bandwidths to powers of two. Defaults to False.
    """

    betas: tuple[float, ...]
    kernels: tuple[Kernel, ...]
    C: float = DEFAULT_C
    C1: float | None = None
    dyadic_snap: bool = False

    def __post_init__(self) -> None:
        if not self.betas:
            raise InvalidArgumentError("betas must not be empty")

        if len(self.kernels) != len(self.betas):
            raise InvalidArgumentError(f"need one kernel per beta, got {len(self.kernels)} for {len(self.betas)}")

        if any(not beta > 0 for beta in self.betas):
            raise InvalidArgumentError(f"betas must be positive, got {self.betas}")

        if any(later <= earlier for earlier, later in zip(self.betas, self.betas[1:])):
            raise InvalidArgumentError(f"betas must be strictly increasing, got {self.betas}")

        if any(float(beta).is_integer() for beta in self.betas):
            raise InvalidArgumentError(f"betas must not be integers, got {self.betas}")

        for beta, kernel in zip(self.betas, self.kernels):
            if kernel.order < math.ceil(beta):
                raise InvalidArgumentError(f"kernel {kernel.name} has order {kernel.order} < ⌈{beta}⌉")

        if self.C1 is not None and not self.C1 > 0:
            raise InvalidArgumentError(f"C1 must be positive, got {self.C1}")

    @property
    def dim(self) -> int:
        return self.kernels[0].dim

    def rules(self) -> list[BandwidthRule]:
        """The bandwidth rule of each regularity"""
        return [BandwidthRule(beta, self.dim, self.C, self.dyadic_snap) for beta in self.betas]

    def bandwidths(self, n: int) -> list[float]:
        """The bandwidth of each regularity at sample size n"""
        return [bandwidth(n, rule) for rule in self.rules()]

    def with_c1(self, C1: float) -> "RegularityGrid":
        return replace(self, C1=C1)


@dataclass(frozen=True, eq=False)
class LepskiTrace:
    """The record of one selection

    Attributes:
        selected (float): The selected regularity β̂
        selected_index (int): The index of β̂ in the grid
        betas (tuple[float, ...]): The grid
        pairwise_distances (NDArray): distances[u, γ] = ‖f̂_u - f̂_γ‖∞ for γ ≤ u, NaN above the diagonal
        thresholds (tuple[float, ...]): η_n(γ) for every γ in the grid
        feasible_set (tuple[float, ...]): The regularities passing every comparison
    """

    selected: float
    selected_index: int
    betas: tuple[float, ...]
    pairwise_distances: NDArray[np.float64] = field(repr=False)
    thresholds: tuple[float, ...]
    feasible_set: tuple[float, ...]


def eta(n: int, gamma: float, C1: float, d: int) -> float:
    """The threshold η_n(γ) = C₁ ψ_n(γ)

    Args:
        n (int): The sample size, at least 2
        gamma (float): The regularity compared against, positive
        C1 (float): The threshold constant, positive
        d (int): The dimension

    Returns:
        float: The threshold
    """
    if not gamma > 0:
        raise InvalidArgumentError(f"gamma must be positive, got {gamma}")

    if not C1 > 0:
        raise InvalidArgumentError(f"C1 must be positive, got {C1}")

    return C1 * psi(n, gamma, d)


def pairwise_distances(estimates: Sequence[GridFunction]) -> NDArray[np.float64]:
    """The lower triangular matrix of sup-norm distances between estimates"""
    size = len(estimates)
    distances = np.full((size, size), np.nan)

    for u in range(size):
        for gamma in range(u + 1):
            distances[u, gamma] = 0.0 if u == gamma else sup_norm(estimates[u] - estimates[gamma])

    return distances


def select(estimates: Sequence[EstimateRealization], grid: RegularityGrid, n: int) -> LepskiTrace:
    """Select the largest regularity whose estimate stays within threshold of every coarser estimate

    Args:
        estimates (Sequence[EstimateRealization]): One estimate per regularity, all from the same noise field
        grid (RegularityGrid): The grid, with C1 set
        n (int): The sample size

    Returns:
        LepskiTrace: The selection and the comparisons behind it
    """
    if len(estimates) != len(grid.betas):
        raise InvalidArgumentError(f"need {len(grid.betas)} estimates, got {len(estimates)}")

    if grid.C1 is None:
        raise InvalidArgumentError("C1 must be set or calibrated before selecting")

    # Compare every estimate with the coarser ones
    d = estimates[0].estimate.dim
    distances = pairwise_distances([realization.estimate for realization in estimates])
    thresholds = tuple(eta(n, gamma, grid.C1, d) for gamma in grid.betas)

    # Keep the regularities passing every comparison
    feasible = [
        u for u in range(len(grid.betas))
        if all(distances[u, gamma] <= thresholds[gamma] for gamma in range(u + 1))
    ]

    # u = 0 only compares with itself
    index = max(feasible)

    return LepskiTrace(
        grid.betas[index],
        index,
        grid.betas,
        distances,
        thresholds,
        tuple(grid.betas[u] for u in feasible),
    )


def grid_estimates(
    f: GridFunction, grid: RegularityGrid, params: ModelParams, noise: NoiseField
) -> list[EstimateRealization]:
    """The estimate of every regularity of the grid from one shared noise field"""
    return [
        kernel_estimate(f, kernel, h, params, noise)
        for kernel, h in zip(grid.kernels, grid.bandwidths(params.n))
    ]


def adaptive_estimate(
    f: GridFunction, grid: RegularityGrid, params: ModelParams, noise: NoiseField
) -> tuple[LepskiTrace, EstimateRealization]:
    """The adaptive estimate f̂_{n,β̂}

    Args:
        f (GridFunction): The signal
        grid (RegularityGrid): The grid, with C1 set
        params (ModelParams): The model parameters
        noise (NoiseField): The shared noise field

    Returns:
        tuple[LepskiTrace, EstimateRealization]: The selection trace and the selected estimate
    """
    estimates = grid_estimates(f, grid, params, noise)
    trace = select(estimates, grid, params.n)

    logger.debug("n=%d selected beta=%g from feasible set %s", params.n, trace.selected, trace.feasible_set)

    return trace, estimates[trace.selected_index]


def calibrate_c1(
    grid: RegularityGrid,
    resolution: int,
    n: int,
    sigma: float,
    seed: int,
    replications: int = CALIBRATION_REPLICATIONS,
    quantile: float = CALIBRATION_QUANTILE,
    safety: float = CALIBRATION_SAFETY,
) -> float:
    """Calibrate C₁ on pure noise

    Args:
        grid (RegularityGrid): The grid
        resolution (int): The grid resolution
        n (int): The sample size, usually the smallest of the experiment
        sigma (float): The noise level, positive
        seed (int): The seed of the calibration
        replications (int, optional): The number of pure noise replications. Defaults to 200.
        quantile (float, optional): The quantile of the normalized distances. Defaults to 0.95.
        safety (float, optional): The factor applied to the quantile. Defaults to 1.2.

    Returns:
        float: The calibrated C₁
    """
    if not sigma > 0:
        raise InvalidArgumentError(f"calibration needs sigma > 0, got {sigma}")

    if replications < 2:
        raise InvalidArgumentError(f"replications must be >= 2, got {replications}")

    # A single regularity has nothing to compare
    if len(grid.betas) == 1:
        return 1.0

    d = grid.dim
    params = ModelParams(sigma, n)
    f = GridFunction(d, resolution, np.zeros((resolution,) * d))
    rates = np.array([psi(n, gamma, d) for gamma in grid.betas])
    statistics = np.empty(replications)

    # Normalized distances on pure noise
    for r in range(replications):
        noise = sample_noise(d, resolution, mix_seed(seed, CALIBRATION_STREAM, r))
        distances = pairwise_distances([realization.estimate for realization in grid_estimates(f, grid, params, noise)])
        statistics[r] = np.nanmax(distances / rates[np.newaxis, :])

    C1 = safety * float(np.quantile(statistics, quantile))

    logger.info("calibrated C1=%.6g from %d pure noise replications at n=%d", C1, replications, n)

    return C1
