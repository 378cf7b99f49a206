"""Kernel estimator in the white noise model

The estimator of f at bandwidth h is the convolution of the observation with the rescaled kernel K_h = h^(-d) K(· / h).  On the grid it splits exactly into

- the bias part K_h ∗ f, a noise-free circular convolution computed by [`smooth`][src.simple_maxiset.estimator.smooth], and
- the stochastic part σ / √(n h^d) · ξ with ξ from [`stochastic_convolution`][src.simple_maxiset.noise_model.stochastic_convolution].

The bandwidth rule is h_{n,β} = C (log n / n)^(1 / (2β + d)), optionally snapped to the nearest power of two, and ψ_n(β) = (log n / n)^(β / (2β + d)) is the benchmark rate.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constants import BOUNDED_MEDIAN_FACTOR, DEFAULT_C, MAX_BANDWIDTH, MEMBER, NON_MEMBER
from .errors import BandwidthTooLargeError, InvalidArgumentError
from .kernels import Kernel
from .noise_model import (
    ConvolutionMethod,
    GridFunction,
    ModelParams,
    NoiseField,
    check_noise_matches,
    circular_convolve,
    stochastic_convolution,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BandwidthRule:
    """The bandwidth rule h = C (log n / n)^(1 / (2β + d))

    Attributes:
        beta (float): The regularity target β
        d (int): The dimension
        C (float, optional): The constant of the rule. Defaults to 1.0.
        dyadic_snap (bool, optional): Snap the bandwidth to the nearest power of two. Defaults to False.
    """

    beta: float
    d: int
    C: float = DEFAULT_C
    dyadic_snap: bool = False

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise InvalidArgumentError(f"C must be positive, got {self.C}")

        if not self.beta > 0:
            raise InvalidArgumentError(f"beta must be positive, got {self.beta}")

        if self.d < 1:
            raise InvalidArgumentError(f"d must be >= 1, got {self.d}")


@dataclass(frozen=True, eq=False)
class EstimateRealization:
    """One realization of the kernel estimator

    `estimate - bias_part` is the scaled stochastic term σ / √(n h^d) · ξ.

    Attributes:
        estimate (GridFunction): The estimate on the grid
        bias_part (GridFunction): The noise-free part K_h ∗ f
        h (float): The bandwidth
        n (int): The sample size
        sigma (float): The noise level
        seed (int | None): The seed of the noise field
    """

    estimate: GridFunction
    bias_part: GridFunction
    h: float
    n: int
    sigma: float
    seed: int | None

    @property
    def stochastic_part(self) -> GridFunction:
        """The centred part of the estimate"""
        return self.estimate - self.bias_part


@dataclass(frozen=True)
class BiasProfile:
    """The normalized bias sequence h^(-β) ‖K_h ∗ f - f‖∞ over a bandwidth sweep

    Attributes:
        beta (float): The regularity β
        entries (list[tuple[float, float]]): Pairs (h, normalized bias) in the order of the sweep
        bounded (bool): True if the last three entries stay within 1.5 times the median
    """

    beta: float
    entries: list[tuple[float, float]]
    bounded: bool

    @property
    def verdict(self) -> str:
        """"member" when bounded, "non-member" otherwise"""
        return MEMBER if self.bounded else NON_MEMBER

    @property
    def values(self) -> list[float]:
        """The normalized bias values"""
        return [value for _, value in self.entries]


def log_ratio(n: int) -> float:
    """The base log n / n of every rate in the model"""
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")

    return math.log(n) / n


def psi(n: int, beta: float, d: int) -> float:
    """The rate ψ_n(β) = (log n / n)^(β / (2β + d))

    Args:
        n (int): The sample size, at least 2
        beta (float): The regularity
        d (int): The dimension

    Returns:
        float: The rate value
    """
    return log_ratio(n) ** (beta / (2 * beta + d))


def bandwidth(n: int, rule: BandwidthRule) -> float:
    """The bandwidth h_{n,β} = C (log n / n)^(1 / (2β + d))

    Args:
        n (int): The sample size, at least 2
        rule (BandwidthRule): The rule

    Returns:
        float: The bandwidth, in (0, 1/2)

    Raises:
        BandwidthTooLargeError: If the bandwidth is at least 1/2
    """
    h = rule.C * log_ratio(n) ** (1.0 / (2 * rule.beta + rule.d))

    if rule.dyadic_snap:
        h = 2.0 ** -round(-math.log2(h))

    if h >= MAX_BANDWIDTH:
        raise BandwidthTooLargeError(
            f"bandwidth-too-large: h = {h:.6g} >= {MAX_BANDWIDTH} for n = {n}, use a larger n or a smaller C"
        )

    return h


def smooth(f: GridFunction, K: Kernel, h: float, method: ConvolutionMethod = "fft") -> GridFunction:
    """The circular convolution K_h ∗ f on the grid

    Computes h^(-d) Σ_j K((t_i - u_j) / h) f(u_j) M^(-d) with indices modulo M.  This is the exact expectation of the kernel estimate for the same inputs.

    Args:
        f (GridFunction): The periodic signal
        K (Kernel): The kernel
        h (float): The bandwidth
        method (str, optional): The convolution method. Defaults to "fft".

    Returns:
        GridFunction: The smoothed signal
    """
    scale = (f.resolution * h) ** -f.dim
    return f.like(scale * circular_convolve(f.values, K, h, method))


def kernel_estimate(
    f: GridFunction,
    K: Kernel,
    h: float,
    params: ModelParams,
    noise: NoiseField,
    method: ConvolutionMethod = "fft",
) -> EstimateRealization:
    """The kernel estimate of f from one observation

    Args:
        f (GridFunction): The signal
        K (Kernel): The kernel
        h (float): The bandwidth
        params (ModelParams): The model parameters
        noise (NoiseField): The noise field, on the same grid as f
        method (str, optional): The convolution method. Defaults to "fft".

    Returns:
        EstimateRealization: The estimate with its bias part
    """
    check_noise_matches(f, noise)

    bias_part = smooth(f, K, h, method)

    if params.sigma == 0:
        estimate = bias_part
    else:
        xi = stochastic_convolution(noise, K, h, method)
        scale = params.sigma / math.sqrt(params.n * h**f.dim)
        estimate = bias_part + scale * xi

    return EstimateRealization(estimate, bias_part, h, params.n, params.sigma, noise.seed)


def estimate_from_observation(dY: GridFunction, K: Kernel, h: float, method: ConvolutionMethod = "fft") -> GridFunction:
    """The estimator as a functional of the observation increments, h^(-d) Σ_j K((t - u_j) / h) dY_j

    Args:
        dY (GridFunction): The observation increments from [`observe`][src.simple_maxiset.noise_model.observe]
        K (Kernel): The kernel
        h (float): The bandwidth
        method (str, optional): The convolution method. Defaults to "fft".

    Returns:
        GridFunction: The estimate
    """
    return dY.like(h**-dY.dim * circular_convolve(dY.values, K, h, method))


def sup_norm(g: GridFunction) -> float:
    """The grid maximum of |g|

    The grid maximum under-approximates the essential supremum by at most the modulus of continuity of g over one cell.
    """
    return float(np.max(np.abs(g.values)))


def risk_bound(bias_sup: float, variance_risk: float, p: float) -> float:
    """The upper bound 2^(p-1) (b^p + v) of the risk from its bias and variance parts"""
    return 2 ** (p - 1) * (bias_sup**p + variance_risk)


def is_bounded(values: Sequence[float]) -> bool:
    median = float(np.median(values))
    return all(value <= BOUNDED_MEDIAN_FACTOR * median for value in values[-3:])


def bias_profile(f: GridFunction, K: Kernel, beta: float, h_list: Sequence[float]) -> BiasProfile:
    """The normalized bias sequence h^(-β) ‖K_h ∗ f - f‖∞ over decreasing bandwidths

    The profile is bounded when its last three entries do not exceed 1.5 times the median of the sequence.

    Args:
        f (GridFunction): The signal
        K (Kernel): The kernel
        beta (float): The regularity β
        h_list (Sequence[float]): Decreasing bandwidths, admissible for the grid

    Returns:
        BiasProfile: The profile and its boundedness verdict
    """
    if not h_list:
        raise InvalidArgumentError("h_list must not be empty")

    if any(later >= earlier for earlier, later in zip(h_list, h_list[1:])):
        raise InvalidArgumentError(f"h_list must be decreasing, got {list(h_list)}")

    entries = [(h, h**-beta * sup_norm(smooth(f, K, h) - f)) for h in h_list]
    profile = BiasProfile(beta, entries, is_bounded([value for _, value in entries]))

    logger.debug("bias profile at beta=%g: %s", beta, profile.values)

    return profile


def bias_profile_along_schedule(
    f: GridFunction, K: Kernel, rule: BandwidthRule, n_grid: Sequence[int]
) -> BiasProfile:
    """The normalized bias sequence along the bandwidths h_{n,β} of a sample size grid

    Args:
        f (GridFunction): The signal
        K (Kernel): The kernel
        rule (BandwidthRule): The bandwidth rule
        n_grid (Sequence[int]): Increasing sample sizes

    Returns:
        BiasProfile: The profile and its boundedness verdict
    """
    h_list = [bandwidth(n, rule) for n in n_grid]

    # Snapped schedules repeat bandwidths
    distinct = sorted(set(h_list), reverse=True)

    if len(distinct) < len(h_list):
        profile = bias_profile(f, K, rule.beta, distinct)
        lookup = dict(profile.entries)
        entries = [(h, lookup[h]) for h in h_list]
        return BiasProfile(rule.beta, entries, is_bounded([value for _, value in entries]))

    return bias_profile(f, K, rule.beta, h_list)
