"""Discretized Gaussian white noise model

This module realizes the observation dY_t = f(t)dt + (σ/√n)dW_t on the unit torus [0,1)^d.

Signals live on a regular grid with M points per axis in a [`GridFunction`][src.simple_maxiset.noise_model.GridFunction].  White noise is a [`NoiseField`][src.simple_maxiset.noise_model.NoiseField] of M^d independent standard normals, the Brownian increment over cell i being `increments[i] * M^(-d/2)`.

All stochastic integrals against a kernel become weighted circular sums over the kernel's support window, so noise on every translate of the unit cell is the noise of the base cell.  The kernel weights are cell averages of K, which keeps the Riemann sums exact for kernels with jumps on cell boundaries.
"""

import functools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from numpy.typing import NDArray
from scipy import fft, ndimage

from .constants import MIN_CELLS_PER_BANDWIDTH, MIN_RESOLUTION, STENCIL_SUBSAMPLES
from .errors import InvalidArgumentError, KernelWraparoundError, UnderResolvedBandwidthError
from .kernels import Kernel

logger = logging.getLogger(__name__)

ConvolutionMethod = Literal["fft", "direct"]


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a 1-periodic function on a regular grid

    Entry `values[i]` is f(i/M) for the multi-index i.  Index arithmetic is modulo M on every axis.

    Attributes:
        dim (int): The dimension d
        resolution (int): The number of points per axis M
        values (NDArray[np.float64]): The samples, an array of shape (M,) * d
    """

    dim: int
    resolution: int
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidArgumentError(f"dim must be >= 1, got {self.dim}")

        if self.resolution < MIN_RESOLUTION:
            raise InvalidArgumentError(f"resolution must be >= {MIN_RESOLUTION}, got {self.resolution}")

        values = np.asarray(self.values, dtype=np.float64)

        if values.shape != (self.resolution,) * self.dim:
            raise InvalidArgumentError(
                f"values must have shape {(self.resolution,) * self.dim}, got {values.shape}"
            )

        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("grid function values must be finite")

        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(
        cls, func: Callable[[NDArray[np.float64]], NDArray[np.float64]], dim: int, resolution: int
    ) -> "GridFunction":
        """Sample a function given on points of shape (..., d)

        Args:
            func (Callable): The function, evaluated on an array of points with trailing axis d
            dim (int): The dimension
            resolution (int): The number of points per axis

        Returns:
            GridFunction: The sampled function
        """
        return cls(dim, resolution, func(grid_points(dim, resolution)))

    def like(self, values: NDArray[np.float64]) -> "GridFunction":
        """Return a grid function on the same grid with new values"""
        return GridFunction(self.dim, self.resolution, values)

    def shift(self, cells: int | tuple[int, ...]) -> "GridFunction":
        """Cyclically shift the samples by a number of cells on each axis"""
        if isinstance(cells, int):
            cells = (cells,) * self.dim

        return self.like(np.roll(self.values, cells, axis=tuple(range(self.dim))))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return self.like(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return self.like(self.values - other.values)

    def __mul__(self, scalar: float) -> "GridFunction":
        return self.like(scalar * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class NoiseField:
    """Standard Gaussian increments of the Brownian sheet on the grid

    Attributes:
        dim (int): The dimension d
        resolution (int): The number of points per axis M
        increments (NDArray[np.float64]): The i.i.d. N(0, 1) draws, an array of shape (M,) * d
        seed (int | None): The seed the field was drawn with, None for injected fields
    """

    dim: int
    resolution: int
    increments: NDArray[np.float64]
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.increments.shape != (self.resolution,) * self.dim:
            raise InvalidArgumentError(
                f"increments must have shape {(self.resolution,) * self.dim}, got {self.increments.shape}"
            )

    @property
    def cell_volume(self) -> float:
        """The volume M^-d of one grid cell"""
        return float(self.resolution) ** -self.dim

    @classmethod
    def from_increments(cls, increments: NDArray[np.float64]) -> "NoiseField":
        """Wrap a deterministic array as a noise field, used to inject fields in tests"""
        increments = np.asarray(increments, dtype=np.float64)
        return cls(increments.ndim, increments.shape[0], increments)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the white noise model and of the loss

    A noise level of zero is accepted and gives the noise-free degeneracy of the model.

    Attributes:
        sigma (float): The noise scale σ
        n (int): The effective sample size
        p (float): The loss exponent
    """

    sigma: float
    n: int
    p: float = 2.0

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise InvalidArgumentError(f"sigma must be >= 0, got {self.sigma}")

        if self.n < 2:
            raise InvalidArgumentError(f"n must be >= 2, got {self.n}")

        if self.p < 1:
            raise InvalidArgumentError(f"p must be >= 1, got {self.p}")


def grid_points(dim: int, resolution: int) -> NDArray[np.float64]:
    """Return the grid points i/M as an array of shape (M,) * d + (d,)"""
    axis = np.arange(resolution) / resolution
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1)


def mix_seed(seed: int, *keys: int) -> int:
    """Derive an independent 64-bit stream seed from an experiment seed and counters

    The derived seed depends only on the values of the keys, not on the order in which streams are requested.

    Args:
        seed (int): The experiment seed
        *keys (int): Counters such as the sample size index and the replication number

    Returns:
        int: The derived seed
    """
    if seed < 0 or any(key < 0 for key in keys):
        raise InvalidArgumentError("seeds and stream keys must be non-negative")

    state = np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def sample_noise(dim: int, resolution: int, seed: int) -> NoiseField:
    """Draw the Brownian sheet increments on the grid

    Args:
        dim (int): The dimension d, at least 1
        resolution (int): The number of points per axis M, at least 2
        seed (int): The seed, the same seed always gives the same increments

    Returns:
        NoiseField: The noise field
    """
    if dim < 1:
        raise InvalidArgumentError(f"dim must be >= 1, got {dim}")

    if resolution < MIN_RESOLUTION:
        raise InvalidArgumentError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")

    rng = np.random.default_rng(seed)
    increments = rng.standard_normal(size=(resolution,) * dim)

    return NoiseField(dim, resolution, increments, seed)


def check_bandwidth(kernel: Kernel, h: float, resolution: int) -> None:
    """Check that a bandwidth is admissible on a grid

    Args:
        kernel (Kernel): The kernel
        h (float): The bandwidth
        resolution (int): The number of points per axis

    Raises:
        InvalidArgumentError: If h is not positive
        UnderResolvedBandwidthError: If M * h is below the minimum number of cells
        KernelWraparoundError: If the scaled kernel support does not fit in the unit cell
    """
    if not h > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {h}")

    if resolution * h < MIN_CELLS_PER_BANDWIDTH:
        raise UnderResolvedBandwidthError(
            f"under-resolved-bandwidth: M*h = {resolution * h:.6g} < {MIN_CELLS_PER_BANDWIDTH} "
            f"(M = {resolution}, h = {h:.6g})"
        )

    half_width = _half_width(kernel, h, resolution)

    if 2 * kernel.support_radius * h >= 1 or 2 * half_width + 1 > resolution:
        raise KernelWraparoundError(
            f"kernel-wraparound: support 2*A*h = {2 * kernel.support_radius * h:.6g} does not fit in the unit cell"
        )


def _half_width(kernel: Kernel, h: float, resolution: int) -> int:
    return int(math.ceil(kernel.support_radius * resolution * h + 0.5))


@functools.lru_cache(maxsize=128)
def kernel_stencil(kernel: Kernel, h: float, resolution: int) -> NDArray[np.float64]:
    """Cell averages of K(x / h) over the cells of the support window

    The returned array has odd side 2W + 1 on every axis with the zero offset in the centre.  Entry k holds the mean of K((k + s) / (M h)) over a midpoint sub-grid s of the cell.

    Args:
        kernel (Kernel): The kernel
        h (float): The bandwidth
        resolution (int): The number of points per axis

    Returns:
        NDArray[np.float64]: The read-only stencil
    """
    check_bandwidth(kernel, h, resolution)

    d = kernel.dim
    cells_per_unit = resolution * h
    half_width = _half_width(kernel, h, resolution)
    subsamples = STENCIL_SUBSAMPLES.get(d, 2)

    offsets = np.arange(-half_width, half_width + 1)
    sub = (np.arange(subsamples) + 0.5) / subsamples - 0.5
    axis = (offsets[:, None] + sub[None, :]).ravel() / cells_per_unit

    points = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1)
    values = kernel(points)

    # Average the sub-samples of each cell
    values = values.reshape(sum(([offsets.size, subsamples] for _ in range(d)), []))
    stencil = values.mean(axis=tuple(range(1, 2 * d, 2)))
    stencil.setflags(write=False)

    logger.debug("stencil for %s at h=%.6g: %d cells per axis", kernel.name, h, stencil.shape[0])

    return stencil


@functools.lru_cache(maxsize=128)
def _stencil_spectrum(kernel: Kernel, h: float, resolution: int) -> NDArray[np.complex128]:
    stencil = kernel_stencil(kernel, h, resolution)
    half_width = stencil.shape[0] // 2

    # Place offset k at index k mod M
    full = np.zeros((resolution,) * kernel.dim)
    full[(slice(0, stencil.shape[0]),) * kernel.dim] = stencil
    full = np.roll(full, (-half_width,) * kernel.dim, axis=tuple(range(kernel.dim)))

    spectrum = fft.rfftn(full)
    spectrum.setflags(write=False)

    return spectrum


def circular_convolve(
    values: NDArray[np.float64], kernel: Kernel, h: float, method: ConvolutionMethod = "fft"
) -> NDArray[np.float64]:
    """Circular convolution of grid values with the kernel stencil

    Computes `out[i] = sum_k stencil[k] * values[i - k]` with indices modulo M.

    Args:
        values (NDArray[np.float64]): The grid values
        kernel (Kernel): The kernel
        h (float): The bandwidth
        method (str, optional): "fft" for the transform path or "direct" for the summation reference. Defaults to "fft".

    Returns:
        NDArray[np.float64]: The convolved values
    """
    resolution = values.shape[0]

    if values.ndim != kernel.dim:
        raise InvalidArgumentError(f"kernel dimension {kernel.dim} does not match grid dimension {values.ndim}")

    if method == "direct":
        return ndimage.convolve(values, kernel_stencil(kernel, h, resolution), mode="wrap")

    if method == "fft":
        spectrum = _stencil_spectrum(kernel, h, resolution)
        return fft.irfftn(fft.rfftn(values) * spectrum, s=values.shape)

    raise InvalidArgumentError(f"unknown convolution method {method!r}")


def stochastic_convolution(
    noise: NoiseField, kernel: Kernel, h: float, method: ConvolutionMethod = "fft"
) -> GridFunction:
    """The standardized noise process ξ_t = h^(-d/2) ∫ K((t - u) / h) dW_u on the grid

    Each entry is Gaussian with variance close to ‖K‖₂².  The estimator's stochastic term is σ / √(n h^d) times this process.

    Args:
        noise (NoiseField): The noise field
        kernel (Kernel): The kernel
        h (float): The bandwidth
        method (str, optional): The convolution method. Defaults to "fft".

    Returns:
        GridFunction: The standardized noise process
    """
    scale = (noise.resolution * h) ** (-noise.dim / 2)
    values = scale * circular_convolve(noise.increments, kernel, h, method)

    return GridFunction(noise.dim, noise.resolution, values)


def observe(f: GridFunction, params: ModelParams, noise: NoiseField) -> GridFunction:
    """The observation increments dY over each grid cell

    Args:
        f (GridFunction): The signal
        params (ModelParams): The model parameters
        noise (NoiseField): The noise field

    Returns:
        GridFunction: f(u_j) M^-d + σ / √n · ΔW_j for every cell j
    """
    check_noise_matches(f, noise)

    drift = f.values * noise.cell_volume
    diffusion = params.sigma / math.sqrt(params.n) * noise.increments * math.sqrt(noise.cell_volume)

    return f.like(drift + diffusion)


def _check_same_grid(first: GridFunction, second: GridFunction) -> None:
    if first.dim != second.dim or first.resolution != second.resolution:
        raise InvalidArgumentError(
            f"grid mismatch: ({first.dim}, {first.resolution}) vs ({second.dim}, {second.resolution})"
        )


def check_noise_matches(f: GridFunction, noise: NoiseField) -> None:
    if f.dim != noise.dim or f.resolution != noise.resolution:
        raise InvalidArgumentError(
            f"resolution mismatch: signal ({f.dim}, {f.resolution}) vs noise ({noise.dim}, {noise.resolution})"
        )
