"""Registries of kernels and zoo functions

Kernels and signals are referred to by name in experiment configs.  A name is a base followed by colon separated parameters, for example `poly:beta=2:pow=1`, `order:N=4` or `weierstrass:beta=0.5:J=10`.

Add an entry with the `add` method of a [`Registry`][src.simple_maxiset.registry.Registry] and build from a name with `build`.
"""

import functools
import math
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import InvalidArgumentError, UnknownNameError
from .function_zoo import ZooFunction, cosine, step_function, triangle_wave, weierstrass, zero
from .kernels import Kernel, box_kernel, higher_order_kernel, poly_kernel
from .noise_model import GridFunction


@dataclass
class RegistryEntry:
    """A registered factory

    Args:
        description (str): A one line description for listings
        factory (Callable): Builds the object from the parameters and the build context
        parameters (dict[str, type]): The parameter names and their types
        defaults (dict[str, Any], optional): Default values of optional parameters. Defaults to {}.
    """

    description: str
    factory: Callable
    parameters: dict[str, type]
    defaults: dict[str, Any] = field(default_factory=dict)


def parse_name(name: str) -> tuple[str, dict[str, str]]:
    """Split a name into its base and raw parameters

    Args:
        name (str): A name like `base:key=value:key=value`

    Returns:
        tuple[str, dict[str, str]]: The base and the parameter strings
    """
    base, *parts = name.strip().split(":")
    raw: dict[str, str] = {}

    for part in parts:
        key, separator, value = part.partition("=")

        if not separator or not key or not value:
            raise InvalidArgumentError(f"malformed parameter {part!r} in {name!r}, expected key=value")

        raw[key] = value

    return base, raw


class Registry:
    """A registry of named factories

    Args:
        kind (str): What the registry holds, used in error messages
    """

    def __init__(self, kind: str) -> None:
        self._kind = kind
        self._entries: dict[str, RegistryEntry] = {}

    def add(self, base: str, entry: RegistryEntry) -> None:
        """Add a factory under a base name"""
        self._entries[base] = entry

    def keys(self) -> list[str]:
        return sorted(self._entries)

    def describe(self) -> list[tuple[str, str]]:
        """Pairs of usage string and description, sorted by base name"""
        rows = []

        for base in self.keys():
            entry = self._entries[base]
            usage = ":".join([base] + [f"{key}=<{kind.__name__}>" for key, kind in entry.parameters.items()])
            rows.append((usage, entry.description))

        return rows

    def resolve(self, name: str) -> tuple[RegistryEntry, dict[str, Any]]:
        """Look up a name and convert its parameters

        Raises:
            UnknownNameError: If the base or a parameter is unknown, the message lists the registry keys
            InvalidArgumentError: If a parameter is missing or cannot be converted
        """
        base, raw = parse_name(name)

        # Check the base name
        if base not in self._entries:
            raise UnknownNameError(f"unknown {self._kind} {base!r}, known {self._kind}s: {', '.join(self.keys())}")

        # Check the parameter names
        entry = self._entries[base]
        unknown = set(raw) - set(entry.parameters)

        if unknown:
            raise UnknownNameError(
                f"unknown parameters {sorted(unknown)} for {self._kind} {base!r}, expected {list(entry.parameters)}"
            )

        # Convert the parameters, starting from the defaults
        values = dict(entry.defaults)

        for key, kind in entry.parameters.items():
            if key in raw:
                try:
                    values[key] = kind(raw[key])
                except ValueError as e:
                    raise InvalidArgumentError(f"parameter {key}={raw[key]!r} of {name!r} is not a {kind.__name__}") from e
            elif key not in values:
                raise InvalidArgumentError(f"missing parameter {key!r} in {self._kind} name {name!r}")

        return entry, values

    def validate(self, name: str) -> None:
        """Raise if the name does not resolve"""
        self.resolve(name)

    def build(self, name: str, **context: Any) -> Any:
        """Build the object a name refers to

        Args:
            name (str): The name
            **context: Arguments supplied by the caller, such as the dimension

        Returns:
            Any: The built object
        """
        entry, values = self.resolve(name)
        return entry.factory(**values, **context)


# Register the kernels
KERNELS = Registry("kernel")
KERNELS.add("box", RegistryEntry("indicator of [-1/2, 1/2]^d, order 1", lambda d: box_kernel(d), {}))
KERNELS.add(
    "poly",
    RegistryEntry(
        "c (1 - Σ|x_i|^beta)₊^pow, order 2 for pow=1 and beta >= 2",
        lambda d, beta, pow: poly_kernel(beta, pow, d),
        {"beta": float, "pow": int},
        {"pow": 1},
    ),
)
KERNELS.add(
    "order",
    RegistryEntry("smooth polynomial kernel of order N on [-1, 1]^d", lambda d, N: higher_order_kernel(N, d), {"N": int}),
)


def _one_dimensional(builder: Callable[[int], ZooFunction]) -> Callable[..., ZooFunction]:
    def factory(dim: int, resolution: int, **_: Any) -> ZooFunction:
        if dim != 1:
            raise InvalidArgumentError(f"this zoo function exists in dimension 1 only, got {dim}")
        return builder(resolution)

    return factory


def max_frequency_index(resolution: int) -> int:
    """The largest J with 2^J <= resolution / 8"""
    return int(math.log2(resolution)) - 3


def _weierstrass(beta: float, dim: int, resolution: int, J: int | None = None, cap_frequencies: bool = False) -> ZooFunction:
    limit = max_frequency_index(resolution)
    J = limit if J is None else J

    return weierstrass(beta, min(J, limit) if cap_frequencies else J, dim, resolution)


# Register the zoo functions
ZOO = Registry("zoo function")
ZOO.add(
    "weierstrass",
    RegistryEntry(
        "lacunary series Σ 2^(-j beta) cos(2π 2^j t) of regularity beta, J defaults to log2(M) - 3",
        _weierstrass,
        {"beta": float, "J": int},
        {"J": None},
    ),
)
ZOO.add("triangle", RegistryEntry("triangle wave, regularity 1 (d=1)", _one_dimensional(triangle_wave), {}))
ZOO.add("step", RegistryEntry("square wave, discontinuous (d=1)", _one_dimensional(step_function), {}))
ZOO.add("cosine", RegistryEntry("cos(2π Σ t_i), smooth", lambda dim, resolution, **_: cosine(dim, resolution), {}))
ZOO.add("zero", RegistryEntry("the zero function", lambda dim, resolution, **_: zero(dim, resolution), {}))


@functools.lru_cache(maxsize=32)
def kernel_from_name(name: str, d: int) -> Kernel:
    """Build a registered kernel, kernels are immutable so builds are cached"""
    return KERNELS.build(name, d=d)


def zoo_from_name(name: str, dim: int, resolution: int, cap_frequencies: bool = False) -> ZooFunction:
    """Build a registered zoo function

    Args:
        name (str): The zoo name
        dim (int): The dimension
        resolution (int): The grid resolution
        cap_frequencies (bool, optional): Lower the last series index to fit coarse grids. Defaults to False.

    Returns:
        ZooFunction: The function
    """
    entry, values = ZOO.resolve(name)

    if cap_frequencies:
        values["cap_frequencies"] = True

    return entry.factory(**values, dim=dim, resolution=resolution)


def signal_builder(name: str, dim: int) -> Callable[[int], GridFunction]:
    """A builder of the signal at any resolution, with frequencies capped to the grid"""
    return lambda resolution: zoo_from_name(name, dim, resolution, cap_frequencies=True).signal
