"""Experiment configuration and report models

This module contains the models for experiment configs, JSON summaries and run manifests.

The models use [Pydantic](https://docs.pydantic.dev/) to validate configs and to serialise reports.  A config file holds either one experiment or an object `{"experiments": [...]}` with several.
"""

import hashlib
import json
from datetime import datetime
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..constants import DEFAULT_C, DEFAULT_N_GRID, DEFAULT_P, DEFAULT_RESOLUTION, DEFAULT_SIGMA, LEPSKI_DEFAULT_C
from ..registry import KERNELS, ZOO


class ModelSection(BaseModel):
    """The observation model

    Attributes:
        sigma (float, optional): The noise level, 0 for noise free runs. Defaults to 1.0.
        p (float, optional): The loss exponent, at least 1. Defaults to 2.0.
        d (int, optional): The dimension, 1 or 2. Defaults to 1.
        resolution (int | None, optional): Points per axis, a power of two. Defaults to 2^14 for d=1 and 2^9 for d=2.
    """

    model_config = ConfigDict(extra="forbid")

    sigma: float = Field(DEFAULT_SIGMA, ge=0)
    p: float = Field(DEFAULT_P, ge=1)
    d: Literal[1, 2] = 1
    resolution: int | None = None

    @field_validator("resolution")
    @classmethod
    def _power_of_two(cls, resolution: int | None) -> int | None:
        if resolution is not None and (resolution < 2 or resolution & (resolution - 1)):
            raise ValueError(f"resolution must be a power of two >= 2, got {resolution}")
        return resolution

    @property
    def grid_resolution(self) -> int:
        """The resolution, or the default for the dimension"""
        return self.resolution if self.resolution is not None else DEFAULT_RESOLUTION[self.d]


class ProcedureSection(BaseModel):
    """The estimation procedure

    Attributes:
        type (str, optional): "fixed" for one regularity or "lepski" for adaptive selection. Defaults to "fixed".
        betas (list[float]): The regularity, or the grid of regularities for "lepski"
        C (float | None, optional): The constant of the bandwidth rule, 1.0 for "fixed" and 0.5 for "lepski" when None. Defaults to None.
        C1 (float | None, optional): The threshold constant, calibrated on pure noise when None. Defaults to None.
        target_beta (float | None, optional): The regularity of the rate ψ_n(β), defaults to the first beta for "fixed". Defaults to None.
        dyadic_snap (bool, optional): Snap bandwidths to powers of two. Defaults to False.
    """

    model_config = ConfigDict(extra="forbid")

    type: Literal["fixed", "lepski"] = "fixed"
    betas: list[float] = Field(min_length=1)
    C: float | None = Field(None, gt=0)
    C1: float | None = Field(None, gt=0)
    target_beta: float | None = Field(None, gt=0)
    dyadic_snap: bool = False

    @model_validator(mode="after")
    def _check_betas(self) -> "ProcedureSection":
        if any(not beta > 0 for beta in self.betas):
            raise ValueError(f"betas must be positive, got {self.betas}")

        if any(later <= earlier for earlier, later in zip(self.betas, self.betas[1:])):
            raise ValueError(f"betas must be strictly increasing, got {self.betas}")

        if self.type == "fixed" and len(self.betas) != 1:
            raise ValueError(f"a fixed procedure takes exactly one beta, got {self.betas}")

        if self.type == "lepski" and any(float(beta).is_integer() for beta in self.betas):
            raise ValueError(f"lepski betas must not be integers, got {self.betas}")

        if self.type == "lepski" and self.target_beta is None:
            raise ValueError("a lepski procedure needs target_beta")

        return self

    @property
    def bandwidth_constant(self) -> float:
        """The constant C of the bandwidth rule, or the default of the procedure type"""
        if self.C is not None:
            return self.C

        return LEPSKI_DEFAULT_C if self.type == "lepski" else DEFAULT_C

    @property
    def target(self) -> float:
        """The regularity of the rate the risk is compared with"""
        return self.target_beta if self.target_beta is not None else self.betas[0]


class OutputsSection(BaseModel):
    """Where and what to write

    Attributes:
        dir (Path | None, optional): The output directory. Defaults to None.
        svg (bool, optional): Also write the SVG plot. Defaults to False.
    """

    model_config = ConfigDict(extra="forbid")

    dir: Path | None = None
    svg: bool = False


class ExperimentConfig(BaseModel):
    """One experiment

    Attributes:
        name (str | None, optional): The experiment name, used for the output sub directory. Defaults to None.
        model (ModelSection, optional): The observation model. Defaults to ModelSection().
        function (str): The zoo function name
        procedure (ProcedureSection): The procedure
        kernels (list[str]): One kernel name, or one per beta
        n_grid (list[int], optional): Strictly increasing sample sizes with ratio at least 2. Defaults to 4^5 to 4^11.
        replications (int, optional): Monte Carlo replications per sample size, at least 2. Defaults to 100.
        seed (int, optional): The root seed. Defaults to 0.
        outputs (OutputsSection, optional): The outputs. Defaults to OutputsSection().
    """

    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    model: ModelSection = ModelSection()
    function: str
    procedure: ProcedureSection
    kernels: list[str] = Field(min_length=1)
    n_grid: list[int] = Field(default_factory=lambda: list(DEFAULT_N_GRID), min_length=1)
    replications: int = Field(100, ge=2)
    seed: int = Field(0, ge=0)
    outputs: OutputsSection = OutputsSection()

    @field_validator("n_grid")
    @classmethod
    def _geometric(cls, n_grid: list[int]) -> list[int]:
        if any(n < 2 for n in n_grid):
            raise ValueError(f"sample sizes must be >= 2, got {n_grid}")

        if any(later < 2 * earlier for earlier, later in zip(n_grid, n_grid[1:])):
            raise ValueError(f"n_grid must increase with ratio >= 2, got {n_grid}")

        return n_grid

    @field_validator("function")
    @classmethod
    def _known_function(cls, function: str) -> str:
        ZOO.validate(function)
        return function

    @field_validator("kernels")
    @classmethod
    def _known_kernels(cls, kernels: list[str]) -> list[str]:
        for kernel in kernels:
            KERNELS.validate(kernel)
        return kernels

    @model_validator(mode="after")
    def _kernel_count(self) -> "ExperimentConfig":
        if len(self.kernels) not in (1, len(self.procedure.betas)):
            raise ValueError(f"need 1 or {len(self.procedure.betas)} kernels, got {len(self.kernels)}")
        return self

    @property
    def label(self) -> str:
        """The experiment name, or one derived from the function and procedure"""
        return self.name or f"{self.function}-{self.procedure.type}-beta={self.procedure.target:g}".replace(":", "_")

    def kernel_names(self) -> list[str]:
        """One kernel name per beta"""
        return self.kernels * len(self.procedure.betas) if len(self.kernels) == 1 else list(self.kernels)

    def target_exponent(self) -> float:
        """The rate exponent β / (2β + d) of the target"""
        beta = self.procedure.target
        return beta / (2 * beta + self.model.d)

    def config_hash(self) -> str:
        return config_hash(self.model_dump(mode="json"))


class ExperimentSuite(BaseModel):
    """Several experiments in one config file"""

    model_config = ConfigDict(extra="forbid")

    experiments: list[ExperimentConfig] = Field(min_length=1)


class ReportSummary(BaseModel):
    """The JSON summary of one experiment

    Attributes:
        name (str): The experiment name
        function (str): The zoo function
        procedure (str): The procedure type
        target_beta (float): The regularity of the rate
        fitted_exponent (float | None): The fitted rate exponent, None with fewer than 4 sample sizes
        target_exponent (float): β / (2β + d)
        verdict (str | None): The rate verdict, None with fewer than 4 sample sizes
        channels (dict[str, str]): Verdicts of the individual channels
        selected_betas (dict[str, dict[str, int]] | None, optional): Counts of selected regularities per n. Defaults to None.
        calibrated_C1 (float | None, optional): The calibrated threshold constant. Defaults to None.
        lemma1_passed (bool | None, optional): Whether both risk inequalities hold, None below 50 replications. Defaults to None.
        decomposition_passed (bool | None, optional): Whether the bias and variance bound holds at every n. Defaults to None.
        notes (list[str], optional): Flags raised during the run. Defaults to [].
    """

    name: str
    function: str
    procedure: str
    target_beta: float
    fitted_exponent: float | None
    target_exponent: float
    verdict: str | None
    channels: dict[str, str] = {}
    selected_betas: dict[str, dict[str, int]] | None = None
    calibrated_C1: float | None = None
    lemma1_passed: bool | None = None
    decomposition_passed: bool | None = None
    notes: list[str] = []


class ManifestEntry(BaseModel):
    """Outputs of one experiment

    Attributes:
        name (str): The experiment name
        config_hash (str): The hash of the experiment config
        paths (list[str]): The files written
        verdict (str | None): The rate verdict
        exit_status (int): The exit status of the experiment
        error (str | None, optional): The error message on failure. Defaults to None.
    """

    name: str
    config_hash: str
    paths: list[str]
    verdict: str | None
    exit_status: int
    error: str | None = None


class RunManifest(BaseModel):
    """The manifest of one run

    Attributes:
        config_hash (str): The hash of the whole config document
        tool_version (str): The package version
        timestamp (datetime): When the run finished
        experiments (list[ManifestEntry]): One entry per experiment
        exit_status (int): The exit status of the run
    """

    config_hash: str
    tool_version: str
    timestamp: datetime
    experiments: list[ManifestEntry]
    exit_status: int


def config_hash(document: dict) -> str:
    """The SHA-256 of the canonical JSON form, independent of key order

    Args:
        document (dict): A JSON compatible document

    Returns:
        str: The hex digest
    """
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_experiments(document: dict) -> list[ExperimentConfig]:
    """Validate a config document holding one experiment or a suite"""
    if "experiments" in document:
        return ExperimentSuite.model_validate(document).experiments

    return [ExperimentConfig.model_validate(document)]
