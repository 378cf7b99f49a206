"""Monte Carlo sup-norm risk and maxiset verdicts

The harness measures R_n = E ‖f̂_n - f‖∞^p over a grid of sample sizes, fits the rate exponent, checks the risk inequalities and combines three channels into a maxiset verdict:

- the bias channel, boundedness of h^(-β) ‖K_h ∗ f - f‖∞ along the bandwidth rule (noise free),
- the rate channel, the Monte Carlo risk compared with ψ_n(β)^p,
- the seminorm channel, divergence of the Besov and Hölder seminorms under grid refinement.

Replication r at sample size n draws its noise from the stream `mix_seed(seed, n, r)` and results are folded in replication order, so runs are reproducible whatever the number of threads.  Every verdict only certifies what holds over the tested range of sample sizes.
"""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, TypeVar

import numpy as np
from numpy.typing import NDArray

from .constants import (
    BOUNDARY,
    DEFAULT_RESOLUTION,
    EXPONENT_TOLERANCE,
    GROWTH_FACTOR,
    MEMBER,
    MIN_LEMMA1_REPLICATIONS,
    MIN_RATE_FIT_ROWS,
    MONTE_CARLO_SLACK,
    NON_MEMBER,
)
from .errors import InadmissibleBandwidthError, InvalidArgumentError, MaxisetError
from .estimator import (
    BandwidthRule,
    BiasProfile,
    bandwidth,
    bias_profile_along_schedule,
    is_bounded,
    log_ratio,
    psi,
    risk_bound,
    smooth,
    sup_norm,
)
from .function_zoo import SeminormDiagnostic, seminorm_diagnostic
from .kernels import Kernel
from .lepski import RegularityGrid, adaptive_estimate, calibrate_c1
from .models.config_models import ExperimentConfig
from .noise_model import GridFunction, ModelParams, check_bandwidth, mix_seed, sample_noise, stochastic_convolution
from .registry import kernel_from_name, signal_builder, zoo_from_name

logger = logging.getLogger(__name__)

__all__ = [
    "RiskRow",
    "RiskReport",
    "Lemma1Row",
    "Lemma1Report",
    "VarianceBoundRow",
    "VarianceBoundReport",
    "Theorem1Report",
    "MaxisetVerdict",
    "psi",
    "mc_risk",
    "rate_fit",
    "lemma1_check",
    "variance_lower_bound_check",
    "theorem1_bandwidth_check",
    "risk_decomposition_check",
    "bias_channel",
    "seminorm_channel",
    "combine_channels",
    "maxiset_verdict",
]

T = TypeVar("T")

# Relative rounding slack for inequalities that hold with equality
_ROUNDING = 1e-9


@dataclass(frozen=True, eq=False)
class RiskRow:
    """The Monte Carlo measurements at one sample size

    Attributes:
        n (int): The sample size
        h (float): The bandwidth, for adaptive procedures the most often selected one
        risk_estimate (float): The mean of ‖f̂ - f‖∞^p
        std_error (float): The standard error of the risk estimate
        bias_sup (float): ‖E f̂ - f‖∞
        variance_risk (float): The mean of ‖f̂ - E f̂‖∞^p
        variance_std_error (float, optional): The standard error of the variance risk. Defaults to 0.0.
        total_sups (NDArray | None, optional): ‖f̂ - f‖∞ per replication. Defaults to None.
        noise_sups (NDArray | None, optional): ‖f̂ - E f̂‖∞ per replication. Defaults to None.
        selected_betas (tuple[float, ...] | None, optional): β̂ per replication for adaptive procedures. Defaults to None.
    """

    n: int
    h: float
    risk_estimate: float
    std_error: float
    bias_sup: float
    variance_risk: float
    variance_std_error: float = 0.0
    total_sups: NDArray[np.float64] | None = field(default=None, repr=False)
    noise_sups: NDArray[np.float64] | None = field(default=None, repr=False)
    selected_betas: tuple[float, ...] | None = field(default=None, repr=False)


@dataclass(eq=False)
class RiskReport:
    """The risk of one procedure over a grid of sample sizes

    Attributes:
        rows (list[RiskRow]): One row per sample size, ordered by n
        beta (float): The regularity of the rate ψ_n(β)
        d (int): The dimension
        p (float): The loss exponent
        procedure (str, optional): "fixed" or "lepski". Defaults to "fixed".
        function (str, optional): The zoo function. Defaults to "".
        replications (int, optional): Replications per sample size. Defaults to 0.
        sigma (float, optional): The noise level. Defaults to 1.0.
        calibrated_c1 (float | None, optional): The threshold constant of adaptive runs. Defaults to None.
        fitted_exponent (float | None, optional): Set by the rate fit. Defaults to None.
        verdict (str | None, optional): Set by the rate fit. Defaults to None.
        notes (list[str], optional): Flags raised during the run. Defaults to [].
    """

    rows: list[RiskRow]
    beta: float
    d: int
    p: float
    procedure: str = "fixed"
    function: str = ""
    replications: int = 0
    sigma: float = 1.0
    calibrated_c1: float | None = None
    fitted_exponent: float | None = None
    verdict: str | None = None
    notes: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if any(later.n <= earlier.n for earlier, later in zip(self.rows, self.rows[1:])):
            raise InvalidArgumentError("risk rows must be ordered by strictly increasing n")

    @property
    def psi_values(self) -> list[float]:
        return [psi(row.n, self.beta, self.d) for row in self.rows]

    @property
    def ratio_sequence(self) -> list[float]:
        """ψ_n(β)^(-p) times the risk, per row"""
        return [row.risk_estimate / rate**self.p for row, rate in zip(self.rows, self.psi_values)]

    @property
    def target_exponent(self) -> float:
        return self.beta / (2 * self.beta + self.d)


@dataclass(frozen=True)
class Lemma1Row:
    """Both risk inequalities at one sample size, with their measured sides"""

    n: int
    bias_lhs: float
    bias_rhs: float
    bias_holds: bool
    variance_lhs: float
    variance_rhs: float
    variance_holds: bool


@dataclass(frozen=True)
class Lemma1Report:
    rows: list[Lemma1Row]

    @property
    def passed(self) -> bool:
        return all(row.bias_holds and row.variance_holds for row in self.rows)


@dataclass(frozen=True, eq=False)
class VarianceBoundRow:
    """The Monte Carlo noise supremum against its lower bound at one bandwidth

    Attributes:
        h (float): The bandwidth
        mc_value (float): The mean of ‖Z‖∞^p
        bound (float): (2 d σ² ‖K‖₂² |log h| / (n h^d))^(p/2)
        ratio (float): mc_value / bound
        passed (bool): ratio >= 1 - δ
        sup_samples (NDArray): ‖Z‖∞ per replication
    """

    h: float
    mc_value: float
    bound: float
    ratio: float
    passed: bool
    sup_samples: NDArray[np.float64] = field(repr=False)


@dataclass(frozen=True)
class VarianceBoundReport:
    """The variance lower bound over a decreasing bandwidth sweep

    Attributes:
        rows (list[VarianceBoundRow]): One row per bandwidth, in sweep order
        delta (float): The tolerance δ
    """

    rows: list[VarianceBoundRow]
    delta: float

    @property
    def binding_passed(self) -> bool:
        """The check at the smallest bandwidth"""
        return self.rows[-1].passed

    @property
    def ratios_nondecreasing(self) -> bool:
        ratios = [row.ratio for row in self.rows]
        return all(later >= earlier for earlier, later in zip(ratios, ratios[1:]))


@dataclass(frozen=True)
class Theorem1Report:
    """The constants h_n^(-1) (log n / n)^(1 / (2β + d)) of a bandwidth schedule

    Attributes:
        constants (list[float]): One constant per sample size
        c_max (float): The largest constant
        passed (bool): False if the constants grow by a factor of 2 or more across the grid
    """

    constants: list[float]
    c_max: float
    passed: bool


@dataclass(frozen=True, eq=False)
class MaxisetVerdict:
    """The maxiset verdict for one signal, procedure and regularity

    Attributes:
        function (str): The zoo function
        procedure (str): The procedure type
        beta (float): The regularity
        bias_channel (str): The verdict of the bias profile
        rate_channel (str): The verdict of the rate fit
        seminorm_channel (str): The verdict of the seminorm diagnostics, "boundary" at integer β
        verdict (str): The combined verdict, "boundary" at integer β and the rate verdict otherwise
        integer_boundary (bool): True when β is an integer
        bias_rate_agree (bool): The bias and rate channels agree
        channels_agree (bool): All three channels agree, always False at integer β
        hoelder_member (bool): The Hölder seminorm stays bounded
        besov_member (bool): The Besov seminorm stays bounded
        report (RiskReport): The Monte Carlo report
        bias_profile (BiasProfile): The bias profile
        seminorms (SeminormDiagnostic): The seminorm ladder
    """

    function: str
    procedure: str
    beta: float
    bias_channel: str
    rate_channel: str
    seminorm_channel: str
    verdict: str
    integer_boundary: bool
    bias_rate_agree: bool
    channels_agree: bool
    hoelder_member: bool
    besov_member: bool
    report: RiskReport = field(repr=False)
    bias_profile: BiasProfile = field(repr=False)
    seminorms: SeminormDiagnostic = field(repr=False)

    @property
    def channels(self) -> dict[str, str]:
        return {"bias": self.bias_channel, "rate": self.rate_channel, "seminorm": self.seminorm_channel}


def _replicate(task: Callable[[int], T], replications: int, threads: int) -> list[T]:
    if threads <= 1:
        return [task(r) for r in range(replications)]

    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(task, range(replications)))


def _mean_and_error(values: NDArray[np.float64]) -> tuple[float, float]:
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(values.size))


def _regularity_grid(cfg: ExperimentConfig) -> RegularityGrid:
    d = cfg.model.d
    kernels = tuple(kernel_from_name(name, d) for name in cfg.kernel_names())

    return RegularityGrid(
        tuple(cfg.procedure.betas),
        kernels,
        cfg.procedure.bandwidth_constant,
        cfg.procedure.C1,
        cfg.procedure.dyadic_snap,
    )


def check_admissible(cfg: ExperimentConfig) -> None:
    """Check every bandwidth of an experiment before any replication runs

    Raises:
        InadmissibleBandwidthError: Listing every offending sample size
    """
    resolution = cfg.model.grid_resolution
    kernels = [kernel_from_name(name, cfg.model.d) for name in cfg.kernel_names()]
    rules = [BandwidthRule(beta, cfg.model.d, cfg.procedure.bandwidth_constant, cfg.procedure.dyadic_snap) for beta in cfg.procedure.betas]

    offending: list[int] = []
    first: MaxisetError | None = None

    for n in cfg.n_grid:
        for kernel, rule in zip(kernels, rules):
            try:
                check_bandwidth(kernel, bandwidth(n, rule), resolution)
            except MaxisetError as e:
                first = first or e
                offending.append(n)
                break

    if first is not None:
        raise InadmissibleBandwidthError(offending, getattr(first, "code", "inadmissible-bandwidth"), str(first))


def _fixed_row(
    cfg: ExperimentConfig, f: GridFunction, kernel: Kernel, rule: BandwidthRule, n: int, threads: int
) -> RiskRow:
    p = cfg.model.p
    sigma = cfg.model.sigma
    h = bandwidth(n, rule)

    # The bias part is the exact mean of the estimate
    residual = (smooth(f, kernel, h) - f).values
    bias_sup = float(np.max(np.abs(residual)))
    scale = sigma / math.sqrt(n * h**f.dim)

    def replication(r: int) -> tuple[float, float]:
        if sigma == 0:
            return bias_sup, 0.0
        noise = sample_noise(f.dim, f.resolution, mix_seed(cfg.seed, n, r))
        xi = scale * stochastic_convolution(noise, kernel, h).values
        return float(np.max(np.abs(residual + xi))), float(np.max(np.abs(xi)))

    # Run the replications
    samples = _replicate(replication, cfg.replications, threads)
    total_sups = np.array([total for total, _ in samples])
    noise_sups = np.array([noise for _, noise in samples])

    risk, std_error = _mean_and_error(total_sups**p)
    variance_risk, variance_std_error = _mean_and_error(noise_sups**p)

    return RiskRow(n, h, risk, std_error, bias_sup, variance_risk, variance_std_error, total_sups, noise_sups)


def _lepski_row(cfg: ExperimentConfig, f: GridFunction, grid: RegularityGrid, n: int, threads: int) -> RiskRow:
    p = cfg.model.p
    params = ModelParams(cfg.model.sigma, n, p)

    def estimate(r: int) -> tuple[float, NDArray[np.float64]]:
        noise = sample_noise(f.dim, f.resolution, mix_seed(cfg.seed, n, r))
        trace, realization = adaptive_estimate(f, grid, params, noise)
        return trace.selected, realization.estimate.values

    # The empirical mean of the estimates stands in for E f̂
    total = np.zeros_like(f.values)
    selected = []
    total_sups = np.empty(cfg.replications)

    for r, (beta, values) in enumerate(_replicate(estimate, cfg.replications, threads)):
        selected.append(beta)
        total += values
        total_sups[r] = np.max(np.abs(values - f.values))

    mean = total / cfg.replications

    # Second pass regenerates the same estimates from their seeds
    noise_sups = np.array(
        [np.max(np.abs(values - mean)) for _, values in _replicate(estimate, cfg.replications, threads)]
    )

    risk, std_error = _mean_and_error(total_sups**p)
    variance_risk, variance_std_error = _mean_and_error(noise_sups**p)

    # Report the bandwidth of the most often selected regularity
    mode = Counter(selected).most_common(1)[0][0]
    h = grid.bandwidths(n)[grid.betas.index(mode)]

    return RiskRow(
        n,
        h,
        risk,
        std_error,
        float(np.max(np.abs(mean - f.values))),
        variance_risk,
        variance_std_error,
        total_sups,
        noise_sups,
        tuple(selected),
    )


def mc_risk(cfg: ExperimentConfig, threads: int = 1) -> RiskReport:
    """Measure the sup-norm risk of an experiment over its grid of sample sizes

    The rate fit is attached to the report when the grid has at least four sample sizes.

    Args:
        cfg (ExperimentConfig): The experiment
        threads (int, optional): Worker threads for the replications. Defaults to 1.

    Returns:
        RiskReport: The report

    Raises:
        InadmissibleBandwidthError: If a bandwidth is inadmissible for some sample size
    """
    if threads < 1:
        raise InvalidArgumentError(f"threads must be >= 1, got {threads}")

    # Check every bandwidth before running anything
    check_admissible(cfg)

    d = cfg.model.d
    resolution = cfg.model.grid_resolution
    # Build the signal and the empty report
    f = zoo_from_name(cfg.function, d, resolution).signal

    report = RiskReport(
        [],
        cfg.procedure.target,
        d,
        cfg.model.p,
        cfg.procedure.type,
        cfg.function,
        cfg.replications,
        cfg.model.sigma,
    )

    if cfg.model.sigma == 0:
        logger.warning("sigma = 0, the risk is the deterministic bias and standard errors are 0")
        report.notes.append("sigma=0: degenerate noise, std_error is 0")

    # Set up the procedure, calibrating C1 if it is missing
    if cfg.procedure.type == "lepski":
        grid = _regularity_grid(cfg)

        if grid.C1 is None:
            grid = grid.with_c1(calibrate_c1(grid, resolution, cfg.n_grid[0], cfg.model.sigma or 1.0, cfg.seed))
            report.calibrated_c1 = grid.C1
    else:
        kernel = kernel_from_name(cfg.kernel_names()[0], d)
        rule = BandwidthRule(cfg.procedure.betas[0], d, cfg.procedure.bandwidth_constant, cfg.procedure.dyadic_snap)

    # Measure the risk at every sample size
    rows = []

    for n in cfg.n_grid:
        if cfg.procedure.type == "lepski":
            row = _lepski_row(cfg, f, grid, n, threads)
        else:
            row = _fixed_row(cfg, f, kernel, rule, n, threads)

        logger.info("n=%d h=%.6g risk=%.6g +/- %.2g", n, row.h, row.risk_estimate, row.std_error)
        rows.append(row)

    report.rows = rows

    # Fit the rate
    if len(rows) >= MIN_RATE_FIT_ROWS and all(row.risk_estimate > 0 for row in rows):
        report.fitted_exponent, report.verdict = rate_fit(report, report.beta, d)

    return report


def rate_fit(report: RiskReport, beta: float, d: int) -> tuple[float, str]:
    """Fit the rate exponent of a risk report and classify it

    The exponent is the least-squares slope of log risk against log(log n / n), divided by p.  The verdict is

    - "member" if the exponent is within 0.1 of β / (2β + d) and the ratio sequence is bounded,
    - "non-member" if the exponent falls more than 0.1 below the target or the last four ratios increase strictly by a total factor of at least 2,
    - "boundary" otherwise.

    Args:
        report (RiskReport): The report, with at least four rows and positive risks
        beta (float): The regularity of the rate
        d (int): The dimension

    Returns:
        tuple[float, str]: The fitted exponent and the verdict
    """
    if len(report.rows) < MIN_RATE_FIT_ROWS:
        raise InvalidArgumentError(f"rate fit needs at least {MIN_RATE_FIT_ROWS} rows, got {len(report.rows)}")

    risks = np.array([row.risk_estimate for row in report.rows])

    if np.any(risks <= 0):
        raise InvalidArgumentError("rate fit needs positive risks")

    # Fit the slope in log-log coordinates
    x = np.log([log_ratio(row.n) for row in report.rows])
    slope = np.polyfit(x, np.log(risks), 1)[0]
    fitted = float(slope / report.p)

    # Compare with the target and check the ratio sequence
    target = beta / (2 * beta + d)
    ratios = [row.risk_estimate / psi(row.n, beta, d) ** report.p for row in report.rows]
    last = ratios[-MIN_RATE_FIT_ROWS:]
    growing = all(later > earlier for earlier, later in zip(last, last[1:])) and last[-1] >= GROWTH_FACTOR * last[0]

    if abs(fitted - target) <= EXPONENT_TOLERANCE and is_bounded(ratios):
        verdict = MEMBER
    elif fitted < target - EXPONENT_TOLERANCE or growing:
        verdict = NON_MEMBER
    else:
        verdict = BOUNDARY

    logger.info("fitted exponent %.4f against %.4f: %s", fitted, target, verdict)

    return fitted, verdict


def _relative(error: float, value: float) -> float:
    return error / value if value > 0 else 0.0


def lemma1_check(report: RiskReport) -> Lemma1Report:
    """Check ‖E f̂ - f‖∞^p ≤ E ‖f̂ - f‖∞^p and E ‖f̂ - E f̂‖∞^p ≤ 2^p E ‖f̂ - f‖∞^p per sample size

    Both inequalities are checked with a slack of three standard errors.

    Args:
        report (RiskReport): A report with at least 50 replications

    Returns:
        Lemma1Report: Per sample size outcomes
    """
    if report.replications < MIN_LEMMA1_REPLICATIONS:
        raise InvalidArgumentError(f"need at least {MIN_LEMMA1_REPLICATIONS} replications, got {report.replications}")

    p = report.p
    rows = []

    # Check both inequalities at every sample size
    for row in report.rows:
        risk = row.risk_estimate
        bias_lhs = row.bias_sup**p
        bias_rhs = (risk + MONTE_CARLO_SLACK * row.std_error) * (1 + _ROUNDING)

        relative = _relative(row.std_error, risk) + _relative(row.variance_std_error, row.variance_risk)
        variance_rhs = 2**p * risk * (1 + MONTE_CARLO_SLACK * relative) * (1 + _ROUNDING)

        rows.append(
            Lemma1Row(
                row.n,
                bias_lhs,
                bias_rhs,
                bool(bias_lhs <= bias_rhs),
                row.variance_risk,
                variance_rhs,
                bool(row.variance_risk <= variance_rhs),
            )
        )

    return Lemma1Report(rows)


def variance_lower_bound_check(
    K: Kernel,
    h_list: Sequence[float],
    params: ModelParams,
    delta: float,
    R: int,
    resolution: int | None = None,
    seed: int = 0,
) -> VarianceBoundReport:
    """Compare E ‖Z‖∞^p with (2 d σ² ‖K‖₂² |log h| / (n h^d))^(p/2) over decreasing dyadic bandwidths

    Z is the stochastic term of the estimate.  Each replication reuses one noise field for every bandwidth.

    Args:
        K (Kernel): The kernel
        h_list (Sequence[float]): Decreasing powers of two
        params (ModelParams): The model parameters, with sigma > 0
        delta (float): The tolerance δ in (0, 1)
        R (int): The number of replications, at least 2
        resolution (int | None, optional): The grid resolution. Defaults to the default for the dimension.
        seed (int, optional): The seed. Defaults to 0.

    Returns:
        VarianceBoundReport: One row per bandwidth
    """
    if not 0 < delta < 1:
        raise InvalidArgumentError(f"delta must lie in (0, 1), got {delta}")

    if not h_list:
        raise InvalidArgumentError("h_list must not be empty")

    if any(later >= earlier for earlier, later in zip(h_list, h_list[1:])):
        raise InvalidArgumentError(f"h_list must be decreasing, got {list(h_list)}")

    if any(not math.log2(h).is_integer() for h in h_list):
        raise InvalidArgumentError(f"h_list must hold powers of two, got {list(h_list)}")

    if not params.sigma > 0:
        raise InvalidArgumentError("the variance bound needs sigma > 0")

    if R < 2:
        raise InvalidArgumentError(f"R must be >= 2, got {R}")

    d = K.dim
    resolution = resolution or DEFAULT_RESOLUTION[d]

    for h in h_list:
        check_bandwidth(K, h, resolution)

    # Draw one noise field per replication and reuse it for every bandwidth
    scales = [params.sigma / math.sqrt(params.n * h**d) for h in h_list]
    sups = np.empty((len(h_list), R))

    for r in range(R):
        noise = sample_noise(d, resolution, mix_seed(seed, r))
        for j, (h, scale) in enumerate(zip(h_list, scales)):
            sups[j, r] = scale * sup_norm(stochastic_convolution(noise, K, h))

    # Compare each bandwidth with its bound
    rows = []

    for j, h in enumerate(h_list):
        mc_value = float(np.mean(sups[j] ** params.p))
        bound = (2 * d * params.sigma**2 * K.l2_norm**2 * abs(math.log(h)) / (params.n * h**d)) ** (params.p / 2)
        ratio = mc_value / bound
        rows.append(VarianceBoundRow(h, mc_value, bound, ratio, bool(ratio >= 1 - delta), sups[j]))

    report = VarianceBoundReport(rows, delta)

    if not report.ratios_nondecreasing:
        logger.info("variance bound ratios are not monotone over the sweep: %s", [row.ratio for row in rows])

    return report


def theorem1_bandwidth_check(schedule: Sequence[tuple[int, float]], beta: float, d: int) -> Theorem1Report:
    """Check that h_n^(-1) ≤ C (log n / n)^(-1 / (2β + d)) holds with one finite C over a grid

    Args:
        schedule (Sequence[tuple[int, float]]): Pairs (n, h_n) in increasing n
        beta (float): The regularity
        d (int): The dimension

    Returns:
        Theorem1Report: The constants, failing when they grow by a factor of 2 or more
    """
    if not schedule:
        raise InvalidArgumentError("schedule must not be empty")

    constants = [log_ratio(n) ** (1.0 / (2 * beta + d)) / h for n, h in schedule]
    growth = max(
        (later / earlier for i, earlier in enumerate(constants) for later in constants[i + 1:]),
        default=1.0,
    )

    return Theorem1Report(constants, max(constants), bool(growth < GROWTH_FACTOR))


def risk_decomposition_check(report: RiskReport) -> list[bool]:
    """Check risk ≤ 2^(p-1) (bias^p + variance risk) per row within three standard errors"""
    outcomes = []

    for row in report.rows:
        relative = _relative(row.std_error, row.risk_estimate) + _relative(row.variance_std_error, row.variance_risk)
        bound = risk_bound(row.bias_sup, row.variance_risk, report.p) * (1 + MONTE_CARLO_SLACK * relative)
        outcomes.append(bool(row.risk_estimate <= bound * (1 + _ROUNDING)))

    return outcomes


def _bias_kernel(cfg: ExperimentConfig, beta: float) -> Kernel:
    names = cfg.kernel_names()

    if beta in cfg.procedure.betas:
        return kernel_from_name(names[cfg.procedure.betas.index(beta)], cfg.model.d)

    return kernel_from_name(f"order:N={math.ceil(beta)}", cfg.model.d)


def _with_beta(cfg: ExperimentConfig, beta: float) -> ExperimentConfig:
    if cfg.procedure.type == "fixed":
        procedure = cfg.procedure.model_copy(update={"betas": [beta], "target_beta": None})
    else:
        procedure = cfg.procedure.model_copy(update={"target_beta": beta})

    return cfg.model_copy(update={"procedure": procedure})


def seminorm_ladder(resolution: int) -> list[int]:
    """The three resolutions M/4, M/2 and M of the seminorm diagnostics"""
    return [resolution // 4, resolution // 2, resolution]


def bias_channel(cfg: ExperimentConfig) -> BiasProfile:
    """The bias profile of the experiment's signal along its bandwidth rule at the target regularity"""
    beta = cfg.procedure.target
    d = cfg.model.d
    f = zoo_from_name(cfg.function, d, cfg.model.grid_resolution).signal
    rule = BandwidthRule(beta, d, cfg.procedure.bandwidth_constant, cfg.procedure.dyadic_snap)

    return bias_profile_along_schedule(f, _bias_kernel(cfg, beta), rule, cfg.n_grid)


def seminorm_channel(cfg: ExperimentConfig) -> SeminormDiagnostic:
    """The seminorms of the experiment's signal on the ladder M/4, M/2, M at the target regularity"""
    return seminorm_diagnostic(
        signal_builder(cfg.function, cfg.model.d),
        cfg.procedure.target,
        seminorm_ladder(cfg.model.grid_resolution),
    )


def combine_channels(
    cfg: ExperimentConfig, report: RiskReport, profile: BiasProfile, seminorms: SeminormDiagnostic
) -> MaxisetVerdict:
    """Combine the three channels of one experiment into a verdict

    Args:
        cfg (ExperimentConfig): The experiment
        report (RiskReport): The Monte Carlo report, with its rate verdict
        profile (BiasProfile): The bias profile
        seminorms (SeminormDiagnostic): The seminorm ladder

    Returns:
        MaxisetVerdict: The verdict
    """
    if report.verdict is None:
        raise InvalidArgumentError("the rate channel needs a fitted report")

    beta = cfg.procedure.target
    integer_boundary = float(beta).is_integer()
    besov_member = not seminorms.besov_divergent
    hoelder_member = not seminorms.holder_divergent

    # An integer regularity sits between the Hölder and Besov spaces
    if integer_boundary:
        seminorm_verdict = BOUNDARY
        verdict = BOUNDARY
    else:
        seminorm_verdict = MEMBER if besov_member else NON_MEMBER
        verdict = report.verdict

    # Check the channels against each other
    bias_rate_agree = profile.verdict == report.verdict
    channels_agree = not integer_boundary and bias_rate_agree and seminorm_verdict == report.verdict

    result = MaxisetVerdict(
        cfg.function,
        cfg.procedure.type,
        beta,
        profile.verdict,
        report.verdict,
        seminorm_verdict,
        verdict,
        integer_boundary,
        bias_rate_agree,
        channels_agree,
        hoelder_member,
        besov_member,
        report,
        profile,
        seminorms,
    )

    if not integer_boundary and not channels_agree:
        logger.warning("%s at beta=%g: channels disagree %s", cfg.function, beta, result.channels)

    logger.info("%s at beta=%g: %s (channels %s)", cfg.function, beta, verdict, result.channels)

    return result


def maxiset_verdict(cfg: ExperimentConfig, beta: float | None = None, threads: int = 1) -> MaxisetVerdict:
    """Decide maxiset membership of the experiment's signal through three channels

    At a non integer β the bias and rate channels should agree with each other and with the seminorm channel.  At an integer β the verdict is "boundary", and the Hölder and Besov memberships bracket the maxiset.

    Args:
        cfg (ExperimentConfig): The experiment, with at least four sample sizes
        beta (float | None, optional): Overrides the target regularity. Defaults to None.
        threads (int, optional): Worker threads for the replications. Defaults to 1.

    Returns:
        MaxisetVerdict: The channels and the combined verdict
    """
    if beta is not None:
        cfg = _with_beta(cfg, beta)

    if len(cfg.n_grid) < MIN_RATE_FIT_ROWS:
        raise InvalidArgumentError(f"a verdict needs at least {MIN_RATE_FIT_ROWS} sample sizes, got {len(cfg.n_grid)}")

    # Run the rate channel
    report = mc_risk(cfg, threads)

    if report.verdict is None:
        raise InvalidArgumentError("the rate channel needs positive risks at every sample size")

    return combine_channels(cfg, report, bias_channel(cfg), seminorm_channel(cfg))
