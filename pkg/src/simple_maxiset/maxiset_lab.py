"""Simple maxiset lab

The lab runs experiment configs end to end: it validates the config, measures the risk, derives the verdict channels and writes the reports and the run manifest.

The output directory is the first of the directory passed to the lab, the `SIMPLE_MAXISET_OUTPUT_DIR` environment variable, the `outputs.dir` of the first experiment and `maxiset_output`.
"""

import json
import logging
import os
from collections import Counter
from pathlib import Path

from pydantic import ValidationError

from . import constants
from .errors import InvalidArgumentError, MaxisetError
from .models.config_models import ExperimentConfig, ManifestEntry, ReportSummary, config_hash, load_experiments
from .report_manager import ReportManager
from .responses import ExperimentResponse
from .risk_harness import (
    RiskReport,
    bias_channel,
    combine_channels,
    lemma1_check,
    mc_risk,
    risk_decomposition_check,
    seminorm_channel,
)

logger = logging.getLogger(__name__)


class MaxisetLab:
    """Simple maxiset lab

    This class runs maxiset experiments and writes their reports.

    Args:
        output_dir (Path, optional): The output directory, overrides configs and the environment. Defaults to None.
        threads (int, optional): Worker threads for the replications. Defaults to 1.
        svg (bool, optional): Write SVG plots for every experiment. Defaults to False.

    !!!Example
        ```python
        from pathlib import Path

        from simple_maxiset import MaxisetLab

        lab = MaxisetLab(Path("results"), threads=4)

        for result in lab.run(Path("experiment.json")):
            if result.success:
                print(f"Success: {result.message}")
            else:
                print(f"Error: {result.message}")
        ```
    """

    def __init__(self, output_dir: Path | None = None, threads: int = 1, svg: bool = False) -> None:
        if threads < 1:
            raise InvalidArgumentError(f"threads must be >= 1, got {threads}")

        self._output_dir = output_dir
        self._threads = threads
        self._svg = svg

    def load(self, config_path: Path) -> tuple[dict, list[ExperimentConfig]]:
        """Read and validate a config file

        Args:
            config_path (Path): The JSON config file

        Returns:
            tuple[dict, list[ExperimentConfig]]: The raw document and the validated experiments

        Raises:
            InvalidArgumentError: If the file cannot be read or does not validate
        """
        # Read the config file
        try:
            with open(config_path, encoding="utf-8") as f:
                document = json.load(f)
        except OSError as e:
            raise InvalidArgumentError(f"cannot read config {config_path}: {e}") from e
        except json.JSONDecodeError as e:
            raise InvalidArgumentError(f"config {config_path} is not valid JSON: {e}") from e

        if not isinstance(document, dict):
            raise InvalidArgumentError(f"config {config_path} must hold a JSON object")

        # Validate the experiments
        try:
            experiments = load_experiments(document)
        except ValidationError as e:
            raise InvalidArgumentError(f"config {config_path} is invalid:\n{e}") from e

        return document, experiments

    def resolve_output_dir(self, experiments: list[ExperimentConfig]) -> Path:
        """The output directory of a run"""
        if self._output_dir is not None:
            return self._output_dir

        if os.environ.get(constants.OUTPUT_DIR_ENV):
            return Path(os.environ[constants.OUTPUT_DIR_ENV])

        if experiments and experiments[0].outputs.dir is not None:
            return experiments[0].outputs.dir

        return constants.DEFAULT_OUTPUT_DIR

    def summarize(self, name: str, cfg: ExperimentConfig, report: RiskReport) -> ReportSummary:
        """Derive the verdict channels and the checks of a report

        Args:
            name (str): The experiment name
            cfg (ExperimentConfig): The experiment
            report (RiskReport): Its Monte Carlo report

        Returns:
            ReportSummary: The summary
        """
        # Get the bias channel, available for any number of sample sizes
        profile = bias_channel(cfg)
        channels = {"bias": profile.verdict}
        verdict = report.verdict

        # Combine the channels when the rate could be fitted
        if report.verdict is not None:
            combined = combine_channels(cfg, report, profile, seminorm_channel(cfg))
            channels = combined.channels
            verdict = combined.verdict

        selected = None

        # Count the selected regularities per sample size
        if report.procedure == "lepski":
            selected = {
                str(row.n): {f"{beta:g}": count for beta, count in sorted(Counter(row.selected_betas or ()).items())}
                for row in report.rows
            }

        # The risk inequalities are only checked from 50 replications
        lemma1 = lemma1_check(report).passed if report.replications >= constants.MIN_LEMMA1_REPLICATIONS else None

        return ReportSummary(
            name=name,
            function=cfg.function,
            procedure=cfg.procedure.type,
            target_beta=cfg.procedure.target,
            fitted_exponent=report.fitted_exponent,
            target_exponent=cfg.target_exponent(),
            verdict=verdict,
            channels=channels,
            selected_betas=selected,
            calibrated_C1=report.calibrated_c1,
            lemma1_passed=lemma1,
            decomposition_passed=all(risk_decomposition_check(report)),
            notes=report.notes,
        )

    def run_experiment(self, name: str, cfg: ExperimentConfig, manager: ReportManager) -> ExperimentResponse:
        """Run one experiment and write its reports

        Args:
            name (str): The experiment name
            cfg (ExperimentConfig): The experiment
            manager (ReportManager): Where to write

        Returns:
            ExperimentResponse: The outcome, failures are reported rather than raised
        """
        logger.info("running %s: %s with %s", name, cfg.function, cfg.procedure.type)

        # Measure the risk and write the reports
        try:
            report = mc_risk(cfg, self._threads)
            summary = self.summarize(name, cfg, report)
            paths = manager.emit_report(name, report, summary, svg=self._svg or cfg.outputs.svg)
        except InvalidArgumentError as e:
            logger.error("%s: %s", name, e)
            response = ExperimentResponse(False, str(e), constants.EXIT_VALIDATION)
        except MaxisetError as e:
            logger.error("%s: %s", name, e)
            response = ExperimentResponse(False, str(e), constants.EXIT_RUNTIME)
        else:
            message = f"{name}: verdict {summary.verdict}" if summary.verdict else f"{name}: {len(report.rows)} rows"
            response = ExperimentResponse(True, message, constants.EXIT_OK, paths)

        # Add the experiment to the manifest
        manager.add_entry(
            ManifestEntry(
                name=name,
                config_hash=cfg.config_hash(),
                paths=[str(path) for path in response.paths],
                verdict=summary.verdict if response.success else None,
                exit_status=response.exit_code,
                error=None if response.success else response.message,
            )
        )

        return response

    def run(self, config_path: Path, seed: int | None = None) -> list[ExperimentResponse]:
        """Run every experiment of a config file and write the manifest

        Args:
            config_path (Path): The JSON config file
            seed (int | None, optional): Overrides the seed of every experiment. Defaults to None.

        Returns:
            list[ExperimentResponse]: One response per experiment

        Raises:
            InvalidArgumentError: If the config does not validate
        """
        # Load the experiments
        _, experiments = self.load(config_path)

        # Override the seeds
        if seed is not None:
            if seed < 0:
                raise InvalidArgumentError(f"seed must be >= 0, got {seed}")
            experiments = [cfg.model_copy(update={"seed": seed}) for cfg in experiments]

        # Create the report manager
        manager = ReportManager(self.resolve_output_dir(experiments))
        names = Counter()
        responses = []

        # Run the experiments, numbering repeated names
        for cfg in experiments:
            names[cfg.label] += 1
            name = cfg.label if names[cfg.label] == 1 else f"{cfg.label}-{names[cfg.label]}"
            responses.append(self.run_experiment(name, cfg, manager))

        # Write the manifest with the worst exit status
        exit_status = max((response.exit_code for response in responses), default=constants.EXIT_OK)
        document = {"experiments": [cfg.model_dump(mode="json") for cfg in experiments]}
        manager.write_manifest(config_hash(document), exit_status)

        return responses
