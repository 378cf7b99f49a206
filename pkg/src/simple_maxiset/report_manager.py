"""Report manager for the simple maxiset lab

The report manager writes the outputs of each experiment into its own sub directory of the output directory:

- `risk.csv` with the columns n, h, risk, std_error, bias_sup, variance_risk, psi, ratio, every number written with 12 significant digits,
- `summary.json` with the fitted exponent, the target exponent, the verdict and the channel verdicts,
- optionally `risk.svg`, a log-log plot of the risk against log n / n with the reference line ψ_n(β)^p.

It also writes the run manifest `manifest.json` at the top of the output directory.  Given the same report the CSV and SVG bytes are identical between runs.
"""

import csv
import io
import logging
from datetime import datetime, timezone
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .constants import CSV_FILE, CSV_HEADER, MANIFEST_FILE, PLOT_FILE, SIGNIFICANT_DIGITS, SUMMARY_FILE, VERSION
from .errors import MaxisetError, ReportValidationError
from .estimator import log_ratio
from .models.config_models import ManifestEntry, ReportSummary, RunManifest
from .risk_harness import RiskReport

logger = logging.getLogger(__name__)


def format_number(value: float) -> str:
    """Format a number with 12 significant digits"""
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def csv_text(report: RiskReport) -> str:
    """The CSV document of a report

    Args:
        report (RiskReport): The report, with at least one row

    Returns:
        str: The CSV text with a header line
    """
    if not report.rows:
        raise ReportValidationError("reports must have at least one row")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)

    # Add one row per sample size
    for row, rate, ratio in zip(report.rows, report.psi_values, report.ratio_sequence):
        writer.writerow(
            [str(row.n)]
            + [
                format_number(value)
                for value in (row.h, row.risk_estimate, row.std_error, row.bias_sup, row.variance_risk, rate, ratio)
            ]
        )

    return buffer.getvalue()


def plot_report(report: RiskReport, path: Path) -> None:
    """Write a log-log SVG plot of the risk against log n / n

    The reference line has the gid "reference-line" and the data line the gid "risk-<procedure>".

    Args:
        report (RiskReport): The report
        path (Path): The SVG file
    """
    x = [log_ratio(row.n) for row in report.rows]

    # Fixed hash salt and no date keep the SVG bytes reproducible
    with matplotlib.rc_context({"svg.hashsalt": "simple-maxiset", "svg.fonttype": "none"}):
        figure, axes = plt.subplots(figsize=(6, 4))

        try:
            reference, = axes.loglog(x, [rate**report.p for rate in report.psi_values], "--", color="grey", label="ψ_n(β)^p")
            reference.set_gid("reference-line")

            data, = axes.loglog(x, [row.risk_estimate for row in report.rows], "o-", label=report.procedure)
            data.set_gid(f"risk-{report.procedure}")

            axes.set_xlabel("log n / n")
            axes.set_ylabel("risk")
            axes.set_title(f"{report.function}, β = {report.beta:g}, p = {report.p:g}")
            axes.legend()

            figure.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(figure)


class ReportManager:
    """The report manager

    This class writes experiment reports and the run manifest below one output directory, which is created on initialisation.

    Args:
        output_dir (Path): The output directory
    """

    def __init__(self, output_dir: Path) -> None:
        self._output_dir = output_dir
        self._entries: list[ManifestEntry] = []

        # Create the output directory
        try:
            self._output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise MaxisetError(f"cannot create output directory {self._output_dir}: {e}") from e

    @property
    def output_dir(self) -> Path:
        return self._output_dir

    def emit_report(self, name: str, report: RiskReport, summary: ReportSummary, svg: bool = False) -> list[Path]:
        """Write the CSV, the JSON summary and optionally the SVG plot of one experiment

        Args:
            name (str): The experiment name, used as the sub directory
            report (RiskReport): The report, with at least one row
            summary (ReportSummary): The summary
            svg (bool, optional): Also write the plot. Defaults to False.

        Returns:
            list[Path]: The files written
        """
        text = csv_text(report)
        directory = self._output_dir / name
        paths = [directory / CSV_FILE, directory / SUMMARY_FILE]

        try:
            directory.mkdir(parents=True, exist_ok=True)

            # Write the CSV
            with open(paths[0], "w", encoding="utf-8", newline="") as f:
                f.write(text)

            # Write the summary
            with open(paths[1], "w", encoding="utf-8") as f:
                f.write(summary.model_dump_json(indent=2))

            # Write the plot
            if svg:
                paths.append(directory / PLOT_FILE)
                plot_report(report, paths[-1])
        except OSError as e:
            raise MaxisetError(f"cannot write report {name} to {directory}: {e}") from e

        logger.info("wrote %s", ", ".join(str(path) for path in paths))

        return paths

    def add_entry(self, entry: ManifestEntry) -> None:
        """Record one experiment in the manifest"""
        self._entries.append(entry)

    def write_manifest(self, config_hash: str, exit_status: int) -> Path:
        """Write the manifest of the run

        Args:
            config_hash (str): The hash of the config document
            exit_status (int): The exit status of the run

        Returns:
            Path: The manifest file
        """
        manifest = RunManifest(
            config_hash=config_hash,
            tool_version=VERSION,
            timestamp=datetime.now(tz=timezone.utc),
            experiments=self._entries,
            exit_status=exit_status,
        )
        path = self._output_dir / MANIFEST_FILE

        try:
            with open(path, "w", encoding="utf-8") as f:
                f.write(manifest.model_dump_json(indent=2))
        except OSError as e:
            raise MaxisetError(f"cannot write manifest {path}: {e}") from e

        return path
