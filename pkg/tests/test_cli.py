import csv
import json
from pathlib import Path

import pytest

from simple_maxiset.cli import main
from simple_maxiset.constants import EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, OUTPUT_DIR_ENV

GOLDEN = Path(__file__).parent / "golden"


def read_rows(path: Path) -> list[list[str]]:
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.reader(f))


def write_config(path: Path, **overrides) -> Path:
    document = json.loads((GOLDEN / "minimal_config.json").read_text(encoding="utf-8"))
    document.update(overrides)
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def test_run_matches_the_golden_bandwidths(tmp_path):
    out = tmp_path / "out"

    assert main(["run", str(GOLDEN / "minimal_config.json"), "--out", str(out)]) == EXIT_OK

    assert [row[:2] for row in read_rows(out / "minimal" / "risk.csv")] == read_rows(GOLDEN / "minimal.csv")
    assert (out / "minimal" / "summary.json").exists()
    assert json.loads((out / "manifest.json").read_text(encoding="utf-8"))["exit_status"] == EXIT_OK


def test_noise_free_run_matches_every_golden_column(tmp_path):
    out = tmp_path / "out"

    assert main(["run", str(GOLDEN / "noise_free_config.json"), "--out", str(out)]) == EXIT_OK

    header, *rows = read_rows(out / "noise-free" / "risk.csv")
    golden_header, *golden_rows = read_rows(GOLDEN / "noise_free.csv")

    assert header == golden_header
    assert len(rows) == len(golden_rows)

    # Float columns agree to a relative 1e-9
    for row, golden in zip(rows, golden_rows):
        assert row[0] == golden[0]
        assert [float(value) for value in row[1:]] == pytest.approx([float(value) for value in golden[1:]], rel=1e-9)


def test_identical_runs_write_identical_csv(tmp_path):
    config = GOLDEN / "minimal_config.json"

    main(["run", str(config), "--out", str(tmp_path / "first")])
    main(["run", str(config), "--out", str(tmp_path / "second")])

    first = (tmp_path / "first" / "minimal" / "risk.csv").read_bytes()
    second = (tmp_path / "second" / "minimal" / "risk.csv").read_bytes()

    assert first == second


def test_seed_override_changes_the_risk(tmp_path):
    config = GOLDEN / "minimal_config.json"

    main(["run", str(config), "--out", str(tmp_path / "first")])
    main(["run", str(config), "--out", str(tmp_path / "second"), "--seed", "1"])

    first = (tmp_path / "first" / "minimal" / "risk.csv").read_text(encoding="utf-8")
    second = (tmp_path / "second" / "minimal" / "risk.csv").read_text(encoding="utf-8")

    assert first != second


def test_svg_flag(tmp_path):
    assert main(["run", str(GOLDEN / "minimal_config.json"), "--out", str(tmp_path), "--svg"]) == EXIT_OK
    assert (tmp_path / "minimal" / "risk.svg").exists()


def test_output_directory_from_the_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))

    assert main(["run", str(GOLDEN / "minimal_config.json")]) == EXIT_OK
    assert (tmp_path / "env" / "minimal" / "risk.csv").exists()


def test_inadmissible_bandwidth_exits_with_runtime_error(tmp_path, capsys):
    config = write_config(
        tmp_path / "config.json",
        model={"resolution": 256},
        procedure={"betas": [0.5]},
        n_grid=[1024, 65536],
    )

    assert main(["run", str(config), "--out", str(tmp_path / "out")]) == EXIT_RUNTIME
    assert "under-resolved-bandwidth" in capsys.readouterr().err

    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["exit_status"] == EXIT_RUNTIME
    assert "65536" in manifest["experiments"][0]["error"]


@pytest.mark.parametrize(
    "overrides",
    [{"kernels": ["gauss"]}, {"unexpected": True}, {"replications": 1}],
)
def test_invalid_configs_exit_with_validation_error(tmp_path, overrides):
    config = write_config(tmp_path / "config.json", **overrides)

    assert main(["run", str(config), "--out", str(tmp_path / "out")]) == EXIT_VALIDATION
    assert main(["validate", str(config)]) == EXIT_VALIDATION


def test_malformed_json_exits_with_validation_error(tmp_path):
    config = tmp_path / "config.json"
    config.write_text("{not json", encoding="utf-8")

    assert main(["validate", str(config)]) == EXIT_VALIDATION


def test_missing_config_exits_with_validation_error(tmp_path):
    assert main(["validate", str(tmp_path / "missing.json")]) == EXIT_VALIDATION


def test_validate_accepts_the_golden_config(capsys):
    assert main(["validate", str(GOLDEN / "minimal_config.json")]) == EXIT_OK
    assert capsys.readouterr().out.startswith("minimal: ok")


def test_negative_seed_is_a_validation_error(tmp_path):
    assert main(["run", str(GOLDEN / "minimal_config.json"), "--out", str(tmp_path), "--seed", "-1"]) == EXIT_VALIDATION


def test_listings(capsys):
    assert main(["kernels", "list"]) == EXIT_OK
    kernels = capsys.readouterr().out

    assert main(["zoo", "list"]) == EXIT_OK
    zoo = capsys.readouterr().out

    assert "order:N=<int>" in kernels
    assert "weierstrass:beta=<float>:J=<int>" in zoo


def test_usage_errors_exit_with_two():
    assert main(["frobnicate"]) == 2
