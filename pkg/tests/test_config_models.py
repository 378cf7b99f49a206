import pytest
from pydantic import ValidationError

from simple_maxiset.constants import DEFAULT_N_GRID
from simple_maxiset.models.config_models import ExperimentConfig, config_hash, load_experiments


def minimal(**overrides) -> dict:
    document = {
        "function": "cosine",
        "procedure": {"type": "fixed", "betas": [0.5]},
        "kernels": ["box"],
    }
    document.update(overrides)
    return document


def test_defaults():
    cfg = ExperimentConfig.model_validate(minimal())

    assert cfg.model.sigma == 1.0
    assert cfg.model.p == 2.0
    assert cfg.model.grid_resolution == 2**14
    assert cfg.n_grid == DEFAULT_N_GRID
    assert cfg.replications == 100
    assert cfg.procedure.target == 0.5
    assert cfg.label == "cosine-fixed-beta=0.5"


def test_two_dimensional_default_resolution():
    cfg = ExperimentConfig.model_validate(minimal(model={"d": 2}))

    assert cfg.model.grid_resolution == 2**9


def test_bandwidth_constant_defaults_by_procedure():
    lepski = {"type": "lepski", "betas": [0.5, 1.5], "target_beta": 1.5}

    assert ExperimentConfig.model_validate(minimal()).procedure.bandwidth_constant == 1.0
    assert ExperimentConfig.model_validate(minimal(procedure=lepski)).procedure.bandwidth_constant == 0.5

    explicit = ExperimentConfig.model_validate(minimal(procedure={**lepski, "C": 2.0}))
    assert explicit.procedure.bandwidth_constant == 2.0


def test_target_exponent():
    cfg = ExperimentConfig.model_validate(minimal(procedure={"betas": [1.5]}))

    assert cfg.target_exponent() == pytest.approx(0.375)


@pytest.mark.parametrize(
    "overrides",
    [
        {"kernels": ["gauss"]},
        {"function": "sawtooth"},
        {"extra": 1},
        {"n_grid": [1024, 1500]},
        {"n_grid": [1]},
        {"replications": 1},
        {"model": {"resolution": 1000}},
        {"model": {"sigma": -1}},
        {"model": {"p": 0.5}},
        {"procedure": {"betas": [0.5, 1.5]}},
        {"procedure": {"betas": [1.5, 0.5], "type": "lepski", "target_beta": 1.5}},
        {"procedure": {"betas": [0.5, 2.0], "type": "lepski", "target_beta": 1.5}},
        {"procedure": {"betas": [0.5, 1.5], "type": "lepski"}},
        {"procedure": {"betas": [0.5], "C": 0}},
    ],
)
def test_invalid_configs(overrides):
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate(minimal(**overrides))


def test_kernel_count_must_match_betas():
    procedure = {"type": "lepski", "betas": [0.5, 1.5, 2.5], "target_beta": 1.5}

    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate(minimal(procedure=procedure, kernels=["box", "order:N=2"]))

    cfg = ExperimentConfig.model_validate(minimal(procedure=procedure, kernels=["order:N=3"]))
    assert cfg.kernel_names() == ["order:N=3"] * 3


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_experiment_hash_is_stable():
    first = ExperimentConfig.model_validate(minimal(seed=3))
    second = ExperimentConfig.model_validate(minimal(seed=3))

    assert first.config_hash() == second.config_hash()
    assert first.config_hash() != ExperimentConfig.model_validate(minimal(seed=4)).config_hash()


def test_load_experiments_accepts_suites():
    assert len(load_experiments(minimal())) == 1
    assert len(load_experiments({"experiments": [minimal(), minimal(name="second")]})) == 2

    with pytest.raises(ValidationError):
        load_experiments({"experiments": []})
