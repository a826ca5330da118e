import pytest

from cautious.config import env_seed, read_config_file, resolve_run_config
from cautious.errors import DataParseError, PreconditionError
from cautious.models.config import RunConfig


def test_flag_beats_file_beats_environment():
    config = resolve_run_config(
        {"seed": 5, "alpha_lo": None, "alpha_hi": None, "iters": None},
        {"seed": 4, "iters": 500, "burnin": 100},
        environ={"CSS_SEED": "3"},
    )
    assert config.seed == 5
    assert config.iters == 500
    assert config.burnin == 100


def test_environment_seed_fallback():
    assert resolve_run_config({}, {}, environ={"CSS_SEED": "17"}).seed == 17
    assert resolve_run_config({}, {}, environ={}).seed == 0
    assert env_seed({"CSS_SEED": " "}) is None
    with pytest.raises(PreconditionError):
        env_seed({"CSS_SEED": "abc"})


def test_yaml_config(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("alpha-lo: 0.1\nalpha_hi: 0.3\nbackend: gibbs\n")
    values = read_config_file(path)
    assert values == {"alpha_lo": 0.1, "alpha_hi": 0.3, "backend": "gibbs"}
    config = resolve_run_config({}, values, environ={})
    assert config.alpha_box(3).bounds(1) == (0.1, 0.3)


def test_bad_yaml(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("alpha-lo: [0.1\n")
    with pytest.raises(DataParseError):
        read_config_file(path)
    path.write_text("- 1\n- 2\n")
    with pytest.raises(DataParseError):
        read_config_file(path)


def test_unknown_keys_and_invalid_values():
    with pytest.raises(PreconditionError, match="unknown config keys"):
        resolve_run_config({}, {"colour": "red"}, environ={})
    with pytest.raises(PreconditionError):
        resolve_run_config({"backend": "magic"}, {}, environ={})


def test_run_config_conflicts():
    with pytest.raises(PreconditionError):
        RunConfig(alpha_lo=0.4, alpha_hi=0.2)
    with pytest.raises(PreconditionError):
        RunConfig(alpha_lo=0.1)
    with pytest.raises(PreconditionError):
        RunConfig(alpha_lo=0.1, alpha_hi=0.2, alpha_preset="gaia")
    with pytest.raises(PreconditionError):
        RunConfig(alpha_preset="nowhere")
    with pytest.raises(PreconditionError):
        RunConfig(iters=100, burnin=100)


def test_default_box_is_near_vacuous():
    assert RunConfig().alpha_box(2).bounds(0) == (0.05, 0.95)
    assert RunConfig(alpha_preset="gaia").alpha_box(2).bounds(1) == (0.0625, 0.1875)


def test_hyperparameters_from_config():
    hp = RunConfig(tau1=3.0, a=2.0).hyperparameters()
    assert hp.tau1 == 3.0 and hp.a == 2.0
    assert hp.defaulted_prior_constants() == ["s", "b"]
