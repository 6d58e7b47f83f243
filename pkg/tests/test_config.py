from pathlib import Path

import pytest

from src.core.background import params_from_preset
from src.utils.config_manager import RunConfig, get_default_config, load_config, validate_config
from src.utils.error_handler import ConfigError

SETTINGS = Path(__file__).resolve().parents[1] / "config" / "settings.json5"


def test_defaults_without_a_file(tmp_path):
    empty = tmp_path / "empty.json5"
    empty.write_text("  \n")
    assert load_config(None) == get_default_config()
    assert load_config(empty) == get_default_config()


def test_shipped_settings_are_the_fiducials():
    config = load_config(SETTINGS)
    assert config == get_default_config()
    assert config.cosmo_params() == params_from_preset()
    assert config.cosmo_params().eta_e == pytest.approx(-1.7513e33, rel=1e-3)


def test_json5_comments_and_trailing_commas(tmp_path):
    path = tmp_path / "run.json5"
    path.write_text("// radiation run\n{\n  run: {era: 'radiation', threads: 2,},\n  quad: {q_points: 3}, // small\n}\n")
    config = load_config(path)
    assert config.run.era == "radiation"
    assert config.run.threads == 2
    assert config.quad_config().q_points == 3


def test_out_of_range_field_is_named():
    with pytest.raises(ConfigError) as info:
        validate_config({"cosmo": {"eps_inf": 0.5}})
    assert info.value.field_name == "cosmo.eps_inf"


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError) as info:
        validate_config({"cosmo": {"hubble": 1e-5}})
    assert info.value.field_name == "cosmo.hubble"


def test_unknown_names_in_enumerated_fields():
    for data in ({"cosmo": {"preset": "planck-2018"}}, {"csl": {"r_c": "huge"}},
                 {"sim": {"collapse_op": "momentum"}}, {"run": {"kernel_variant": "cubic"}}):
        with pytest.raises(ConfigError):
            validate_config(data)


def test_inconsistent_epochs_are_rejected():
    with pytest.raises(ConfigError):
        validate_config({"cosmo": {"eta_e": -1e60}})


def test_parse_error_reports_the_line(tmp_path):
    path = tmp_path / "broken.json5"
    path.write_text("{\n  cosmo: {\n    h_inf: ,\n  },\n}\n")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.line == 3


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("no/such/run.json5")


def test_snapshot_rebuilds_the_run():
    config = validate_config({"csl": {"r_c": "rounded", "lambda_si": 1e-8}, "run": {"kernel_variant": "exact"}})
    assert RunConfig.model_validate(config.snapshot()) == config
    assert config.csl_params().r_c_planck == pytest.approx(1e27)
    assert config.run.kernel_variant == "exact"


def test_overrides_skip_unset_values():
    config = get_default_config().with_overrides("run", threads=4, era=None)
    assert config.run.threads == 4
    assert config.run.era == "inflation"
    with pytest.raises(ConfigError):
        config.with_overrides("quad", q_points=1)


def test_default_toy_system_is_perturbative():
    sim = get_default_config().sim
    system = sim.to_system()
    assert system.gamma_eff * sim.t_final * system.collapse_norm ** 2 <= 0.1


def test_published_preset_names_and_pivot_in_mpc(tmp_path):
    path = tmp_path / "run.json5"
    path.write_text("{cosmo: {preset: 'paper-main', k_star_mpc: 0.05}}\n")
    config = load_config(path)
    assert config.cosmo_params().k_star == pytest.approx(5e-60, rel=1e-12)
    assert config.cosmo_params() == params_from_preset()
    round_epochs = validate_config({"cosmo": {"preset": "paper-sm-e"}}).cosmo_params()
    assert (round_epochs.eta_e, round_epochs.eta_r) == (-1e34, 3e60)


def test_preset_aliases_are_stored_canonically():
    config = validate_config({"cosmo": {"preset": "round-epochs"}})
    assert config.cosmo.preset == "paper-sm-e"
    assert RunConfig.model_validate(config.snapshot()) == config


def test_pivot_given_twice_is_rejected():
    with pytest.raises(ConfigError) as info:
        validate_config({"cosmo": {"k_star": 5e-60, "k_star_mpc": 0.05}})
    assert info.value.field_name == "cosmo"


def test_planck_mass_override_reaches_the_collapse_rate():
    default = get_default_config().csl_params()
    heavier = validate_config({"units": {"planck_mass_gev": 1.22e19}}).csl_params()
    assert heavier.lambda_planck == pytest.approx(default.lambda_planck * 2.435e18 / 1.22e19, rel=1e-12)
    assert heavier.m0_planck == pytest.approx(0.938272 / 1.22e19, rel=1e-12)
    assert heavier.constants.planck_time_seconds < default.constants.planck_time_seconds
    explicit = validate_config({"units": {"planck_mass_gev": 1.22e19}, "csl": {"m0_planck": 1e-19}})
    assert explicit.csl_params().m0_planck == 1e-19
