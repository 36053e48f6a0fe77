import pytest
import yaml

from rootdyn.config import Config, get_config, reload_config, set_config


def test_defaults_are_valid():
    config = Config()
    assert config.validate() == []
    assert config.precision.default_digits == 32
    assert config.render.center == 0j
    assert get_config() is not None


def test_unknown_section_is_rejected():
    with pytest.raises(ValueError, match="Unknown configuration sections: plotting"):
        Config.from_dict({"plotting": {}})


def test_unknown_key_is_rejected():
    with pytest.raises(ValueError, match="'drift'"):
        Config.from_dict({"drift": {"colour": "red"}})


def test_center_accepts_pairs_and_strings():
    assert Config.from_dict({"render": {"center": [0.5, -1]}}).render.center == complex(0.5, -1)
    assert Config.from_dict({"render": {"center": "1 + 2j"}}).render.center == complex(1, 2)


def test_validation_collects_errors():
    config = Config.from_dict({
        "precision": {"default_digits": 3},
        "logging": {"level": "CHATTY"},
        "render": {"max_pixels": 10},
    })
    errors = config.validate()
    assert any("default_digits" in e for e in errors)
    assert any("CHATTY" in e for e in errors)
    assert any("max_pixels" in e for e in errors)
    with pytest.raises(ValueError, match="Configuration errors"):
        set_config(config)


def test_from_yaml_and_reload(tmp_path):
    path = tmp_path / "rootdyn.yaml"
    path.write_text(yaml.safe_dump({
        "drift": {"default_steps": 50, "tol": 0.25},
        "render": {"cols": 32, "rows": 16},
    }))
    config = reload_config(path)
    assert config is get_config()
    assert config.drift.default_steps == 50
    assert config.drift.tol == 0.25
    assert (config.render.cols, config.render.rows) == (32, 16)

    assert reload_config().drift.default_steps == 300


def test_empty_yaml_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert Config.from_yaml(path).to_dict() == Config().to_dict()


def test_yaml_must_be_a_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ValueError, match="mapping"):
        Config.from_yaml(path)


def test_to_dict_round_trips_through_yaml(tmp_path):
    config = Config.from_dict({"render": {"center": [0, 1], "width": 2.0}})
    path = tmp_path / "dump.yaml"
    path.write_text(yaml.safe_dump(config.to_dict()))
    assert Config.from_yaml(path) == config
