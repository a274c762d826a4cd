import pytest
import yaml

from radperturb.config import load_config, parse_config
from radperturb.errors import ConfigError
from radperturb.perturb import MAD_CONSTANT


def test_defaults():
    cfg = parse_config({})
    assert cfg.processing.spacings == (1.0, 2.0, 3.0, 4.0)
    assert len(cfg.processing.schema()) == 1460
    assert [c.chain_id for c in cfg.chains] == ["N"]
    assert cfg.icc_threshold == 0.9


def test_unknown_key():
    with pytest.raises(ConfigError, match="spacing"):
        parse_config({"spacing": [1]})
    with pytest.raises(ConfigError):
        parse_config({"resegmentation": {"range_low": 0, "range_hi": 1}})


def test_unknown_chain():
    with pytest.raises(ConfigError, match="NOPE"):
        parse_config({"chains": ["NOPE"]})


def test_custom_chain():
    cfg = parse_config({"chains": ["ID", "N"], "custom_chains": [{"id": "ID"}]})
    assert cfg.chains[0].size == 1


@pytest.mark.parametrize("raw", [{"icc_threshold": 0}, {"icc_threshold": 1.2}, {"beta": 0}, {"spacings": [1, -1]}])
def test_invalid_values(raw):
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_more_than_two_images_rejected():
    raw = {"subjects": [{"image": "a", "mask": "b", "retest": [{"image": "c", "mask": "d"}]}]}
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_seed_override_and_hash():
    a = parse_config({"seed": 3})
    b = parse_config({"seed": 3}, seed=4)
    assert a.seed == 3 and b.seed == 4
    assert a.config_hash != b.config_hash
    assert a.config_hash == parse_config({"seed": 3}).config_hash


def test_mad_switch():
    assert parse_config({"noise_constant": "mad"}).processing.noise_constant == MAD_CONSTANT


def test_paths_relative_to_file(tmp_path):
    (tmp_path / "img.mhd").write_text("x")
    (tmp_path / "msk.mhd").write_text("x")
    p = tmp_path / "run.yaml"
    p.write_text(yaml.safe_dump({"subjects": [{"id": "s1", "image": "img.mhd", "mask": "msk.mhd"}]}))
    cfg = load_config(p)
    assert cfg.subjects[0].image == tmp_path / "img.mhd"
    cfg.check_inputs()


def test_missing_input(tmp_path):
    cfg = parse_config({"subjects": [{"image": "nope.mhd", "mask": "nope2.mhd"}]}, tmp_path)
    with pytest.raises(ConfigError):
        cfg.check_inputs()


def test_bad_yaml(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("a: [1, 2")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
