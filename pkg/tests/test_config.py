import json
import os
from pathlib import Path

import pytest

from handrig.config import (
    HandConfig,
    JointLimits,
    RunConfig,
    environment_defaults,
    load_hand_config,
    load_run_config,
)
from handrig.errors import InputError, SchemaError

ROOT = Path(__file__).resolve().parent.parent


def test_bundled_hand_config_matches_defaults():
    assert load_hand_config(ROOT / "config" / "hand.json") == HandConfig()


def test_no_path_gives_defaults():
    assert load_hand_config(None) == HandConfig()
    assert load_run_config(None) == RunConfig()


def test_limits_must_be_ordered():
    with pytest.raises(ValueError):
        JointLimits(flexion=(1.0, -1.0))


def test_hand_config_errors_name_the_field(tmp_path):
    path = tmp_path / "hand.json"
    path.write_text(json.dumps({"limits": {"abduction": [0.5, 0.1]}}))
    with pytest.raises(SchemaError, match="limits.abduction"):
        load_hand_config(path)
    path.write_text(json.dumps({"thumb_angle": 1.0}))
    with pytest.raises(SchemaError, match="thumb_angle"):
        load_hand_config(path)


def test_axis_roles_need_every_finger():
    roles = dict(HandConfig().axis_roles)
    del roles["pinky"]
    with pytest.raises(ValueError):
        HandConfig(axis_roles=roles)


def test_run_config_fields(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(
        json.dumps(
            {
                "method": "lsq",
                "threads": 4,
                "projection": {"bch_iterations": 5, "clamp_to_limits": False},
                "sample": {"kind": "adversarial", "n": 10, "max_angle_deg": 150},
            }
        )
    )
    run = load_run_config(path)
    assert run.method == "lsq"
    assert run.projection.bch_iterations == 5
    assert not run.projection.clamp_to_limits
    assert run.sample.max_angle_deg == 150.0


@pytest.mark.parametrize(
    "doc",
    [{"threads": 0}, {"method": "svd"}, {"sample": {"kind": "on_manifold", "n": 0}}],
)
def test_run_config_rejects(tmp_path, doc):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError):
        load_run_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(InputError):
        load_run_config(tmp_path / "run.json")


def test_environment_defaults(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HANDRIG_THREADS", "3")
    monkeypatch.setenv("HANDRIG_SEED", "17")
    monkeypatch.setenv("HANDRIG_LOG_LEVEL", "debug")
    assert environment_defaults() == {"threads": 3, "seed": 17, "log_level": "DEBUG"}


def test_environment_reads_dotenv(monkeypatch, tmp_path):
    for name in ("HANDRIG_THREADS", "HANDRIG_SEED", "HANDRIG_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    (tmp_path / ".env").write_text("HANDRIG_SEED=5\n")
    try:
        assert environment_defaults() == {"seed": 5}
    finally:
        os.environ.pop("HANDRIG_SEED", None)


@pytest.mark.parametrize(
    ("name", "value"),
    [("HANDRIG_LOG_LEVEL", "verbose"), ("HANDRIG_LOG_LEVEL", "BASIC_FORMAT"), ("HANDRIG_SEED", "x")],
)
def test_environment_rejects_bad_values(monkeypatch, tmp_path, name, value):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv(name, value)
    with pytest.raises(InputError, match=name):
        environment_defaults()
