"""Tests the user configuration."""

from dataclasses import dataclass
from pathlib import Path

import pytest
from omegaconf import OmegaConf

import setfalab
from setfalab.core.conf import _load_user_config_cached, get_num_workers, is_missing


def test_default_config_is_written(isolated_user_config: Path) -> None:
    assert not isolated_user_config.exists()
    config = setfalab.load_user_config()
    assert isolated_user_config.exists()
    assert config.experiment.default_random_seed == 1337
    assert config.logging.log_level == "INFO"
    assert get_num_workers() == 1


def test_config_file_overrides(isolated_user_config: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    isolated_user_config.write_text("experiment:\n  default_random_seed: 7\n", encoding="utf-8")
    monkeypatch.setenv("SETFALAB_WORKERS", "3")
    _load_user_config_cached.cache_clear()
    config = setfalab.load_user_config()
    assert config.experiment.default_random_seed == 7
    assert get_num_workers() == 3


def test_run_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("RUN_DIR", str(tmp_path))
    _load_user_config_cached.cache_clear()
    assert setfalab.get_run_dir() == tmp_path.resolve()


def test_field() -> None:
    @dataclass
    class DummyConfig:
        a: int = setfalab.field(3, help="An integer")
        b: list[int] = setfalab.field([1, 2], help="A list")

    config = DummyConfig()
    assert config.a == 3
    assert config.b == [1, 2]

    cfg = OmegaConf.structured(DummyConfig)
    assert not is_missing(cfg, "a")
