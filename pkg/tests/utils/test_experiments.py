"""Tests the run directory helpers."""

from pathlib import Path

import pytest
from omegaconf import OmegaConf

from setfalab.utils.experiments import (
    RunManifest,
    diff_configs,
    get_diff_string,
    get_exp_dir,
    get_git_commit,
    load_manifest,
    save_config,
    write_manifest,
)


def test_exp_dir_increments(tmp_path: Path) -> None:
    first = get_exp_dir("campaign")
    second = get_exp_dir("campaign")
    assert first.name == "run_0"
    assert second.name == "run_1"
    assert first.parent == second.parent
    assert first.parent.name == "campaign"

    explicit = get_exp_dir("campaign", tmp_path / "mine")
    assert explicit == (tmp_path / "mine").resolve()
    assert explicit.is_dir()


def test_config_diff(tmp_path: Path) -> None:
    first = OmegaConf.create({"attack": {"fault": "w16=0", "seed": 1}, "trials": 10})
    second = OmegaConf.create({"attack": {"fault": "w16=0", "seed": 2}, "trials": 10})
    assert diff_configs(first, second) == (["attack.seed=1"], ["attack.seed=2"])
    assert get_diff_string(diff_configs(first, first)) is None
    assert get_diff_string(diff_configs(first, second)) is not None

    path = tmp_path / "config.yaml"
    save_config(path, first)
    save_config(path, second)
    assert OmegaConf.load(path) == second


def test_manifest_round_trip(tmp_path: Path) -> None:
    manifest = RunManifest(
        command="attack",
        flags={"fault": "w16=0", "seed": 7, "out": None},
        seed=7,
        netlist_fingerprint="0" * 64,
        version="0.1.0",
        git_commit=get_git_commit(),
    )
    path = write_manifest(tmp_path, manifest)
    assert path.name == "manifest.yaml"
    assert load_manifest(path) == manifest


def test_exp_dir_expands_user(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    monkeypatch.chdir(tmp_path)
    exp_dir = get_exp_dir("hotspots", "~/out")
    assert exp_dir == (tmp_path / "home" / "out").resolve()
    assert exp_dir.is_dir()
    assert not (tmp_path / "~").exists()
