"""Pytest configuration file."""

from pathlib import Path
from typing import Iterator

import numpy as np
import pytest
from _pytest.python import Function

from setfalab.core.conf import _load_user_config_cached


@pytest.fixture(autouse=True)
def isolated_user_config(tmp_path_factory: pytest.TempPathFactory, monkeypatch: pytest.MonkeyPatch) -> Iterator[Path]:
    rc_path = tmp_path_factory.mktemp("rc") / "setfalab.yml"
    monkeypatch.setenv("SETFALAB_RC_PATH", str(rc_path))
    monkeypatch.setenv("RUN_DIR", str(tmp_path_factory.mktemp("runs")))
    _load_user_config_cached.cache_clear()
    yield rc_path
    _load_user_config_cached.cache_clear()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1337)


def pytest_collection_modifyitems(items: list[Function]) -> None:
    items.sort(key=lambda x: x.get_closest_marker("slow") is not None)
