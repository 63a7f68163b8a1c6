"""Functions for managing command output directories."""

import inspect
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, cast

import git
from omegaconf import DictConfig, OmegaConf

from setfalab.core.conf import get_run_dir
from setfalab.utils.text import colored

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to re-run a command and get identical outputs.

    Parameters:
        command: The subcommand that produced the directory.
        flags: The parsed command-line flags.
        seed: The random seed in effect.
        netlist_fingerprint: SHA-256 of the canonical netlist dump.
        version: The package version.
        git_commit: The commit of the source checkout, if there is one.
    """

    command: str
    flags: dict[str, Any]
    seed: int | None
    netlist_fingerprint: str
    version: str
    git_commit: str | None


def get_git_commit(obj: object = RunManifest) -> str | None:
    """Returns the commit of the Git repo containing ``obj``'s source file."""
    try:
        source_file = inspect.getfile(obj if isinstance(obj, type) else type(obj))
        repo = git.Repo(source_file, search_parent_directories=True)
        return repo.head.commit.hexsha
    except Exception:
        logger.debug("Not running from a Git checkout")
        return None


def get_exp_dir(command: str, out: str | Path | None = None) -> Path:
    """Returns the output directory of a command, creating it.

    Args:
        command: The subcommand name.
        out: An explicit directory; if unset, the first unused
            ``<run dir>/<command>/run_<n>`` is used.

    Returns:
        The resolved directory.
    """
    if out is not None:
        exp_dir = Path(out).expanduser().resolve()
    else:
        run_dir = get_run_dir() / command
        run_id = 0
        while (exp_dir := run_dir / f"run_{run_id}").exists():
            run_id += 1
    exp_dir = exp_dir.expanduser().resolve()
    exp_dir.mkdir(exist_ok=True, parents=True)
    return exp_dir


def _flatten(cfg: Any, prefix: str = "") -> dict[str, Any]:  # noqa: ANN401
    if isinstance(cfg, dict):
        flat: dict[str, Any] = {}
        for key, value in cfg.items():
            flat.update(_flatten(value, f"{prefix}.{key}" if prefix else str(key)))
        return flat
    return {prefix: cfg}


def diff_configs(first: DictConfig, second: DictConfig) -> tuple[list[str], list[str]]:
    """Returns the ``key=value`` lines that differ between two configs.

    Args:
        first: The first (new) config.
        second: The second (original) config.

    Returns:
        The lines only in ``first``, and the lines only in ``second``.
    """
    a = _flatten(OmegaConf.to_container(first, resolve=True))
    b = _flatten(OmegaConf.to_container(second, resolve=True))
    new_first = [f"{k}={v}" for k, v in sorted(a.items()) if k not in b or b[k] != v]
    new_second = [f"{k}={v}" for k, v in sorted(b.items()) if k not in a or a[k] != v]
    return new_first, new_second


def get_diff_string(config_diff: tuple[list[str], list[str]]) -> str | None:
    added_keys, deleted_keys = config_diff
    if not added_keys and not deleted_keys:
        return None
    change_lines: list[str] = []
    change_lines += [f" ↪ {colored('+', 'green')} {added_key}" for added_key in added_keys]
    change_lines += [f" ↪ {colored('-', 'red')} {deleted_key}" for deleted_key in deleted_keys]
    return "\n".join(change_lines)


def save_config(config_path: Path, raw_config: DictConfig) -> None:
    if config_path.exists():
        diff_string = get_diff_string(diff_configs(raw_config, cast(DictConfig, OmegaConf.load(config_path))))
        if diff_string is not None:
            logger.warning("Overwriting config %s:\n%s", config_path, diff_string)
            OmegaConf.save(raw_config, config_path)
    else:
        config_path.parent.mkdir(exist_ok=True, parents=True)
        OmegaConf.save(raw_config, config_path)
        logger.info("Saved config to %s", config_path)


def write_manifest(exp_dir: Path, manifest: RunManifest) -> Path:
    path = exp_dir / "manifest.yaml"
    OmegaConf.save(OmegaConf.create(asdict(manifest)), path)
    return path


def load_manifest(path: str | Path) -> RunManifest:
    raw = OmegaConf.to_container(OmegaConf.load(path), resolve=True)
    assert isinstance(raw, dict), f"Malformed manifest {path}"
    return RunManifest(**{str(k): v for k, v in raw.items()})
