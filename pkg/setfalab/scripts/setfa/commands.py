"""Implements the ``setfa`` subcommands.

Each command takes the parsed arguments and the stream results are printed to,
and returns the process exit code. Logs and notices go to stderr.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, TextIO, cast

from omegaconf import DictConfig, OmegaConf

from setfalab.attack.campaign import CampaignConfig, campaign, check_bands
from setfalab.attack.hotspots import (
    HotspotConfig,
    HotspotRecord,
    cast_selection_policy,
    classify_fault_map,
    enumerate_hotspots,
    select_fault_combination,
    stabilizer,
    summarize_hotspots,
    write_hotspots_csv,
)
from setfalab.attack.setfa import AttackConfig, run_trial, survivor_profile
from setfalab.cipher.dumbo import DUMBO, decrypt, encrypt
from setfalab.circuit.netlist import FaultMap, canonical_netlist, faulty_truth_table
from setfalab.core.conf import get_num_workers, load_user_config
from setfalab.utils.experiments import RunManifest, get_exp_dir, get_git_commit, save_config, write_manifest
from setfalab.utils.text import render_table, show_info, show_warning

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_AUTH_FAILURE = 2
EXIT_NOT_CONVERGED = 3

BOT = "BOT"

AUTO_FAULT_MAX_ORDER = 2


class UsageError(ValueError):
    """Raised for flag values that parse but are not acceptable."""


def parse_hex(value: str, name: str, num_octets: int | None = None) -> bytes:
    """Decodes a hex flag.

    Args:
        value: The flag value.
        name: The flag name, for error messages.
        num_octets: The required length, if any.

    Returns:
        The decoded octets.

    Raises:
        UsageError: If the value is not even-length hex or has the wrong length.
    """
    try:
        raw = bytes.fromhex(value)
    except ValueError:
        raise UsageError(f"--{name} must be an even-length hex string, got {value!r}")
    if num_octets is not None and len(raw) != num_octets:
        raise UsageError(f"--{name} must be {2 * num_octets} hex digits, got {len(value)}")
    return raw


def _seed(args: argparse.Namespace) -> int:
    return load_user_config().experiment.default_random_seed if args.seed is None else args.seed


def _workers(args: argparse.Namespace) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    return get_num_workers()


def _mp_context() -> str | None:
    return load_user_config().parallel.multiprocessing_context


def _write_run_files(
    exp_dir: Path,
    command: str,
    args: argparse.Namespace,
    raw_config: DictConfig,
    seed: int | None = None,
) -> None:
    flags = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in ("func", "command")}
    manifest = RunManifest(
        command=command,
        flags=flags,
        seed=seed,
        netlist_fingerprint=canonical_netlist().fingerprint(),
        version=_version(),
        git_commit=get_git_commit(),
    )
    save_config(exp_dir / "config.yaml", raw_config)
    write_manifest(exp_dir, manifest)


def _version() -> str:
    from setfalab import __version__

    return __version__


def _auto_fault(workers: int) -> HotspotRecord:
    records = enumerate_hotspots(
        canonical_netlist(),
        AUTO_FAULT_MAX_ORDER,
        num_workers=workers,
        multiprocessing_context=_mp_context(),
    )
    record = select_fault_combination(records, "min_residual")
    logger.info(
        "No --fault given; using %s (missing %s, %d survivor(s) per nibble)",
        record.fault_map,
        record.missing_values_hex,
        record.survivors_per_nibble,
    )
    return record


def _attack_config(args: argparse.Namespace, fault: str) -> tuple[AttackConfig, DictConfig]:
    overrides: dict[str, Any] = {
        "fault": fault,
        "scope": args.scope,
        "max_queries": args.max_queries,
        "attacker_model": args.model,
        "seed": _seed(args),
    }
    raw = cast(DictConfig, OmegaConf.merge(OmegaConf.structured(AttackConfig), overrides))
    return cast(AttackConfig, OmegaConf.to_object(raw)), raw


def _resolve_fault_spec(args: argparse.Namespace) -> str:
    if args.fault is not None:
        return FaultMap.from_spec(args.fault, canonical_netlist()).to_spec()
    return _auto_fault(_workers(args)).fault_map.to_spec()


def cmd_encrypt(args: argparse.Namespace, out: TextIO) -> int:
    key = parse_hex(args.key, "key", DUMBO.key_octets)
    nonce = parse_hex(args.nonce, "nonce", DUMBO.nonce_octets)
    ct, tag = encrypt(key, nonce, parse_hex(args.ad, "ad"), parse_hex(args.msg, "msg"))
    out.write(f"ct={ct.hex()}\ntag={tag.hex()}\n")
    return EXIT_OK


def cmd_decrypt(args: argparse.Namespace, out: TextIO) -> int:
    key = parse_hex(args.key, "key", DUMBO.key_octets)
    nonce = parse_hex(args.nonce, "nonce", DUMBO.nonce_octets)
    tag = parse_hex(args.tag, "tag", DUMBO.tag_octets)
    msg = decrypt(key, nonce, parse_hex(args.ad, "ad"), parse_hex(args.ct, "ct"), tag)
    if msg is None:
        out.write(f"{BOT}\n")
        return EXIT_AUTH_FAILURE
    out.write(f"msg={msg.hex()}\n")
    return EXIT_OK


def cmd_sbox(args: argparse.Namespace, out: TextIO) -> int:
    netlist = canonical_netlist()
    fault_map = FaultMap.from_spec(args.fault or "", netlist)
    table = faulty_truth_table(netlist, fault_map)
    record = classify_fault_map(netlist, fault_map)

    out.write(netlist.dump())
    out.write(f"wires: {netlist.num_wires}\nfingerprint: {netlist.fingerprint()}\nfaults: {fault_map}\n")
    out.write(render_table(["x", *(f"{x:x}" for x in range(16))], [["S(x)", *(f"{y:x}" for y in table.entries)]]))
    out.write("\n")
    out.write(f"missing: {record.missing_values_hex or '-'}\n")
    stab = ",".join(f"{d:x}" for d in sorted(stabilizer(record.missing)))
    out.write(f"stabilizer: {stab}\n")
    out.write(f"survivors per nibble: {record.survivors_per_nibble}\n")
    out.write(f"residual key space: 2^{record.residual_keyspace_log2:g}\n")
    return EXIT_OK


def cmd_hotspots(args: argparse.Namespace, out: TextIO) -> int:
    raw = cast(
        DictConfig,
        OmegaConf.merge(OmegaConf.structured(HotspotConfig), {"max_order": args.max_order, "policy": args.policy}),
    )
    cfg = cast(HotspotConfig, OmegaConf.to_object(raw))
    netlist = canonical_netlist()
    exp_dir = get_exp_dir("hotspots", args.out)

    records = enumerate_hotspots(
        netlist,
        cfg.max_order,
        num_workers=_workers(args),
        multiprocessing_context=_mp_context(),
    )
    csv_path = write_hotspots_csv(records, exp_dir / "hotspots.csv")
    (exp_dir / "netlist.txt").write_text(netlist.dump(), encoding="utf-8")
    _write_run_files(exp_dir, "hotspots", args, raw)

    summary = summarize_hotspots(records)
    if summary.deviates:
        show_warning("Netlist deviation report:\n" + "\n".join(summary.lines()), important=True)
    out.write("\n".join(summary.lines()) + "\n")

    if summary.usable:
        selected = select_fault_combination(records, cast_selection_policy(cfg.policy))
        out.write(
            f"selected ({cfg.policy}): {selected.fault_map}, missing {selected.missing_values_hex}, "
            f"residual 2^{selected.residual_keyspace_log2:g}\n"
        )
    out.write(f"wrote {len(records)} rows to {csv_path}\n")
    return EXIT_OK


def cmd_attack(args: argparse.Namespace, out: TextIO) -> int:
    cfg, raw = _attack_config(args, _resolve_fault_spec(args))
    if args.out is not None:
        _write_run_files(get_exp_dir("attack", args.out), "attack", args, raw, cfg.seed)

    result = run_trial(cfg)
    out.write(f"fault: {cfg.fault_map}\n")
    out.write(f"queries used: {result.queries_used}\n")
    out.write(f"survivors: {survivor_profile(result.survivors)}\n")
    if result.error is not None:
        out.write(f"error: {result.error}\n")
    if not result.success or result.recovered_key is None:
        out.write("key: not recovered\n")
        return EXIT_NOT_CONVERGED
    out.write(f"key={result.recovered_key.hex()}\n")
    return EXIT_OK


def cmd_campaign(args: argparse.Namespace, out: TextIO) -> int:
    attack_cfg, attack_raw = _attack_config(args, _resolve_fault_spec(args))
    raw = cast(
        DictConfig,
        OmegaConf.merge(
            OmegaConf.structured(CampaignConfig),
            {"attack": attack_raw, "trials": args.trials, "bucket_width": args.bucket},
        ),
    )
    cfg = cast(CampaignConfig, OmegaConf.to_object(raw))
    exp_dir = get_exp_dir("campaign", args.out)

    report = campaign(
        attack_cfg,
        cfg.trials,
        cfg.bucket_width,
        num_workers=_workers(args),
        multiprocessing_context=_mp_context(),
        log_every=cfg.log_every,
    )
    campaign_path, histogram_path = report.write_csvs(exp_dir)
    _write_run_files(exp_dir, "campaign", args, raw, attack_cfg.seed)

    if not check_bands(report):
        show_warning("Successful query counts fall outside the expected bands")
    out.write(f"fault: {attack_cfg.fault_map}\n")
    out.write("\n".join(report.lines()) + "\n")
    show_info(f"Wrote {campaign_path.name} and {histogram_path.name} to {exp_dir}")
    return EXIT_OK
