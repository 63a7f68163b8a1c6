"""Command-line front end for the Dumbo fault-attack laboratory.

.. code-block:: bash

    setfa encrypt --key <32 hex> --nonce <24 hex> --msg <hex>
    setfa hotspots --max-order 2 --out runs/hotspots
    setfa attack --fault w16=0 --max-queries 250 --seed 7
    setfa campaign --trials 1000 --bucket 20 --fault w16=0

Exit codes: 0 success, 1 usage error, 2 authentication failure, 3 attack
non-convergence.
"""

import argparse
import sys
from typing import NoReturn, Sequence, TextIO

from setfalab.attack.hotspots import NoUsableHotspotError
from setfalab.scripts.setfa.commands import (
    EXIT_USAGE,
    cmd_attack,
    cmd_campaign,
    cmd_decrypt,
    cmd_encrypt,
    cmd_hotspots,
    cmd_sbox,
)
from setfalab.utils.logging import configure_logging
from setfalab.utils.text import show_error


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_attack_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--fault",
        help="SET faults as w<id>=<0|1>,...; an empty string runs fault-free; "
        "if omitted, the min_residual combination of order <= 2 is used",
    )
    parser.add_argument("--scope", choices=["all", "last"], default="all", help="Rounds using the faulty Sbox")
    parser.add_argument("--max-queries", type=int, default=250, help="Faulty ciphertexts per trial")
    parser.add_argument("--model", choices=["kpa", "cpa"], default="kpa", help="Known or chosen first block")
    parser.add_argument("--seed", type=int, help="Random seed; defaults to experiment.default_random_seed")
    parser.add_argument("--workers", type=int, help="Worker processes; defaults to parallel.num_workers")
    parser.add_argument("--out", help="Output directory; defaults to <run dir>/<command>/run_<n>")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="setfa", description="Dumbo AEAD and SET fault attack laboratory")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Overrides logging.log_level from the user config",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    encrypt = subparsers.add_parser("encrypt", help="Encrypts a message")
    encrypt.add_argument("--key", required=True, help="The key, 32 hex digits")
    encrypt.add_argument("--nonce", required=True, help="The nonce, 24 hex digits")
    encrypt.add_argument("--ad", default="", help="The associated data, hex")
    encrypt.add_argument("--msg", default="", help="The message, hex")
    encrypt.set_defaults(func=cmd_encrypt)

    decrypt = subparsers.add_parser("decrypt", help="Verifies and decrypts a ciphertext")
    decrypt.add_argument("--key", required=True, help="The key, 32 hex digits")
    decrypt.add_argument("--nonce", required=True, help="The nonce, 24 hex digits")
    decrypt.add_argument("--ad", default="", help="The associated data, hex")
    decrypt.add_argument("--ct", default="", help="The ciphertext, hex")
    decrypt.add_argument("--tag", required=True, help="The tag, 16 hex digits")
    decrypt.set_defaults(func=cmd_decrypt)

    sbox = subparsers.add_parser("sbox", help="Prints the Sbox netlist and its truth table under faults")
    sbox.add_argument("--fault", help="SET faults as w<id>=<0|1>,...")
    sbox.set_defaults(func=cmd_sbox)

    hotspots = subparsers.add_parser("hotspots", help="Enumerates fault combinations")
    hotspots.add_argument("--max-order", type=int, default=2, choices=[1, 2, 3], help="Largest number of faults")
    hotspots.add_argument(
        "--policy",
        choices=["min_residual", "min_missing_nonzero"],
        default="min_residual",
        help="How to pick the reported attack fault",
    )
    hotspots.add_argument("--workers", type=int, help="Worker processes; defaults to parallel.num_workers")
    hotspots.add_argument("--out", help="Output directory; defaults to <run dir>/hotspots/run_<n>")
    hotspots.set_defaults(func=cmd_hotspots)

    attack = subparsers.add_parser("attack", help="Runs one simulated key-recovery trial")
    _add_attack_flags(attack)
    attack.set_defaults(func=cmd_attack)

    campaign = subparsers.add_parser("campaign", help="Runs many seeded trials and writes success statistics")
    _add_attack_flags(campaign)
    campaign.add_argument("--trials", type=int, default=1000, help="The number of trials")
    campaign.add_argument("--bucket", type=int, default=20, help="The histogram bucket width, in queries")
    campaign.set_defaults(func=cmd_campaign)

    return parser


def run(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    """Runs the command line and returns the exit code.

    Args:
        argv: The arguments, without the program name; defaults to
            ``sys.argv[1:]``.
        out: Where results are printed; defaults to stdout.

    Returns:
        The exit code.
    """
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(level=args.log_level)
    try:
        return args.func(args, out)
    except (ValueError, NoUsableHotspotError, OSError) as e:
        show_error(f"{args.command}: {e}")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    # python -m setfalab.scripts.setfa
    main()
