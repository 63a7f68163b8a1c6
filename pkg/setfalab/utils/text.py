"""Defines helper functions for displaying text in the terminal."""

import re
import sys
from typing import Literal, Sequence, TextIO

from wcwidth import wcswidth

RESET_SEQ = "\033[0m"
REG_COLOR_SEQ = "\033[%dm"
BOLD_COLOR_SEQ = "\033[1;%dm"

Color = Literal[
    "red",
    "green",
    "yellow",
    "blue",
    "magenta",
    "cyan",
    "white",
    "grey",
    "light-red",
    "light-green",
    "light-yellow",
    "light-cyan",
]

COLOR_INDEX: dict[Color, int] = {
    "red": 31,
    "green": 32,
    "yellow": 33,
    "blue": 34,
    "magenta": 35,
    "cyan": 36,
    "white": 37,
    "grey": 90,
    "light-red": 91,
    "light-green": 92,
    "light-yellow": 93,
    "light-cyan": 96,
}


def color_parts(color: Color, bold: bool = False) -> tuple[str, str]:
    if bold:
        return BOLD_COLOR_SEQ % COLOR_INDEX[color], RESET_SEQ
    return REG_COLOR_SEQ % COLOR_INDEX[color], RESET_SEQ


def uncolored(s: str) -> str:
    return re.sub(r"\033\[[\d;]+m", "", s)


def colored(s: str, color: Color | None = None, bold: bool = False) -> str:
    if color is None:
        return s
    start, end = color_parts(color, bold=bold)
    return start + s + end


def outlined(s: str, inner: Color | None = None, side: Color | None = None, bold: bool = False) -> str:
    lines = uncolored(s).strip().splitlines() or [""]
    max_len = max(wcswidth(line) for line in lines)
    padded = [colored(line + " " * (max_len - wcswidth(line)), inner, bold=bold) for line in lines]
    top = colored("┌─" + "─" * max_len + "─┐", side)
    bottom = colored("└─" + "─" * max_len + "─┘", side)
    middle = [f"{colored('│', side)} {line} {colored('│', side)}" for line in padded]
    return "\n".join([top, *middle, bottom])


def _show(s: str, inner: Color, side: Color, important: bool, stream: TextIO | None) -> None:
    stream = sys.stderr if stream is None else stream
    s = outlined(s, inner=inner, side=side, bold=True) if important else colored(s, inner)
    stream.write(s)
    stream.write("\n")
    stream.flush()


def show_info(s: str, important: bool = False, stream: TextIO | None = None) -> None:
    _show(s, "light-cyan", "cyan", important, stream)


def show_warning(s: str, important: bool = False, stream: TextIO | None = None) -> None:
    _show(s, "light-yellow", "yellow", important, stream)


def show_error(s: str, important: bool = False, stream: TextIO | None = None) -> None:
    _show(s, "light-red", "red", important, stream)


def render_table(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    """Renders rows of values as a box-drawn table.

    Args:
        header: The column names.
        rows: The table rows; each row must have one value per column.

    Returns:
        The rendered table, without a trailing newline.

    Raises:
        ValueError: If a row has the wrong number of columns.
    """
    cells = [[str(h) for h in header]]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"Expected {len(header)} columns, got {len(row)}: {row}")
        cells.append([str(v) for v in row])
    widths = [max(wcswidth(row[i]) for row in cells) for i in range(len(header))]

    def fmt(row: list[str]) -> str:
        return "│ " + " │ ".join(v + " " * (w - wcswidth(v)) for v, w in zip(row, widths)) + " │"

    def rule(left: str, mid: str, right: str) -> str:
        return left + mid.join("─" * (w + 2) for w in widths) + right

    lines = [rule("┌", "┬", "┐"), fmt(cells[0]), rule("├", "┼", "┤")]
    lines += [fmt(row) for row in cells[1:]]
    lines += [rule("└", "┴", "┘")]
    return "\n".join(lines)
