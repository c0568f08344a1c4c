"""Shared numeric and I/O helpers: compensated summation, atomic CSV output."""

from __future__ import annotations

import os
import tempfile
from typing import Iterable, Sequence


def kahan_sum(terms: Iterable):
    """Sum scalars or same-shape arrays with Kahan compensation.

    The iteration order of ``terms`` is the summation order; callers that
    need reproducible results must pass a deterministically ordered iterable.
    """
    it = iter(terms)
    try:
        first = next(it)
    except StopIteration:
        return 0.0
    total = first * 1.0  # force a copy / float promotion
    comp = total * 0.0
    for x in it:
        y = x - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def format_g17(x) -> str:
    """Render a float with 17 significant digits (round-trips exactly)."""
    return format(float(x), ".17g")


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_g17(value)
    return str(value)


def write_csv_atomic(
    path: str,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    header_lines: Sequence[str] = (),
) -> None:
    """Write a CSV file atomically (temp file + rename).

    ``header_lines`` are emitted first, each prefixed with ``"# "``.  Cells
    are formatted with :func:`format_cell`; floats keep full precision so a
    rerun of the same computation reproduces the file byte for byte.
    """
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n" if line else "#\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(format_cell(c) for c in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_comment_header(path: str) -> list[str]:
    """Return the leading ``# `` comment lines of a CSV, prefixes stripped."""
    lines = []
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            lines.append(line[1:].strip("\n").removeprefix(" "))
    return lines
