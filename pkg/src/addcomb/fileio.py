"""Readers and writers for the ``.fn`` and ``.set`` text formats.

``.fn``: first line ``"n m"``, then 2**n whitespace-separated lowercase hex
codes in domain order.  ``.set``: first line ``"n"``, then one hex code per
line, strictly ascending.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import FormatError
from .gf2core import MAX_DIM, FnTable, SubsetF2n


def _int(tok: str, line: int, base: int = 10) -> int:
    try:
        v = int(tok, base)
    except ValueError:
        raise FormatError(f"bad {'hex' if base == 16 else 'integer'} token {tok!r}", line) from None
    if v < 0:
        raise FormatError(f"negative value {tok!r}", line)
    return v


def _dim(tok: str, line: int) -> int:
    v = _int(tok, line)
    if v > MAX_DIM:
        raise FormatError(f"dimension {v} exceeds {MAX_DIM}", line)
    return v


def format_fn(f: FnTable) -> str:
    lines = [f"{f.dom_dim} {f.codom_dim}"]
    toks = [format(int(v), "x") for v in f.table]
    for i in range(0, len(toks), 16):
        lines.append(" ".join(toks[i : i + 16]))
    return "\n".join(lines) + "\n"


def parse_fn(text: str) -> FnTable:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise FormatError("missing header 'n m'", 1)
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError("header must be 'n m'", 1)
    n, m = _dim(head[0], 1), _dim(head[1], 1)
    if m < 1:
        raise FormatError("codomain dimension must be >= 1", 1)
    vals = []
    for lineno, line in enumerate(lines[1:], start=2):
        for tok in line.split():
            v = _int(tok, lineno, 16)
            if v >= 1 << m:
                raise FormatError(f"value {tok} does not fit in {m} bits", lineno)
            vals.append(v)
    if len(vals) != 1 << n:
        raise FormatError(f"expected {1 << n} values, found {len(vals)}", len(lines))
    return FnTable(n, m, np.array(vals, dtype=np.int64))


def format_set(S: SubsetF2n) -> str:
    return "\n".join([str(S.dim)] + [format(int(c), "x") for c in S.codes()]) + "\n"


def parse_set(text: str) -> SubsetF2n:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise FormatError("missing header 'n'", 1)
    head = lines[0].split()
    if len(head) != 1:
        raise FormatError("header must be a single integer 'n'", 1)
    n = _dim(head[0], 1)
    codes = []
    for lineno, line in enumerate(lines[1:], start=2):
        tok = line.strip()
        if not tok:
            continue
        if len(tok.split()) != 1:
            raise FormatError("expected one hex code per line", lineno)
        v = _int(tok, lineno, 16)
        if v >= 1 << n:
            raise FormatError(f"code {tok} does not fit in {n} bits", lineno)
        if codes and v <= codes[-1]:
            raise FormatError("codes must be strictly ascending", lineno)
        codes.append(v)
    return SubsetF2n.from_codes(n, codes)


def read_fn(path) -> FnTable:
    return parse_fn(Path(path).read_text())


def write_fn(f: FnTable, path) -> None:
    Path(path).write_text(format_fn(f))


def read_set(path) -> SubsetF2n:
    return parse_set(Path(path).read_text())


def write_set(S: SubsetF2n, path) -> None:
    Path(path).write_text(format_set(S))
