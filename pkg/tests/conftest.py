import itertools

import numpy as np
import pytest

from addcomb.gf2core import FnTable


def brute_sumset(codes):
    return {a ^ b for a in codes for b in codes}


def brute_span(codes):
    out = {0}
    for c in codes:
        out |= {v ^ c for v in out}
    return out


def brute_gowers_power(f: FnTable, d: int) -> float:
    """E over (x, y_1..y_d) of (-1)^{f_{y_1..y_d}(x)} by the definition."""
    N = 1 << f.dom_dim
    t = [int(v) & 1 for v in f.table]
    total = 0
    for x, *ys in itertools.product(range(N), repeat=d + 1):
        acc = 0
        for sub in itertools.product((0, 1), repeat=d):
            off = x
            for bit, y in zip(sub, ys):
                if bit:
                    off ^= y
            acc ^= t[off]
        total += 1 - 2 * acc
    return total / N ** (d + 1)


def and_table(n, i=0, j=1):
    return FnTable.from_function(n, 1, lambda x: ((x >> i) & 1) & ((x >> j) & 1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
