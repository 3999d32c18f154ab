"""Shared fixtures: the Table 1 toy pair, random small pairs and a naive oracle.

The naive oracle below works on raw Python sets and never imports the
package, so it can check every miner (and the package's own brute-force
enumerator) independently.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import pytest

from epclose import EncodedDatasetPair, Label

DATA = Path(__file__).parent / "data"

TABLE1_BACKGROUND = ["abf", "bce", "bcfg", "bc", "abd"]
TABLE1_TARGET = ["abd", "bce", "abce", "be", "abce"]
TABLE1_LABELS = [Label.ATTACK, Label.NORMAL, Label.ATTACK, Label.NORMAL, Label.ATTACK]

# (items, count_t, count_b) of the four CCPs at sigma=0.4, rho=1.5
TABLE1_CCPS = {
    (("b", "e"), 4, 1),
    (("a", "b"), 3, 2),
    (("b", "c", "e"), 3, 1),
    (("a", "b", "c", "e"), 2, 0),
}

SIGMAS = (Fraction(1, 5), Fraction(3, 10), Fraction(2, 5), Fraction(1, 2))
RHOS = (Fraction(3, 2), Fraction(2), Fraction(3))

#: One line per acceptance criterion, filled in by test_acceptance.py.
ACCEPTANCE_LINES: list = []


@pytest.fixture
def table1_pair():
    return EncodedDatasetPair.from_itemsets(TABLE1_BACKGROUND, TABLE1_TARGET)


@pytest.fixture
def table1_labeled_pair():
    return EncodedDatasetPair.from_itemsets(TABLE1_BACKGROUND, TABLE1_TARGET, TABLE1_LABELS)


def random_rows(rng: random.Random, n_items: int, max_rows: int) -> list:
    rows = []
    for _ in range(rng.randint(1, max_rows)):
        size = rng.randint(1, n_items)
        rows.append(sorted(rng.sample(range(n_items), size)))
    return rows


def random_instance(seed: int, max_items: int = 8, max_rows: int = 15):
    """A random pair with at most ``max_items`` items and ``max_rows`` rows per side,
    plus a support and a growth-rate threshold drawn from the oracle grid."""
    rng = random.Random(seed)
    n_items = rng.randint(1, max_items)
    background = random_rows(rng, n_items, max_rows)
    target = random_rows(rng, n_items, max_rows)
    return background, target, rng.choice(SIGMAS), rng.choice(RHOS)


def naive_ccps(background, target, sigma, rho) -> set:
    """``{(sorted item tuple, count_t, count_b)}`` by exhaustive enumeration.

    A candidate is kept when its target count reaches ``sigma * n_t``, no
    single added item keeps its join count (closedness), and its growth rate
    reaches ``rho`` (infinite when absent from the background).
    """
    bg = [frozenset(map(str, r)) for r in background]
    tg = [frozenset(map(str, r)) for r in target]
    n_b, n_t = len(bg), len(tg)
    universe = sorted(set().union(*bg, *tg))

    def count(rows, s):
        return sum(1 for r in rows if s <= r)

    out = set()
    for size in range(1, len(universe) + 1):
        for combo in combinations(universe, size):
            s = frozenset(combo)
            ct = count(tg, s)
            if ct == 0 or Fraction(ct) < sigma * n_t:
                continue
            cb = count(bg, s)
            join = ct + cb
            if any(count(tg, s | {x}) + count(bg, s | {x}) == join
                   for x in universe if x not in s):
                continue
            if cb == 0 or Fraction(ct, n_t) / Fraction(cb, n_b) >= rho:
                out.add((tuple(sorted(combo)), ct, cb))
    return out


def decoded_keys(ccps, pair) -> set:
    """CCPs as ``(sorted display strings, count_t, count_b)``."""
    return {(tuple(sorted(pair.decode(c.items))), c.counts.count_t, c.counts.count_b)
            for c in ccps}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
