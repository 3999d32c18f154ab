"""Independent CCP miners used to check and benchmark :func:`~epclose.engine.mine_ccps`.

``bruteforce_ccps`` enumerates every itemset and tests each condition
directly.  ``extcp_baseline`` mines closed itemsets of each dataset on its
own and matches the two result sets afterwards, the post-processing approach
EPClose is meant to replace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from ._validation import check_min_growth_rate, check_min_support, min_count
from .engine import mine_closed_itemsets
from .exceptions import OracleGuardError
from .model import (
    CCP,
    DualCount,
    EncodedDatasetPair,
    closure_of,
    growth_rate,
    meets_support_and_growth,
    sort_ccps,
    support_counts,
)

#: Largest number of target-frequent items the brute-force enumerator accepts.
BRUTEFORCE_MAX_ITEMS = 25


def bruteforce_ccps(pair: EncodedDatasetPair, min_support, min_growth_rate) -> list:
    """CCPs by enumerating every subset of the target-frequent items.

    Each subset is counted by scanning the join dataset and kept when it is
    target-frequent, equal to its own closure, and grows by at least
    ``min_growth_rate``.
    """
    sigma = check_min_support(min_support)
    rho = check_min_growth_rate(min_growth_rate)
    n_b, n_t = pair.n_b, pair.n_t
    items = sorted(i for i in range(pair.n_items)
                   if support_counts((i,), pair).count_t >= sigma * n_t)
    if len(items) > BRUTEFORCE_MAX_ITEMS:
        raise OracleGuardError(
            f"{len(items)} target-frequent items exceed the brute-force limit of "
            f"{BRUTEFORCE_MAX_ITEMS}")
    out = []
    for size in range(1, len(items) + 1):
        for subset in combinations(items, size):
            counts = support_counts(subset, pair)
            if counts.count_t < sigma * n_t:
                continue
            if closure_of(subset, pair).items != subset:
                continue
            if meets_support_and_growth(counts, sigma, rho, n_b, n_t):
                out.append(CCP(subset, counts, growth_rate(counts, n_b, n_t)))
    return sort_ccps(out)


class _Bitsets:
    """Vertical view of one dataset: per-item transaction sets as Python ints."""

    def __init__(self, transactions):
        self.n = len(transactions)
        self.columns: dict = {}
        for tid, t in enumerate(transactions):
            bit = 1 << tid
            for i in t.items:
                self.columns[i] = self.columns.get(i, 0) | bit
        self.everything = (1 << self.n) - 1
        self._memo: dict = {}

    def count(self, items) -> int:
        key = items if isinstance(items, frozenset) else frozenset(items)
        hit = self._memo.get(key)
        if hit is None:
            cover = self.everything
            for i in key:
                cover &= self.columns.get(i, 0)
                if not cover:
                    break
            hit = self._memo[key] = cover.bit_count()
        return hit


def extcp_baseline(pair: EncodedDatasetPair, min_support, min_growth_rate,
                   background_min_count: int | None = None, backend: str = "auto") -> list:
    """Mine closed itemsets per dataset, then match the two sets.

    1. Closed itemsets of the target dataset with at least ``sigma * n_t``
       occurrences.
    2. Closed itemsets of the background dataset with at least
       ``background_min_count`` occurrences (default: the same fraction
       ``sigma`` of ``n_b``).
    3. Each target itemset takes its background count from the background
       result when it is there, otherwise from a scan of the background data.
    4. A pattern closed in the join dataset need not be closed in the target
       alone: its target closure ``T`` is, and the pattern is a subset of
       ``T`` with the same target count that no item of ``T`` can extend
       without losing a background occurrence.  Those subsets are generated
       from every ``T`` and counted by scanning.
    5. Support and growth-rate thresholds are applied last.
    """
    sigma = check_min_support(min_support)
    rho = check_min_growth_rate(min_growth_rate)
    n_b, n_t = pair.n_b, pair.n_t
    target_rows = pair.target
    background_rows = pair.background
    if background_min_count is None:
        background_min_count = max(1, min_count(sigma, n_b))

    target_closed = mine_closed_itemsets(target_rows, min_count(sigma, n_t), backend)
    background_closed = mine_closed_itemsets(background_rows, background_min_count, backend)

    background = _Bitsets(background_rows)
    target = _Bitsets(target_rows)
    matched = {}
    for items, ct in target_closed.items():
        key = frozenset(items)
        cb = background_closed.get(items)
        if cb is None:
            cb = background.count(key)
        matched[key] = DualCount(cb, ct)

    found = dict(matched)
    for key, counts in matched.items():
        _expand_within(key, counts, target, background, found)

    out = []
    for key, counts in found.items():
        if meets_support_and_growth(counts, sigma, rho, n_b, n_t):
            out.append(CCP(tuple(sorted(key)), counts, growth_rate(counts, n_b, n_t)))
    return sort_ccps(out)


def _expand_within(closed_t, counts: DualCount, target: _Bitsets, background: _Bitsets,
                   found: dict):
    """Add the join-closed subsets of a target-closed itemset to ``found``."""
    ct = counts.count_t
    seen = {closed_t}
    frontier = [closed_t]
    while frontier:
        current = frontier.pop()
        for item in current:
            smaller = current - {item}
            if not smaller or smaller in seen:
                continue
            seen.add(smaller)
            if target.count(smaller) != ct:
                continue
            frontier.append(smaller)
            if smaller in found:
                continue
            cb = background.count(smaller)
            if all(background.count(smaller | {extra}) != cb for extra in closed_t - smaller):
                found[smaller] = DualCount(cb, ct)


@dataclass
class OracleReport:
    """Set comparison of two CCP lists on ``(items, count_t, count_b)``."""

    expected: set
    actual: set
    missing: set = field(init=False)
    unexpected: set = field(init=False)

    def __post_init__(self):
        self.missing = self.expected - self.actual
        self.unexpected = self.actual - self.expected

    @property
    def match(self) -> bool:
        return not self.missing and not self.unexpected

    @property
    def difference_size(self) -> int:
        return len(self.missing) + len(self.unexpected)

    def describe(self, symbols=None) -> str:
        def show(keys):
            rows = []
            for items, ct, cb in sorted(keys):
                names = [symbols[i] for i in items] if symbols is not None else list(items)
                rows.append(f"  {{{', '.join(map(str, names))}}}({ct}:{cb})")
            return rows

        if self.match:
            return f"match: {len(self.expected)} patterns"
        lines = [f"mismatch: {len(self.missing)} missing, {len(self.unexpected)} unexpected"]
        if self.missing:
            lines += ["missing from second list:"] + show(self.missing)
        if self.unexpected:
            lines += ["only in second list:"] + show(self.unexpected)
        return "\n".join(lines)


def compare_outputs(a, b) -> OracleReport:
    """Compare CCP lists as sets; ``a`` is treated as the reference."""
    return OracleReport({c.key() for c in a}, {c.key() for c in b})
