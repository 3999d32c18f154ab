"""Attack ratio of each CCP on a labeled target dataset, and purity summaries.

Labels are only read here, after mining; they never influence which
patterns are found.  Ratios are exact fractions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exceptions import ConsistencyError, LabelingError
from .model import CCP, Label, format_fraction, format_growth_rate

HISTOGRAM_BINS = 10
DEFAULT_NEAR_PURE = Fraction(95, 100)


def attack_ratio(ccp: CCP, target: Sequence) -> Fraction:
    """Share of the target transactions containing ``ccp`` that are attacks.

    Every target transaction must carry a label.  The number of containing
    transactions is checked against the pattern's stored target count.
    """
    wanted = frozenset(ccp.items)
    total = attack = 0
    for position, t in enumerate(target):
        if t.label is None:
            raise LabelingError(f"target transaction {position + 1} has no label")
        if wanted.issubset(t.items):
            total += 1
            attack += t.label is Label.ATTACK
    if total != ccp.counts.count_t:
        raise ConsistencyError(
            f"pattern {ccp.items} occurs in {total} target transactions but its stored "
            f"target count is {ccp.counts.count_t}")
    if total == 0:
        raise ConsistencyError(f"pattern {ccp.items} occurs in no target transaction")
    return Fraction(attack, total)


@dataclass
class PurityReport:
    """Per-CCP attack ratios and how many are pure (exactly 0 or 1)."""

    ratios: list  # (CCP, Fraction) in input order
    near_pure_threshold: Fraction = DEFAULT_NEAR_PURE
    pure_attack: int = field(init=False)
    pure_normal: int = field(init=False)
    mixed: int = field(init=False)
    near_pure: int = field(init=False)
    histogram: list = field(init=False)

    def __post_init__(self):
        values = [r for _, r in self.ratios]
        self.pure_attack = sum(r == 1 for r in values)
        self.pure_normal = sum(r == 0 for r in values)
        self.mixed = len(values) - self.pure_attack - self.pure_normal
        t = self.near_pure_threshold
        self.near_pure = sum(r >= t or r <= 1 - t for r in values)
        self.histogram = [0] * HISTOGRAM_BINS
        for r in values:
            self.histogram[min(int(r * HISTOGRAM_BINS), HISTOGRAM_BINS - 1)] += 1

    @property
    def total(self) -> int:
        return len(self.ratios)

    @property
    def fraction_pure(self) -> Fraction | None:
        """``None`` when there are no CCPs (the fraction is undefined)."""
        if not self.ratios:
            return None
        return Fraction(self.pure_attack + self.pure_normal, self.total)

    def summary(self) -> dict:
        frac = self.fraction_pure
        return {
            "total": self.total,
            "pure_attack": self.pure_attack,
            "pure_normal": self.pure_normal,
            "mixed": self.mixed,
            "fraction_pure": None if frac is None else format_fraction(frac),
            "near_pure_threshold": format_fraction(self.near_pure_threshold),
            "near_pure": self.near_pure,
            "histogram": list(self.histogram),
        }

    def records(self, symbols) -> list:
        """One dict per CCP: items, counts, growth rate and attack ratio."""
        return [{
            "items": [symbols[i] for i in ccp.items],
            "count_t": ccp.counts.count_t,
            "count_b": ccp.counts.count_b,
            "growth_rate": format_growth_rate(ccp.growth_rate),
            "attack_ratio": format_fraction(ratio),
        } for ccp, ratio in self.ratios]

    def to_jsonl(self, symbols) -> str:
        return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in self.records(symbols))

    def to_table(self, symbols) -> str:
        lines = [f"{'attack_ratio':>12}  {'count_t':>7}  {'count_b':>7}  pattern"]
        for r in self.records(symbols):
            lines.append(f"{r['attack_ratio']:>12}  {r['count_t']:>7}  {r['count_b']:>7}  "
                         f"{{{', '.join(r['items'])}}}")
        s = self.summary()
        frac = "undefined (no CCPs)" if s["fraction_pure"] is None else s["fraction_pure"]
        lines += [
            "",
            f"CCPs: {s['total']}  pure attack: {s['pure_attack']}  "
            f"pure normal: {s['pure_normal']}  mixed: {s['mixed']}",
            f"fraction pure: {frac}",
            f"near pure (>= {s['near_pure_threshold']} either way): {s['near_pure']}",
            "histogram (10 bins over [0, 1]): " + " ".join(map(str, s["histogram"])),
        ]
        return "\n".join(lines) + "\n"


def purity_summary(ccps: Sequence[CCP], target: Sequence,
                   near_pure_threshold=DEFAULT_NEAR_PURE) -> PurityReport:
    """Attack ratio of every CCP, aggregated into a :class:`PurityReport`."""
    threshold = Fraction(near_pure_threshold)
    if not Fraction(1, 2) <= threshold <= 1:
        raise ValueError(f"near-pure threshold must lie in [0.5, 1], got {threshold}")
    for position, t in enumerate(target):
        if t.label is None:
            raise LabelingError(f"target transaction {position + 1} has no label")
    return PurityReport([(c, attack_ratio(c, target)) for c in ccps], threshold)
