import json
from fractions import Fraction

import pytest

from epclose import (
    CCP,
    INFINITE,
    ConsistencyError,
    DualCount,
    EncodedDatasetPair,
    LabelingError,
    attack_ratio,
    mine_ccps,
    purity_summary,
)
from epclose.evaluate import PurityReport

from conftest import TABLE1_LABELS, TABLE1_TARGET


def scan_ratio(items, target_rows, labels):
    """Independent containment scan over the raw strings."""
    hits = [lab for row, lab in zip(target_rows, labels) if set(items) <= set(row)]
    return Fraction(sum(lab.value == "attack" for lab in hits), len(hits)), len(hits)


def test_table1_ratios(table1_labeled_pair):
    pair = table1_labeled_pair
    ccps = mine_ccps(pair, "0.4", "1.5")
    got = {pair.decode(c.items): attack_ratio(c, pair.target) for c in ccps}
    # [DERIVED] by hand: {b,e} hits rows 2-5 (two attacks), {b,c,e} rows 2, 3, 5
    assert got == {("a", "b", "c", "e"): 1, ("b", "e"): Fraction(1, 2),
                   ("b", "c", "e"): Fraction(2, 3), ("a", "b"): 1}
    for c in ccps:
        ratio, total = scan_ratio(pair.decode(c.items), TABLE1_TARGET, TABLE1_LABELS)
        assert got[pair.decode(c.items)] == ratio
        assert total == c.counts.count_t


def test_table1_summary(table1_labeled_pair):
    pair = table1_labeled_pair
    report = purity_summary(mine_ccps(pair, "0.4", "1.5"), pair.target)
    assert (report.pure_attack, report.pure_normal, report.mixed) == (2, 0, 2)
    assert report.fraction_pure == Fraction(1, 2)
    summary = report.summary()
    assert summary["fraction_pure"] == "0.500000"
    assert summary["histogram"] == [0, 0, 0, 0, 0, 1, 1, 0, 0, 2]
    records = [json.loads(line) for line in report.to_jsonl(pair.symbols).splitlines()]
    assert records[0] == {"items": ["a", "b", "c", "e"], "count_t": 2, "count_b": 0,
                          "growth_rate": "inf", "attack_ratio": "1.000000"}
    table = report.to_table(pair.symbols)
    assert "fraction pure: 0.500000" in table
    assert "{b, c, e}" in table


def test_empty_report_has_undefined_fraction():
    report = PurityReport([])
    assert report.fraction_pure is None
    assert report.summary()["fraction_pure"] is None
    assert "undefined" in report.to_table(())


def test_near_pure_counts_both_directions():
    ccp = CCP((0,), DualCount(0, 1), INFINITE)
    ratios = [(ccp, Fraction(96, 100)), (ccp, Fraction(3, 100)), (ccp, Fraction(1, 2)),
              (ccp, Fraction(1))]
    report = PurityReport(ratios)
    assert report.near_pure == 3
    assert report.pure_attack == 1 and report.mixed == 3


def test_unlabeled_row_is_an_error(table1_pair):
    ccps = mine_ccps(table1_pair, "0.4", "1.5")
    with pytest.raises(LabelingError, match="transaction 1"):
        attack_ratio(ccps[0], table1_pair.target)
    with pytest.raises(LabelingError):
        purity_summary([], table1_pair.target)


def test_count_mismatch_is_an_error(table1_labeled_pair):
    wrong = CCP(table1_labeled_pair.encode("be"), DualCount(1, 3), 3)
    with pytest.raises(ConsistencyError, match="stored"):
        attack_ratio(wrong, table1_labeled_pair.target)


def test_threshold_validation(table1_labeled_pair):
    with pytest.raises(ValueError):
        purity_summary([], table1_labeled_pair.target, near_pure_threshold=Fraction(1, 3))


def test_labels_do_not_change_mining():
    bg, tg = ["ab", "c"], ["ab", "ab", "c"]
    plain = EncodedDatasetPair.from_itemsets(bg, tg)
    labeled = EncodedDatasetPair.from_itemsets(bg, tg, TABLE1_LABELS[:3])
    assert mine_ccps(plain, "0.3", 2) == mine_ccps(labeled, "0.3", 2)
