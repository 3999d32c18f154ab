"""Acceptance criteria, one test each, run at their stated tolerances.

Every test appends one ``[PASS]``/``[FAIL]`` line to the summary printed at
the end of the pytest run (see ``conftest.pytest_terminal_summary``).
"""

from __future__ import annotations

import time
from fractions import Fraction

import pytest

from epclose import (
    EPClose,
    EncodedDatasetPair,
    Label,
    bruteforce_ccps,
    build_flist,
    build_fptree,
    closure_of,
    compare_outputs,
    extcp_baseline,
    mine_ccps,
    purity_summary,
)
from epclose.cli import main, time_interleaved
from epclose.engine import warm_up
from epclose.fptree import conditional_pattern_base
from epclose.ingest import read_basket_pair
from epclose.synth import generate_pair

from conftest import ACCEPTANCE_LINES, DATA, TABLE1_CCPS, decoded_keys, random_instance

N_ORACLE_INSTANCES = 500
BENCH_ITEMS, BENCH_ROWS, BENCH_DENSITY, BENCH_DRIFT, BENCH_SEED = 60, 20_000, 0.3, 0.2, 1
BENCH_SIGMA = Fraction(1, 200)
BENCH_RHO = Fraction(5)
BENCH_RUNS = 3
SWEEP = (Fraction(5, 100), Fraction(2, 100), Fraction(1, 100))


def record(number: int, title: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def test_ac1_table1_golden(table1_pair):
    start = time.perf_counter()
    ccps = mine_ccps(table1_pair, "0.4", "1.5")
    elapsed = time.perf_counter() - start
    got = decoded_keys(ccps, table1_pair)
    ok = got == TABLE1_CCPS and elapsed < 1.0
    record(1, "Table 1 golden", ok,
           f"{len(got)} CCPs, exact set match={got == TABLE1_CCPS}, {elapsed * 1000:.1f} ms (< 1 s)")
    assert got == TABLE1_CCPS
    assert elapsed < 1.0


def test_ac2_negative_golden(table1_pair):
    miner = EPClose(table1_pair, "0.4", "1.5")
    ccps = miner.run()
    out = decoded_keys(ccps, table1_pair)
    enc = table1_pair.encode
    b, bc, ce = enc("b"), enc("bc"), enc("ce")
    checks = {
        "{b}(5:5) indexed": str(miner.cfi.get(b)) == "(5:5)",
        "{b,c}(3:3) indexed": str(miner.cfi.get(bc)) == "(3:3)",
        "{b},{b,c} not output": not {(("b",), 5, 5), (("b", "c"), 3, 3)} & out,
        "{c,e} not indexed": ce not in miner.cfi,
        "{c,e} not output": all(k[0] != ("c", "e") for k in out),
    }
    ok = all(checks.values())
    record(2, "negative golden", ok, ", ".join(f"{k}={v}" for k, v in checks.items()))
    assert ok, checks


def oracle_instances():
    for seed in range(N_ORACLE_INSTANCES):
        background, target, sigma, rho = random_instance(seed)
        yield seed, EncodedDatasetPair.from_itemsets(background, target), sigma, rho


def test_ac3_oracle_equivalence():
    start = time.perf_counter()
    failures = []
    for seed, pair, sigma, rho in oracle_instances():
        ours = mine_ccps(pair, sigma, rho)
        brute = bruteforce_ccps(pair, sigma, rho)
        base = extcp_baseline(pair, sigma, rho)
        if not (compare_outputs(brute, ours).match and compare_outputs(brute, base).match):
            failures.append(seed)
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    record(3, "oracle equivalence", ok,
           f"{N_ORACLE_INSTANCES} instances, {len(failures)} disagreements, {elapsed:.1f} s (< 60 s)")
    assert not failures, f"three-way disagreement on seeds {failures[:20]}"
    assert elapsed < 60


def check_invariants(pair, sigma, rho) -> list:
    problems = []
    # header aggregate == F-list count == sum over node-link chain, in every
    # tree and in the first level of conditional trees
    flist, _, _ = build_flist(pair, sigma)
    tree = build_fptree(pair, flist)
    for item in tree.header:
        chain = [n.counts for n in tree.nodes(item)]
        if not (tree.header_counts(item) == flist.counts[item]
                and sum(c.join for c in chain) == flist.counts[item].join):
            problems.append(f"header/F-list count of item {item}")
        _, frequency = conditional_pattern_base(tree, item)
        for other, counts in frequency.items():
            if counts.count_t > tree.header_counts(item).count_t:
                problems.append(f"conditional count of {other} exceeds its base {item}")

    miner = EPClose(pair, sigma, rho)
    ccps = miner.run()
    stored = [(frozenset(p), c.join) for p, c in miner.cfi.patterns()]
    for x, jx in stored:
        for y, jy in stored:
            if x < y and not jx > jy:
                problems.append(f"CFI subset ordering {sorted(x)} vs {sorted(y)}")
    for c in ccps:
        closure = closure_of(c.items, pair)
        if closure.items != c.items or closure.counts != c.counts:
            problems.append(f"CCP {c.items} is not closed")

    base = {c.key() for c in ccps}
    for higher_sigma, higher_rho in ((min(Fraction(1), sigma + Fraction(1, 10)), rho),
                                     (sigma, rho + 1)):
        if not {c.key() for c in mine_ccps(pair, higher_sigma, higher_rho)} <= base:
            problems.append(f"not monotone at sigma={higher_sigma}, rho={higher_rho}")
    return problems


def test_ac4_structural_invariants():
    bad = {}
    for seed, pair, sigma, rho in oracle_instances():
        problems = check_invariants(pair, sigma, rho)
        if problems:
            bad[seed] = problems
    record(4, "structural invariants", not bad,
           f"{N_ORACLE_INSTANCES} instances; count conservation, CFI subset ordering, "
           f"closure_of closedness, sigma/rho monotonicity; {len(bad)} violating")
    assert not bad, dict(list(bad.items())[:5])


@pytest.fixture(scope="module")
def bench_results():
    return {}


def synthetic_pair(duplicate_rate):
    s = generate_pair(BENCH_ITEMS, BENCH_ROWS, BENCH_ROWS, BENCH_DENSITY, BENCH_DRIFT,
                      BENCH_SEED, duplicate_rate=duplicate_rate)
    return EncodedDatasetPair.from_itemsets(s.background, s.target)


def benchmark(pair, sigma, runs):
    t_e, _, ours, t_b, _, theirs = time_interleaved(
        lambda: mine_ccps(pair, sigma, BENCH_RHO),
        lambda: extcp_baseline(pair, sigma, BENCH_RHO), runs)
    return t_e, t_b, compare_outputs(theirs, ours), len(ours)


def test_ac5_performance(bench_results):
    start = time.perf_counter()
    warm_up()
    pair = synthetic_pair(0.0)
    t_e, t_b, report, n = benchmark(pair, BENCH_SIGMA, BENCH_RUNS)
    speedup = t_b / t_e
    bench_results["dup0"] = speedup
    sweep = []
    for sigma in SWEEP:
        s_e, s_b, s_report, _ = benchmark(pair, sigma, 1)
        assert s_report.match, s_report.describe(pair.symbols)
        sweep.append((sigma, s_b / s_e))
    sweep.append((BENCH_SIGMA, speedup))
    total = time.perf_counter() - start
    ratios = [r for _, r in sweep]
    widening = all(b >= a for a, b in zip(ratios, ratios[1:]))
    ok = speedup >= 2 and report.match and total < 600
    trend = ", ".join(f"{float(s) * 100:g}%: {r:.2f}x" for s, r in sweep)
    record(5, "performance", ok,
           f"median of {BENCH_RUNS}: epclose {t_e:.1f} s, baseline {t_b:.1f} s, speed-up "
           f"{speedup:.2f}x (>= 2x), outputs equal={report.match} ({n} CCPs), "
           f"total {total:.0f} s (< 600 s); sweep [{trend}] gap widens as support falls: "
           f"{'yes' if widening else 'no'}")
    assert report.match, report.describe(pair.symbols)
    assert speedup >= 2
    assert total < 600


def test_ac6_duplicate_trend(bench_results):
    warm_up()
    pair = synthetic_pair(0.9)
    t_e, t_b, report, n = benchmark(pair, BENCH_SIGMA, BENCH_RUNS)
    speedup = t_b / t_e
    reference = bench_results.get("dup0")
    if reference is None:
        trend = "no duplicate-rate 0 reference in this run"
    else:
        trend = (f"smaller than at duplicate-rate 0 ({reference:.2f}x): "
                 f"{'yes' if speedup < reference else 'no'}")
    record(6, "duplicate-transaction trend", report.match,
           f"duplicate-rate 0.9: speed-up {speedup:.2f}x, {trend} (reported, not asserted); "
           f"outputs equal={report.match} ({n} CCPs)")
    assert report.match, report.describe(pair.symbols)


def test_ac7_purity_evaluation(tmp_path, capsys):
    pair = read_basket_pair(DATA / "table1_background.txt", DATA / "table1_target_labeled.txt")
    ccps = mine_ccps(pair, "0.4", "1.5")
    report = purity_summary(ccps, pair.target)

    # independent containment scan over the raw labeled file
    raw = []
    for line in (DATA / "table1_target_labeled.txt").read_text().splitlines():
        if line.strip() and not line.startswith("#"):
            body, _, label = line.rpartition(",label=")
            raw.append((set(body.split()), label))
    mismatches = []
    for ccp, ratio in report.ratios:
        items = set(pair.decode(ccp.items))
        hits = [label for row, label in raw if items <= row]
        expected = Fraction(hits.count(Label.ATTACK.value), len(hits))
        if ratio != expected or len(hits) != ccp.counts.count_t:
            mismatches.append(sorted(items))

    # the same through the command line: mine, then eval
    ccp_file = tmp_path / "ccps.csv"
    code_mine = main(["mine", "--background", str(DATA / "table1_background.txt"),
                      "--target", str(DATA / "table1_target_labeled.txt"),
                      "--min-support", "0.4", "--min-growth-rate", "1.5",
                      "--output", str(ccp_file)])
    code_eval = main(["eval", "--ccps", str(ccp_file),
                      "--target", str(DATA / "table1_target_labeled.txt")])
    out = capsys.readouterr().out
    pipeline_ok = code_mine == 0 and code_eval == 0 and "fraction pure: 0.500000" in out
    ok = not mismatches and pipeline_ok and len(report.ratios) == 4
    record(7, "purity evaluation", ok,
           f"{len(report.ratios)} CCPs, ratio/denominator mismatches={len(mismatches)}, "
           f"fraction pure {report.summary()['fraction_pure']}, CLI mine->eval ok={pipeline_ok}")
    assert not mismatches
    assert pipeline_ok


def test_ac8_determinism(tmp_path):
    bg, tg = tmp_path / "bg.txt", tmp_path / "tg.txt"
    assert main(["gen", "--items", "30", "--rows-b", "3000", "--rows-t", "3000",
                 "--density", "0.3", "--drift", "0.2", "--seed", "11",
                 "--out-background", str(bg), "--out-target", str(tg)]) == 0
    outputs = []
    for run in (1, 2):
        out = tmp_path / f"run{run}.csv"
        assert main(["mine", "--background", str(bg), "--target", str(tg),
                     "--min-support", "0.02", "--min-growth-rate", "2",
                     "--output", str(out)]) == 0
        outputs.append(out.read_bytes())
    same = outputs[0] == outputs[1]
    n_lines = outputs[0].count(b"\n") - 1
    record(8, "determinism", same and n_lines > 0,
           f"two mine runs, {n_lines} CCPs each, byte-identical={same}")
    assert same
    assert n_lines > 0
