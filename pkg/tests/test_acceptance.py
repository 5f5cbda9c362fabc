"""Acceptance criteria, one test per criterion (see notes in each).

The synthetic-benchmark criteria run the full desk-scale experiment:
10 trials per luckiness setting with the default protocol (200 nodes,
30 snapshots, change at t=15, candidate orders {2,3,4}, delta=0.05).
The heavy experiment runs once per session and is shared by AC1/AC2.
"""
import itertools
import json
import math

import numpy as np
import pytest

from graphmdl.cli import main
from graphmdl.codelen import (
    BetaLuckiness,
    bernoulli_nml_codelen,
    integer_codelen,
    lnml_codelen,
    lnml_complexity,
    lnml_estimator,
    multinomial_complexity,
)
from graphmdl.detect import change_statistic
from graphmdl.graphs import BlockAssignment, snapshot
from graphmdl.stream import BscConfig, run
from graphmdl.summarize import build_summary, summary_codelen
from graphmdl.synth import SynthConfig, benefit_auc, generate_stream, type_errors

PRIOR = BetaLuckiness(a=0.5, b=0.5, lam=1.0)
N_TRIALS = 10
T_STAR = SynthConfig().t_change
PAPER_TABLE = {0.5: 144.39, 1.0: 141.82, 5.0: 138.53}


@pytest.fixture(scope="module")
def table_one():
    """10 trials x lambda in {0.5, 1, 5} with protocol defaults."""
    results = {lam: [] for lam in PAPER_TABLE}
    for seed in range(N_TRIALS):
        snaps, _ = generate_stream(SynthConfig(seed=seed))
        for lam in PAPER_TABLE:
            results[lam].append(run(snaps, BscConfig(lam=lam, seed=seed)))
    return results


def test_ac1_table_one_reproduction(table_one):
    trials = table_one[1.0]
    type1, type2 = type_errors(trials, T_STAR)
    aucs = [benefit_auc(reports, T_STAR) for reports in trials]
    print(f"AC1: type1={type1:.2f} type2={type2:.2f} auc_mean={np.mean(aucs):.3f}")
    assert type1 <= 0.1, f"Type I {type1} > 0.1"
    assert type2 <= 0.1, f"Type II {type2} > 0.1"
    assert np.mean(aucs) >= 0.90, f"mean AUC {np.mean(aucs)} < 0.90"


def mean_compression(trials):
    return float(np.mean([
        next(r.summary_total for r in reports if r.t == T_STAR)
        for reports in trials
    ]))


def test_ac2_compression_monotone_in_lambda(table_one):
    means = {lam: mean_compression(table_one[lam]) for lam in sorted(PAPER_TABLE)}
    print(f"AC2 means: {means}")
    ordered = [means[lam] for lam in (0.5, 1.0, 5.0)]
    assert ordered[0] > ordered[1] > ordered[2], (
        f"summary code-length means not monotone decreasing in lambda: {means}"
    )


def test_ac2_compression_magnitudes(table_one):
    # The reference values' log base is not recoverable from the paper
    # (documented ambiguity), so the +-20% band accepts either reading:
    # the values as bits, or as nats converted to bits.
    readings = {"bits": 1.0, "nats": 1.0 / math.log(2.0)}
    outcomes = {}
    for name, scale in readings.items():
        outcomes[name] = all(
            abs(mean_compression(table_one[lam]) - scale * ref) <= 0.2 * scale * ref
            for lam, ref in PAPER_TABLE.items()
        )
    print(f"AC2 magnitude readings: {outcomes}")
    assert any(outcomes.values()), (
        f"means {[round(mean_compression(table_one[l]), 2) for l in PAPER_TABLE]} "
        f"outside +-20% of {PAPER_TABLE} under every log-base reading"
    )


def test_ac3_complexity_trends():
    lams = np.geomspace(0.1, 100.0, 13)
    table = {
        k: [lnml_complexity(k * k, BetaLuckiness(a=0.5, b=0.5, lam=lam)) for lam in lams]
        for k in range(2, 9)
    }
    for k, row in table.items():
        assert all(a > b for a, b in zip(row, row[1:])), (
            f"complexity not strictly decreasing in lambda at k={k}"
        )
    for j in range(len(lams)):
        col = [table[k][j] for k in range(2, 9)]
        assert all(a < b for a, b in zip(col, col[1:])), (
            f"complexity not strictly increasing in k at lambda={lams[j]:.3f}"
        )


def test_ac4_stationary_alarm_rate():
    alarms = 0
    scored = 0
    for seed in range(10):
        cfg = SynthConfig(t_change=11, t_max=21, jitter=0.0, seed=seed)
        snaps, _ = generate_stream(cfg)
        reports = run(snaps, BscConfig(lam=1.0, seed=seed))
        alarms += sum(1 for r in reports if r.alarm)
        scored += sum(1 for r in reports if r.phi is not None)
    assert scored >= 200
    rate = alarms / scored
    print(f"AC4: {alarms}/{scored} stationary alarms (rate {rate:.4f})")
    assert rate <= 0.05 + 0.05, f"stationary alarm rate {rate} > delta + 0.05"


def test_ac5_multinomial_recursion_vs_enumeration():
    for n in range(1, 9):
        for k in range(1, 5):
            total = 0.0
            for counts in itertools.product(range(n + 1), repeat=k):
                if sum(counts) != n:
                    continue
                coef = math.factorial(n)
                for c in counts:
                    coef //= math.factorial(c)
                total += coef * math.prod((c / n) ** c for c in counts)
            assert multinomial_complexity(n, k) == pytest.approx(total, rel=1e-9)


def test_ac5_estimator_vs_dense_grid():
    grid = np.linspace(1e-9, 1 - 1e-9, 2_000_001)
    log_grid = np.log(grid), np.log1p(-grid)
    for n in (1, 2, 5, 17):
        for m in range(n + 1):
            for lam in (0.5, 1.0, 5.0):
                prior = BetaLuckiness(a=0.5, b=0.5, lam=lam)
                ll = (
                    (m + prior.a - 1) * log_grid[0]
                    + (n - m + prior.b + prior.lam - 1) * log_grid[1]
                )
                idx = int(np.argmax(ll))
                lo = 1.0 / (2 * n)
                if idx == 0:
                    best = lo
                elif idx == grid.size - 1:
                    best = 1 - lo
                else:
                    best = grid[idx]
                assert lnml_estimator(m, n, prior) == pytest.approx(
                    best, abs=1e-6
                ), (m, n, lam)


def test_ac5_lnml_degenerates_to_nml():
    tiny = BetaLuckiness(a=1.0, b=1.0, lam=1e-9)
    for n in (1, 3, 8):
        for m in range(n + 1):
            assert lnml_codelen(m, n, tiny) == pytest.approx(
                bernoulli_nml_codelen(m, n), abs=1e-6
            )


def test_ac5_summarizer_exhaustive_is_bruteforce():
    tri = [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]
    graphs = [
        snapshot(1, 6, tri + [(a + 3, b + 3) for a, b in tri]),
        snapshot(1, 5, [(0, 1), (1, 0), (2, 3), (3, 4), (4, 2)]),
        snapshot(1, 4, []),
    ]
    kset = [1, 2, 3]
    for g in graphs:
        best = math.inf
        for k in kset:
            for z in itertools.product(range(k), repeat=g.n_nodes):
                _, br = summary_codelen(
                    g, BlockAssignment(np.asarray(z, dtype=np.int64), k), PRIOR
                )
                best = min(best, br.total)
        s = build_summary(g, kset, PRIOR, exhaustive=True)
        assert s.breakdown.total == pytest.approx(best, rel=1e-9)


def two_cliques(t, n_side=6):
    edges = []
    for off in (0, n_side):
        for a in range(n_side):
            for b in range(n_side):
                if a != b:
                    edges.append((off + a, off + b))
    return snapshot(t, 2 * n_side, edges)


def test_ac6_identical_snapshots_statistic_is_zero():
    # As specified this demands phi = 0; the shipped statistic pools the
    # two samples per block pair, which is strictly cheaper than coding
    # them twice, so phi is slightly negative on identical input.  The
    # gap is what funds the Type I margin of AC1/AC4 — see the decisions
    # ledger for why a statistic with phi = 0 here cannot detect at all.
    g1, g2 = two_cliques(1), two_cliques(2)
    kset = (2, 3, 4)
    s1 = build_summary(g1, kset, PRIOR)
    s2 = build_summary(g2, kset, PRIOR)
    assert s1.k == s2.k
    phi, _ = change_statistic(g2, g1, s2, s1, kset, PRIOR)
    print(f"AC6 identical-snapshot phi: {phi:+.4f}")
    assert phi == pytest.approx(0.0, abs=1e-9), (
        f"identical snapshots give phi={phi:+.4f}, not 0 (pooled-encoding "
        "design; deliberate deviation, see decisions ledger)"
    )


def test_ac6_label_permutation_invariance():
    rng = np.random.default_rng(3)
    g = snapshot(
        1, 14, np.argwhere((rng.random((14, 14)) < 0.3) & ~np.eye(14, dtype=bool))
    )
    z = rng.integers(0, 3, 14)
    perm = np.array([2, 0, 1])
    base = summary_codelen(g, BlockAssignment(z, 3), PRIOR)[1]
    permuted = summary_codelen(g, BlockAssignment(perm[z], 3), PRIOR)[1]
    for field in ("l_k", "l_z", "l_y", "l_x", "total"):
        assert getattr(base, field) == pytest.approx(
            getattr(permuted, field), abs=1e-9
        )


def test_ac6_breakdown_additivity():
    g = two_cliques(1)
    s = build_summary(g, (2, 3, 4), PRIOR)
    br = s.breakdown
    assert br.total == pytest.approx(br.l_k + br.l_z + br.l_y + br.l_x, abs=1e-9)
    assert br.summary_total == pytest.approx(br.l_k + br.l_z + br.l_y, abs=1e-9)
    assert br.data_total == pytest.approx(br.l_x, abs=1e-9)


def test_ac6_full_run_determinism(tmp_path):
    stream = tmp_path / "s.jsonl"
    assert main(["generate", "--out", str(stream), "--n", "60", "--t-change", "4",
                 "--t-max", "8", "--seed", "2"]) == 0
    argv = ["run", "--stream", str(stream), "--lambda", "1", "--no-plot"]
    assert main(argv + ["--out", str(tmp_path / "r1.csv")]) == 0
    assert main(argv + ["--out", str(tmp_path / "r2.csv")]) == 0
    assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()
