"""Acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".

Criteria 5 and 6 are desk-scale property checks standing in for asymptotic
statements: the Breaker and Maker guarantees are proven for all strategies
of the opponent and for n large, while here they are checked against the
implemented strategies at n up to 10^6.
"""

from __future__ import annotations

import math
import time

import pytest

from apgame.board import SCHUR, THREE_AP, GameConfig, IntervalScheme, isqrt_ceil
from apgame.checks import check_claims, check_counting, check_pair_bounds, check_profile
from apgame.events import GuaranteeViolated
from apgame.lab import BoundKind, ExperimentRecord, SweepPlan, calibrate, evaluate_bound, sweep
from apgame.referee import Transcript, play_game, replay
from apgame.solver import BREAKER_WIN, MAKER_WIN, exact_threshold, golden_thresholds, naive_solve, solve

pytestmark = pytest.mark.slow

MAKERS = ("mid-third", "greedy", "random")
BREAKERS = ("block-all", "three-interval", "random")


# 1 ---------------------------------------------------------------------------


def test_c1_oracle_equivalence(report):
    t0 = time.perf_counter()
    disagreements = []
    cases = 0
    for family in (THREE_AP, SCHUR):
        for n in range(1, 9):
            for q in (1, 2, 3):
                cases += 1
                if solve(n, q, family).winner != naive_solve(n, q, family):
                    disagreements.append((str(family), n, q))
    elapsed = time.perf_counter() - t0
    ok = not disagreements and elapsed < 600
    report("criterion 1 oracle equivalence", ok, f"{cases} cases, {len(disagreements)} disagreements, {elapsed:.1f}s")
    assert ok, disagreements


# 2 ---------------------------------------------------------------------------


def test_c2_small_board_facts(report):
    golden = golden_thresholds(THREE_AP)
    facts = {
        "solve(3,1)=BreakerWin": solve(3, 1).winner == BREAKER_WIN,
        "solve(5,1)=MakerWin": solve(5, 1).winner == MAKER_WIN,
        "naive(5,1)=MakerWin": naive_solve(5, 1) == MAKER_WIN,
    }
    table = {n: exact_threshold(n) for n in range(3, 13)}
    facts["q* n=3..12 matches frozen table"] = all(table[n] == golden[n] for n in table)
    ok = all(facts.values())
    report("criterion 2 small-board facts", ok, f"q*={table}; " + ", ".join(f"{k}:{v}" for k, v in facts.items()))
    assert ok


# 3 ---------------------------------------------------------------------------


def test_c3_bias_monotonicity(report):
    bad = []
    checked = 0
    for n in range(1, 13):
        prev = None
        for q in range(1, n + 2):
            w = solve(n, q).winner
            checked += 1
            if prev == BREAKER_WIN and w != BREAKER_WIN:
                bad.append((n, q))
            prev = w
    report("criterion 3 bias monotonicity", not bad, f"{checked} (n, q) pairs with n <= 12, violations {bad}")
    assert not bad


# 4 ---------------------------------------------------------------------------


def test_c4_block_all_guarantee(report):
    rows = []
    ok = True
    for n in (10**2, 10**3, 10**4, 10**5):
        q = isqrt_ceil(3 * n)
        for maker in MAKERS:
            tr = play_game(GameConfig(n, q, maker, "block-all"))
            good = tr.winner == "breaker" and tr.violations == 0 and replay(tr).valid
            ok &= good
            rows.append(f"n={n} q={q} {maker}:{tr.winner}/{tr.violations}")
    report("criterion 4 block-all at ceil(sqrt(3n))", ok, "; ".join(rows))
    assert ok


# 5 ---------------------------------------------------------------------------


def capacity_failures(tr: Transcript) -> list[int]:
    """Rounds after t* where 3*m_side(t) + 2*m2(t*) > q, recomputed from the moves alone."""
    cfg = tr.config
    thirds = IntervalScheme.breaker_thirds(cfg.n)
    tally = [0, 0, 0]
    m2_star = None
    bad = []
    for turn in tr.turns:
        side = thirds.index_of(turn.maker_move)
        tally[side] += 1
        if m2_star is not None and side != 1 and 3 * tally[side] + 2 * m2_star > cfg.q:
            bad.append(turn.round)
        if turn.round == tr.t_star:
            m2_star = tally[1]
    return bad


def test_c5_three_interval_guarantee(report):
    ns = (10**3, 10**4, 10**5, 10**6)
    records: list[ExperimentRecord] = []
    found = None
    notes = []
    for C in range(0, 11):
        all_breaker = True
        claim_ok = True
        for n in ns:
            q = isqrt_ceil(2 * n) + C
            for maker in MAKERS:
                tr = play_game(GameConfig(n, q, maker, "three-interval"))
                records.append(ExperimentRecord.from_transcript(tr))
                all_breaker &= tr.winner == "breaker"
                t_ok = tr.t_star is not None and tr.t_star <= -(-q // 3)
                cap_events = [e for e in tr.events() if isinstance(e, GuaranteeViolated) and e.check == "capacity"]
                cap_bad = capacity_failures(tr)
                claim_ok &= t_ok and not cap_events and not cap_bad
                notes.append(f"C={C} n={n} {maker}: {tr.winner}, t*={tr.t_star}/{-(-q // 3)}, capacity fails={len(cap_bad)}")
        if all_breaker:
            found = (C, claim_ok)
            break
    cal = calibrate(records)
    ok = found is not None and found[1] and cal.C_cal == found[0] and cal.C_cal <= 10
    report(
        "criterion 5 three-interval at ceil(sqrt(2n)) + C",
        ok,
        f"C_cal={cal.C_cal}, t* and capacity checks held={found and found[1]}; " + "; ".join(notes),
    )
    assert ok


# 6 ---------------------------------------------------------------------------
# Desk-scale substitute for the Maker lower bound, which is asymptotic and
# holds against every Breaker.


def _c6_games():
    games = {}
    for n in (10**4, 10**5, 10**6):
        q = math.floor(0.9 * evaluate_bound(BoundKind.PAPER_LOWER, n))
        for breaker in BREAKERS:
            games[(n, breaker)] = (q, play_game(GameConfig(n, q, "mid-third", breaker)))
    return games


@pytest.fixture(scope="module")
def c6_games():
    return _c6_games()


def test_c6_mid_third_wins(c6_games, report):
    rows, ok = [], True
    for (n, breaker), (q, tr) in c6_games.items():
        pivot = tr.pivot
        good = tr.winner == "maker" and replay(tr).valid
        if pivot is not None:
            good &= pivot.strength > q
        ok &= good
        where = f"pivot strength {pivot.strength} > q" if pivot else f"won in opening, round {tr.rounds_played}"
        rows.append(f"n={n} q={q} vs {breaker}: {tr.winner} ({where})")
    report("criterion 6 mid-third beats every Breaker; pivot strength > q whenever reached", ok, "; ".join(rows))
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="against the random Breaker the opening itself completes a 3-AP in round 3, so no pivot phase happens",
)
def test_c6_pivot_reported_in_every_game(c6_games, report):
    missing = [(n, b) for (n, b), (_, tr) in c6_games.items() if tr.pivot is None]
    report("criterion 6 (literal) a pivot with strength > q in every game", not missing, f"no pivot phase in {missing}")
    assert not missing


# 7 ---------------------------------------------------------------------------


def test_c7_arithmetic_claims(report):
    results = [check_claims(500), check_pair_bounds(500), check_counting(10_000)]
    ok = all(r.passed for r in results)
    report("criterion 7 arithmetic claim suites", ok, " | ".join(r.line() for r in results))
    assert ok


# 8 ---------------------------------------------------------------------------


def test_c8_analytic_profile(report):
    r = check_profile(points=10_000, h=1e-6, tol=1e-9)
    report("criterion 8 analytic profile", r.passed, r.detail)
    assert r.passed


def test_bound_ordering(report):
    ratio = 2 * (3 + 1.5 * math.sqrt(3))
    bad = []
    for n in list(range(12, 20_000)) + [10**5, 10**6, 10**9]:
        kl, pl, pu, ku = (evaluate_bound(k, n) for k in (BoundKind.KRSS_LOWER, BoundKind.PAPER_LOWER, BoundKind.PAPER_UPPER, BoundKind.KRSS_UPPER))
        if not (kl < pl < pu <= ku) or abs((pu / pl) ** 2 - ratio) > 1e-6:
            bad.append(n)
    report("bound ordering and squared ratio 2(3+1.5*sqrt3)", not bad, f"n in [12, 20000) and 1e5, 1e6, 1e9; failures {bad[:5]}")
    assert not bad


# 9 ---------------------------------------------------------------------------


def test_c9_determinism(report, tmp_path):
    problems = []
    for maker in MAKERS:
        for breaker in BREAKERS:
            for free in ("lowest", "random"):
                cfg = GameConfig(3000, 25, maker, breaker, seed=17, free_moves=free)
                text = play_game(cfg).to_json()
                back = Transcript.from_json(text)
                res = replay(back)
                if back.to_json() != text or not res.valid or play_game(cfg).to_json() != text:
                    problems.append((maker, breaker, free))
    plan = SweepPlan(
        [500, 3000, 20_000],
        ["krss-upper", "paper-upper+0..1", "paper-lower*0.9"],
        [(m, b) for m in MAKERS for b in BREAKERS],
        [1, 2],
        free_moves="random",
    )
    one, many = tmp_path / "one.csv", tmp_path / "many.csv"
    sweep(plan, one, workers=1)
    sweep(plan, many, workers=4)
    same = one.read_bytes() == many.read_bytes()
    ok = not problems and same
    report(
        "criterion 9 determinism",
        ok,
        f"18 transcripts byte-identical on replay (problems {problems}); {len(plan.configs())}-game sweep CSV identical for 1 and 4 workers: {same}",
    )
    assert ok
