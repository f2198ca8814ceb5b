"""Self-checks runnable from the library, the test suite, or ``apgame verify``.

Each suite returns a :class:`CheckResult`; nothing here raises on a failed
property, so a caller can report every suite in one pass.
"""

from __future__ import annotations

import math
import random
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .board import (
    SCHUR,
    THREE_AP,
    Family,
    GameConfig,
    GameState,
    IntervalScheme,
    ap_count,
    completions,
    enumerate_winning_sets,
)
from .lab import BoundKind, SweepPlan, evaluate_bound, f_profile, sweep
from .referee import Transcript, play_game, replay
from .solver import BREAKER_WIN, golden_thresholds, naive_solve, solve
from .strategies import MidThirdMaker, make_breaker


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.1f}s)"


# ---------------------------------------------------------------------------
# Pair-completion bounds
# ---------------------------------------------------------------------------


def max_pair_completions(family: Family, n: int) -> int:
    """Largest ``|completions(family, a, b, n)|`` over all pairs ``a < b``."""
    best = 0
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            c = len(completions(family, a, b, n))
            if c > best:
                best = c
    return best


def max_pair_multiplicity(family: Family, n: int) -> int:
    """Same quantity computed from the enumerated winning sets instead."""
    sets = enumerate_winning_sets(family, n)
    if not sets:
        return 0
    arr = np.asarray(sets, dtype=np.int64)
    codes = np.concatenate([arr[:, i] * (n + 1) + arr[:, j] for i, j in ((0, 1), (0, 2), (1, 2))])
    return int(np.unique(codes, return_counts=True)[1].max())


def check_pair_bounds(n_max: int = 500, cross_n: tuple[int, ...] = (*range(3, 61), 250, 500)) -> CheckResult:
    t0 = time.perf_counter()
    worst = {}
    for family, cap in ((THREE_AP, 3), (SCHUR, 2)):
        w = max(max_pair_completions(family, n) for n in range(1, n_max + 1))
        worst[str(family)] = (w, cap)
    mismatch = [
        (str(f), n)
        for f in (THREE_AP, SCHUR)
        for n in cross_n
        if n <= n_max and max_pair_completions(f, n) != max_pair_multiplicity(f, n)
    ]
    ok = all(w <= cap for w, cap in worst.values()) and not mismatch
    detail = ", ".join(f"{k} max {w} (cap {c})" for k, (w, c) in worst.items())
    if mismatch:
        detail += f"; enumeration disagrees at {mismatch[:5]}"
    return CheckResult("pair-bounds", ok, detail + f", n <= {n_max}", time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Geometry of the three-interval Breaker
# ---------------------------------------------------------------------------


def _candidates(m: np.ndarray, mp: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """(value, is_integer) for the three completions of ``{m, m'}``."""
    s = m + mp
    return [(s // 2, s % 2 == 0), (2 * mp - m, np.ones_like(s, dtype=bool)), (2 * m - mp, np.ones_like(s, dtype=bool))]


def _outer_hits(n: int, m: np.ndarray, mp: np.ndarray) -> np.ndarray:
    (l1, h1), _, (l3, h3) = IntervalScheme.breaker_thirds(n).bounds
    hits = np.zeros(m.shape, dtype=np.int64)
    for v, ok in _candidates(m, mp):
        outer = ((v >= l1) & (v <= h1)) | ((v >= l3) & (v <= h3))
        hits += ok & outer
    return hits


def middle_pair_worst(n: int) -> int:
    """Max number of completions in ``I1 u I3`` for a Maker pair with one point in ``I2``."""
    (l1, h1), (l2, h2), (l3, h3) = IntervalScheme.breaker_thirds(n).bounds
    worst = 0
    mid = np.arange(l2, h2 + 1, dtype=np.int64)
    for lo, hi in ((l1, h1), (l3, h3)):
        side = np.arange(lo, hi + 1, dtype=np.int64)
        if side.size and mid.size:
            m, mp = np.meshgrid(side, mid, indexing="ij")
            worst = max(worst, int(_outer_hits(n, m, mp).max()))
    return worst


def cross_pair_worst(n: int) -> int:
    """Max number of completions in ``I1 u I3`` for a pair with one point in each of ``I1``, ``I3``."""
    (l1, h1), _, (l3, h3) = IntervalScheme.breaker_thirds(n).bounds
    a = np.arange(l1, h1 + 1, dtype=np.int64)
    b = np.arange(l3, h3 + 1, dtype=np.int64)
    if not (a.size and b.size):
        return 0
    m, mp = np.meshgrid(a, b, indexing="ij")
    return int(_outer_hits(n, m, mp).max())


def check_claims(n_max: int = 500) -> CheckResult:
    """Middle-pair (at most 2 outer completions) and cross-pair (none) geometry."""
    t0 = time.perf_counter()
    bad1 = [n for n in range(3, n_max + 1) if middle_pair_worst(n) > 2]
    bad2 = [n for n in range(3, n_max + 1) if cross_pair_worst(n) > 0]
    ok = not bad1 and not bad2
    detail = f"n in [3, {n_max}]"
    if bad1:
        detail += f"; middle-pair bound fails at n={bad1[:5]}"
    if bad2:
        detail += f"; cross-pair bound fails at n={bad2[:5]}"
    return CheckResult("claims", ok, detail, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Counting invariant after the Maker opening
# ---------------------------------------------------------------------------


def reflection_counts(n: int, makers: np.ndarray, breaker: np.ndarray, ell: int) -> tuple[int, int]:
    """``(sum_{i in J3 minus B} |A_i n B|, max_i |A_i|)`` with ``J3 = (ell, floor(2n/3)]``."""
    idx = np.arange(ell + 1, 2 * n // 3 + 1, dtype=np.int64)
    if idx.size:
        idx = idx[~breaker[idx]]
    if not idx.size or not makers.size:
        return 0, 0
    i = idx[:, None]
    y = makers[None, :]
    vals = np.concatenate([2 * y - i, 2 * i - y], axis=1)
    vals = np.where((vals >= 1) & (vals <= n), vals, 0)
    vals.sort(axis=1)
    first = np.ones_like(vals, dtype=bool)
    first[:, 1:] = vals[:, 1:] != vals[:, :-1]
    distinct = first & (vals > 0)
    hit = distinct & breaker[vals]
    return int(hit.sum()), int(distinct.sum(axis=1).max())


def opening_playout(n: int, q: int, breaker_id: str, seed: int, free_moves: str) -> tuple[GameState, int] | None:
    """Play the Maker opening against ``breaker_id``; ``None`` if the game ends first."""
    cfg = GameConfig(n, q, "mid-third", breaker_id, THREE_AP, seed, free_moves=free_moves)
    state = GameState(n, q)
    maker = MidThirdMaker(cfg)
    breaker = make_breaker(cfg)
    mem = maker.memory
    while mem.opening_moves < mem.opening_budget:
        before = mem.opening_moves
        decision = maker.choose(state)
        if mem.opening_moves == before:
            break  # opening region exhausted; the move is a pivot-phase move
        state.apply_maker_move(decision.position)
        if state.winning_set is not None or state.unclaimed_count == 0:
            return None
        state.apply_breaker_moves(breaker.choose(state, decision.position).moves)
    if not state.maker_points:
        return None
    return state, max(state.maker_points)


def check_counting(playouts: int = 10_000, seed: int = 2024) -> CheckResult:
    """Double-counting bound on reflection hits, over randomized openings."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    checked = skipped = 0
    failures = []
    while checked < playouts:
        n = rng.randint(12, 400)
        q = rng.randint(1, max(1, math.isqrt(n)))
        breaker_id = rng.choice(("random", "block-all", "three-interval"))
        free = rng.choice(("lowest", "random"))
        res = opening_playout(n, q, breaker_id, rng.getrandbits(32), free)
        if res is None:
            skipped += 1
            continue
        state, ell = res
        makers = np.asarray(state.maker_points, dtype=np.int64)
        total, widest = reflection_counts(n, makers, state.breaker, ell)
        nb = len(state.breaker_points)
        checked += 1
        if total > nb * makers.size or widest > 2 * makers.size:
            failures.append((n, q, breaker_id, total, nb * makers.size))
    ok = not failures and checked > 0
    detail = f"{checked} openings checked, {skipped} ended before the opening finished"
    if failures:
        detail += f"; violated in {len(failures)}: {failures[:3]}"
    return CheckResult("counting", ok, detail, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Solver oracle and monotonicity
# ---------------------------------------------------------------------------


def check_oracle(n_max: int = 8, q_max: int = 3) -> CheckResult:
    t0 = time.perf_counter()
    bad = []
    cases = 0
    for family in (THREE_AP, SCHUR):
        for n in range(1, n_max + 1):
            for q in range(1, q_max + 1):
                cases += 1
                if solve(n, q, family).winner != naive_solve(n, q, family):
                    bad.append((str(family), n, q))
    detail = f"{cases} cases, {len(bad)} disagreements"
    if bad:
        detail += f": {bad[:5]}"
    return CheckResult("oracle", not bad, detail, time.perf_counter() - t0)


def check_monotone(n_max: int = 12) -> CheckResult:
    """Breaker winning at ``q`` keeps winning at ``q + 1``, plus the golden table."""
    t0 = time.perf_counter()
    golden = golden_thresholds(THREE_AP)
    bad = []
    for n in range(3, n_max + 1):
        outcomes = [solve(n, q).winner for q in range(1, n)]
        first = outcomes.index(BREAKER_WIN)
        if any(w != BREAKER_WIN for w in outcomes[first:]):
            bad.append((n, "non-monotone"))
        if first + 1 != golden[n]:
            bad.append((n, f"q*={first + 1} vs golden {golden[n]}"))
    detail = f"n in [3, {n_max}], all q < n"
    if bad:
        detail += f"; problems: {bad}"
    return CheckResult("monotone", not bad, detail, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Analytic profile and bound ordering
# ---------------------------------------------------------------------------


def check_profile(points: int = 10_000, h: float = 1e-6, tol: float = 1e-9) -> CheckResult:
    t0 = time.perf_counter()
    f0_err = abs(f_profile(0.0) - math.sqrt(2))
    xs = [k / (points - 1) for k in range(points)]
    vals = [f_profile(x) for x in xs]
    rises = max(b - a for a, b in zip(vals, vals[1:]))
    derivs = [(f_profile(min(1.0, x + h)) - f_profile(max(0.0, x - h))) / (min(1.0, x + h) - max(0.0, x - h)) for x in xs]
    worst_d = max(derivs)
    ok = f0_err <= 1e-12 and rises <= tol and worst_d <= tol
    detail = f"|f(0)-sqrt2|={f0_err:.1e}, max grid rise={rises:.1e}, max slope={worst_d:.1e}"
    return CheckResult("profile", ok, detail, time.perf_counter() - t0)


def check_bounds(n_max: int = 100_000) -> CheckResult:
    t0 = time.perf_counter()
    target = 2 * (3 + 1.5 * math.sqrt(3))
    bad = []
    for n in list(range(12, 5000)) + [10**4, 10**5, n_max, 10**6]:
        kl = evaluate_bound(BoundKind.KRSS_LOWER, n)
        pl = evaluate_bound(BoundKind.PAPER_LOWER, n)
        pu = evaluate_bound(BoundKind.PAPER_UPPER, n)
        ku = evaluate_bound(BoundKind.KRSS_UPPER, n)
        if not (kl < pl < pu <= ku):
            bad.append((n, "order"))
        if abs((pu / pl) ** 2 - target) > 1e-6:
            bad.append((n, "ratio"))
    detail = f"ordering and squared-ratio {target:.6f} checked"
    if bad:
        detail += f"; failures {bad[:5]}"
    return CheckResult("bounds", not bad, detail, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Determinism
# ---------------------------------------------------------------------------


def check_determinism(workers: int = 2) -> CheckResult:
    t0 = time.perf_counter()
    problems = []
    for maker in ("mid-third", "greedy", "random"):
        for breaker in ("block-all", "three-interval", "random"):
            cfg = GameConfig(2000, 20, maker, breaker, seed=11, free_moves="random")
            a = play_game(cfg).to_json()
            b = play_game(cfg).to_json()
            back = Transcript.from_json(a)
            if a != b or back.to_json() != a or not replay(back).valid:
                problems.append((maker, breaker))
    plan = SweepPlan([300, 1000], ["krss-upper", "paper-lower*0.9"], [("mid-third", "three-interval"), ("random", "random")], [1, 2])
    with tempfile.TemporaryDirectory() as tmp:
        one, many = Path(tmp, "one.csv"), Path(tmp, "many.csv")
        sweep(plan, one, workers=1)
        sweep(plan, many, workers=workers)
        same_csv = one.read_bytes() == many.read_bytes()
    if not same_csv:
        problems.append("sweep csv")
    detail = f"9 transcripts replayed; sweep csv identical across 1 and {workers} workers: {same_csv}"
    if problems:
        detail += f"; problems: {problems}"
    return CheckResult("determinism", not problems, detail, time.perf_counter() - t0)


def check_enumeration(n_max: int = 500) -> CheckResult:
    t0 = time.perf_counter()
    bad = [n for n in range(1, n_max + 1) if len(enumerate_winning_sets(THREE_AP, n)) != ap_count(n)]
    return CheckResult("enumeration", not bad, f"3-AP counts for n <= {n_max}, bad={bad[:5]}", time.perf_counter() - t0)


SUITES: dict[str, Callable[[], CheckResult]] = {
    "claims": check_claims,
    "pairs": check_pair_bounds,
    "counting": check_counting,
    "oracle": check_oracle,
    "monotone": check_monotone,
    "profile": check_profile,
    "bounds": check_bounds,
    "enumeration": check_enumeration,
    "determinism": check_determinism,
}


def run_suites(names: list[str] | None = None) -> list[CheckResult]:
    names = names or list(SUITES)
    return [SUITES[name]() for name in names]
