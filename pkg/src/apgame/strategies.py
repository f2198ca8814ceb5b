"""Maker and Breaker strategies behind a single decision interface.

Maker strategies expose ``choose(state) -> StrategyDecision``; Breaker
strategies expose ``choose(state, last_maker) -> StrategyDecision``. The
module-level functions hold the actual decision rules and can be called on
their own with an explicit memory object.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .board import (
    THREE_AP,
    GameConfig,
    GameState,
    RoundStats,
)
from .errors import ConfigError, NoLegalMove
from .events import Event, GuaranteeViolated, ImmediateWinTaken, MiddleFilled, PivotFound
from .scoring import GreedyScorer, new_threat_count

OPENING_X = 0.5 + 1 / (2 * math.sqrt(3))


def opening_budget(q: int) -> int:
    """Number of opening rounds, ``ceil(x q)``."""
    return math.ceil(OPENING_X * q)


@dataclass
class StrategyDecision:
    """Moves chosen for one half-turn.

    For Breaker the first ``n_forced`` moves block threats and the rest are
    free moves. A Maker decision holds a single move.
    """

    moves: list[int]
    n_forced: int = 0
    events: list[Event] = field(default_factory=list)

    @property
    def forced(self) -> list[int]:
        return self.moves[: self.n_forced]

    @property
    def free(self) -> list[int]:
        return self.moves[self.n_forced :]

    @property
    def position(self) -> int:
        return self.moves[0]


# ---------------------------------------------------------------------------
# Cell pickers
# ---------------------------------------------------------------------------


def _lowest_unclaimed(
    state: GameState, lo: int, hi: int, k: int, exclude: set[int], cursors: dict | None = None
) -> list[int]:
    """Up to ``k`` smallest unclaimed cells of ``[lo, hi]`` outside ``exclude``."""
    if k <= 0 or lo > hi:
        return []
    maker, breaker = state.maker, state.breaker
    start = lo
    if cursors is not None:
        start = max(lo, cursors.get(lo, lo))
        while start <= hi and (maker[start] or breaker[start]):
            start += 1
        cursors[lo] = start
    picks: list[int] = []
    pos = start
    while pos <= hi and len(picks) < k:
        if not (maker[pos] or breaker[pos]) and pos not in exclude:
            picks.append(pos)
        pos += 1
    return picks


def _sample_unclaimed(
    state: GameState, rng: random.Random, lo: int, hi: int, k: int, exclude: Iterable[int] = ()
) -> list[int]:
    """``k`` distinct uniformly random unclaimed cells of ``[lo, hi]`` outside ``exclude``."""
    if k <= 0 or lo > hi:
        return []
    exclude = set(exclude)
    free = ~(state.maker[lo : hi + 1] | state.breaker[lo : hi + 1])
    avail = int(free.sum()) - sum(1 for e in exclude if lo <= e <= hi and state.is_unclaimed(e))
    k = min(k, avail)
    if avail >= 4 * k and hi - lo + 1 <= 8 * avail:
        picks: list[int] = []
        taken = set(exclude)
        while len(picks) < k:
            pos = rng.randint(lo, hi)
            if pos not in taken and not (state.maker[pos] or state.breaker[pos]):
                taken.add(pos)
                picks.append(pos)
        return picks
    pool = [lo + int(i) for i in np.flatnonzero(free) if lo + int(i) not in exclude]
    return rng.sample(pool, k)


# ---------------------------------------------------------------------------
# Maker: opening in the middle third, pivot, endgame
# ---------------------------------------------------------------------------


@dataclass
class PivotCandidate:
    """A candidate point ``i`` and its reflection set ``{2y - i, 2i - y : y in M}``."""

    i: int
    reflections: frozenset[int]
    open: frozenset[int]
    strength: int
    immediate_win: bool = False


@dataclass
class MakerMemory:
    q: int
    phase: str = "opening"
    x: float = OPENING_X
    opening_budget: int = 0
    opening_moves: int = 0
    ell: int = 0
    pivot: PivotCandidate | None = None
    cursor: int = 0
    scorer: GreedyScorer | None = None

    def __post_init__(self) -> None:
        self.opening_budget = opening_budget(self.q)


def reflection_set(n: int, makers: Iterable[int], i: int) -> set[int]:
    out = set()
    for y in makers:
        for z in (2 * y - i, 2 * i - y):
            if 1 <= z <= n:
                out.add(z)
    return out


def find_pivot(state: GameState, config: GameConfig | None = None) -> PivotCandidate | None:
    """Best pivot among unclaimed ``i`` with ``max(M) < i <= floor(2n/3)``.

    A candidate whose reflection set already meets ``M`` is an immediate win
    and is preferred (smallest such ``i``). Otherwise the candidate with the
    most unblocked reflections wins, smallest ``i`` on ties.
    """
    if not state.maker_points:
        return None
    n = state.n
    makers = np.asarray(state.maker_points, dtype=np.int64)
    ell = int(makers.max())
    idx = np.arange(ell + 1, 2 * n // 3 + 1, dtype=np.int64)
    idx = idx[~(state.breaker[idx] | state.maker[idx])] if idx.size else idx
    if not idx.size:
        return None
    maker, breaker = state.maker, state.breaker
    strength = np.empty(idx.size, dtype=np.int64)
    hits = np.zeros(idx.size, dtype=bool)
    step = max(1, (1 << 22) // makers.size)
    for s in range(0, idx.size, step):
        i = idx[s : s + step, None]
        y = makers[None, :]
        total = np.zeros(i.shape[0], dtype=np.int64)
        left_open = None
        for vals in (2 * y - i, 2 * i - y):
            ok = (vals >= 1) & (vals <= n)
            safe = np.where(ok, vals, 0)
            open_ = ok & ~breaker[safe]
            total += open_.sum(axis=1)
            hits[s : s + step] |= (ok & maker[safe]).any(axis=1)
            if left_open is None:
                left_open = open_
        # 2y - i == 2i - y' exactly when y' = 3i - 2y; count each shared value once
        partner = 3 * i - 2 * y
        pok = (partner >= 1) & (partner <= n)
        shared = pok & maker[np.where(pok, partner, 0)] & left_open
        strength[s : s + step] = total - shared.sum(axis=1)
    if hits.any():
        j = int(np.flatnonzero(hits)[0])
    else:
        j = int(np.argmax(strength))
    i = int(idx[j])
    refl = reflection_set(n, state.maker_points, i)
    open_set = frozenset(z for z in refl if not breaker[z])
    return PivotCandidate(i, frozenset(refl), open_set, len(open_set), bool(hits[j]))


def _smallest_threat(state: GameState) -> int | None:
    return min(state.threat_set) if state.threat_set else None


def maker_greedy(state: GameState, scorer: GreedyScorer | None = None) -> tuple[int, bool]:
    """Greedy Maker move and whether it wins on the spot.

    An open threat is taken at once (smallest first). Otherwise the cell
    creating the most new threats is played, smallest on ties.
    """
    if state.unclaimed_count == 0:
        raise NoLegalMove("board is full")
    win = _smallest_threat(state)
    if win is not None:
        return win, True
    if state.family == THREE_AP:
        if scorer is None:
            scorer = GreedyScorer(state)
        return scorer.best(state)[0], False
    best, best_score = -1, -1
    for z in np.flatnonzero(state.unclaimed_mask()):
        s = new_threat_count(state, int(z))
        if s > best_score:
            best, best_score = int(z), s
    return best, False


def maker_random(state: GameState, rng: random.Random) -> int:
    if state.unclaimed_count == 0:
        raise NoLegalMove("board is full")
    return _sample_unclaimed(state, rng, 1, state.n, 1)[0]


def maker_mid_third_move(state: GameState, memory: MakerMemory, config: GameConfig) -> StrategyDecision:
    """The middle-third opening, followed by a pivot and its completion."""
    if state.unclaimed_count == 0:
        raise NoLegalMove("board is full")
    n, q = state.n, state.q
    rnd = state.round + 1
    if config.opportunistic_win and state.threat_set:
        return StrategyDecision([_smallest_threat(state)], events=[ImmediateWinTaken(rnd)])

    if memory.phase == "opening":
        if memory.opening_moves < memory.opening_budget:
            floor = -(-n // 3) + 1
            pos = max(memory.cursor, floor)
            while pos <= n and not state.is_unclaimed(pos):
                pos += 1
            memory.cursor = pos
            if pos <= n:
                memory.opening_moves += 1
                memory.ell = max(memory.ell, pos)
                return StrategyDecision([pos])
        memory.phase = "pivot"

    events: list[Event] = []
    if memory.phase == "pivot":
        cand = find_pivot(state, config)
        memory.pivot = cand
        if cand is not None:
            events.append(PivotFound(cand.i, cand.strength))
            if cand.immediate_win:
                memory.phase = "fallback"
                return StrategyDecision([cand.i], events=[*events, ImmediateWinTaken(rnd)])
            if cand.strength > q:
                memory.phase = "endgame"
                return StrategyDecision([cand.i], events=events)
        memory.phase = "fallback"

    if memory.phase == "endgame":
        survivors = [z for z in memory.pivot.open if state.is_unclaimed(z)]
        memory.phase = "fallback"
        if survivors:
            return StrategyDecision([min(survivors)], events=[ImmediateWinTaken(rnd)])

    if memory.scorer is None and state.family == THREE_AP:
        memory.scorer = GreedyScorer(state)
    pos, wins = maker_greedy(state, memory.scorer)
    if wins:
        events.append(ImmediateWinTaken(rnd))
    return StrategyDecision([pos], events=events)


# ---------------------------------------------------------------------------
# Breaker
# ---------------------------------------------------------------------------


@dataclass
class BreakerMemory:
    phase: str = "filling-middle"
    t_star: int | None = None
    m2_at_tstar: int = 0
    target_interval: int | None = None
    stats: list[RoundStats] = field(default_factory=list)
    cursors: dict = field(default_factory=dict)


def _forced(state: GameState, rnd: int) -> tuple[list[int], list[Event], int]:
    """Threats to block now, capped at the batch size, plus overflow events."""
    demand = sorted(state.threat_set)
    k = min(state.q, state.unclaimed_count)
    events: list[Event] = []
    if len(demand) > k:
        events.append(GuaranteeViolated(rnd, len(demand) - k, "overflow"))
    return demand[:k], events, len(demand)


def _round_stats(state: GameState, batch: list[int], demand: int) -> RoundStats:
    """Tallies as they will stand once ``batch`` is applied."""
    b = list(state.breaker_tally)
    for p in batch:
        b[state.third_of(p)] += 1
    return RoundStats(state.round + 1, *state.maker_tally, *b, demand)


def _fill(
    state: GameState,
    regions: list[tuple[int, int]],
    k: int,
    taken: list[int],
    memory: BreakerMemory,
    config: GameConfig,
    rng: random.Random | None,
) -> list[int]:
    """Place ``k`` free moves, trying each region in order."""
    picks: list[int] = []
    exclude = set(taken)
    for lo, hi in regions:
        need = k - len(picks)
        if need <= 0:
            break
        if config.free_moves == "random" and rng is not None:
            got = _sample_unclaimed(state, rng, lo, hi, need, exclude)
        else:
            got = _lowest_unclaimed(state, lo, hi, need, exclude, memory.cursors)
        picks.extend(got)
        exclude.update(got)
    return picks


def breaker_block_all_moves(
    state: GameState,
    last_maker: int,
    memory: BreakerMemory,
    config: GameConfig,
    rng: random.Random | None = None,
) -> StrategyDecision:
    """Block every open threat, then claim the smallest free cells."""
    rnd = state.round + 1
    forced, events, demand = _forced(state, rnd)
    k = min(state.q, state.unclaimed_count)
    free = _fill(state, [(1, state.n)], k - len(forced), forced, memory, config, rng)
    memory.stats.append(_round_stats(state, forced + free, demand))
    return StrategyDecision(forced + free, len(forced), events)


def breaker_three_interval_moves(
    state: GameState,
    last_maker: int,
    memory: BreakerMemory,
    config: GameConfig,
    rng: random.Random | None = None,
) -> StrategyDecision:
    """Block threats; spend free moves on the middle third, later on Maker's side."""
    rnd = state.round + 1
    q = state.q
    forced, events, demand = _forced(state, rnd)
    k = min(q, state.unclaimed_count)
    thirds = state.thirds
    if memory.phase == "post-middle":
        side = state.third_of(last_maker)
        memory.target_interval = side
        if side != 1:
            budget = 3 * state.maker_tally[side] + 2 * memory.m2_at_tstar
            if budget > q:
                events.append(GuaranteeViolated(rnd, budget - q, "capacity"))
        target = thirds.bounds[side]
    else:
        memory.target_interval = 1
        target = thirds.bounds[1]
    free = _fill(state, [target, (1, state.n)], k - len(forced), forced, memory, config, rng)
    moves = forced + free

    if memory.phase == "filling-middle":
        lo, hi = thirds.bounds[1]
        claimed = state.maker_tally[1] + state.breaker_tally[1] + sum(1 for p in moves if lo <= p <= hi)
        if claimed == hi - lo + 1:
            memory.phase = "post-middle"
            memory.t_star = rnd
            memory.m2_at_tstar = state.maker_tally[1]
            events.append(MiddleFilled(rnd))
    memory.stats.append(_round_stats(state, moves, demand))
    return StrategyDecision(moves, len(forced), events)


def breaker_random(state: GameState, rng: random.Random) -> list[int]:
    k = min(state.q, state.unclaimed_count)
    return _sample_unclaimed(state, rng, 1, state.n, k)


# ---------------------------------------------------------------------------
# Strategy objects
# ---------------------------------------------------------------------------


def _rng(config: GameConfig, side: str) -> random.Random:
    return random.Random(f"{config.seed}/{side}")


class MidThirdMaker:
    name = "mid-third"

    def __init__(self, config: GameConfig) -> None:
        if config.family.canonical() != THREE_AP:
            raise ConfigError("mid-third is defined for the 3-AP family only")
        self.config = config
        self.memory = MakerMemory(config.q)

    def choose(self, state: GameState) -> StrategyDecision:
        return maker_mid_third_move(state, self.memory, self.config)


class GreedyMaker:
    name = "greedy"

    def __init__(self, config: GameConfig) -> None:
        if not config.family.pairwise:
            raise ConfigError("greedy needs a size-3 family")
        self.scorer: GreedyScorer | None = None

    def choose(self, state: GameState) -> StrategyDecision:
        if self.scorer is None and state.family == THREE_AP:
            self.scorer = GreedyScorer(state)
        pos, wins = maker_greedy(state, self.scorer)
        return StrategyDecision([pos], events=[ImmediateWinTaken(state.round + 1)] if wins else [])


class RandomMaker:
    name = "random"

    def __init__(self, config: GameConfig) -> None:
        self.rng = _rng(config, "maker")

    def choose(self, state: GameState) -> StrategyDecision:
        return StrategyDecision([maker_random(state, self.rng)])


class BlockAllBreaker:
    name = "block-all"

    def __init__(self, config: GameConfig) -> None:
        if not config.family.pairwise:
            raise ConfigError("block-all needs a size-3 family")
        self.config = config
        self.memory = BreakerMemory()
        self.rng = _rng(config, "breaker")

    def choose(self, state: GameState, last_maker: int) -> StrategyDecision:
        return breaker_block_all_moves(state, last_maker, self.memory, self.config, self.rng)


class ThreeIntervalBreaker(BlockAllBreaker):
    name = "three-interval"

    def choose(self, state: GameState, last_maker: int) -> StrategyDecision:
        return breaker_three_interval_moves(state, last_maker, self.memory, self.config, self.rng)


class RandomBreaker:
    name = "random"

    def __init__(self, config: GameConfig) -> None:
        self.rng = _rng(config, "breaker")

    def choose(self, state: GameState, last_maker: int) -> StrategyDecision:
        return StrategyDecision(breaker_random(state, self.rng))


MAKERS = {cls.name: cls for cls in (MidThirdMaker, GreedyMaker, RandomMaker)}
BREAKERS = {cls.name: cls for cls in (BlockAllBreaker, ThreeIntervalBreaker, RandomBreaker)}


def make_maker(config: GameConfig):
    try:
        return MAKERS[config.maker](config)
    except KeyError:
        raise ConfigError(f"no built-in maker strategy {config.maker!r}") from None


def make_breaker(config: GameConfig):
    try:
        return BREAKERS[config.breaker](config)
    except KeyError:
        raise ConfigError(f"no built-in breaker strategy {config.breaker!r}") from None
