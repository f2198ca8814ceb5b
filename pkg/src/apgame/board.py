"""Board representation, winning-set families, threats and win detection.

Positions are the integers ``1..n``. Occupancy is held as two boolean masks
(one per player) indexed by position, so index 0 is always unused.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    ConfigError,
    OccupiedCell,
    OutOfRange,
    UnsupportedQuery,
    WrongBatchSize,
)

_KINDS = ("3ap", "kap", "cyclic", "schur")


@dataclass(frozen=True)
class Family:
    """A winning-set family: ``3ap``, ``kap`` (with ``k``), ``cyclic`` or ``schur``."""

    kind: str
    k: int = 3

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown family kind {self.kind!r}")
        if self.kind == "kap" and self.k < 3:
            raise ConfigError("k-AP families need k >= 3")
        if self.kind != "kap" and self.k != 3:
            raise ConfigError(f"{self.kind} winning sets always have size 3")

    @property
    def pairwise(self) -> bool:
        """True when winning sets have size 3, so pair completions exist."""
        return self.k == 3

    @property
    def mirror_symmetric(self) -> bool:
        """Invariant under the relabelling ``i -> n + 1 - i``."""
        return self.kind in ("3ap", "kap")

    def canonical(self) -> Family:
        return THREE_AP if self.kind == "kap" and self.k == 3 else self

    def __str__(self) -> str:
        return f"kap:{self.k}" if self.kind == "kap" else self.kind


THREE_AP = Family("3ap")
CYCLIC_THREE_AP = Family("cyclic")
SCHUR = Family("schur")


def kap(k: int) -> Family:
    return Family("kap", k)


def parse_family(text: str) -> Family:
    """Parse the CLI/CSV token: ``3ap``, ``kap:K``, ``cyclic`` or ``schur``."""
    text = text.strip().lower()
    if text.startswith("kap:"):
        try:
            k = int(text[4:])
        except ValueError:
            raise ConfigError(f"bad k in family {text!r}") from None
        return kap(k)
    if text in ("3ap", "cyclic", "schur"):
        return Family(text)
    raise ConfigError(f"unknown family {text!r} (expected 3ap, kap:K, cyclic or schur)")


class Occupancy(enum.IntEnum):
    UNCLAIMED = 0
    MAKER = 1
    BREAKER = 2


# ---------------------------------------------------------------------------
# Winning sets
# ---------------------------------------------------------------------------


def enumerate_winning_sets(family: Family, n: int) -> list[tuple[int, ...]]:
    """Every winning set on ``[n]`` exactly once, as sorted tuples in lexicographic order."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    if family.kind in ("3ap", "kap"):
        k = family.k
        sets = [
            tuple(range(a, a + (k - 1) * d + 1, d))
            for d in range(1, (n - 1) // (k - 1) + 1)
            for a in range(1, n - (k - 1) * d + 1)
        ]
    elif family.kind == "schur":
        sets = [(a, b, a + b) for a in range(1, n + 1) for b in range(a + 1, n - a + 1)]
    else:
        found = set()
        for y in range(n):
            for d in range(1, n):
                trio = {(y - d) % n, y, (y + d) % n}
                if len(trio) == 3:
                    found.add(tuple(sorted(r if r else n for r in trio)))
        sets = list(found)
    sets.sort()
    return sets


def completions(family: Family, a: int, b: int, n: int) -> set[int]:
    """Positions ``z`` such that ``{a, b, z}`` is a winning set of a size-3 family."""
    if not family.pairwise:
        raise UnsupportedQuery(f"completions are undefined for {family}")
    if a == b:
        raise ValueError("completions needs two distinct positions")
    if not (1 <= a <= n and 1 <= b <= n):
        raise OutOfRange(f"positions must lie in [1, {n}]")
    kind = family.kind
    out: set[int] = set()
    if kind in ("3ap", "kap"):
        for z in (2 * a - b, 2 * b - a):
            if 1 <= z <= n:
                out.add(z)
        if (a + b) % 2 == 0:
            out.add((a + b) // 2)
    elif kind == "schur":
        if a + b <= n:
            out.add(a + b)
        z = abs(a - b)
        if z != a and z != b:
            out.add(z)
    else:
        residues = {(2 * a - b) % n, (2 * b - a) % n}
        s = (a + b) % n
        if n % 2:
            residues.add(s * ((n + 1) // 2) % n)
        elif s % 2 == 0:
            residues.add(s // 2)
            residues.add(s // 2 + n // 2)
        out = {r if r else n for r in residues}
        out -= {a, b}
    return out


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalScheme:
    """A partition of ``[n]`` into consecutive intervals.

    ``bounds`` holds inclusive ``(lo, hi)`` pairs; an interval is empty
    when ``lo > hi``.
    """

    name: str
    n: int
    bounds: tuple[tuple[int, int], ...]

    @classmethod
    def breaker_thirds(cls, n: int) -> IntervalScheme:
        """Left/middle/right: ``[1, n//3]``, ``(n//3, ceil(2n/3)]``, ``(ceil(2n/3), n]``."""
        return cls._from_cuts("breaker-thirds", n, [n // 3, -(-2 * n // 3)])

    @classmethod
    def maker_quarters(cls, n: int, ell: int) -> IntervalScheme:
        """``[1, ceil(n/3)]``, ``(ceil(n/3), ell]``, ``(ell, floor(2n/3)]``, ``(floor(2n/3), n]``."""
        lo, hi = -(-n // 3), 2 * n // 3
        if not lo <= ell <= hi:
            raise ConfigError(f"ell={ell} must lie in [{lo}, {hi}]")
        return cls._from_cuts("maker-quarters", n, [lo, ell, hi])

    @classmethod
    def _from_cuts(cls, name: str, n: int, cuts: list[int]) -> IntervalScheme:
        edges = [0, *cuts, n]
        return cls(name, n, tuple((edges[i] + 1, edges[i + 1]) for i in range(len(edges) - 1)))

    def __len__(self) -> int:
        return len(self.bounds)

    def __iter__(self) -> Iterator[range]:
        return (range(lo, hi + 1) for lo, hi in self.bounds)

    def interval(self, index: int) -> range:
        lo, hi = self.bounds[index]
        return range(lo, hi + 1)

    def index_of(self, pos: int) -> int:
        """0-based index of the interval containing ``pos``."""
        if not 1 <= pos <= self.n:
            raise OutOfRange(pos)
        for i, (_, hi) in enumerate(self.bounds):
            if pos <= hi:
                return i
        raise AssertionError("unreachable: bounds cover [1, n]")


@dataclass(frozen=True)
class RoundStats:
    """Per-interval tallies (left/middle/right thirds) after a round."""

    round: int
    m1: int
    m2: int
    m3: int
    b1: int
    b2: int
    b3: int
    threats_created: int = 0


# ---------------------------------------------------------------------------
# Game state
# ---------------------------------------------------------------------------


class GameState:
    """Occupancy of ``[n]`` plus the bookkeeping needed by strategies.

    Threats are tracked incrementally for size-3 families: ``threat_set`` is
    always the set of unclaimed cells completing a winning set with two
    Maker points. States are mutated in place by the ``apply_*`` methods;
    use :meth:`copy` for an independent value.
    """

    def __init__(self, n: int, q: int = 1, family: Family = THREE_AP) -> None:
        if n < 1 or q < 1:
            raise ConfigError("need n >= 1 and q >= 1")
        self.n = n
        self.q = q
        self.family = family.canonical()
        self.maker = np.zeros(n + 1, dtype=bool)
        self.breaker = np.zeros(n + 1, dtype=bool)
        self.round = 0
        self.maker_points: list[int] = []
        self.breaker_points: list[int] = []
        self.threat_set: set[int] = set()
        self.winning_set: tuple[int, ...] | None = None
        self.thirds = IntervalScheme.breaker_thirds(n)
        self._cut1, self._cut2 = self.thirds.bounds[0][1], self.thirds.bounds[1][1]
        self.maker_tally = [0, 0, 0]
        self.breaker_tally = [0, 0, 0]

    def copy(self) -> GameState:
        other = GameState.__new__(GameState)
        other.__dict__.update(self.__dict__)
        other.maker = self.maker.copy()
        other.breaker = self.breaker.copy()
        other.maker_points = list(self.maker_points)
        other.breaker_points = list(self.breaker_points)
        other.threat_set = set(self.threat_set)
        other.maker_tally = list(self.maker_tally)
        other.breaker_tally = list(self.breaker_tally)
        return other

    # -- queries -----------------------------------------------------------

    @property
    def unclaimed_count(self) -> int:
        return self.n - len(self.maker_points) - len(self.breaker_points)

    def is_unclaimed(self, pos: int) -> bool:
        return 1 <= pos <= self.n and not (self.maker[pos] or self.breaker[pos])

    def cell(self, pos: int) -> Occupancy:
        if not 1 <= pos <= self.n:
            raise OutOfRange(pos)
        if self.maker[pos]:
            return Occupancy.MAKER
        return Occupancy.BREAKER if self.breaker[pos] else Occupancy.UNCLAIMED

    @property
    def cells(self) -> list[Occupancy]:
        """Occupancy of positions ``1..n`` (list index 0 is position 1)."""
        return [self.cell(p) for p in range(1, self.n + 1)]

    def unclaimed_mask(self) -> np.ndarray:
        free = ~(self.maker | self.breaker)
        free[0] = False
        return free

    def third_of(self, pos: int) -> int:
        return 0 if pos <= self._cut1 else (1 if pos <= self._cut2 else 2)

    def stats(self, threats_created: int = 0) -> RoundStats:
        return RoundStats(self.round, *self.maker_tally, *self.breaker_tally, threats_created)

    # -- moves -------------------------------------------------------------

    def _check_free(self, pos: int) -> None:
        if not isinstance(pos, (int, np.integer)) or not 1 <= pos <= self.n:
            raise OutOfRange(f"position {pos!r} is outside [1, {self.n}]")
        if self.maker[pos] or self.breaker[pos]:
            raise OccupiedCell(f"position {pos} is already claimed")

    def apply_maker_move(self, pos: int) -> GameState:
        self._check_free(pos)
        pos = int(pos)
        if self.family.pairwise:
            self.threat_set.discard(pos)
            for m in self.maker_points:
                for z in completions(self.family, pos, m, self.n):
                    if self.maker[z]:
                        if self.winning_set is None:
                            self.winning_set = tuple(sorted((pos, m, z)))
                    elif not self.breaker[z]:
                        self.threat_set.add(z)
        self.maker[pos] = True
        self.maker_points.append(pos)
        self.maker_tally[self.third_of(pos)] += 1
        if not self.family.pairwise and self.winning_set is None:
            self.winning_set = _kap_win_through(self.maker, self.n, self.family.k, pos)
        return self

    def apply_breaker_moves(self, positions: Iterable[int]) -> GameState:
        positions = [int(p) if isinstance(p, np.integer) else p for p in positions]
        expected = min(self.q, self.unclaimed_count)
        if len(set(positions)) != len(positions):
            raise WrongBatchSize("duplicate positions in Breaker batch")
        for pos in positions:
            self._check_free(pos)
        if len(positions) != expected:
            raise WrongBatchSize(f"Breaker must claim exactly {expected} cells, got {len(positions)}")
        for pos in positions:
            self.breaker[pos] = True
            self.breaker_points.append(pos)
            self.breaker_tally[self.third_of(pos)] += 1
            self.threat_set.discard(pos)
        self.round += 1
        return self


def _kap_win_through(maker: np.ndarray, n: int, k: int, pos: int) -> tuple[int, ...] | None:
    for d in range(1, (n - 1) // (k - 1) + 1):
        for j in range(k):
            a = pos - j * d
            last = a + (k - 1) * d
            if a >= 1 and last <= n and maker[a : last + 1 : d].all():
                return tuple(range(a, last + 1, d))
    return None


def state_from_points(
    n: int,
    maker: Iterable[int] = (),
    breaker: Iterable[int] = (),
    q: int = 1,
    family: Family = THREE_AP,
) -> GameState:
    """Build a state by placing points directly, bypassing turn order and batch sizes."""
    state = GameState(n, q, family)
    for pos in breaker:
        state._check_free(pos)
        state.breaker[pos] = True
        state.breaker_points.append(pos)
        state.breaker_tally[state.third_of(pos)] += 1
    for pos in maker:
        state.apply_maker_move(pos)
    state.threat_set = {z for z in state.threat_set if not state.breaker[z]}
    return state


def recompute_threats(state: GameState, family: Family) -> set[int]:
    """Threats rebuilt from every pair of Maker points."""
    if not family.pairwise:
        raise UnsupportedQuery(f"threats are undefined for {family}")
    pts = state.maker_points
    out: set[int] = set()
    for i, a in enumerate(pts):
        for b in pts[i + 1 :]:
            out.update(z for z in completions(family, a, b, state.n) if state.is_unclaimed(z))
    return out


def threats(state: GameState, family: Family | None = None) -> set[int]:
    """Unclaimed cells completing a winning set together with two Maker points."""
    if family is None or family.canonical() == state.family:
        if not state.family.pairwise:
            raise UnsupportedQuery(f"threats are undefined for {state.family}")
        return set(state.threat_set)
    return recompute_threats(state, family.canonical())


def maker_has_won(state: GameState, family: Family | None = None) -> bool:
    """True iff some winning set lies entirely inside the Maker points."""
    if family is None or family.canonical() == state.family:
        return state.winning_set is not None
    family = family.canonical()
    if not family.pairwise:
        return any(_kap_win_through(state.maker, state.n, family.k, p) for p in state.maker_points)
    pts = state.maker_points
    for i, a in enumerate(pts):
        for b in pts[i + 1 :]:
            if any(state.maker[z] for z in completions(family, a, b, state.n)):
                return True
    return False


def ap_count(n: int) -> int:
    """Number of 3-APs in ``[n]``: the sum over d >= 1 of (n - 2d)."""
    return sum(n - 2 * d for d in range(1, (n - 1) // 2 + 1))


def isqrt_ceil(x: int) -> int:
    r = math.isqrt(x)
    return r if r * r == x else r + 1


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

MAKER_IDS = ("mid-third", "greedy", "random")
BREAKER_IDS = ("block-all", "three-interval", "random")
HUMAN_ID = "human"
FREE_MOVE_POLICIES = ("lowest", "random")


@dataclass(frozen=True)
class GameConfig:
    """Everything that determines a game; equal configs give equal transcripts.

    ``opportunistic_win`` lets the mid-third Maker take a one-move win outside
    its scripted phases. ``free_moves`` picks where Breaker strategies put
    non-forced moves inside their target region: lowest cell first, or
    seeded-uniform.
    """

    n: int
    q: int
    maker: str = "mid-third"
    breaker: str = "three-interval"
    family: Family = THREE_AP
    seed: int = 0
    opportunistic_win: bool = False
    free_moves: str = "lowest"
    p: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.q < 1:
            raise ConfigError("q must be >= 1")
        if self.p != 1:
            raise ConfigError("only Maker bias p = 1 is supported")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.maker not in (*MAKER_IDS, HUMAN_ID):
            raise ConfigError(f"unknown maker strategy {self.maker!r}; choose from {', '.join(MAKER_IDS)}")
        if self.breaker not in (*BREAKER_IDS, HUMAN_ID):
            raise ConfigError(
                f"unknown breaker strategy {self.breaker!r}; choose from {', '.join(BREAKER_IDS)}"
            )
        if self.free_moves not in FREE_MOVE_POLICIES:
            raise ConfigError(f"free_moves must be one of {FREE_MOVE_POLICIES}")
        if isinstance(self.family, str):
            object.__setattr__(self, "family", parse_family(self.family))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "p": self.p,
            "family": str(self.family),
            "maker": self.maker,
            "breaker": self.breaker,
            "seed": self.seed,
            "opportunistic_win": self.opportunistic_win,
            "free_moves": self.free_moves,
        }

    @classmethod
    def from_dict(cls, data: dict) -> GameConfig:
        return cls(
            n=data["n"],
            q=data["q"],
            p=data.get("p", 1),
            family=parse_family(data.get("family", "3ap")),
            maker=data["maker"],
            breaker=data["breaker"],
            seed=data.get("seed", 0),
            opportunistic_win=data.get("opportunistic_win", False),
            free_moves=data.get("free_moves", "lowest"),
        )
