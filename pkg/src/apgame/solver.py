"""Perfect-play solver for small boards, plus a naive oracle to check it.

The memoised search splits Breaker's batch of ``q`` cells into ``q`` single
placements inside the same half-turn. That is exact because Maker does not
move in between, and it replaces ``C(free, q)`` branching by ``q`` levels
of ``free``-way branching that share a transposition table. The table key
therefore includes the number of placements Breaker still owes this turn.

Pruning rules, all sound for Maker-Breaker games:

* Maker completes a set whenever some live set lacks a single cell.
* Breaker loses the round if Maker has more threats than Breaker has
  placements left this turn.
* Breaker wins if it can claim every cell of every live set this turn.
* When threats are open Breaker places on them first; batch order is
  irrelevant, so nothing is lost.
* Both players only consider cells of live sets. Claiming a cell outside
  every live set is never better than claiming one inside.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from dataclasses import dataclass
from itertools import combinations

from .board import THREE_AP, Family, enumerate_winning_sets
from .errors import BoardTooLarge, SearchBudgetExceeded

MAKER_WIN = "MakerWin"
BREAKER_WIN = "BreakerWin"

DEFAULT_MAX_N = 24
DEFAULT_MAX_NODES = 50_000_000


@dataclass(frozen=True)
class SolveResult:
    winner: str
    nodes_expanded: int
    table_entries: int


def _set_masks(n: int, family: Family) -> list[int]:
    masks = []
    for s in enumerate_winning_sets(family, n):
        m = 0
        for p in s:
            m |= 1 << (p - 1)
        masks.append(m)
    return masks


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


class _Search:
    def __init__(self, n: int, q: int, family: Family, canonical: bool, max_nodes: int) -> None:
        self.n = n
        self.q = q
        self.sets = _set_masks(n, family)
        self.full = (1 << n) - 1
        self.memo: dict[int, bool] = {}
        self.nodes = 0
        self.max_nodes = max_nodes
        self.mirror = None
        if canonical and family.mirror_symmetric:
            self.mirror = [int(f"{m:0{n}b}"[::-1], 2) for m in range(1 << n)]

    def key(self, M: int, B: int, rem: int) -> int:
        n = self.n
        k = M | (B << n) | (rem << (2 * n))
        if self.mirror is not None:
            mk = self.mirror[M] | (self.mirror[B] << n) | (rem << (2 * n))
            k = min(k, mk)
        return k

    def maker_children(self, M: int, B: int, live: list[int]) -> list[int]:
        cand = 0
        for r in live:
            cand |= r
        scored = []
        for bit in _bits(cand):
            made = sum(1 for r in live if r & bit and (r & (r - 1)) and not ((r ^ bit) & ((r ^ bit) - 1)))
            scored.append((-made, bit.bit_length(), bit))
        scored.sort()
        return [b for _, _, b in scored]

    def breaker_children(self, live: list[int], threats: int) -> list[int]:
        if threats:
            return list(_bits(threats))
        weight: dict[int, int] = {}
        for r in live:
            w = 1 << (self.n - r.bit_count())
            for bit in _bits(r):
                weight[bit] = weight.get(bit, 0) + w
        return [b for _, _, b in sorted((-w, b.bit_length(), b) for b, w in weight.items())]

    def win(self, M: int, B: int, rem: int) -> bool:
        """True iff Maker wins from here; ``rem`` is 0 when Maker is to move."""
        key = self.key(M, B, rem)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise SearchBudgetExceeded(f"node budget {self.max_nodes} exhausted")
        live = [s & ~M for s in self.sets if not s & B]
        free = self.full & ~(M | B)
        if not live:
            res = False
        elif rem == 0:
            if any(not (r & (r - 1)) for r in live):
                res = True
            else:
                res = False
                for bit in self.maker_children(M, B, live):
                    free2 = free & ~bit
                    if free2 and self.win(M | bit, B, min(self.q, free2.bit_count())):
                        res = True
                        break
        else:
            threats = 0
            cover = 0
            for r in live:
                cover |= r
                if not (r & (r - 1)):
                    threats |= r
            if threats.bit_count() > rem:
                res = True
            elif cover.bit_count() <= rem:
                res = False
            else:
                res = True
                for bit in self.breaker_children(live, threats):
                    free2 = free & ~bit
                    if not free2 or not self.win(M, B | bit, rem - 1):
                        res = False
                        break
        self.memo[key] = res
        return res

    def root_moves(self, symmetry: bool, family: Family) -> list[int]:
        n = self.n
        moves = [1 << i for i in range(n)]
        if symmetry and family.mirror_symmetric:
            moves = [1 << i for i in range((n + 1) // 2)]
        return moves


def _solve_subtree(args) -> tuple[bool, int, int]:
    n, q, family, canonical, max_nodes, bit = args
    search = _Search(n, q, family, canonical, max_nodes)
    free2 = search.full & ~bit
    won = bool(free2) and search.win(bit, 0, min(q, free2.bit_count()))
    return won, search.nodes, len(search.memo)


def solve(
    n: int,
    q: int,
    family: Family = THREE_AP,
    *,
    symmetry: bool = True,
    canonical: bool = False,
    workers: int = 1,
    max_n: int = DEFAULT_MAX_N,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> SolveResult:
    """Winner of the (1, q) game on ``[n]`` under optimal play.

    ``symmetry`` drops mirror-image first moves for mirror-symmetric
    families; ``canonical`` additionally folds every table key under the
    mirror map. With ``workers > 1`` the first-move subtrees are searched in
    separate processes, each with its own table.
    """
    if n > max_n:
        raise BoardTooLarge(f"n={n} exceeds the exhaustive-search guard {max_n}")
    if n < 1 or q < 1:
        raise ValueError("need n >= 1 and q >= 1")
    search = _Search(n, q, family, canonical, max_nodes)
    if not search.sets:
        return SolveResult(BREAKER_WIN, 1, 0)
    roots = search.root_moves(symmetry, family)
    if workers > 1:
        jobs = [(n, q, family, canonical, max_nodes, bit) for bit in roots]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_solve_subtree, jobs))
        won = any(o[0] for o in outcomes)
        return SolveResult(
            MAKER_WIN if won else BREAKER_WIN,
            1 + sum(o[1] for o in outcomes),
            sum(o[2] for o in outcomes),
        )
    won = False
    for bit in roots:
        free2 = search.full & ~bit
        if free2 and search.win(bit, 0, min(q, free2.bit_count())):
            won = True
            break
    return SolveResult(MAKER_WIN if won else BREAKER_WIN, search.nodes + 1, len(search.memo))


def naive_solve(n: int, q: int, family: Family = THREE_AP) -> str:
    """Plain minimax over whole Breaker batches; no table, no pruning."""
    sets = _set_masks(n, family)
    cells = [1 << i for i in range(n)]

    def maker_to_move(M: int, B: int) -> bool:
        free = [c for c in cells if not (M | B) & c]
        for c in free:
            M2 = M | c
            if any(s & M2 == s for s in sets):
                return True
            if len(free) > 1 and breaker_to_move(M2, B):
                return True
        return False

    def breaker_to_move(M: int, B: int) -> bool:
        free = [c for c in cells if not (M | B) & c]
        k = min(q, len(free))
        for batch in combinations(free, k):
            if k == len(free):
                return False
            if not maker_to_move(M, B | sum(batch)):
                return False
        return True

    return MAKER_WIN if maker_to_move(0, 0) else BREAKER_WIN


def exact_threshold(n: int, family: Family = THREE_AP, **solve_kwargs) -> int:
    """Smallest ``q >= 1`` for which Breaker wins under optimal play."""
    q = 1
    while solve(n, q, family, **solve_kwargs).winner != BREAKER_WIN:
        q += 1
    return q


def golden_thresholds(family: Family = THREE_AP) -> dict[int, int]:
    """Frozen ``q*(n)`` table shipped with the package (solver-derived)."""
    text = resources.files("apgame").joinpath("data/qstar.json").read_text()
    table = json.loads(text).get(str(family))
    if table is None:
        raise KeyError(f"no frozen thresholds for {family}")
    return {int(k): v for k, v in table.items()}
