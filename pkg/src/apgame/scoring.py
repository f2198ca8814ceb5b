"""Fast "new threats created" scoring for the greedy Maker on 3-AP boards.

For a candidate cell ``z`` the greedy score is the number of distinct cells
``w`` that would become threats if Maker claimed ``z``: ``w`` must be
unclaimed, not already a threat, and complete a 3-AP with ``z`` and some
Maker point ``m``. The three ways this can happen are ``w = 2m - z``,
``w = 2z - m`` and ``w = (z + m) / 2``.

:class:`GreedyScorer` keeps, for every cell, the same count taken *with
multiplicity* over ``(m, formula)`` pairs. That count is an upper bound on
the distinct score and is cheap to maintain: eligibility of a cell only ever
goes from true to false, and each change touches ``3 |M|`` cells. The best
move is then found by exact evaluation of the few cells at the top levels of
the bound.
"""

from __future__ import annotations

import numpy as np

from .board import GameState

_PAIR_CHUNK = 1 << 21


class GreedyScorer:
    def __init__(self, state: GameState) -> None:
        n = state.n
        self.n = n
        self.eligible = np.ones(n + 1, dtype=bool)
        self.eligible[0] = False
        self.bound = np.zeros(n + 1, dtype=np.int64)
        self.makers = np.empty(0, dtype=np.int64)
        self._seen_maker = 0
        self._seen_breaker = 0
        self.sync(state)

    def sync(self, state: GameState) -> None:
        """Fold in every move and new threat since the previous sync."""
        new_makers = state.maker_points[self._seen_maker :]
        new_breakers = state.breaker_points[self._seen_breaker :]
        self._seen_maker = len(state.maker_points)
        self._seen_breaker = len(state.breaker_points)
        touched = np.fromiter(
            [*new_makers, *new_breakers, *state.threat_set], dtype=np.int64
        )
        if touched.size:
            changed = np.unique(touched[self.eligible[touched]])
            self.eligible[changed] = False
            if changed.size and self.makers.size:
                self._retract(changed)
        for m in new_makers:
            self._add_maker(m)
        if new_makers:
            self.makers = np.concatenate([self.makers, np.asarray(new_makers, dtype=np.int64)])

    def _add_maker(self, m: int) -> None:
        n, e, c = self.n, self.eligible, self.bound
        # w = 2m - z
        lo, hi = max(1, 2 * m - n), min(n, 2 * m - 1)
        if lo <= hi:
            c[lo : hi + 1] += e[2 * m - hi : 2 * m - lo + 1][::-1]
        # w = 2z - m
        lo, hi = (m + 2) // 2, min(n, (n + m) // 2)
        if lo <= hi:
            c[lo : hi + 1] += e[2 * lo - m : 2 * hi - m + 1 : 2]
        # w = (z + m) / 2, z of the same parity as m
        lo = 2 - (m % 2)
        hi = n if (n - m) % 2 == 0 else n - 1
        if lo <= hi:
            c[lo : hi + 1 : 2] += e[(lo + m) // 2 : (hi + m) // 2 + 1]

    def _retract(self, cells: np.ndarray) -> None:
        n = self.n
        step = max(1, _PAIR_CHUNK // max(1, self.makers.size))
        for start in range(0, cells.size, step):
            w = cells[start : start + step, None]
            m = self.makers[None, :]
            z1 = (2 * m - w).ravel()
            z3 = (2 * w - m).ravel()
            s = (w + m).ravel()
            z2 = s[s % 2 == 0] // 2
            zs = np.concatenate([z1, z3, z2])
            zs = zs[(zs >= 1) & (zs <= n)]
            self.bound -= np.bincount(zs, minlength=n + 1)

    def exact(self, z: int) -> int:
        """Distinct new threats created by claiming ``z``."""
        m = self.makers
        if not m.size:
            return 0
        mid = z + m
        ws = np.concatenate([2 * m - z, 2 * z - m, mid[mid % 2 == 0] // 2])
        ws = ws[(ws >= 1) & (ws <= self.n)]
        return int(np.unique(ws[self.eligible[ws]]).size)

    def best(self, state: GameState) -> tuple[int, int]:
        """``(cell, score)`` maximising the exact score, smallest cell on ties."""
        self.sync(state)
        levels = np.where(state.unclaimed_mask(), self.bound, -1)
        level = int(levels.max())
        if level < 0:
            raise ValueError("no unclaimed cell")
        best_score, best_z = -1, -1
        while level >= 0 and best_score <= level:
            zs = np.flatnonzero(levels == level)
            if best_score == level:
                zs = zs[zs < best_z]
            for z in zs:
                s = self.exact(int(z))
                if s > best_score or (s == best_score and z < best_z):
                    best_score, best_z = s, int(z)
                if s == level:
                    break
            below = levels[levels < level]
            level = int(below.max()) if below.size else -1
        return best_z, best_score


def new_threat_count(state: GameState, z: int) -> int:
    """Reference implementation of the greedy score for any size-3 family."""
    from .board import completions

    made: set[int] = set()
    for m in state.maker_points:
        for w in completions(state.family, z, m, state.n):
            if w != z and state.is_unclaimed(w) and w not in state.threat_set:
                made.add(w)
    return len(made)
