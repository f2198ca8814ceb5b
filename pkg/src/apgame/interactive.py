"""Terminal players: a human types moves for one side through the strategy interface."""

from __future__ import annotations

import sys
from typing import TextIO

from .board import GameState
from .errors import ApGameError
from .strategies import StrategyDecision


class InputClosed(ApGameError):
    """The input stream ended before the game did."""


class _Human:
    def __init__(self, stdin: TextIO | None = None, stdout: TextIO | None = None) -> None:
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout
        self.lines: list[str] = []  # every accepted input line, for replaying a session

    def _say(self, text: str) -> None:
        self.stdout.write(text + "\n")
        self.stdout.flush()

    def _read(self, prompt: str) -> str:
        self.stdout.write(prompt)
        self.stdout.flush()
        line = self.stdin.readline()
        if not line:
            raise InputClosed("input ended before the game finished")
        return line.strip()

    def _show(self, state: GameState) -> None:
        threats = sorted(state.threat_set)
        shown = ", ".join(map(str, threats[:20])) + (" ..." if len(threats) > 20 else "")
        self._say(
            f"round {state.round + 1}: Maker {len(state.maker_points)}, Breaker {len(state.breaker_points)}, "
            f"{state.unclaimed_count} free"
        )
        self._say(f"open threats ({len(threats)}): {shown or 'none'}")

    def _parse(self, text: str, state: GameState, count: int) -> list[int] | str:
        try:
            moves = [int(tok) for tok in text.replace(",", " ").split()]
        except ValueError:
            return "positions must be integers"
        if len(moves) != count:
            return f"expected {count} position(s), got {len(moves)}"
        if len(set(moves)) != len(moves):
            return "duplicate positions"
        for p in moves:
            if not 1 <= p <= state.n:
                return f"{p} is outside 1..{state.n}"
            if not state.is_unclaimed(p):
                return f"{p} is already claimed"
        return moves

    def _ask(self, state: GameState, count: int, who: str) -> list[int]:
        self._show(state)
        while True:
            text = self._read(f"{who}: enter {count} unclaimed position(s) in 1..{state.n}> ")
            got = self._parse(text, state, count)
            if isinstance(got, str):
                self._say(f"invalid: {got}")
                continue
            self.lines.append(text)
            return got


class HumanMaker(_Human):
    name = "human"

    def choose(self, state: GameState) -> StrategyDecision:
        return StrategyDecision(self._ask(state, 1, "Maker"))


class HumanBreaker(_Human):
    name = "human"

    def choose(self, state: GameState, last_maker: int) -> StrategyDecision:
        self._say(f"Maker played {last_maker}")
        k = min(state.q, state.unclaimed_count)
        return StrategyDecision(self._ask(state, k, "Breaker"))
