"""Run (1, q) games between two strategies, record transcripts, replay them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .board import GameConfig, GameState
from .errors import IllegalMove
from .events import Event, GuaranteeViolated, MiddleFilled, PivotFound, event_from_dict, event_to_dict
from .strategies import make_breaker, make_maker

MAKER_WIN = "MakerWin"
BREAKER_WIN = "BreakerWin"


@dataclass
class Turn:
    round: int
    maker_move: int
    breaker_moves: list[int] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    # open threats Breaker faced this round
    forced_demand: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "round": self.round,
            "maker_move": self.maker_move,
            "breaker_moves": self.breaker_moves,
            "events": [event_to_dict(e) for e in self.events],
            "forced_demand": self.forced_demand,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Turn:
        return cls(
            data["round"],
            data["maker_move"],
            list(data["breaker_moves"]),
            [event_from_dict(e) for e in data["events"]],
            data.get("forced_demand", 0),
        )


@dataclass
class Forfeit:
    side: str
    round: int
    reason: str
    moves: list[Any]


@dataclass
class Transcript:
    config: GameConfig
    turns: list[Turn]
    result: str
    winning_set: tuple[int, ...] | None
    rounds_played: int
    forfeit: Forfeit | None = None

    @property
    def winner(self) -> str:
        return "maker" if self.result == MAKER_WIN else "breaker"

    def events(self) -> list[Event]:
        return [e for t in self.turns for e in t.events]

    @property
    def t_star(self) -> int | None:
        return next((e.round for e in self.events() if isinstance(e, MiddleFilled)), None)

    @property
    def pivot(self) -> PivotFound | None:
        return next((e for e in self.events() if isinstance(e, PivotFound)), None)

    @property
    def violations(self) -> int:
        return sum(isinstance(e, GuaranteeViolated) for e in self.events())

    @property
    def max_forced_demand(self) -> int:
        return max((t.forced_demand for t in self.turns), default=0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "turns": [t.to_dict() for t in self.turns],
            "result": self.result,
            "winning_set": list(self.winning_set) if self.winning_set else None,
            "rounds_played": self.rounds_played,
            "forfeit": vars(self.forfeit) if self.forfeit else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Transcript:
        ws = data.get("winning_set")
        ff = data.get("forfeit")
        return cls(
            GameConfig.from_dict(data["config"]),
            [Turn.from_dict(t) for t in data["turns"]],
            data["result"],
            tuple(ws) if ws else None,
            data["rounds_played"],
            Forfeit(**ff) if ff else None,
        )

    @classmethod
    def from_json(cls, text: str) -> Transcript:
        return cls.from_dict(json.loads(text))


def play_game(config: GameConfig, maker=None, breaker=None) -> Transcript:
    """Play one game to completion.

    Maker moves first each round; a completed winning set ends the game at
    once, before Breaker replies. The game also ends when the board is full.
    A strategy that returns an illegal move forfeits and the opponent wins.
    """
    state = GameState(config.n, config.q, config.family)
    maker = maker if maker is not None else make_maker(config)
    breaker = breaker if breaker is not None else make_breaker(config)
    turns: list[Turn] = []
    forfeit = None
    result = BREAKER_WIN
    pairwise = state.family.pairwise

    while state.unclaimed_count > 0:
        rnd = state.round + 1
        decision = maker.choose(state)
        try:
            if len(decision.moves) != 1:
                raise IllegalMove(f"Maker must claim exactly one cell, got {decision.moves}")
            pos = decision.moves[0]
            state.apply_maker_move(pos)
        except IllegalMove as exc:
            forfeit = Forfeit("maker", rnd, str(exc), list(decision.moves))
            result = BREAKER_WIN
            break
        turn = Turn(rnd, int(pos), events=list(decision.events))
        turns.append(turn)
        if state.winning_set is not None:
            result = MAKER_WIN
            break
        if state.unclaimed_count == 0:
            break
        turn.forced_demand = len(state.threat_set) if pairwise else 0
        reply = breaker.choose(state, int(pos))
        turn.events.extend(reply.events)
        try:
            state.apply_breaker_moves(reply.moves)
        except IllegalMove as exc:
            forfeit = Forfeit("breaker", rnd, str(exc), [int(p) for p in reply.moves])
            result = MAKER_WIN
            break
        turn.breaker_moves = [int(p) for p in reply.moves]

    return Transcript(config, turns, result, state.winning_set, len(turns), forfeit)


@dataclass
class ReplayResult:
    valid: bool
    final_state: GameState
    round: int | None = None
    reason: str | None = None


def replay(transcript: Transcript) -> ReplayResult:
    """Re-apply every recorded move and re-derive the result."""
    cfg = transcript.config
    state = GameState(cfg.n, cfg.q, cfg.family)

    def bad(rnd: int | None, reason: str) -> ReplayResult:
        return ReplayResult(False, state, rnd, reason)

    last = len(transcript.turns) - 1
    for idx, turn in enumerate(transcript.turns):
        rnd = idx + 1
        if turn.round != rnd:
            return bad(rnd, f"round numbered {turn.round}, expected {rnd}")
        try:
            state.apply_maker_move(turn.maker_move)
        except IllegalMove as exc:
            return bad(rnd, f"illegal maker move: {exc}")
        if state.winning_set is not None or state.unclaimed_count == 0:
            if idx != last or turn.breaker_moves:
                return bad(rnd, "moves recorded after the game ended")
            break
        if not turn.breaker_moves:
            if idx == last and transcript.forfeit and transcript.forfeit.side == "breaker":
                break
            return bad(rnd, "missing Breaker batch")
        try:
            state.apply_breaker_moves(turn.breaker_moves)
        except IllegalMove as exc:
            return bad(rnd, f"illegal breaker batch: {exc}")

    ff = transcript.forfeit
    if ff is not None:
        probe = state.copy()
        try:
            if ff.side == "maker":
                if len(ff.moves) != 1:
                    raise IllegalMove("wrong move count")
                probe.apply_maker_move(ff.moves[0])
            else:
                probe.apply_breaker_moves(ff.moves)
        except IllegalMove:
            expected = BREAKER_WIN if ff.side == "maker" else MAKER_WIN
        else:
            return bad(ff.round, "forfeited move is legal")
    elif state.winning_set is not None:
        expected = MAKER_WIN
    elif state.unclaimed_count == 0:
        expected = BREAKER_WIN
    else:
        return bad(len(transcript.turns), "game recorded as finished but board is not full")

    if transcript.result != expected:
        return bad(len(transcript.turns), "result mismatch")
    if ff is None and transcript.winning_set != state.winning_set:
        return bad(len(transcript.turns), "winning set mismatch")
    if transcript.rounds_played != len(transcript.turns):
        return bad(len(transcript.turns), "rounds_played mismatch")
    return ReplayResult(True, state)
