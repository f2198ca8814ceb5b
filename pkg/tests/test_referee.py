from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apgame.board import SCHUR, THREE_AP, GameConfig, kap
from apgame.events import MiddleFilled
from apgame.referee import BREAKER_WIN, MAKER_WIN, Transcript, play_game, replay
from apgame.strategies import StrategyDecision

MAKERS = ["mid-third", "greedy", "random"]
BREAKERS = ["block-all", "three-interval", "random"]


class TestPlay:
    @pytest.mark.parametrize("maker", MAKERS)
    def test_single_set_board(self, maker):
        tr = play_game(GameConfig(3, 1, maker, "block-all"))
        assert tr.result == BREAKER_WIN

    @pytest.mark.parametrize("maker", MAKERS)
    @pytest.mark.parametrize("breaker", BREAKERS)
    @pytest.mark.parametrize("n", [3, 7, 12])
    def test_huge_bias(self, maker, breaker, n):
        tr = play_game(GameConfig(n, n - 1, maker, breaker, seed=5))
        assert tr.result == BREAKER_WIN
        assert tr.rounds_played == 1

    def test_block_all_guarantee_example(self):
        tr = play_game(GameConfig(10_000, 174, "mid-third", "block-all"))
        assert tr.result == BREAKER_WIN and tr.violations == 0

    def test_maker_win_stops_game(self):
        tr = play_game(GameConfig(10_000, 38, "mid-third", "three-interval"))
        assert tr.result == MAKER_WIN
        assert tr.turns[-1].breaker_moves == []
        assert set(tr.winning_set) <= {t.maker_move for t in tr.turns}

    @pytest.mark.parametrize("maker", MAKERS)
    @pytest.mark.parametrize("breaker", BREAKERS)
    def test_conservation(self, maker, breaker):
        cfg = GameConfig(400, 6, maker, breaker, seed=2)
        tr = play_game(cfg)
        claimed = 0
        for t in tr.turns:
            claimed += 1 + len(t.breaker_moves)
            if t is not tr.turns[-1]:
                assert claimed == min(t.round * 7, 400)
        assert sum(isinstance(e, MiddleFilled) for e in tr.events()) <= 1

    def test_other_families(self):
        for fam in (SCHUR, kap(4)):
            for breaker in ("random",):
                tr = play_game(GameConfig(40, 2, "random", breaker, fam, seed=1))
                assert replay(tr).valid
        tr = play_game(GameConfig(40, 2, "greedy", "block-all", SCHUR))
        assert replay(tr).valid

    def test_forfeit_maker(self):
        class Bad:
            def choose(self, state):
                return StrategyDecision([1])

        tr = play_game(GameConfig(10, 1, "greedy", "block-all"), maker=Bad())
        assert tr.result == BREAKER_WIN
        assert tr.forfeit.side == "maker" and tr.forfeit.round == 2
        assert replay(tr).valid

    def test_forfeit_breaker(self):
        class Bad:
            def choose(self, state, last):
                return StrategyDecision([last])

        tr = play_game(GameConfig(10, 1, "greedy", "block-all"), breaker=Bad())
        assert tr.result == MAKER_WIN and tr.forfeit.side == "breaker"
        assert replay(tr).valid
        assert Transcript.from_json(tr.to_json()).forfeit == tr.forfeit


class TestReplay:
    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(3, 300),
        st.integers(1, 20),
        st.sampled_from(MAKERS),
        st.sampled_from(BREAKERS),
        st.integers(0, 2**20),
        st.booleans(),
    )
    def test_round_trip(self, n, q, maker, breaker, seed, opp):
        tr = play_game(GameConfig(n, q, maker, breaker, THREE_AP, seed, opp, "random"))
        text = tr.to_json()
        back = Transcript.from_json(text)
        assert back.to_json() == text
        res = replay(back)
        assert res.valid, res.reason
        assert res.final_state.maker_points == [t.maker_move for t in tr.turns]

    def _game(self):
        return play_game(GameConfig(200, 5, "greedy", "three-interval", seed=1))

    def test_duplicated_breaker_move(self):
        tr = self._game()
        tr.turns[2].breaker_moves[1] = tr.turns[2].breaker_moves[0]
        res = replay(tr)
        assert not res.valid and res.round == 3

    def test_result_flipped(self):
        tr = self._game()
        tr.result = MAKER_WIN if tr.result == BREAKER_WIN else BREAKER_WIN
        res = replay(tr)
        assert not res.valid and res.reason == "result mismatch"

    def test_move_on_claimed_cell(self):
        tr = self._game()
        tr.turns[3].maker_move = tr.turns[0].maker_move
        res = replay(tr)
        assert not res.valid and res.round == 4

    def test_truncated(self):
        tr = self._game()
        tr.turns = tr.turns[:3]
        tr.rounds_played = 3
        assert not replay(tr).valid

    def test_moves_after_win(self):
        tr = play_game(GameConfig(10_000, 38, "mid-third", "three-interval"))
        tr.turns[-1].breaker_moves = [1]
        res = replay(tr)
        assert not res.valid and "after the game ended" in res.reason

    def test_renumbered_round(self):
        tr = self._game()
        tr.turns[1].round = 7
        assert not replay(tr).valid

    def test_json_shape(self):
        data = json.loads(self._game().to_json())
        assert set(data) == {"config", "turns", "result", "winning_set", "rounds_played", "forfeit"}
        assert set(data["turns"][0]) == {"round", "maker_move", "breaker_moves", "events", "forced_demand"}


class TestDeterminism:
    @pytest.mark.parametrize("maker", MAKERS)
    @pytest.mark.parametrize("breaker", BREAKERS)
    def test_equal_configs_equal_bytes(self, maker, breaker):
        cfg = GameConfig(1500, 12, maker, breaker, seed=99, free_moves="random")
        assert play_game(cfg).to_json() == play_game(cfg).to_json()

    def test_seed_matters_for_random(self):
        a = play_game(GameConfig(1500, 12, "random", "random", seed=1)).to_json()
        b = play_game(GameConfig(1500, 12, "random", "random", seed=2)).to_json()
        assert a != b
