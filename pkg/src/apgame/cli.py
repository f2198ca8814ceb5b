"""Command-line entry point: play, solve, sweep, bounds, verify."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .board import GameConfig, HUMAN_ID, parse_family
from .errors import ApGameError, BoardTooLarge, ConfigError, DomainError, SearchBudgetExceeded
from .interactive import InputClosed
from .lab import BoundKind, SweepPlan, evaluate_bound, sweep
from .referee import play_game, replay
from .solver import MAKER_WIN, exact_threshold, solve

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_INVARIANT = 2

GRAMMAR = """\
usage:
  apgame play --n INT --q INT --maker ID --breaker ID [--seed INT] [--family 3ap|kap:K|cyclic|schur]
              [--opportunistic] [--interactive maker|breaker] [--out PATH]
  apgame solve --n INT [--q INT] [--family ...] [--threshold]
  apgame sweep (--plan PATH | --n-list CSV --q-rule NAME --pairs CSV --seeds CSV) --out PATH [--workers INT]
  apgame bounds --n INT [--k INT]
  apgame verify [--suite NAME]
Maker ids: mid-third, greedy, random. Breaker ids: block-all, three-interval, random.
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="apgame", description="Biased Maker-Breaker 3-AP games.", usage=GRAMMAR)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    play = sub.add_parser("play", usage=GRAMMAR)
    play.add_argument("--n", type=int, required=True)
    play.add_argument("--q", type=int, required=True)
    play.add_argument("--maker", required=True)
    play.add_argument("--breaker", required=True)
    play.add_argument("--seed", type=int, default=0)
    play.add_argument("--family", default="3ap")
    play.add_argument("--opportunistic", action="store_true")
    play.add_argument("--interactive", choices=("maker", "breaker"))
    play.add_argument("--out")

    solve_p = sub.add_parser("solve", usage=GRAMMAR)
    solve_p.add_argument("--n", type=int, required=True)
    solve_p.add_argument("--q", type=int)
    solve_p.add_argument("--family", default="3ap")
    solve_p.add_argument("--threshold", action="store_true")

    sw = sub.add_parser("sweep", usage=GRAMMAR)
    sw.add_argument("--plan")
    sw.add_argument("--n-list")
    sw.add_argument("--q-rule")
    sw.add_argument("--pairs")
    sw.add_argument("--seeds")
    sw.add_argument("--out", required=True)
    sw.add_argument("--workers", type=int, default=1)

    b = sub.add_parser("bounds", usage=GRAMMAR)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--k", type=int, default=3)

    v = sub.add_parser("verify", usage=GRAMMAR)
    v.add_argument("--suite")
    return p


def _out_path(text: str | None) -> Path | None:
    if text is None:
        return None
    path = Path(text)
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise ConfigError(f"output directory {parent} does not exist")
    if path.is_dir():
        raise ConfigError(f"{path} is a directory")
    return path


def _ints(text: str) -> list[int]:
    """``"1,2,5..8"`` -> ``[1, 2, 5, 6, 7, 8]``."""
    out: list[int] = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            if ".." in tok:
                lo, hi = tok.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(tok))
        except ValueError:
            raise ConfigError(f"bad integer list entry {tok!r}") from None
    return out


def _pairs(text: str) -> list[tuple[str, str]]:
    pairs = []
    for tok in text.split(","):
        if ":" not in tok:
            raise ConfigError(f"pair {tok!r} must look like MAKER:BREAKER")
        m, b = tok.strip().split(":", 1)
        pairs.append((m, b))
    return pairs


def cmd_play(args, stdin=None, stdout=None) -> int:
    out = _out_path(args.out)
    maker_id = HUMAN_ID if args.interactive == "maker" else args.maker
    breaker_id = HUMAN_ID if args.interactive == "breaker" else args.breaker
    if HUMAN_ID in (args.maker, args.breaker) and not args.interactive:
        raise ConfigError("a human side needs --interactive")
    config = GameConfig(
        args.n,
        args.q,
        maker_id,
        breaker_id,
        parse_family(args.family),
        args.seed,
        args.opportunistic,
    )
    maker = breaker = None
    if args.interactive:
        from .interactive import HumanBreaker, HumanMaker

        if args.interactive == "maker":
            maker = HumanMaker(stdin, stdout)
        else:
            breaker = HumanBreaker(stdin, stdout)
    transcript = play_game(config, maker, breaker)
    check = replay(transcript)
    if not check.valid:
        print(f"internal error: transcript does not replay ({check.reason})", file=sys.stderr)
        return EXIT_INVARIANT
    if out is not None:
        out.write_text(transcript.to_json())
    print(transcript.winner)
    detail = f"rounds={transcript.rounds_played}"
    if transcript.winning_set:
        detail += f" winning_set={list(transcript.winning_set)}"
    if transcript.t_star is not None:
        detail += f" t_star={transcript.t_star}"
    if transcript.pivot is not None:
        detail += f" pivot={transcript.pivot.i} strength={transcript.pivot.strength}"
    if transcript.violations:
        detail += f" violations={transcript.violations}"
    if transcript.forfeit:
        detail += f" forfeit={transcript.forfeit.side}: {transcript.forfeit.reason}"
    print(detail, file=sys.stderr)
    return EXIT_OK


def cmd_solve(args) -> int:
    if args.n < 1:
        raise ConfigError("n must be >= 1")
    if args.q is not None and args.q < 1:
        raise ConfigError("q must be >= 1")
    family = parse_family(args.family)
    if args.q is None or args.threshold:
        print(exact_threshold(args.n, family))
    if args.q is not None:
        res = solve(args.n, args.q, family)
        print("maker" if res.winner == MAKER_WIN else "breaker")
    return EXIT_OK


def cmd_sweep(args) -> int:
    out = _out_path(args.out)
    if args.workers < 1:
        raise ConfigError("workers must be >= 1")
    inline = (args.n_list, args.q_rule, args.pairs, args.seeds)
    if args.plan:
        if any(v is not None for v in inline):
            raise UsageError("--plan excludes the inline plan flags")
        try:
            data = json.loads(Path(args.plan).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read plan {args.plan}: {exc}") from None
        plan = SweepPlan.from_dict(data)
    else:
        if any(v is None for v in inline):
            raise UsageError("inline sweeps need --n-list, --q-rule, --pairs and --seeds")
        plan = SweepPlan(_ints(args.n_list), [args.q_rule], _pairs(args.pairs), _ints(args.seeds))
    plan.configs()  # validates every game before any is played
    records = sweep(plan, out, args.workers)
    makers = sum(r.winner == "maker" for r in records)
    print(f"{len(records)} games, {makers} maker wins, {len(records) - makers} breaker wins -> {out}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.n < 1:
        raise ConfigError("n must be >= 1")
    for kind in BoundKind:
        try:
            value = evaluate_bound(kind, args.n, args.k)
        except DomainError as exc:
            print(f"{kind.value} undefined ({exc})")
            continue
        label = f"{kind.value}:{args.k}" if kind is BoundKind.BECK_KAP else kind.value
        print(f"{label} {value:.6f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .checks import SUITES, run_suites

    if args.suite and args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    results = run_suites([args.suite] if args.suite else None)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT


def parse_and_run(argv: list[str] | None = None, stdin=None, stdout=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}\n{GRAMMAR}", file=sys.stderr, end="")
        return EXIT_DOMAIN
    try:
        if args.command == "play":
            return cmd_play(args, stdin, stdout)
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "bounds":
            return cmd_bounds(args)
        return cmd_verify(args)
    except UsageError as exc:
        print(f"error: {exc}\n{GRAMMAR}", file=sys.stderr, end="")
        return EXIT_DOMAIN
    except (InputClosed, ConfigError, DomainError, BoardTooLarge, SearchBudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ApGameError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


def main() -> None:
    sys.exit(parse_and_run())
