"""Closed-form bounds, empirical threshold search, sweeps and calibration."""

from __future__ import annotations

import csv
import enum
import io
import math
import os
import re
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .board import HUMAN_ID, THREE_AP, Family, GameConfig, isqrt_ceil, parse_family
from .errors import ConfigError, DomainError, InsufficientData, NoCrossover, NonMonotoneFrontier
from .referee import Transcript, play_game

PAPER_LOWER_DENOM = 3 + 1.5 * math.sqrt(3)

CSV_HEADER = (
    "n",
    "q",
    "family",
    "maker",
    "breaker",
    "winner",
    "rounds",
    "t_star",
    "max_forced_demand",
    "violations",
    "seed",
)


class BoundKind(enum.Enum):
    KRSS_LOWER = "krss-lower"
    KRSS_UPPER = "krss-upper"
    PAPER_LOWER = "paper-lower"
    PAPER_UPPER = "paper-upper"
    BECK_KAP = "beck-kap"
    SCHUR_LOWER = "schur-lower"
    SCHUR_UPPER = "schur-upper"
    CYCLIC_UPPER = "cyclic-upper"

    @property
    def is_lower(self) -> bool:
        return self in (BoundKind.KRSS_LOWER, BoundKind.PAPER_LOWER, BoundKind.BECK_KAP, BoundKind.SCHUR_LOWER)


def evaluate_bound(kind: BoundKind, n: int, k: int | None = None) -> float:
    """Value of a closed-form threshold bound at ``n``.

    ``PAPER_UPPER`` is the bare ``sqrt(2n)``; its additive constant comes
    from :func:`calibrate`, never from here. ``BECK_KAP`` needs ``k >= 3``.
    """
    kind = BoundKind(kind)
    if n < 1:
        raise DomainError("n must be >= 1")
    if kind is BoundKind.KRSS_LOWER:
        inner = n / 12 - 1 / 6
        if inner < 0:
            raise DomainError(f"n/12 - 1/6 < 0 at n={n}")
        return math.sqrt(inner)
    if kind in (BoundKind.KRSS_UPPER, BoundKind.CYCLIC_UPPER):
        return math.sqrt(3 * n)
    if kind is BoundKind.PAPER_LOWER:
        return math.sqrt(n / PAPER_LOWER_DENOM)
    if kind in (BoundKind.PAPER_UPPER, BoundKind.SCHUR_UPPER):
        return math.sqrt(2 * n)
    if kind is BoundKind.SCHUR_LOWER:
        return math.sqrt(n / 8)
    if k is None or k < 3:
        raise DomainError("beck-kap needs k >= 3")
    return (n / (k * (k - 1) ** 2)) ** (1 / (k - 1))


def f_profile(x: float) -> float:
    """``3 / (sqrt2 - x) * (2/3 - sqrt2 x + x^2 / 2) + 2x`` on ``[0, 1]``."""
    r2 = math.sqrt(2)
    return 3 / (r2 - x) * (2 / 3 - r2 * x + x * x / 2) + 2 * x


def f_profile_derivative(x: float) -> float:
    """Closed-form derivative ``x (x - 2 sqrt2) / (2 (sqrt2 - x)^2)``."""
    r2 = math.sqrt(2)
    return x * (x - 2 * r2) / (2 * (r2 - x) ** 2)


# ---------------------------------------------------------------------------
# q rules
# ---------------------------------------------------------------------------

_RULE = re.compile(
    r"^(?P<name>[a-z-]+)(?::(?P<k>\d+))?(?:\*(?P<scale>[0-9.]+))?"
    r"(?:(?P<sign>[+-])(?P<lo>\d+)(?:\.\.(?P<hi>\d+))?)?$"
)


@dataclass(frozen=True)
class QRule:
    """How a sweep picks ``q`` for each ``n``.

    Text forms: ``q=10,20`` (explicit list), or ``NAME[:K][*SCALE][+C]``
    where ``NAME`` is a bound kind and ``+C`` may be a range ``+A..B``.
    Lower bounds are rounded down and upper bounds up, after scaling and
    before the offset; results below 1 are clamped to 1.
    """

    text: str
    kind: BoundKind | None = None
    k: int | None = None
    scale: float = 1.0
    offsets: tuple[int, ...] = (0,)
    explicit: tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: str) -> QRule:
        text = text.strip()
        if text.startswith("q="):
            try:
                qs = tuple(int(v) for v in text[2:].split(",") if v.strip())
            except ValueError:
                raise ConfigError(f"bad explicit q list {text!r}") from None
            if not qs or min(qs) < 1:
                raise ConfigError("explicit q values must be >= 1")
            return cls(text, explicit=qs)
        m = _RULE.match(text)
        if not m:
            raise ConfigError(f"cannot parse q rule {text!r}")
        try:
            kind = BoundKind(m["name"])
        except ValueError:
            raise ConfigError(f"unknown bound {m['name']!r}") from None
        lo = int(m["lo"]) if m["lo"] else 0
        hi = int(m["hi"]) if m["hi"] else lo
        sign = -1 if m["sign"] == "-" else 1
        offsets = tuple(sign * c for c in range(lo, hi + 1))
        return cls(
            text,
            kind,
            int(m["k"]) if m["k"] else None,
            float(m["scale"]) if m["scale"] else 1.0,
            offsets,
        )

    def base(self, n: int) -> int:
        value = self.scale * evaluate_bound(self.kind, n, self.k)
        if self.kind is BoundKind.PAPER_UPPER and self.scale == 1.0:
            return isqrt_ceil(2 * n)
        if self.kind in (BoundKind.KRSS_UPPER, BoundKind.CYCLIC_UPPER) and self.scale == 1.0:
            return isqrt_ceil(3 * n)
        return math.floor(value) if self.kind.is_lower else math.ceil(value)

    def qs(self, n: int) -> list[int]:
        if self.explicit:
            return list(self.explicit)
        b = self.base(n)
        return [max(1, b + c) for c in self.offsets]


# ---------------------------------------------------------------------------
# Records and sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentRecord:
    n: int
    q: int
    family: str
    maker_id: str
    breaker_id: str
    winner: str
    rounds_played: int
    t_star: int | None
    max_forced_demand: int
    guarantee_violations: int
    seed: int

    @classmethod
    def from_transcript(cls, tr: Transcript) -> ExperimentRecord:
        c = tr.config
        return cls(
            c.n,
            c.q,
            str(c.family),
            c.maker,
            c.breaker,
            tr.winner,
            tr.rounds_played,
            tr.t_star,
            tr.max_forced_demand,
            tr.violations,
            c.seed,
        )

    def row(self) -> list[str]:
        return [
            str(self.n),
            str(self.q),
            self.family,
            self.maker_id,
            self.breaker_id,
            self.winner,
            str(self.rounds_played),
            "" if self.t_star is None else str(self.t_star),
            str(self.max_forced_demand),
            str(self.guarantee_violations),
            str(self.seed),
        ]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> ExperimentRecord:
        return cls(
            int(row["n"]),
            int(row["q"]),
            row["family"],
            row["maker"],
            row["breaker"],
            row["winner"],
            int(row["rounds"]),
            int(row["t_star"]) if row["t_star"] else None,
            int(row["max_forced_demand"]),
            int(row["violations"]),
            int(row["seed"]),
        )


@dataclass
class SweepPlan:
    n_list: list[int]
    q_rule: list[str]
    pairs: list[tuple[str, str]]
    seeds: list[int] = field(default_factory=lambda: [0])
    family: str = "3ap"
    opportunistic_win: bool = False
    free_moves: str = "lowest"

    def __post_init__(self) -> None:
        if isinstance(self.q_rule, str):
            self.q_rule = [self.q_rule]
        self.pairs = [tuple(p) for p in self.pairs]
        if any(len(p) != 2 or HUMAN_ID in p for p in self.pairs):
            raise ConfigError("sweep pairs must be (maker, breaker) bot ids")
        self._rules = [QRule.parse(r) for r in self.q_rule]
        self._family = parse_family(self.family)

    @classmethod
    def from_dict(cls, data: dict) -> SweepPlan:
        known = {"n_list", "q_rule", "pairs", "seeds", "family", "opportunistic_win", "free_moves"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown plan keys: {sorted(unknown)}")
        return cls(**data)

    def configs(self) -> list[GameConfig]:
        """Every game of the plan, in plan order."""
        out = []
        for n in self.n_list:
            qs: list[int] = []
            for rule in self._rules:
                qs.extend(q for q in rule.qs(n) if q not in qs)
            for q in qs:
                for maker, breaker in self.pairs:
                    for seed in self.seeds:
                        out.append(
                            GameConfig(
                                n,
                                q,
                                maker,
                                breaker,
                                self._family,
                                seed,
                                self.opportunistic_win,
                                self.free_moves,
                            )
                        )
        return out


def run_record(config: GameConfig) -> ExperimentRecord:
    return ExperimentRecord.from_transcript(play_game(config))


def run_configs(configs: Sequence[GameConfig], workers: int = 1) -> list[ExperimentRecord]:
    """Play every config; results come back in input order whatever ``workers`` is."""
    if workers <= 1 or len(configs) <= 1:
        return [run_record(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_record, configs, chunksize=1))


def records_to_csv(records: Iterable[ExperimentRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()


def write_csv(records: Iterable[ExperimentRecord], path: str | os.PathLike) -> None:
    """Write records atomically: a temp file in the target directory, then rename."""
    path = Path(path)
    text = records_to_csv(records)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path: str | os.PathLike) -> list[ExperimentRecord]:
    with open(path, newline="") as fh:
        return [ExperimentRecord.from_row(row) for row in csv.DictReader(fh)]


def sweep(plan: SweepPlan, out_path: str | os.PathLike | None = None, workers: int = 1) -> list[ExperimentRecord]:
    records = run_configs(plan.configs(), workers)
    if out_path is not None:
        write_csv(records, out_path)
    return records


# ---------------------------------------------------------------------------
# Empirical thresholds
# ---------------------------------------------------------------------------


@dataclass
class ThresholdEstimate:
    q_hat: int
    frontier: list[tuple[int, str]]
    monotone: bool


def empirical_threshold(
    maker_id: str,
    breaker_id: str,
    n: int,
    family: Family = THREE_AP,
    q_lo: int = 1,
    q_hi: int | None = None,
    seeds_per_q: int = 1,
    window: int = 5,
    workers: int = 1,
) -> ThresholdEstimate:
    """Smallest ``q`` at which ``breaker_id`` beats ``maker_id`` in every seeded game.

    Strategy-vs-strategy outcomes need not be monotone in ``q``, so the
    binary-search candidate is followed by a linear scan of
    ``[q_hat - window, q_hat + window]`` and the scanned frontier is returned
    as observed.
    """
    if q_hi is None:
        q_hi = max(q_lo + 1, n)
    if not q_lo < q_hi:
        raise ConfigError("need q_lo < q_hi")
    cache: dict[int, str] = {}

    def outcome(q: int) -> str:
        if q not in cache:
            cfgs = [GameConfig(n, q, maker_id, breaker_id, family, s) for s in range(seeds_per_q)]
            recs = run_configs(cfgs, workers)
            cache[q] = "breaker" if all(r.winner == "breaker" for r in recs) else "maker"
        return cache[q]

    lo_w, hi_w = outcome(q_lo), outcome(q_hi)
    if lo_w == hi_w:
        raise NoCrossover(f"{lo_w} wins at both q={q_lo} and q={q_hi}")
    if lo_w == "breaker":
        raise NonMonotoneFrontier(f"Breaker wins at q={q_lo} but loses at q={q_hi}")
    lo, hi = q_lo, q_hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if outcome(mid) == "breaker":
            hi = mid
        else:
            lo = mid
    scan = range(max(q_lo, hi - window), min(q_hi, hi + window) + 1)
    frontier = [(q, outcome(q)) for q in scan]
    winners = [w for _, w in frontier]
    q_hat = next(q for q, w in frontier if w == "breaker")
    first = winners.index("breaker")
    monotone = all(w == "breaker" for w in winners[first:])
    return ThresholdEstimate(q_hat, frontier, monotone)


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------


@dataclass
class CalibrationResult:
    """Empirical stand-ins for the additive and multiplicative slack terms.

    ``C_cal`` is the smallest offset ``C`` with Breaker winning every game at
    ``q = ceil(sqrt(2n)) + C``. ``c_cal`` is the supremum of ``c <= 1`` such
    that Maker won every game at ``q = floor(c sqrt(n / (3 + 1.5 sqrt3)))``,
    with all smaller tested ``q`` also won.
    """

    C_cal: int | None
    c_cal: float | None
    offsets: dict[int, bool] = field(default_factory=dict)
    nonmonotone_offsets: list[int] = field(default_factory=list)
    maker_frontier: dict[int, int | None] = field(default_factory=dict)


def calibrate(
    records: Iterable[ExperimentRecord],
    breaker_id: str = "three-interval",
    maker_id: str = "mid-third",
    window: int = 5,
) -> CalibrationResult:
    records = [r for r in records if r.family == "3ap"]
    upper = [r for r in records if r.breaker_id == breaker_id]
    lower = [r for r in records if r.maker_id == maker_id]
    if not upper and not lower:
        raise InsufficientData("no records for either calibration target")

    C_cal = None
    offsets: dict[int, bool] = {}
    nonmono: list[int] = []
    if upper:
        ns = {r.n for r in upper}
        seen: dict[int, set[int]] = {}
        for r in upper:
            c = r.q - isqrt_ceil(2 * r.n)
            offsets[c] = offsets.get(c, True) and r.winner == "breaker"
            seen.setdefault(c, set()).add(r.n)
        complete = sorted(c for c in offsets if seen[c] == ns)
        C_cal = next((c for c in complete if offsets[c]), None)
        if C_cal is None:
            raise InsufficientData("Breaker lost at every tested offset")
        nonmono = sorted(c for c in offsets if c > C_cal and not offsets[c])
        if any(c > C_cal + window for c in nonmono):
            raise NonMonotoneFrontier(f"Breaker loses at offsets {nonmono} above C_cal={C_cal}")

    c_cal = None
    frontier: dict[int, int | None] = {}
    if lower:
        by_n: dict[int, dict[int, bool]] = {}
        for r in lower:
            won = by_n.setdefault(r.n, {})
            won[r.q] = won.get(r.q, True) and r.winner == "maker"
        c_cal = 1.0
        for n, won in sorted(by_n.items()):
            q_w = None
            for q in sorted(won):
                if not won[q]:
                    break
                q_w = q
            frontier[n] = q_w
            ref = evaluate_bound(BoundKind.PAPER_LOWER, n)
            c_cal = min(c_cal, 0.0 if q_w is None else (q_w + 1) / ref)
    return CalibrationResult(C_cal, c_cal, offsets, nonmono, frontier)
