"""Game events recorded in transcripts."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any


@dataclass(frozen=True)
class MiddleFilled:
    round: int


@dataclass(frozen=True)
class PivotFound:
    i: int
    strength: int


@dataclass(frozen=True)
class GuaranteeViolated:
    """A Breaker strategy left its proven regime.

    ``check`` is ``"overflow"`` when more threats were open than Breaker
    could block, or ``"capacity"`` when the post-middle threat budget
    ``3*m_side + 2*m2(t*) <= q`` failed.
    """

    round: int
    deficit: int
    check: str = "overflow"


@dataclass(frozen=True)
class ImmediateWinTaken:
    round: int


Event = MiddleFilled | PivotFound | GuaranteeViolated | ImmediateWinTaken

_BY_NAME = {cls.__name__: cls for cls in (MiddleFilled, PivotFound, GuaranteeViolated, ImmediateWinTaken)}


def event_to_dict(event: Event) -> dict[str, Any]:
    return {"type": type(event).__name__, **asdict(event)}


def event_from_dict(data: dict[str, Any]) -> Event:
    fields = dict(data)
    cls = _BY_NAME[fields.pop("type")]
    return cls(**fields)
