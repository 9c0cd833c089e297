"""Activity vocabulary, body positions, and the two fall/non-fall labeling schemes.

The activity protocol follows the IPqM-Fall collection: Activities of Daily
Living (ADL), Military Operation activities (OM), and simulated falls (FALL).
Codes ADL_9, ADL_10 and FALL_4 were never recorded and are invalid.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class BodyPosition(enum.Enum):
    """Where the sensing device was worn."""

    CHEST = "chest"
    LEFT_WRIST = "left"
    RIGHT_WRIST = "right"

    @property
    def window_length(self) -> int:
        """Samples per 5-second window: 1025 for the chest phone, 450 for watches."""
        return 1025 if self is BodyPosition.CHEST else 450


class SensorKind(enum.Enum):
    LINEAR_ACCELERATION = "acceleration"
    ANGULAR_SPEED = "angular_speed"


class LabelingScheme(enum.Enum):
    """L1 counts prone-shooting transitions OM6-OM8 as falls; L2 does not."""

    L1 = "l1"
    L2 = "l2"


VALID_INDICES: dict[str, frozenset[int]] = {
    "ADL": frozenset(list(range(1, 9)) + list(range(11, 16))),
    "OM": frozenset(range(1, 10)),
    "FALL": frozenset({1, 2, 3, 5, 6}),
}

# Per-trial recording durations in seconds, from the collection protocol.
_DURATIONS: dict[tuple[str, int], float] = {
    ("ADL", 1): 180.0,
    ("ADL", 2): 180.0,
    ("ADL", 3): 30.0,
    ("ADL", 4): 30.0,
    ("ADL", 5): 10.0,
    ("ADL", 6): 10.0,
    ("ADL", 7): 5.0,
    ("ADL", 8): 5.0,
    ("ADL", 11): 30.0,
    ("ADL", 12): 30.0,
    ("ADL", 13): 15.0,
    ("ADL", 14): 15.0,
    ("ADL", 15): 10.0,
    ("OM", 1): 180.0,
    ("OM", 2): 45.0,
    ("OM", 3): 10.0,
    ("OM", 4): 60.0,
    ("OM", 5): 45.0,
    ("OM", 6): 10.0,
    ("OM", 7): 60.0,
    ("OM", 8): 45.0,
    ("OM", 9): 50.0,
    ("FALL", 1): 10.0,
    ("FALL", 2): 10.0,
    ("FALL", 3): 10.0,
    ("FALL", 5): 10.0,
    ("FALL", 6): 10.0,
}

_NAME_RE = re.compile(r"(ADL|OM|FALL)[\s_-]*(\d+)", re.IGNORECASE)


@dataclass(frozen=True)
class ActivityCode:
    """One protocol activity, e.g. FALL_3 or OM_6 performed with a rifle."""

    family: str  # "ADL" | "OM" | "FALL"
    index: int
    with_rifle: bool = False

    def __post_init__(self) -> None:
        if self.family not in VALID_INDICES:
            raise ValueError(f"unknown activity family {self.family!r}")
        if self.index not in VALID_INDICES[self.family]:
            raise ValueError(f"invalid activity index {self.family}_{self.index}")

    @property
    def name(self) -> str:
        suffix = "_withRifle" if self.with_rifle else ""
        return f"{self.family}_{self.index}{suffix}"

    @property
    def duration_s(self) -> float:
        """Nominal trial duration in seconds per the collection protocol."""
        return _DURATIONS[(self.family, self.index)]

    @classmethod
    def parse(cls, name: str, with_rifle: bool = False) -> "ActivityCode":
        """Parse an exercise-name string such as 'ADL_2', 'fall 3' or 'OM-6'.

        The surrounding text is treated as opaque; only the family token and
        index are matched.  Raises ValueError when no activity token is found.
        """
        m = _NAME_RE.search(name)
        if m is None:
            raise ValueError(f"unrecognized exercise name {name!r}")
        return cls(m.group(1).upper(), int(m.group(2)), with_rifle)


def all_activity_codes(with_rifle_variants: bool = False) -> list[ActivityCode]:
    """Full activity vocabulary; optionally include the rifle variants of OM/FALL."""
    codes = [
        ActivityCode(family, index)
        for family in ("ADL", "OM", "FALL")
        for index in sorted(VALID_INDICES[family])
    ]
    if with_rifle_variants:
        codes += [
            ActivityCode(c.family, c.index, with_rifle=True)
            for c in codes
            if c.family in ("OM", "FALL")
        ]
    return codes


def label_for(activity: ActivityCode, scheme: LabelingScheme) -> int:
    """Binary fall label: FALL_* is always 1; OM6/OM7/OM8 flip with the scheme."""
    if activity.family == "FALL":
        return 1
    if activity.family == "OM" and activity.index in (6, 7, 8):
        return 1 if scheme is LabelingScheme.L1 else 0
    return 0
