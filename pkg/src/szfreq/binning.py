"""Fixed category tables for normalized seizure frequencies.

Two schemes over the seizures-per-month value ``x``: a fine 10-way scheme
(eight half-open numeric bins plus the ``UNK``/``NS`` sentinels) and a
coarse 4-way scheme (infrequent / frequent / UNK / NS). The numeric bins
partition ``(0, 999]``; ``x = 0`` means "no seizures" and ``x = 1000``
means "unknown". Intervals are half-open ``(lo, hi]``, so a boundary value
belongs to the lower class.
"""

from __future__ import annotations

from enum import Enum

from .errors import DomainError
from .labels import UNKNOWN_FREQUENCY


class PuristClass(Enum):
    LT_1_PER_6M = "<1/6M"
    EQ_1_PER_6M = "1/6M"
    BETW_6M_1M = "(1/6M,1/M)"
    EQ_1_PER_M = "1/M"
    BETW_1M_1W = "(1/M,1/W)"
    EQ_1_PER_W = "1/W"
    BETW_1W_1D = "(1/W,1/D)"
    GE_1_PER_D = "≥1/D"
    UNK = "UNK"
    NS = "NS"

    @property
    def abbrev(self) -> str:
        return self.value

    @classmethod
    def from_string(cls, text: str) -> "PuristClass":
        # ">=1/D" is the ASCII spelling of "≥1/D" used in plain-text files
        text = text.strip()
        if text == ">=1/D":
            return cls.GE_1_PER_D
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"not a purist class abbreviation: {text!r}")


class PragmaticClass(Enum):
    INFREQUENT = "infrequent"
    FREQUENT = "frequent"
    UNK = "UNK"
    NS = "NS"

    @property
    def abbrev(self) -> str:
        return self.value

    @classmethod
    def from_string(cls, text: str) -> "PragmaticClass":
        text = text.strip()
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"not a pragmatic class abbreviation: {text!r}")


# (upper bound, class) for the eight numeric bins; intervals are (lo, hi]
# with lo the previous bound (0 for the first).
BIN_TABLE: tuple[tuple[float, PuristClass], ...] = (
    (0.16, PuristClass.LT_1_PER_6M),
    (0.18, PuristClass.EQ_1_PER_6M),
    (0.99, PuristClass.BETW_6M_1M),
    (1.1, PuristClass.EQ_1_PER_M),
    (3.9, PuristClass.BETW_1M_1W),
    (4.1, PuristClass.EQ_1_PER_W),
    (29.0, PuristClass.BETW_1W_1D),
    (999.0, PuristClass.GE_1_PER_D),
)

MAX_BINNABLE = BIN_TABLE[-1][0]

_COARSE = {
    PuristClass.LT_1_PER_6M: PragmaticClass.INFREQUENT,
    PuristClass.EQ_1_PER_6M: PragmaticClass.INFREQUENT,
    PuristClass.BETW_6M_1M: PragmaticClass.INFREQUENT,
    PuristClass.EQ_1_PER_M: PragmaticClass.INFREQUENT,
    PuristClass.BETW_1M_1W: PragmaticClass.FREQUENT,
    PuristClass.EQ_1_PER_W: PragmaticClass.FREQUENT,
    PuristClass.BETW_1W_1D: PragmaticClass.FREQUENT,
    PuristClass.GE_1_PER_D: PragmaticClass.FREQUENT,
    PuristClass.UNK: PragmaticClass.UNK,
    PuristClass.NS: PragmaticClass.NS,
}


def _check_domain(x: float) -> None:
    if x != x:  # NaN
        raise DomainError("frequency is NaN")
    if x == 0.0 or x == UNKNOWN_FREQUENCY:
        return
    if not 0 < x <= MAX_BINNABLE:
        raise DomainError(
            f"frequency {x!r} outside the codomain {{0}} ∪ (0, {MAX_BINNABLE}] ∪ {{1000}}"
        )


def bin_purist(x: float) -> PuristClass:
    """Assign a normalized frequency to its 10-way class.

    Raises :class:`DomainError` for values outside
    ``{0} ∪ (0, 999] ∪ {1000}``.
    """
    _check_domain(x)
    if x == 0.0:
        return PuristClass.NS
    if x == UNKNOWN_FREQUENCY:
        return PuristClass.UNK
    for upper, cls in BIN_TABLE:
        if x <= upper:
            return cls
    raise DomainError(f"frequency {x!r} not covered by the bin table")  # unreachable


def bin_pragmatic(x: float) -> PragmaticClass:
    """Assign a normalized frequency to its 4-way class."""
    _check_domain(x)
    if x == 0.0:
        return PragmaticClass.NS
    if x == UNKNOWN_FREQUENCY:
        return PragmaticClass.UNK
    return PragmaticClass.INFREQUENT if x <= 1.1 else PragmaticClass.FREQUENT


def coarsen(cls: PuristClass) -> PragmaticClass:
    """Collapse a 10-way class to its 4-way grouping."""
    return _COARSE[cls]
