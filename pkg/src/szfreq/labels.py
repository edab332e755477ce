"""Structured seizure-frequency labels.

A label is one of six surface forms:

* ``unknown``
* ``no seizure frequency reference``
* ``seizure free for <n|multiple> <month|year>``
* ``<n|multiple> per <n|multiple> <day|week|month|year>``
* ``<n|multiple> cluster per <n|multiple> <day|week|month|year>, <n|multiple> per cluster``
* ``unknown, <n|multiple> per cluster``

where ``<n>`` is a positive decimal or a range ``a to b``. Parsing is
case-insensitive, collapses whitespace, and accepts plural unit forms and an
omitted denominator (``2 per week`` means ``2 per 1 week``). Formatting emits
one canonical string per label (singular units, explicit denominator), so
``parse_label(format_label(x)) == x`` for every valid label.

Every label maps deterministically to a single "seizures per month" value:
0 for seizure freedom, 1000 for the unknown forms, and a positive rate
otherwise (see :func:`normalize`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum
from pathlib import Path
from typing import Mapping, Union

from .errors import ParseError

UNKNOWN_FREQUENCY = 1000.0


class TimeUnit(str, Enum):
    DAY = "day"
    WEEK = "week"
    MONTH = "month"
    YEAR = "year"


# ---------------------------------------------------------------------------
# Quantities
# ---------------------------------------------------------------------------


def _check_positive(name: str, value: float) -> None:
    if not (value > 0 and value != float("inf")):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class Exact:
    """A single stated count, e.g. the 2 in ``2 per week``."""

    value: float

    def __post_init__(self) -> None:
        _check_positive("exact quantity", self.value)


@dataclass(frozen=True)
class Range:
    """A stated span such as ``4 to 5``; policy decides which end is used."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        _check_positive("range lower bound", self.lo)
        if not self.hi > self.lo:
            raise ValueError(f"range requires lo < hi, got {self.lo!r} to {self.hi!r}")
        _check_positive("range upper bound", self.hi)


@dataclass(frozen=True)
class Multiple:
    """Recurrent events without a stated count (the keyword ``multiple``)."""


Quantity = Union[Exact, Range, Multiple]

MULTIPLE = Multiple()


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Unknown:
    """Seizures are mentioned but no interpretable frequency is stated."""


@dataclass(frozen=True)
class NoSeizureReference:
    """The text does not mention seizures at all."""


@dataclass(frozen=True)
class SeizureFree:
    """An explicit seizure-free duration; unit restricted to month/year."""

    duration: Quantity
    unit: TimeUnit

    def __post_init__(self) -> None:
        if self.unit not in (TimeUnit.MONTH, TimeUnit.YEAR):
            raise ValueError(f"seizure-free unit must be month or year, got {self.unit}")


@dataclass(frozen=True)
class Rate:
    """``count`` seizures per ``per`` units of time."""

    count: Quantity
    per: Quantity
    unit: TimeUnit


@dataclass(frozen=True)
class Cluster:
    """Clusters of seizures: spacing of clusters plus seizures per cluster."""

    clusters: Quantity
    per: Quantity
    unit: TimeUnit
    per_cluster: Quantity


@dataclass(frozen=True)
class UnknownCluster:
    """Cluster size is known but the spacing between clusters is not."""

    per_cluster: Quantity


FrequencyLabel = Union[Unknown, NoSeizureReference, SeizureFree, Rate, Cluster, UnknownCluster]

UNKNOWN = Unknown()
NO_SEIZURE_REFERENCE = NoSeizureReference()


# ---------------------------------------------------------------------------
# Normalization config
# ---------------------------------------------------------------------------

_DEFAULT_FACTORS: Mapping[TimeUnit, float] = {
    TimeUnit.DAY: 30.0,
    TimeUnit.WEEK: 4.0,
    TimeUnit.MONTH: 1.0,
    TimeUnit.YEAR: 1.0 / 12.0,
}


@dataclass(frozen=True)
class NormConfig:
    """Settings for mapping labels to a seizures-per-month value.

    ``unit_factors`` are the per-month multipliers for each time unit,
    ``multiple_value`` is the number substituted for the ``multiple``
    keyword, ranges resolve to their lower bound, and computed rates are
    rounded to ``rounding_dp`` places then clamped into
    ``(0, max_frequency]`` so that 1000 stays reserved for the unknown
    sentinel.
    """

    multiple_value: float = 3.0
    unit_factors: Mapping[TimeUnit, float] = field(default_factory=lambda: dict(_DEFAULT_FACTORS))
    range_policy: str = "lower-bound"
    rounding_dp: int = 3
    max_frequency: float = 999.0

    def __post_init__(self) -> None:
        if self.multiple_value <= 0:
            raise ValueError("multiple_value must be > 0")
        for unit in TimeUnit:
            if self.unit_factors.get(unit, 0) <= 0:
                raise ValueError(f"unit factor for {unit.value} must be > 0")
        if self.range_policy != "lower-bound":
            raise ValueError(f"unsupported range policy {self.range_policy!r}")
        if self.rounding_dp < 0:
            raise ValueError("rounding_dp must be >= 0")
        if not 0 < self.max_frequency < UNKNOWN_FREQUENCY:
            raise ValueError("max_frequency must lie in (0, 1000)")

    def to_dict(self) -> dict:
        d = {"multiple_value": self.multiple_value}
        d.update({unit.value: self.unit_factors[unit] for unit in TimeUnit})
        d.update(
            {
                "range_policy": self.range_policy,
                "rounding_dp": self.rounding_dp,
                "max_frequency": self.max_frequency,
            }
        )
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "NormConfig":
        factors = dict(_DEFAULT_FACTORS)
        for unit in TimeUnit:
            if unit.value in d:
                factors[unit] = float(d[unit.value])
        return cls(
            multiple_value=float(d.get("multiple_value", 3.0)),
            unit_factors=factors,
            range_policy=str(d.get("range_policy", "lower-bound")),
            rounding_dp=int(d.get("rounding_dp", 3)),
            max_frequency=float(d.get("max_frequency", 999.0)),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "NormConfig":
        """Load from a flat ``key = value`` file (``#`` comments allowed)."""
        d: dict[str, str] = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            d[key] = value
        return cls.from_dict(d)

    def to_file(self, path: str | Path) -> None:
        lines = [f"{key} = {value}" for key, value in self.to_dict().items()]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


DEFAULT_NORM_CONFIG = NormConfig()


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\d+(?:\.\d+)?|[a-z]+|,|\S")

_UNIT_WORDS = {
    "day": TimeUnit.DAY,
    "days": TimeUnit.DAY,
    "week": TimeUnit.WEEK,
    "weeks": TimeUnit.WEEK,
    "month": TimeUnit.MONTH,
    "months": TimeUnit.MONTH,
    "year": TimeUnit.YEAR,
    "years": TimeUnit.YEAR,
}

_KEYWORDS = {
    "unknown",
    "no",
    "seizure",
    "frequency",
    "reference",
    "free",
    "for",
    "multiple",
    "to",
    "per",
    "cluster",
    "clusters",
} | set(_UNIT_WORDS)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "word" | "comma"
    text: str
    pos: int


class _Mismatch(Exception):
    def __init__(self, pos: int):
        self.pos = pos


class _Cursor:
    def __init__(self, tokens: list[_Token], end_pos: int):
        self._tokens = tokens
        self._end_pos = end_pos
        self._i = 0

    def _fail(self) -> None:
        raise _Mismatch(self.pos())

    def pos(self) -> int:
        if self._i < len(self._tokens):
            return self._tokens[self._i].pos
        return self._end_pos

    def peek(self) -> _Token | None:
        return self._tokens[self._i] if self._i < len(self._tokens) else None

    def word(self, *accepted: str) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "word" or tok.text not in accepted:
            self._fail()
        self._i += 1
        return tok.text

    def comma(self) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "comma":
            self._fail()
        self._i += 1

    def number(self) -> float:
        tok = self.peek()
        if tok is None or tok.kind != "num":
            self._fail()
        self._i += 1
        return float(tok.text)

    def end(self) -> None:
        if self._i != len(self._tokens):
            self._fail()


def _tokenize(norm: str, candidates: tuple[str, ...]) -> list[_Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(norm):
        text = m.group()
        if text == ",":
            tokens.append(_Token("comma", text, m.start()))
        elif text[0].isdigit():
            tokens.append(_Token("num", text, m.start()))
        elif text.isalpha():
            if text not in _KEYWORDS:
                raise ParseError(norm, m.start(), candidates)
            tokens.append(_Token("word", text, m.start()))
        else:
            raise ParseError(norm, m.start(), candidates)
    return tokens


def _quantity(cur: _Cursor) -> Quantity:
    tok = cur.peek()
    if tok is not None and tok.kind == "word" and tok.text == "multiple":
        cur.word("multiple")
        return MULTIPLE
    pos = cur.pos()
    lo = cur.number()
    nxt = cur.peek()
    if nxt is not None and nxt.kind == "word" and nxt.text == "to":
        cur.word("to")
        hi_pos = cur.pos()
        hi = cur.number()
        if not (0 < lo < hi):
            raise _Mismatch(hi_pos)
        return Range(lo, hi)
    if lo <= 0:
        raise _Mismatch(pos)
    return Exact(lo)


def _unit(cur: _Cursor, allowed: tuple[TimeUnit, ...] | None = None) -> TimeUnit:
    pos = cur.pos()
    word = cur.word(*_UNIT_WORDS)
    unit = _UNIT_WORDS[word]
    if allowed is not None and unit not in allowed:
        raise _Mismatch(pos)
    return unit


def _denominator(cur: _Cursor) -> Quantity:
    # "per week" is shorthand for "per 1 week"
    tok = cur.peek()
    if tok is not None and (tok.kind == "num" or tok.text == "multiple"):
        return _quantity(cur)
    return Exact(1.0)


def _p_unknown(cur: _Cursor) -> FrequencyLabel:
    cur.word("unknown")
    cur.end()
    return UNKNOWN


def _p_no_reference(cur: _Cursor) -> FrequencyLabel:
    cur.word("no")
    cur.word("seizure")
    cur.word("frequency")
    cur.word("reference")
    cur.end()
    return NO_SEIZURE_REFERENCE


def _p_seizure_free(cur: _Cursor) -> FrequencyLabel:
    cur.word("seizure")
    cur.word("free")
    cur.word("for")
    duration = _quantity(cur)
    unit = _unit(cur, allowed=(TimeUnit.MONTH, TimeUnit.YEAR))
    cur.end()
    return SeizureFree(duration, unit)


def _p_rate(cur: _Cursor) -> FrequencyLabel:
    count = _quantity(cur)
    cur.word("per")
    per = _denominator(cur)
    unit = _unit(cur)
    cur.end()
    return Rate(count, per, unit)


def _p_cluster(cur: _Cursor) -> FrequencyLabel:
    clusters = _quantity(cur)
    cur.word("cluster", "clusters")
    cur.word("per")
    per = _denominator(cur)
    unit = _unit(cur)
    cur.comma()
    per_cluster = _quantity(cur)
    cur.word("per")
    cur.word("cluster")
    cur.end()
    return Cluster(clusters, per, unit, per_cluster)


def _p_unknown_cluster(cur: _Cursor) -> FrequencyLabel:
    cur.word("unknown")
    cur.comma()
    per_cluster = _quantity(cur)
    cur.word("per")
    cur.word("cluster")
    cur.end()
    return UnknownCluster(per_cluster)


_FORMATS = (
    ("unknown", _p_unknown),
    ("no seizure frequency reference", _p_no_reference),
    ("seizure free for <n> <month|year>", _p_seizure_free),
    ("<n> per <n> <unit>", _p_rate),
    ("<n> cluster per <n> <unit>, <n> per cluster", _p_cluster),
    ("unknown, <n> per cluster", _p_unknown_cluster),
)

_FORMAT_NAMES = tuple(name for name, _ in _FORMATS)


def parse_label(text: str) -> FrequencyLabel:
    """Parse a frequency-label string into its structured form.

    Raises :class:`ParseError` (with position and the formats attempted)
    when no format matches.

    >>> parse_label("4 to 5 per month")
    Rate(count=Range(lo=4.0, hi=5.0), per=Exact(value=1.0), unit=<TimeUnit.MONTH: 'month'>)
    """
    norm = " ".join(text.lower().split())
    tokens = _tokenize(norm, _FORMAT_NAMES)
    furthest = 0
    for _, parser in _FORMATS:
        cur = _Cursor(tokens, len(norm))
        try:
            return parser(cur)
        except _Mismatch as miss:
            furthest = max(furthest, miss.pos)
    raise ParseError(norm, furthest, _FORMAT_NAMES)


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------


def _format_number(value: float) -> str:
    if value == int(value):
        return str(int(value))
    # positional form of the shortest repr, so the string parses back exactly
    return format(Decimal(repr(value)), "f")


def _format_quantity(q: Quantity) -> str:
    if isinstance(q, Multiple):
        return "multiple"
    if isinstance(q, Range):
        return f"{_format_number(q.lo)} to {_format_number(q.hi)}"
    return _format_number(q.value)


def format_label(label: FrequencyLabel) -> str:
    """Render the canonical surface string for a label.

    Canonical form uses singular units, digits, and an explicit denominator
    (``multiple per 1 month``, never ``multiple per month``).
    """
    if isinstance(label, Unknown):
        return "unknown"
    if isinstance(label, NoSeizureReference):
        return "no seizure frequency reference"
    if isinstance(label, SeizureFree):
        return f"seizure free for {_format_quantity(label.duration)} {label.unit.value}"
    if isinstance(label, Rate):
        return (
            f"{_format_quantity(label.count)} per "
            f"{_format_quantity(label.per)} {label.unit.value}"
        )
    if isinstance(label, Cluster):
        return (
            f"{_format_quantity(label.clusters)} cluster per "
            f"{_format_quantity(label.per)} {label.unit.value}, "
            f"{_format_quantity(label.per_cluster)} per cluster"
        )
    if isinstance(label, UnknownCluster):
        return f"unknown, {_format_quantity(label.per_cluster)} per cluster"
    raise TypeError(f"not a FrequencyLabel: {label!r}")


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def resolve_quantity(q: Quantity, cfg: NormConfig = DEFAULT_NORM_CONFIG) -> float:
    """Collapse a quantity to a single number (ranges to their lower bound)."""
    if isinstance(q, Exact):
        return q.value
    if isinstance(q, Multiple):
        return cfg.multiple_value
    return q.lo


def raw_frequency(label: FrequencyLabel, cfg: NormConfig = DEFAULT_NORM_CONFIG) -> float:
    """Seizures per month before rounding and clamping."""
    if isinstance(label, (Unknown, NoSeizureReference, UnknownCluster)):
        return UNKNOWN_FREQUENCY
    if isinstance(label, SeizureFree):
        return 0.0
    factor = cfg.unit_factors[label.unit]
    if isinstance(label, Rate):
        return resolve_quantity(label.count, cfg) / resolve_quantity(label.per, cfg) * factor
    if isinstance(label, Cluster):
        return (
            resolve_quantity(label.clusters, cfg)
            / resolve_quantity(label.per, cfg)
            * factor
            * resolve_quantity(label.per_cluster, cfg)
        )
    raise TypeError(f"not a FrequencyLabel: {label!r}")


def _round_half_up(value: float, dp: int) -> float:
    quantum = Decimal(1).scaleb(-dp)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def normalize(label: FrequencyLabel, cfg: NormConfig = DEFAULT_NORM_CONFIG) -> float:
    """Map a label to its seizures-per-month value.

    Total over all labels: seizure freedom gives 0, the unknown forms give
    1000, and rate/cluster labels give a value in ``(0, max_frequency]``
    (rounded to ``rounding_dp`` places; results that would round to 0 or
    exceed ``max_frequency`` are clamped to the nearest in-range value).

    >>> normalize(parse_label("1 per year"))
    0.083
    """
    if isinstance(label, (Unknown, NoSeizureReference, UnknownCluster)):
        return UNKNOWN_FREQUENCY
    if isinstance(label, SeizureFree):
        return 0.0
    x = _round_half_up(raw_frequency(label, cfg), cfg.rounding_dp)
    smallest = 10.0 ** -cfg.rounding_dp
    return min(max(x, smallest), cfg.max_frequency)
