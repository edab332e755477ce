"""Codecs for the four model-output formats.

Format 1 is a bare seizures-per-month number, Format 2 one of the four
coarse category phrases, Format 3 a frequency-label string, and Format 4 a
JSON object carrying an analysis, the label, and evidence spans copied from
the source letter. Parsing of Format 4 is tolerant of surrounding prose and
code fences, because decoding drift in model output must not take the
scorer down with it. Whatever the format, a prediction converts to the same
pair of (purist, pragmatic) categories for evaluation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .binning import PragmaticClass, PuristClass, bin_pragmatic, bin_purist
from .errors import DomainError, LabelParseError, ParseError
from .labels import (
    DEFAULT_NORM_CONFIG,
    UNKNOWN_FREQUENCY,
    FrequencyLabel,
    NormConfig,
    normalize,
    parse_label,
)


class PredictionFormat(Enum):
    F1_X_PER_MONTH = "1"
    F2_PRAGMATIC = "2"
    F3_LABEL = "3"
    F4_COT = "4"

    @classmethod
    def from_string(cls, text: str) -> "PredictionFormat":
        key = str(text).strip().lower()
        aliases = {
            "1": cls.F1_X_PER_MONTH,
            "f1": cls.F1_X_PER_MONTH,
            "x_per_month": cls.F1_X_PER_MONTH,
            "2": cls.F2_PRAGMATIC,
            "f2": cls.F2_PRAGMATIC,
            "pragmatic": cls.F2_PRAGMATIC,
            "categ": cls.F2_PRAGMATIC,
            "3": cls.F3_LABEL,
            "f3": cls.F3_LABEL,
            "label": cls.F3_LABEL,
            "4": cls.F4_COT,
            "f4": cls.F4_COT,
            "cot": cls.F4_COT,
        }
        if key not in aliases:
            raise ValueError(f"unknown prediction format {text!r}")
        return aliases[key]


@dataclass(frozen=True)
class CotPrediction:
    analysis: str
    label: FrequencyLabel
    evidence: tuple[str, ...]


ParsedPrediction = Union[float, PragmaticClass, FrequencyLabel, CotPrediction]


@dataclass(frozen=True)
class Prediction:
    format: PredictionFormat
    raw: str
    parsed: ParsedPrediction


@dataclass(frozen=True)
class EvidenceCheck:
    span: str
    found: bool
    match_kind: str  # "exact" | "whitespace-normalized" | "none"


_NUMBER_RE = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)$")

_FORMAT2_NAME = "one of: frequent seizures, infrequent seizures, unknown, no seizures"

_FORMAT2_PHRASES = {
    "frequent seizures": PragmaticClass.FREQUENT,
    "frequent": PragmaticClass.FREQUENT,
    "infrequent seizures": PragmaticClass.INFREQUENT,
    "infrequent": PragmaticClass.INFREQUENT,
    "unknown": PragmaticClass.UNK,
    "no seizures": PragmaticClass.NS,
    "no seizure": PragmaticClass.NS,
    "no": PragmaticClass.NS,
}


def parse_format1(text: str) -> float:
    """Parse a bare seizures-per-month number and validate its codomain."""
    stripped = text.strip()
    if not _NUMBER_RE.match(stripped):
        raise ParseError(stripped, 0, ("a single decimal number",))
    x = float(stripped)
    if not (x == 0.0 or x == UNKNOWN_FREQUENCY or 0 < x <= 999.0):
        raise DomainError(f"number {x!r} outside the codomain {{0}} ∪ (0, 999] ∪ {{1000}}")
    return x


def parse_format2(text: str) -> PragmaticClass:
    """Match one of the four category phrases (case-insensitive)."""
    norm = " ".join(text.lower().split())
    if norm not in _FORMAT2_PHRASES:
        raise ParseError(norm, 0, (_FORMAT2_NAME,))
    return _FORMAT2_PHRASES[norm]


def parse_format3(text: str) -> FrequencyLabel:
    """Parse a frequency-label string (delegates to the label grammar)."""
    return parse_label(text)


def _first_json_object(text: str) -> dict:
    cleaned = re.sub(r"```(?:json)?", "", text, flags=re.IGNORECASE).replace("```", "")
    decoder = json.JSONDecoder()
    for start in range(len(cleaned)):
        if cleaned[start] != "{":
            continue
        try:
            obj, _ = decoder.raw_decode(cleaned, start)
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict):
            return obj
    raise ParseError(text.strip(), 0, ("a JSON object",))


def parse_format4(text: str) -> CotPrediction:
    """Extract the analysis / label / evidence object from model output.

    Tolerates surrounding prose and code fences; requires an ``analysis``
    string and a ``seizure_frequency_number`` array whose first element is
    the label string, with any following elements taken as evidence spans.
    An empty evidence list is allowed (flagged later by the evidence check,
    not here).
    """
    obj = _first_json_object(text)
    if "analysis" not in obj or not isinstance(obj["analysis"], str):
        raise ParseError(text.strip(), 0, ('an object with a string "analysis" field',))
    payload = obj.get("seizure_frequency_number")
    if not isinstance(payload, list) or not payload or not isinstance(payload[0], str):
        raise ParseError(
            text.strip(),
            0,
            ('an object with a "seizure_frequency_number" array led by a label string',),
        )
    try:
        label = parse_label(payload[0])
    except ParseError as err:
        raise LabelParseError(payload[0], err.position, err.candidates) from err
    evidence = tuple(str(span) for span in payload[1:])
    return CotPrediction(obj["analysis"], label, evidence)


def parse_prediction(fmt: PredictionFormat, raw: str) -> Prediction:
    """Parse raw model output under the declared format."""
    if fmt is PredictionFormat.F1_X_PER_MONTH:
        parsed: ParsedPrediction = parse_format1(raw)
    elif fmt is PredictionFormat.F2_PRAGMATIC:
        parsed = parse_format2(raw)
    elif fmt is PredictionFormat.F3_LABEL:
        parsed = parse_format3(raw)
    else:
        parsed = parse_format4(raw)
    return Prediction(fmt, raw, parsed)


_WS_RE = re.compile(r"\s+")


def check_evidence(letter: str, span: str) -> EvidenceCheck:
    """Test whether an evidence span really occurs in the letter.

    Exact substring match first; otherwise a match after collapsing
    whitespace runs in both strings (line wraps etc.). Anything fuzzier is
    deliberately not attempted.
    """
    if span and span in letter:
        return EvidenceCheck(span, True, "exact")
    norm_span = _WS_RE.sub(" ", span).strip()
    norm_letter = _WS_RE.sub(" ", letter)
    if norm_span and norm_span in norm_letter:
        return EvidenceCheck(span, True, "whitespace-normalized")
    return EvidenceCheck(span, False, "none")


def to_categories(
    pred: Prediction, cfg: NormConfig = DEFAULT_NORM_CONFIG
) -> tuple[PuristClass | None, PragmaticClass]:
    """Convert a parsed prediction to its (purist, pragmatic) categories.

    Format 2 carries no fine-grained information, so its purist slot is
    ``None`` (rendered as "-" in reports).
    """
    if pred.format is PredictionFormat.F1_X_PER_MONTH:
        x = pred.parsed
        return bin_purist(x), bin_pragmatic(x)
    if pred.format is PredictionFormat.F2_PRAGMATIC:
        return None, pred.parsed
    label = pred.parsed.label if isinstance(pred.parsed, CotPrediction) else pred.parsed
    x = normalize(label, cfg)
    return bin_purist(x), bin_pragmatic(x)
