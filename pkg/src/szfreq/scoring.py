"""Score prediction files against gold labels under either scheme.

Gold records become classes by normalizing their label (or taking the
numeric value directly) and binning. Predictions go through the format
codec; anything unparseable scores as the reserved SYSTEM_INVALID class,
which only appears in the class list when it actually occurs, so clean
runs keep the standard class sets. Coarse-category predictions carry no
fine-grained class, so under the fine scheme they are set aside and
counted as not-applicable rather than scored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .binning import PragmaticClass, PuristClass, bin_pragmatic, bin_purist
from .corpus import GoldRecord, PredictionRecord, align_by_id
from .errors import DomainError, ParseError
from .formats import PredictionFormat, parse_prediction, to_categories
from .labels import DEFAULT_NORM_CONFIG, NormConfig, normalize
from .metrics import SYSTEM_INVALID, Report, class_report

PURIST_CLASSES = tuple(c.abbrev for c in PuristClass)
PRAGMATIC_CLASSES = tuple(c.abbrev for c in PragmaticClass)

SCHEMES = ("purist", "pragmatic")


@dataclass(frozen=True)
class SchemeResult:
    """Outcome of scoring one scheme over an aligned gold/prediction set.

    ``report`` is None when nothing was scorable (every prediction was
    coarse-only under the fine scheme); reports print that as "-".
    """

    scheme: str
    report: Report | None
    not_applicable: int
    invalid: int
    scored: int


def gold_categories(
    gold: GoldRecord, cfg: NormConfig = DEFAULT_NORM_CONFIG
) -> tuple[PuristClass, PragmaticClass]:
    x = normalize(gold.label, cfg) if gold.label is not None else float(gold.x)
    return bin_purist(x), bin_pragmatic(x)


def predicted_categories(
    prediction: PredictionRecord, cfg: NormConfig = DEFAULT_NORM_CONFIG
) -> tuple[PuristClass | None, PragmaticClass] | None:
    """Categories for a raw prediction; None when it does not parse."""
    try:
        fmt = PredictionFormat.from_string(prediction.format)
    except ValueError as err:
        raise DomainError(str(err)) from err
    try:
        parsed = parse_prediction(fmt, prediction.raw)
        return to_categories(parsed, cfg)
    except (ParseError, DomainError):
        return None


def evaluate_records(
    golds: Sequence[GoldRecord],
    predictions: Sequence[PredictionRecord],
    scheme: str,
    cfg: NormConfig = DEFAULT_NORM_CONFIG,
) -> SchemeResult:
    """Convert, bin, and score one scheme over id-aligned records."""
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    aligned = align_by_id(golds, predictions)
    gold_names: list[str] = []
    pred_names: list[str] = []
    not_applicable = 0
    invalid = 0
    for gold, prediction in aligned:
        purist_gold, pragmatic_gold = gold_categories(gold, cfg)
        if scheme == "purist" and PredictionFormat.from_string(
            prediction.format
        ) is PredictionFormat.F2_PRAGMATIC:
            # coarse-only output has no fine class, parseable or not
            not_applicable += 1
            continue
        categories = predicted_categories(prediction, cfg)
        if categories is None:
            invalid += 1
            gold_names.append(
                purist_gold.abbrev if scheme == "purist" else pragmatic_gold.abbrev
            )
            pred_names.append(SYSTEM_INVALID)
            continue
        purist_pred, pragmatic_pred = categories
        if scheme == "purist":
            if purist_pred is None:
                not_applicable += 1
                continue
            gold_names.append(purist_gold.abbrev)
            pred_names.append(purist_pred.abbrev)
        else:
            gold_names.append(pragmatic_gold.abbrev)
            pred_names.append(pragmatic_pred.abbrev)
    if not gold_names:
        return SchemeResult(scheme, None, not_applicable, invalid, 0)
    classes = list(PURIST_CLASSES if scheme == "purist" else PRAGMATIC_CLASSES)
    if SYSTEM_INVALID in pred_names:
        classes.append(SYSTEM_INVALID)
    report = class_report(gold_names, pred_names, classes)
    return SchemeResult(scheme, report, not_applicable, invalid, len(gold_names))
