"""Letter drafting, multi-pass label verification, and screening stats.

A candidate letter survives screening only if the teacher re-reads the
gold label out of it: pass 1 runs bare, later passes add a worked
chain-of-thought exemplar when one applies to the letter's template, and
the first matching pass's analysis/evidence are attached to the retained
record. Match is canonical-label equality, so "2 per week" and "2 per 1
week" agree. Stats are split by exemplar availability because the two
groups run different pass counts.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .clients import CoTExemplar, TeacherClient, validate_draft
from .errors import ClientError, ParseError
from .labels import FrequencyLabel, format_label, parse_label
from .templates import DescriptionPair, SyntheticIdentity


@dataclass(frozen=True)
class LetterRecord:
    """A synthetic letter with its ground-truth label and provenance."""

    id: str
    letter_text: str
    gold_label: FrequencyLabel
    template_id: str
    base_letter_id: str
    analysis: str | None = None
    evidence: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "evidence", tuple(self.evidence))

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "letterText": self.letter_text,
            "goldLabel": format_label(self.gold_label),
            "templateId": self.template_id,
            "baseLetterId": self.base_letter_id,
        }
        if self.analysis is not None:
            d["analysis"] = self.analysis
        if self.evidence:
            d["evidence"] = list(self.evidence)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "LetterRecord":
        return cls(
            id=str(d["id"]),
            letter_text=str(d["letterText"]),
            gold_label=parse_label(str(d["goldLabel"])),
            template_id=str(d.get("templateId", "")),
            base_letter_id=str(d.get("baseLetterId", "")),
            analysis=str(d["analysis"]) if "analysis" in d else None,
            evidence=tuple(str(s) for s in d.get("evidence", [])),
        )


@dataclass(frozen=True)
class PassResult:
    """One verification pass: what came back and whether it matched."""

    predicted: FrequencyLabel | None
    error: str | None
    matched: bool
    used_exemplar: bool


@dataclass(frozen=True)
class VerificationOutcome:
    record_id: str
    passes: tuple[PassResult, ...]
    retained: bool
    # the input record with the matching pass's analysis/evidence attached;
    # None when discarded
    record: "LetterRecord | None"

    @property
    def final_status(self) -> str:
        return "retained" if self.retained else "discarded"


@dataclass(frozen=True)
class GroupStats:
    """Screening tallies for one group (with or without an exemplar)."""

    total: int
    # discarded_per_pass[k] = records still failing after pass k+1; the
    # last entry is the group's final discard count
    discarded_per_pass: tuple[int, ...]

    @property
    def final_discards(self) -> int:
        return self.discarded_per_pass[-1] if self.discarded_per_pass else 0


@dataclass(frozen=True)
class ScreeningStats:
    total_candidates: int
    with_analysis: GroupStats
    without_analysis: GroupStats
    retained: int
    client_failures: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        accounted = (
            self.retained
            + self.with_analysis.final_discards
            + self.without_analysis.final_discards
            + len(self.client_failures)
        )
        if accounted != self.total_candidates:
            raise ValueError(
                f"stats do not conserve records: {accounted} accounted "
                f"of {self.total_candidates}"
            )


@dataclass(frozen=True)
class ScreeningConfig:
    """Pass counts per group and the client-call concurrency bound."""

    max_passes_with_exemplar: int = 3
    max_passes_without_exemplar: int = 2
    concurrency: int = 1

    def __post_init__(self) -> None:
        if self.max_passes_with_exemplar < 1 or self.max_passes_without_exemplar < 1:
            raise ValueError("pass counts must be >= 1")
        if self.concurrency < 1:
            raise ValueError("concurrency must be >= 1")

    def to_dict(self) -> dict:
        return {
            "max_passes_with_exemplar": self.max_passes_with_exemplar,
            "max_passes_without_exemplar": self.max_passes_without_exemplar,
            "concurrency": self.concurrency,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ScreeningConfig":
        known = {f: int(d[f]) for f in (
            "max_passes_with_exemplar", "max_passes_without_exemplar", "concurrency",
        ) if f in d}
        return cls(**known)


DEFAULT_SCREENING_CONFIG = ScreeningConfig()


def draft_letter(
    client: TeacherClient, base: str, pair: DescriptionPair
) -> tuple[str, SyntheticIdentity]:
    """Draft one letter around a description; identity stays separate.

    Raises :class:`MalformedDraft` if the draft is empty or contains no
    placeholder tokens; transport problems surface as :class:`ClientError`
    from the client (which owns the retry policy).
    """
    if not base.strip():
        raise ValueError("base letter is empty")
    draft_text, identity = client.draft(base, pair.description)
    validate_draft(draft_text)
    return draft_text, identity


def find_exemplar(
    exemplars: Sequence[CoTExemplar], template_id: str
) -> CoTExemplar | None:
    """First exemplar applicable to the template, in input order."""
    for exemplar in exemplars:
        if exemplar.applies_to(template_id):
            return exemplar
    return None


def verify_letter(
    client: TeacherClient,
    record: LetterRecord,
    exemplar: CoTExemplar | None,
    max_passes: int,
) -> VerificationOutcome:
    """Re-infer the label up to max_passes times; exemplar from pass 2 on.

    A prediction that fails to parse is a non-matching pass, not an error.
    On the first match the pass's analysis and evidence are attached to the
    record and verification stops.
    """
    if max_passes < 1:
        raise ValueError("max_passes must be >= 1")
    gold = format_label(record.gold_label)
    passes: list[PassResult] = []
    updated: LetterRecord | None = None
    for k in range(1, max_passes + 1):
        use_exemplar = exemplar is not None and k >= 2
        inference = client.infer(record.letter_text, exemplar if use_exemplar else None)
        predicted: FrequencyLabel | None
        error: str | None
        try:
            predicted = parse_label(inference.label_text)
            error = None
        except ParseError as err:
            predicted = None
            error = str(err)
        matched = predicted is not None and format_label(predicted) == gold
        passes.append(PassResult(predicted, error, matched, use_exemplar))
        if matched:
            updated = replace(
                record, analysis=inference.analysis, evidence=tuple(inference.evidence)
            )
            break
    return VerificationOutcome(record.id, tuple(passes), updated is not None, updated)


@dataclass(frozen=True)
class ScreeningResult:
    retained: tuple[LetterRecord, ...]
    stats: ScreeningStats
    outcomes: tuple[VerificationOutcome, ...]
    failures: tuple[tuple[str, str], ...] = field(default=())  # (record id, reason)


def _screen_one(
    client: TeacherClient,
    record: LetterRecord,
    exemplars: Sequence[CoTExemplar],
    config: ScreeningConfig,
) -> tuple[str, bool, VerificationOutcome]:
    exemplar = find_exemplar(exemplars, record.template_id)
    max_passes = (
        config.max_passes_with_exemplar
        if exemplar is not None
        else config.max_passes_without_exemplar
    )
    outcome = verify_letter(client, record, exemplar, max_passes)
    return record.id, exemplar is not None, outcome


def run_screening(
    client: TeacherClient,
    records: Sequence[LetterRecord],
    exemplars: Sequence[CoTExemplar] = (),
    config: ScreeningConfig = DEFAULT_SCREENING_CONFIG,
) -> ScreeningResult:
    """Verify every record and tabulate discards per pass per group.

    Per-record client errors are collected, not fatal; such records count
    in neither group's pass tallies. All outputs are sorted by record id,
    so results are identical regardless of concurrency.
    """
    if not records:
        raise ValueError("no records to screen")
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate record ids in screening input")

    outcomes: dict[str, VerificationOutcome] = {}
    grouped: dict[str, bool] = {}
    failures: dict[str, str] = {}

    def handle(record: LetterRecord) -> None:
        try:
            record_id, has_exemplar, outcome = _screen_one(client, record, exemplars, config)
        except ClientError as err:
            failures[record.id] = str(err)
            return
        grouped[record_id] = has_exemplar
        outcomes[record_id] = outcome

    if config.concurrency == 1:
        for record in records:
            handle(record)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            list(pool.map(handle, records))

    def group_stats(with_exemplar: bool, max_passes: int) -> GroupStats:
        group = [outcomes[rid] for rid, flag in grouped.items() if flag is with_exemplar]
        if not group:
            return GroupStats(0, ())
        per_pass = tuple(
            sum(1 for o in group if len(o.passes) > k and not o.passes[k].matched)
            for k in range(max_passes)
        )
        return GroupStats(len(group), per_pass)

    with_stats = group_stats(True, config.max_passes_with_exemplar)
    without_stats = group_stats(False, config.max_passes_without_exemplar)
    retained = tuple(
        sorted(
            (o.record for o in outcomes.values() if o.retained and o.record is not None),
            key=lambda r: r.id,
        )
    )
    stats = ScreeningStats(
        total_candidates=len(records),
        with_analysis=with_stats,
        without_analysis=without_stats,
        retained=len(retained),
        client_failures=tuple(sorted(failures)),
    )
    ordered_outcomes = tuple(outcomes[rid] for rid in sorted(outcomes))
    ordered_failures = tuple((rid, failures[rid]) for rid in sorted(failures))
    return ScreeningResult(retained, stats, ordered_outcomes, ordered_failures)


def render_screening(stats: ScreeningStats) -> str:
    """Render screening stats as TSV in the reference table's shape.

    One row per group, one column per pass; a group that runs fewer passes
    shows "-" in the missing columns.
    """
    n_passes = max(
        len(stats.with_analysis.discarded_per_pass),
        len(stats.without_analysis.discarded_per_pass),
        1,
    )
    header = "method\t" + "\t".join(f"pass {k + 1}" for k in range(n_passes))
    lines = [header]
    for name, group in (
        ("with analysis", stats.with_analysis),
        ("without analysis", stats.without_analysis),
    ):
        cells = [str(c) for c in group.discarded_per_pass]
        cells += ["-"] * (n_passes - len(cells))
        lines.append(name + "\t" + "\t".join(cells))
    lines.append(f"total candidates\t{stats.total_candidates}")
    lines.append(f"retained\t{stats.retained}")
    if stats.client_failures:
        lines.append(f"client failures\t{len(stats.client_failures)}")
    return "\n".join(lines) + "\n"


def check_retention_soundness(
    outcomes: Iterable[VerificationOutcome],
) -> None:
    """Assert each retained record's analysis came from a matching pass."""
    for outcome in outcomes:
        if not outcome.retained:
            continue
        if outcome.record is None or not outcome.passes[-1].matched:
            raise AssertionError(
                f"record {outcome.record_id}: retained without a matching pass"
            )
