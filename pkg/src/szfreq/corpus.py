"""JSONL corpus files: one UTF-8 JSON object per line, unique string ids.

Readers raise :class:`DataError` naming the file and 1-based line number,
so a bad record in a million-line file is findable. Writers emit keys in a
stable order and end with a newline, making outputs diffable and re-runs
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping, Sequence, TypeVar

from .clients import CoTExemplar
from .errors import DataError, ParseError
from .labels import FrequencyLabel, format_label, parse_label
from .pipeline import LetterRecord
from .templates import DescriptionPair, DescriptionTemplate, SyntheticIdentity

T = TypeVar("T")


def read_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line number, object) for each non-blank line."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise DataError(f"{path}: {err}") from err
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise DataError(f"{path}:{line_no}: not valid JSON: {err.msg}") from err
        if not isinstance(obj, dict):
            raise DataError(f"{path}:{line_no}: expected a JSON object")
        yield line_no, obj


def write_jsonl(path: str | Path, objects: Iterable[Mapping]) -> int:
    """Write one compact JSON object per line; returns the record count."""
    path = Path(path)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj, ensure_ascii=False))
            fh.write("\n")
            count += 1
    return count


def _load(
    path: str | Path,
    decode: Callable[[Mapping], T],
    id_of: Callable[[T], str] | None = None,
) -> list[T]:
    """Decode every record, citing file:line on failure; ids must be unique."""
    out: list[T] = []
    seen: dict[str, int] = {}
    for line_no, obj in read_jsonl(path):
        try:
            record = decode(obj)
        except DataError:
            raise
        except (KeyError, TypeError, ValueError, ParseError) as err:
            raise DataError(f"{path}:{line_no}: {err}") from err
        if id_of is not None:
            rid = id_of(record)
            if rid in seen:
                raise DataError(
                    f"{path}:{line_no}: duplicate id {rid!r} (first at line {seen[rid]})"
                )
            seen[rid] = line_no
        out.append(record)
    return out


# ---------------------------------------------------------------------------
# Templates and description pairs
# ---------------------------------------------------------------------------


def load_templates(path: str | Path) -> list[DescriptionTemplate]:
    return _load(path, DescriptionTemplate.from_dict, lambda t: t.id)


def save_templates(path: str | Path, templates: Iterable[DescriptionTemplate]) -> int:
    return write_jsonl(path, (t.to_dict() for t in templates))


def pair_to_dict(pair: DescriptionPair) -> dict:
    return {
        "description": pair.description,
        "label": format_label(pair.label),
        "templateId": pair.template_id,
        "assignment": {str(k): v for k, v in sorted(pair.assignment.items())},
    }


def pair_from_dict(d: Mapping) -> DescriptionPair:
    return DescriptionPair(
        description=str(d["description"]),
        label=parse_label(str(d["label"])),
        template_id=str(d["templateId"]),
        assignment={int(k): str(v) for k, v in dict(d["assignment"]).items()},
    )


def load_pairs(path: str | Path) -> list[DescriptionPair]:
    return _load(path, pair_from_dict, lambda p: p.id)


def save_pairs(path: str | Path, pairs: Iterable[DescriptionPair]) -> int:
    return write_jsonl(path, (pair_to_dict(p) for p in pairs))


# ---------------------------------------------------------------------------
# Base letters, identities, letter records, exemplars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BaseLetter:
    id: str
    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError(f"base letter {self.id!r} has empty text")


def load_base_letters(path: str | Path) -> list[BaseLetter]:
    return _load(
        path,
        lambda d: BaseLetter(str(d["id"]), str(d["text"])),
        lambda b: b.id,
    )


def save_base_letters(path: str | Path, letters: Iterable[BaseLetter]) -> int:
    return write_jsonl(path, ({"id": b.id, "text": b.text} for b in letters))


def identity_to_dict(record_id: str, identity: SyntheticIdentity) -> dict:
    return {"id": record_id, "identity": dict(identity.values)}


def load_identities(path: str | Path) -> dict[str, SyntheticIdentity]:
    rows = _load(
        path,
        lambda d: (str(d["id"]), SyntheticIdentity({str(k): str(v) for k, v in dict(d["identity"]).items()})),
        lambda pair: pair[0],
    )
    return dict(rows)


def save_identities(
    path: str | Path, identities: Mapping[str, SyntheticIdentity]
) -> int:
    return write_jsonl(
        path, (identity_to_dict(rid, ident) for rid, ident in identities.items())
    )


def load_letters(path: str | Path) -> list[LetterRecord]:
    return _load(path, LetterRecord.from_dict, lambda r: r.id)


def save_letters(path: str | Path, records: Iterable[LetterRecord]) -> int:
    return write_jsonl(path, (r.to_dict() for r in records))


def load_exemplars(path: str | Path) -> list[CoTExemplar]:
    return _load(path, CoTExemplar.from_dict, lambda e: e.id)


def save_exemplars(path: str | Path, exemplars: Iterable[CoTExemplar]) -> int:
    return write_jsonl(path, (e.to_dict() for e in exemplars))


# ---------------------------------------------------------------------------
# Predictions and gold labels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredictionRecord:
    """Raw model output for one letter, tagged with its declared format."""

    id: str
    format: str  # "1" | "2" | "3" | "4"
    raw: str


def load_predictions(
    path: str | Path, default_format: str | None = None
) -> list[PredictionRecord]:
    def decode(d: Mapping) -> PredictionRecord:
        fmt = d.get("format", default_format)
        if fmt is None:
            raise ValueError('no "format" field and no default format given')
        return PredictionRecord(str(d["id"]), str(fmt), str(d["raw"]))

    return _load(path, decode, lambda p: p.id)


def save_predictions(path: str | Path, records: Iterable[PredictionRecord]) -> int:
    return write_jsonl(
        path, ({"id": r.id, "format": r.format, "raw": r.raw} for r in records)
    )


@dataclass(frozen=True)
class GoldRecord:
    """Gold truth for one letter: a label, or directly a numeric value."""

    id: str
    label: FrequencyLabel | None = None
    x: float | None = None

    def __post_init__(self) -> None:
        if (self.label is None) == (self.x is None):
            raise ValueError(f"gold record {self.id!r} needs exactly one of label/x")


def load_gold(path: str | Path) -> list[GoldRecord]:
    def decode(d: Mapping) -> GoldRecord:
        if "label" in d:
            return GoldRecord(str(d["id"]), label=parse_label(str(d["label"])))
        if "x" in d:
            return GoldRecord(str(d["id"]), x=float(d["x"]))
        raise ValueError('gold record needs a "label" or an "x" field')

    return _load(path, decode, lambda g: g.id)


def save_gold(path: str | Path, records: Iterable[GoldRecord]) -> int:
    def encode(g: GoldRecord) -> dict:
        if g.label is not None:
            return {"id": g.id, "label": format_label(g.label)}
        return {"id": g.id, "x": g.x}

    return write_jsonl(path, (encode(g) for g in records))


def align_by_id(
    golds: Sequence[GoldRecord], predictions: Sequence[PredictionRecord]
) -> list[tuple[GoldRecord, PredictionRecord]]:
    """Pair gold and prediction records by id; every id must match up."""
    pred_by_id = {p.id: p for p in predictions}
    missing = [g.id for g in golds if g.id not in pred_by_id]
    if missing:
        raise DataError(
            f"{len(missing)} gold id(s) have no prediction, first: {missing[0]!r}"
        )
    extra = set(pred_by_id) - {g.id for g in golds}
    if extra:
        raise DataError(
            f"{len(extra)} prediction id(s) have no gold record, "
            f"first: {sorted(extra)[0]!r}"
        )
    return [(g, pred_by_id[g.id]) for g in golds]
