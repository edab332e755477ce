"""Slotted description templates and letter placeholder filling.

A template pairs a text like ``"[1] per day"`` with a label template in the
same slot syntax and a domain of allowed fillers per slot. Expanding a
template substitutes every combination of fillers into both strings and
parses the label, giving (description, label) pairs for corpus building.

Separately, drafted letters carry demographic placeholders like ``@NAME@``
that are filled from a synthetic identity record as a post-processing step.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import FillerOutOfDomain, LabelParseError, MissingSlot, ParseError, UnresolvedPlaceholder
from .labels import FrequencyLabel, parse_label

SLOT_RE = re.compile(r"\[([123])\]")
PLACEHOLDER_RE = re.compile(r"@([A-Z_]+)@")

_FILLER_RE = re.compile(r"^(?:multiple|\d+(?:\.\d+)?(?: to \d+(?:\.\d+)?)?)$")


def _slots_in(text: str) -> set[int]:
    return {int(m) for m in SLOT_RE.findall(text)}


@dataclass(frozen=True)
class DescriptionTemplate:
    """A slotted description/label pair with per-slot filler domains."""

    id: str
    text: str
    label_template: str
    slot_domains: Mapping[int, tuple[str, ...]]

    def __post_init__(self) -> None:
        domains = {int(k): tuple(v) for k, v in self.slot_domains.items()}
        object.__setattr__(self, "slot_domains", domains)
        used = _slots_in(self.text) | _slots_in(self.label_template)
        missing = used - set(domains)
        if missing:
            raise ValueError(
                f"template {self.id!r}: slot(s) {sorted(missing)} have no domain"
            )
        for slot, fillers in domains.items():
            if slot not in (1, 2, 3):
                raise ValueError(f"template {self.id!r}: slot {slot} outside 1..3")
            if not fillers:
                raise ValueError(f"template {self.id!r}: empty domain for slot {slot}")
            if len(set(fillers)) != len(fillers):
                raise ValueError(f"template {self.id!r}: duplicate fillers for slot {slot}")
            for filler in fillers:
                if not _FILLER_RE.match(filler):
                    raise ValueError(
                        f"template {self.id!r}: filler {filler!r} is not a digit "
                        "string, an 'a to b' range, or 'multiple'"
                    )

    @property
    def slots(self) -> tuple[int, ...]:
        return tuple(sorted(self.slot_domains))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "label": self.label_template,
            "slots": {str(k): list(v) for k, v in sorted(self.slot_domains.items())},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DescriptionTemplate":
        return cls(
            id=str(d["id"]),
            text=str(d["text"]),
            label_template=str(d["label"]),
            slot_domains={int(k): tuple(v) for k, v in dict(d["slots"]).items()},
        )


@dataclass(frozen=True)
class DescriptionPair:
    """One instantiation of a template: concrete text plus its parsed label."""

    description: str
    label: FrequencyLabel
    template_id: str
    assignment: Mapping[int, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", dict(self.assignment))

    @property
    def id(self) -> str:
        """Stable id derived from the template id and the slot assignment."""
        blob = json.dumps(
            {str(k): v for k, v in sorted(self.assignment.items())}, sort_keys=True
        )
        digest = hashlib.sha1(f"{self.template_id}|{blob}".encode("utf-8")).hexdigest()
        return f"{self.template_id}-{digest[:10]}"


def _substitute(text: str, assignment: Mapping[int, str]) -> str:
    return SLOT_RE.sub(lambda m: assignment[int(m.group(1))], text)


def instantiate(template: DescriptionTemplate, assignment: Mapping[int, str]) -> DescriptionPair:
    """Fill one assignment into a template and parse the resulting label.

    Raises :class:`MissingSlot` when the assignment does not cover every
    slot, :class:`FillerOutOfDomain` for fillers outside a slot's domain,
    and :class:`LabelParseError` when the filled label template does not
    parse.
    """
    assignment = {int(k): str(v) for k, v in assignment.items()}
    missing = tuple(sorted(set(template.slots) - set(assignment)))
    if missing:
        raise MissingSlot(template.id, missing)
    for slot, filler in assignment.items():
        domain = template.slot_domains.get(slot)
        if domain is None or filler not in domain:
            raise FillerOutOfDomain(template.id, slot, filler)
    description = _substitute(template.text, assignment)
    label_text = _substitute(template.label_template, assignment)
    try:
        label = parse_label(label_text)
    except ParseError as err:
        raise LabelParseError(label_text, err.position, err.candidates) from err
    return DescriptionPair(description, label, template.id, assignment)


def expand(template: DescriptionTemplate) -> list[DescriptionPair]:
    """Instantiate the full cross-product of a template's slot domains.

    Output is in lexicographic order of (slot index, domain position) and
    its length is the product of the domain sizes.
    """
    slots = template.slots
    pairs = []
    for combo in itertools.product(*(template.slot_domains[s] for s in slots)):
        pairs.append(instantiate(template, dict(zip(slots, combo))))
    return pairs


def expand_corpus(templates: Iterable[DescriptionTemplate]) -> tuple[list[DescriptionPair], int]:
    """Expand many templates, deduplicating by exact description string.

    Returns the retained pairs (first occurrence wins, in expansion order)
    and the number of duplicates dropped.
    """
    seen: set[str] = set()
    kept: list[DescriptionPair] = []
    dropped = 0
    for template in templates:
        for pair in expand(template):
            if pair.description in seen:
                dropped += 1
                continue
            seen.add(pair.description)
            kept.append(pair)
    return kept, dropped


# ---------------------------------------------------------------------------
# Identities and placeholder filling
# ---------------------------------------------------------------------------

_IDENT_KEY_RE = re.compile(r"^[A-Z_]+$")


@dataclass(frozen=True)
class SyntheticIdentity:
    """Synthetic demographic values keyed by placeholder name."""

    values: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = dict(self.values)
        object.__setattr__(self, "values", values)
        for key, value in values.items():
            if not _IDENT_KEY_RE.match(key):
                raise ValueError(f"identity key {key!r} is not an uppercase identifier")
            if not value:
                raise ValueError(f"identity value for {key!r} is empty")
            if PLACEHOLDER_RE.search(value):
                raise ValueError(
                    f"identity value for {key!r} contains a placeholder token"
                )

    def __getitem__(self, key: str) -> str:
        return self.values[key]

    def __contains__(self, key: str) -> bool:
        return key in self.values


def fill_placeholders(letter_text: str, identity: SyntheticIdentity) -> str:
    """Replace every ``@KEY@`` token with its identity value.

    All-or-nothing: if any placeholder has no identity value, raises
    :class:`UnresolvedPlaceholder` naming every missing key and emits
    nothing. The result never contains a placeholder token.
    """
    needed = set(PLACEHOLDER_RE.findall(letter_text))
    missing = tuple(sorted(key for key in needed if key not in identity))
    if missing:
        raise UnresolvedPlaceholder(missing)
    return PLACEHOLDER_RE.sub(lambda m: identity[m.group(1)], letter_text)
