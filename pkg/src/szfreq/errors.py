"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class SzfreqError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SzfreqError):
    """A string does not match any accepted grammar.

    Carries the offending text, the character position (in the normalized
    text) where matching got furthest, and the candidate formats that
    were attempted.
    """

    def __init__(self, text: str, position: int = 0, candidates: tuple[str, ...] = ()):
        self.text = text
        self.position = position
        self.candidates = tuple(candidates)
        detail = f"cannot parse {text!r} at position {position}"
        if self.candidates:
            detail += f"; attempted formats: {', '.join(self.candidates)}"
        super().__init__(detail)


class LabelParseError(ParseError):
    """A string expected to be a frequency label failed to parse."""


class DomainError(SzfreqError):
    """A numeric value falls outside the allowed codomain."""


class TemplateError(SzfreqError):
    """Base class for description-template errors."""


class MissingSlot(TemplateError):
    """An assignment does not cover every slot of a template."""

    def __init__(self, template_id: str, slots: tuple[int, ...]):
        self.template_id = template_id
        self.slots = tuple(slots)
        super().__init__(
            f"template {template_id!r}: assignment missing slot(s) "
            f"{', '.join(str(s) for s in self.slots)}"
        )


class FillerOutOfDomain(TemplateError):
    """A slot filler is not in the slot's allowed domain."""

    def __init__(self, template_id: str, slot: int, filler: str):
        self.template_id = template_id
        self.slot = slot
        self.filler = filler
        super().__init__(
            f"template {template_id!r}: filler {filler!r} not allowed for slot {slot}"
        )


class UnresolvedPlaceholder(SzfreqError):
    """A letter still contains placeholder tokens with no identity value."""

    def __init__(self, keys: tuple[str, ...]):
        self.keys = tuple(sorted(set(keys)))
        super().__init__(f"unresolved placeholder(s): {', '.join(self.keys)}")


class ClientError(SzfreqError):
    """A teacher-client call failed after retries."""


class MalformedDraft(SzfreqError):
    """A drafted letter violates the draft contract (empty, no placeholders)."""


class LengthMismatch(SzfreqError):
    """Paired gold/prediction sequences differ in length."""


class ClassMismatch(SzfreqError):
    """Reports being aggregated do not share a class list."""


class DataError(SzfreqError):
    """A corpus file is malformed; message carries file and line context."""


class MissingIdentity(DataError):
    """A draft record has no matching identity record."""
