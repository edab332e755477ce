"""Teacher-model clients: the interface, two offline doubles, and HTTP.

A teacher client drafts synthetic letters around a frequency description
and infers the frequency label back out of a finished letter. The
:class:`MockTeacherClient` is fully deterministic (hash-driven wrongness
knobs, no RNG state) so end-to-end runs are byte-reproducible; the
:class:`ScriptedTeacherClient` plays back canned responses for tests. The
HTTP client talks to a chat-style JSON completion endpoint and reads its
credential from a named environment variable, never from a flag or config
value.
"""

from __future__ import annotations

import hashlib
import os
import re
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Protocol, Sequence, runtime_checkable

from .errors import ClientError, MalformedDraft, ParseError
from .labels import format_label, parse_label
from .templates import PLACEHOLDER_RE, SyntheticIdentity


@dataclass(frozen=True)
class CoTExemplar:
    """A worked-reasoning example shown to the teacher on retry passes.

    ``applicable_template_ids`` empty means the exemplar applies to every
    template.
    """

    id: str
    applicable_template_ids: tuple[str, ...]
    exemplar_text: str

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "applicable_template_ids", tuple(self.applicable_template_ids)
        )
        if not self.exemplar_text.strip():
            raise ValueError(f"exemplar {self.id!r} has empty text")

    def applies_to(self, template_id: str) -> bool:
        return not self.applicable_template_ids or template_id in self.applicable_template_ids

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "templateIds": list(self.applicable_template_ids),
            "text": self.exemplar_text,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "CoTExemplar":
        return cls(
            id=str(d["id"]),
            applicable_template_ids=tuple(str(t) for t in d.get("templateIds", [])),
            exemplar_text=str(d["text"]),
        )


@dataclass(frozen=True)
class Inference:
    """One inference result: the label text plus its supporting analysis."""

    label_text: str
    analysis: str
    evidence: tuple[str, ...]


@runtime_checkable
class TeacherClient(Protocol):
    def draft(self, base: str, description: str) -> tuple[str, SyntheticIdentity]:
        """Rewrite a base letter around the description; identity separate."""
        ...

    def infer(self, letter: str, exemplar: CoTExemplar | None = None) -> Inference:
        """Read the frequency label back out of a finished letter."""
        ...


# ---------------------------------------------------------------------------
# Deterministic mock
# ---------------------------------------------------------------------------

_MOCK_NAMES = (
    "Alex Turner", "Sam Patel", "Jo Murray", "Chris Okafor", "Dana Reid",
    "Lee Cheng", "Morgan Healy", "Ash Novak", "Rowan Price", "Kit Alvarez",
)
_MOCK_STREETS = (
    "14 Elm Road", "3 Harbour Lane", "92 Mill Street", "7 Kestrel Close",
    "28 Orchard Way", "51 Brook Terrace",
)
_MOCK_CLINICIANS = ("Dr Hale", "Dr Iqbal", "Dr Sorensen", "Dr Whittaker")


def _digest_floats(*parts: str) -> tuple[float, float, float]:
    """Three reproducible uniforms in [0, 1) derived from the inputs."""
    digest = hashlib.md5("|".join(parts).encode("utf-8")).hexdigest()
    return tuple(int(digest[i : i + 8], 16) / 16**8 for i in (0, 8, 16))


def _pick(seq: Sequence[str], *parts: str) -> str:
    digest = hashlib.md5("|".join(parts).encode("utf-8")).hexdigest()
    return seq[int(digest[:8], 16) % len(seq)]


@dataclass
class MockTeacherClient:
    """Offline stand-in for the teacher model.

    Drafting embeds the description verbatim in a letter skeleton built
    from the base letter's first paragraph. Inference re-reads the label by
    scanning the letter for the longest substring the label grammar
    accepts. Wrongness is controlled by three knobs, each a probability
    evaluated against a stable hash of the letter (so a given letter always
    fails the same way):

    - ``wrong_rate``: first-pass (no exemplar) answers are wrong.
    - ``stubborn_rate``: answers stay wrong even with the exemplar.
    - ``gibberish_rate``: wrong answers are unparseable instead of merely
      incorrect.
    """

    wrong_rate: float = 0.0
    stubborn_rate: float = 0.0
    gibberish_rate: float = 0.0
    salt: str = ""
    requests_made: int = 0

    def draft(self, base: str, description: str) -> tuple[str, SyntheticIdentity]:
        self.requests_made += 1
        identity = SyntheticIdentity(
            {
                "NAME": _pick(_MOCK_NAMES, "name", description, self.salt),
                "DOB": "12 March 1987",
                "ADDRESS": _pick(_MOCK_STREETS, "addr", description, self.salt),
                "CLINICIAN": _pick(_MOCK_CLINICIANS, "clin", description, self.salt),
            }
        )
        opening = base.strip().splitlines()[0].strip() if base.strip() else ""
        letter = (
            "Dear @NAME@,\n"
            "\n"
            "Re: @NAME@, born @DOB@, of @ADDRESS@.\n"
            "\n"
            f"{opening}\n"
            f"Regarding seizure control, the current picture is: {description}.\n"
            "We will review @NAME@ again in clinic in three months.\n"
            "\n"
            "Yours sincerely,\n"
            "@CLINICIAN@\n"
        )
        return letter, identity

    def infer(self, letter: str, exemplar: CoTExemplar | None = None) -> Inference:
        self.requests_made += 1
        found = _scan_for_label(letter)
        if found is None:
            return Inference("unknown", "No frequency statement was found.", ())
        label_text, sentence = found
        wrong, stubborn, _ = _digest_floats("infer", letter, self.salt)
        gib, _, _ = _digest_floats("gibberish", letter, self.salt)
        be_wrong = (wrong < self.wrong_rate) if exemplar is None else (
            wrong < self.wrong_rate and stubborn < self.stubborn_rate
        )
        if be_wrong:
            if gib < self.gibberish_rate:
                return Inference("hard to say, honestly", "The letter is ambiguous.", ())
            return Inference(
                _wrong_answer(label_text),
                f"The letter suggests a different pattern than '{sentence}'.",
                (),
            )
        analysis = (
            f"The letter states: '{sentence}'. "
            f"Therefore the normalised label is '{label_text}'."
        )
        return Inference(label_text, analysis, (sentence,))

    def _asdict(self) -> dict:
        return {
            "wrong_rate": self.wrong_rate,
            "stubborn_rate": self.stubborn_rate,
            "gibberish_rate": self.gibberish_rate,
            "salt": self.salt,
        }


def _wrong_answer(label_text: str) -> str:
    """A parseable label guaranteed to differ canonically from the input."""
    canonical = format_label(parse_label(label_text))
    return "unknown" if canonical != "unknown" else "7 per 1 week"


# Vocabulary the label grammar understands, plus synonyms the mock maps
# onto it. Words outside this set are narrative noise ("has had", names)
# and are dropped before window scanning.
_SCAN_SYNONYMS = {"each": "per", "every": "per"}
_SCAN_FULL_VOCAB = frozenset(
    {
        "unknown", "no", "seizure", "seizures", "frequency", "reference",
        "free", "for", "multiple", "to", "per", "cluster", "clusters",
        "day", "days", "week", "weeks", "month", "months", "year", "years",
    }
)
# "seizures" inside a rate phrase ("2 seizures per week") is noise the
# grammar rejects, so a second track drops the seizure-freedom words.
_SCAN_RATE_VOCAB = _SCAN_FULL_VOCAB - {"seizure", "seizures", "frequency", "reference"}

_SCAN_TOKEN_RE = re.compile(r"[A-Za-z]+|\d+(?:\.\d+)?|,")


def _scan_for_label(letter: str) -> tuple[str, str] | None:
    """Read the longest label-grammar phrase out of a letter.

    Each sentence is reduced to the tokens the grammar knows (two tracks:
    with and without the seizure words), then contiguous token windows are
    tried longest-first through the parser. Returns the canonical label
    text and the sentence it came from, or None.
    """
    best: tuple[str, str] | None = None
    best_len = -1
    for raw_sentence in _split_sentences(letter):
        tokens = [
            _SCAN_SYNONYMS.get(t.lower(), t.lower())
            for t in _SCAN_TOKEN_RE.findall(raw_sentence)
        ]
        tracks = (
            [t for t in tokens if t == "," or t[0].isdigit() or t in _SCAN_FULL_VOCAB],
            [t for t in tokens if t == "," or t[0].isdigit() or t in _SCAN_RATE_VOCAB],
        )
        for track in tracks:
            n = len(track)
            for width in range(min(n, 12), 0, -1):
                if width <= best_len:
                    break
                hit = None
                for start in range(0, n - width + 1):
                    window = " ".join(track[start : start + width])
                    try:
                        label = parse_label(window)
                    except ParseError:
                        continue
                    hit = (format_label(label), raw_sentence.strip())
                    break
                if hit:
                    best = hit
                    best_len = width
                    break
    return best


def _split_sentences(text: str) -> list[str]:
    out: list[str] = []
    for line in text.splitlines():
        for piece in re.split(r"[.!?;]", line):
            piece = piece.strip()
            if piece:
                out.append(piece)
    return out


# ---------------------------------------------------------------------------
# Scripted playback client
# ---------------------------------------------------------------------------


@dataclass
class ScriptedTeacherClient:
    """Plays back per-letter response sequences; for tests and fixtures.

    ``infer_script`` maps a key to the sequence of responses successive
    ``infer`` calls for that letter should return (a bare string is label
    text with a stock analysis). A key matches a letter either exactly or
    as a substring, so tests can tag letters with short markers. The last
    response repeats once a sequence is exhausted. ``draft_script`` maps a
    description to (letter text, identity values).
    """

    infer_script: Mapping[str, Sequence[str | Inference]] = field(default_factory=dict)
    draft_script: Mapping[str, tuple[str, Mapping[str, str]]] = field(default_factory=dict)
    fail_draft: bool = False
    fail_infer: bool = False
    calls: list[tuple[str, str, bool]] = field(default_factory=list)
    _infer_seen: dict[str, int] = field(default_factory=dict)

    def draft(self, base: str, description: str) -> tuple[str, SyntheticIdentity]:
        self.calls.append(("draft", description, False))
        if self.fail_draft:
            raise ClientError("scripted draft failure")
        if description in self.draft_script:
            text, values = self.draft_script[description]
            return text, SyntheticIdentity(dict(values))
        letter = f"Dear @NAME@,\n\nSeizure frequency: {description}.\n"
        return letter, SyntheticIdentity({"NAME": "Test"})

    def infer(self, letter: str, exemplar: CoTExemplar | None = None) -> Inference:
        key = self._match_key(letter)
        self.calls.append(("infer", key if key is not None else "<default>", exemplar is not None))
        if self.fail_infer:
            raise ClientError("scripted infer failure")
        if key is None:
            found = _scan_for_label(letter)
            text = found[0] if found else "unknown"
            return Inference(text, f"Scripted default read: '{text}'.", ())
        responses = self.infer_script[key]
        i = self._infer_seen.get(key, 0)
        self._infer_seen[key] = i + 1
        response = responses[min(i, len(responses) - 1)]
        if isinstance(response, Inference):
            return response
        return Inference(response, f"Scripted answer: '{response}'.", ())

    def _match_key(self, letter: str) -> str | None:
        if letter in self.infer_script:
            return letter
        for key in sorted(self.infer_script):
            if key in letter:
                return key
        return None


# ---------------------------------------------------------------------------
# HTTP client
# ---------------------------------------------------------------------------

DEFAULT_DRAFT_PROMPT = (
    "Rewrite the clinic letter below so that its seizure-frequency "
    "statement matches this description exactly: {description}\n"
    "Replace all personal details with @PLACEHOLDER@ tokens and return a "
    "JSON object {{\"letter\": ..., \"identity\": {{placeholder: value}}}}.\n"
    "\nBase letter:\n{base}\n"
)

DEFAULT_INFER_PROMPT = (
    "Read the clinic letter below and state the patient's current seizure "
    "frequency as a label. Return a JSON object with keys \"analysis\" and "
    "\"seizure_frequency_number\" (label first, then verbatim evidence "
    "spans).\n{exemplar}\nLetter:\n{letter}\n"
)


@dataclass(frozen=True)
class ClientConfig:
    """Connection settings for the HTTP teacher client.

    ``credential_env`` names the environment variable holding the API
    credential. The credential itself never appears in config files or on
    the command line.
    """

    endpoint: str = ""
    model: str = ""
    temperature: float = 0.0
    credential_env: str = "SZFREQ_API_KEY"
    timeout: float = 60.0
    max_attempts: int = 3
    draft_prompt: str = DEFAULT_DRAFT_PROMPT
    infer_prompt: str = DEFAULT_INFER_PROMPT

    def to_dict(self) -> dict:
        return {
            "endpoint": self.endpoint,
            "model": self.model,
            "temperature": self.temperature,
            "credential_env": self.credential_env,
            "timeout": self.timeout,
            "max_attempts": self.max_attempts,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ClientConfig":
        known = {f: d[f] for f in (
            "endpoint", "model", "temperature", "credential_env",
            "timeout", "max_attempts", "draft_prompt", "infer_prompt",
        ) if f in d}
        return cls(**known)


class HttpTeacherClient:
    """Chat-completion JSON endpoint client with bounded backoff.

    Transport failures and retryable statuses (429, 5xx) are retried up to
    ``max_attempts`` with exponential backoff, then surface as
    :class:`ClientError`. ``post`` and ``sleep`` are injectable for tests.
    """

    RETRYABLE = frozenset({429, 500, 502, 503, 504})

    def __init__(
        self,
        config: ClientConfig,
        post: Callable | None = None,
        sleep: Callable[[float], None] = time.sleep,
        backoff_base: float = 0.5,
    ):
        if not config.endpoint:
            raise ClientError("no endpoint configured")
        self.config = config
        if post is None:
            import requests

            post = requests.post
        self._post = post
        self._sleep = sleep
        self._backoff_base = backoff_base
        self.requests_made = 0

    def _credential(self) -> str:
        token = os.environ.get(self.config.credential_env, "")
        if not token:
            raise ClientError(
                f"credential environment variable {self.config.credential_env} is not set"
            )
        return token

    def _complete(self, prompt: str) -> str:
        payload = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {
            "Authorization": f"Bearer {self._credential()}",
            "Content-Type": "application/json",
        }
        last_error = "no attempts made"
        for attempt in range(1, self.config.max_attempts + 1):
            self.requests_made += 1
            try:
                response = self._post(
                    self.config.endpoint,
                    json=payload,
                    headers=headers,
                    timeout=self.config.timeout,
                )
            except Exception as err:  # transport layer
                last_error = f"transport error: {err}"
            else:
                status = getattr(response, "status_code", 0)
                if status == 200:
                    try:
                        data = response.json()
                        return data["choices"][0]["message"]["content"]
                    except Exception as err:
                        raise ClientError(f"unexpected response shape: {err}") from err
                if status not in self.RETRYABLE:
                    raise ClientError(f"HTTP {status} from {self.config.endpoint}")
                last_error = f"HTTP {status}"
            if attempt < self.config.max_attempts:
                self._sleep(self._backoff_base * 2 ** (attempt - 1))
        raise ClientError(
            f"gave up after {self.config.max_attempts} attempts: {last_error}"
        )

    def draft(self, base: str, description: str) -> tuple[str, SyntheticIdentity]:
        prompt = self.config.draft_prompt.format(base=base, description=description)
        content = self._complete(prompt)
        try:
            obj = _first_object(content)
            letter = str(obj["letter"])
            identity = SyntheticIdentity(
                {str(k): str(v) for k, v in dict(obj.get("identity", {})).items()}
            )
        except (KeyError, TypeError, ValueError, ParseError) as err:
            raise MalformedDraft(f"draft payload not usable: {err}") from err
        return letter, identity

    def infer(self, letter: str, exemplar: CoTExemplar | None = None) -> Inference:
        exemplar_block = (
            f"Worked example:\n{exemplar.exemplar_text}\n" if exemplar is not None else ""
        )
        prompt = self.config.infer_prompt.format(exemplar=exemplar_block, letter=letter)
        content = self._complete(prompt)
        try:
            obj = _first_object(content)
            payload = obj["seizure_frequency_number"]
            label_text = str(payload[0])
            evidence = tuple(str(s) for s in payload[1:])
            analysis = str(obj.get("analysis", ""))
        except (KeyError, IndexError, TypeError, ParseError) as err:
            raise ClientError(f"inference payload not usable: {err}") from err
        return Inference(label_text, analysis, evidence)


def _first_object(text: str) -> dict:
    # local import: formats imports nothing from here, so no cycle
    from .formats import _first_json_object

    return _first_json_object(text)


def validate_draft(letter: str) -> None:
    """Enforce the draft contract: non-empty and at least one placeholder."""
    if not letter.strip():
        raise MalformedDraft("draft letter is empty")
    if not PLACEHOLDER_RE.search(letter):
        raise MalformedDraft("draft letter contains no placeholder tokens")
