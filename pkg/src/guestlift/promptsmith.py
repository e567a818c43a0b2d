"""Ad-copy prompt construction, LLM backends, variant parsing, validation.

The prompt grammar is canonical and injective over its visible fields; the
mock backend is a deterministic stand-in for the live chat service so every
pipeline above this module can be tested byte-for-byte.
"""

from __future__ import annotations

import os
import re
import threading
import time
from collections import deque
from dataclasses import dataclass
from itertools import cycle
from random import Random

import httpx

CREDENTIAL_ENV_VAR = "GUESTLIFT_LLM_API_KEY"

STYLES = ("ad_copy", "meta_descriptions")

# Emoticon detection: unicode emoji blocks plus a small ASCII set, shipped as
# data so deployments can extend them.
EMOJI_RANGES: tuple[tuple[int, int], ...] = (
    (0x1F000, 0x1FAFF),
    (0x2600, 0x27BF),
    (0x2B00, 0x2BFF),
    (0xFE00, 0xFE0F),
)

ASCII_EMOTICONS: tuple[str, ...] = (":)", ":-)", ";)", ":D", ":P", ":(")

_MOCK_EMOTICONS = ("😊", "🍀", "⭐", "📣", "👉", "❤️")

_OPENERS = ("Discover", "Enjoy", "Indulge", "Relax", "Unwind", "Celebrate")

# Phrase bank keyed by lowercase emotion keyword; drawn on by the mock
# generator so its copies carry the requested emotional register.
PHRASES: dict[str, tuple[str, ...]] = {
    "gratification": ("price cuts", "72 hour sale"),
    "fascination": ("drop everything", "fascinating offer awaits"),
    "excitement": ("wow", "something awesome", "unbeatable prices"),
    "intimacy": ("deal of the day", "treat yourself"),
    "gratitude": ("early access", "gratitude returned"),
    "safety": ("it's true", "limited time only"),
    "luck": ("lucky you", "limited spots"),
    "exclusivity": ("sneak preview", "reward yourself"),
    "achievement": ("nicely done", "exclusive offer"),
    "encouragement": ("for real", "bargain price"),
    "curiosity": ("open now", "your invitation"),
    "challenge": ("take the challenge", "get prepared"),
    "guilt": ("don't miss out", "you deserve better"),
    "urgency": ("limited time", "move fast", "offer ends soon"),
    "anxiety": ("last chance", "running out"),
    "attention": ("special announcement", "just announced"),
    "regret": ("can't miss", "regret nothing"),
}

GENERIC_PHRASES: tuple[str, ...] = ("special offer", "just for you")


class BackendUnavailable(RuntimeError):
    """The configured LLM backend cannot serve requests."""


class ParseFailure(RuntimeError):
    """The completion could not be split into the requested variants."""

    def __init__(self, raw: str, expected: int):
        super().__init__(f"could not parse {expected} variants from completion")
        self.raw = raw
        self.expected = expected


@dataclass(frozen=True)
class AdCopySpec:
    """Parameters of one ad-copy generation request."""

    task: str
    topic: str
    emotion: str
    tone: str
    language: str = "English"
    length_words: int = 15
    include_emoticon: bool = True
    copies: int = 3
    style: str = "ad_copy"

    def __post_init__(self):
        if not 5 <= self.length_words <= 60:
            raise ValueError(f"lengthWords must be in [5, 60], got {self.length_words}")
        if not 1 <= self.copies <= 10:
            raise ValueError(f"copies must be in [1, 10], got {self.copies}")
        if self.style not in STYLES:
            raise ValueError(f"style must be one of {STYLES}, got {self.style!r}")


@dataclass(frozen=True)
class AdCopy:
    """One generated message variant."""

    text: str
    index: int
    word_count: int
    has_emoticon: bool

    def to_doc(self) -> dict:
        return {
            "text": self.text,
            "index": self.index,
            "wordCount": self.word_count,
            "hasEmoticon": self.has_emoticon,
        }

    @classmethod
    def from_doc(cls, document: dict) -> "AdCopy":
        return cls(
            text=str(document["text"]),
            index=int(document["index"]),
            word_count=int(document["wordCount"]),
            has_emoticon=bool(document["hasEmoticon"]),
        )


def spec_to_doc(spec: AdCopySpec) -> dict:
    return {
        "task": spec.task,
        "topic": spec.topic,
        "emotion": spec.emotion,
        "tone": spec.tone,
        "language": spec.language,
        "lengthWords": spec.length_words,
        "includeEmoticon": spec.include_emoticon,
        "copies": spec.copies,
        "style": spec.style,
    }


def spec_from_doc(document: dict) -> AdCopySpec:
    if not isinstance(document, dict):
        raise ValueError("ad copy spec must be a JSON object")
    required = ("task", "topic", "emotion", "tone")
    for field_name in required:
        if field_name not in document:
            raise ValueError(f"ad copy spec is missing {field_name!r}")
    return AdCopySpec(
        task=str(document["task"]),
        topic=str(document["topic"]),
        emotion=str(document["emotion"]),
        tone=str(document["tone"]),
        language=str(document.get("language", "English")),
        length_words=int(document.get("lengthWords", 15)),
        include_emoticon=bool(document.get("includeEmoticon", True)),
        copies=int(document.get("copies", 3)),
        style=str(document.get("style", "ad_copy")),
    )


def build_prompt(spec: AdCopySpec) -> str:
    """Render the canonical prompt sentence for a spec.

    ad_copy form:  Create {copies} ad copies about {task} for {topic}, with
    {emotion}, and {tone}, Use an emoticon, in {length} words, in {language}
    — the emoticon clause is omitted when not requested and the language
    clause is omitted for English.  meta_descriptions form: List {copies}
    compelling Google Ads responsive meta descriptions about {task} for
    {topic}, showing {emotion} and {tone}, in {length} words.
    """
    if spec.style == "meta_descriptions":
        return (
            f"List {spec.copies} compelling Google Ads responsive meta descriptions "
            f"about {spec.task} for {spec.topic}, showing {spec.emotion} and {spec.tone}, "
            f"in {spec.length_words} words"
        )
    parts = [f"Create {spec.copies} ad copies about {spec.task} for {spec.topic}, with {spec.emotion}, and {spec.tone}"]
    if spec.include_emoticon:
        parts.append("Use an emoticon")
    parts.append(f"in {spec.length_words} words")
    if spec.language != "English":
        parts.append(f"in {spec.language}")
    return ", ".join(parts)


# --- measurement -------------------------------------------------------------

def _is_emoji_char(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in EMOJI_RANGES)


def has_emoticon(text: str) -> bool:
    """True when any emoji code point or ASCII emoticon appears in the text."""
    if any(_is_emoji_char(ch) for ch in text):
        return True
    return any(emoticon in text for emoticon in ASCII_EMOTICONS)


def count_words(text: str) -> int:
    """Whitespace word count with emoticon-only tokens excluded."""
    words = 0
    for token in text.split():
        for emoticon in ASCII_EMOTICONS:
            token = token.replace(emoticon, "")
        residue = "".join(ch for ch in token if not _is_emoji_char(ch))
        if residue:
            words += 1
    return words


def max_words(length_words: int) -> int:
    # +20% overshoot tolerance, in integer arithmetic: ceil(6 * L / 5).
    return (6 * length_words + 4) // 5


@dataclass(frozen=True)
class ValidationReport:
    """Did a generated copy honor what the prompt asked for?"""

    word_count_ok: bool
    emoticon_ok: bool
    variant_count_ok: bool
    measured_words: int
    violations: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.word_count_ok and self.emoticon_ok and self.variant_count_ok


def validate_copy(copy: AdCopy, spec: AdCopySpec, variant_count: int | None = None) -> ValidationReport:
    """Check one copy against its spec.

    ``variant_count``, when given, is the size of the batch the copy arrived
    in and is checked against spec.copies.
    """
    measured = count_words(copy.text)
    limit = max_words(spec.length_words)
    word_count_ok = measured <= limit
    emoticon_ok = has_emoticon(copy.text) == spec.include_emoticon
    variant_count_ok = variant_count is None or variant_count == spec.copies
    violations = []
    if not word_count_ok:
        violations.append(f"{measured} words exceeds the {limit}-word tolerance for {spec.length_words}")
    if not emoticon_ok:
        violations.append(
            "emoticon missing" if spec.include_emoticon else "unexpected emoticon present"
        )
    if not variant_count_ok:
        violations.append(f"got {variant_count} variants, wanted {spec.copies}")
    return ValidationReport(
        word_count_ok=word_count_ok,
        emoticon_ok=emoticon_ok,
        variant_count_ok=variant_count_ok,
        measured_words=measured,
        violations=tuple(violations),
    )


# --- mock backend ------------------------------------------------------------

@dataclass(frozen=True)
class _PromptFields:
    copies: int
    task: str
    topic: str
    emotion: str
    tone: str
    emoticon: bool
    length: int
    language: str


_AD_COPY_RE = re.compile(
    r"Create (\d+) ad copies about (.+?) for (.+?), with (.+?), and (.+?)"
    r"(, Use an emoticon)?, in (\d+) words(?:, in (.+?))?$"
)
_META_RE = re.compile(
    r"List (\d+) compelling Google Ads responsive meta descriptions "
    r"about (.+?) for (.+?), showing (.+?) and (.+?), in (\d+) words$"
)

_DEFAULT_FIELDS = _PromptFields(
    copies=3, task="a special offer", topic="our services", emotion="joy",
    tone="friendly", emoticon=False, length=12, language="English",
)


def _parse_prompt_fields(prompt: str) -> _PromptFields:
    first_line = prompt.splitlines()[0] if prompt else ""
    match = _AD_COPY_RE.fullmatch(first_line)
    if match:
        return _PromptFields(
            copies=int(match.group(1)),
            task=match.group(2),
            topic=match.group(3),
            emotion=match.group(4),
            tone=match.group(5),
            emoticon=match.group(6) is not None,
            length=int(match.group(7)),
            language=match.group(8) or "English",
        )
    match = _META_RE.fullmatch(first_line)
    if match:
        return _PromptFields(
            copies=int(match.group(1)),
            task=match.group(2),
            topic=match.group(3),
            emotion=match.group(4),
            tone=match.group(5),
            emoticon=False,
            length=int(match.group(6)),
            language="English",
        )
    return _DEFAULT_FIELDS


def mock_generate(prompt: str, seed: int = 0) -> str:
    """Deterministic template-filled completion for a canonical prompt.

    Honors the prompt's copies/length/emoticon/language fields; the language
    is realized as a bracketed tag prefix, not a real translation.  Every
    variant embeds a phrase from the requested emotion's phrase bank.
    """
    fields = _parse_prompt_fields(prompt)
    bank = PHRASES.get(fields.emotion.strip().lower(), GENERIC_PHRASES)
    lines = []
    for index in range(1, fields.copies + 1):
        rng = Random(f"{seed}:{index}:{fields.emotion.strip().lower()}")
        phrase = rng.choice(bank)
        opener = rng.choice(_OPENERS)
        pool = [
            word
            for word in (*fields.topic.split(), *fields.task.split(), fields.tone, "today", "with", "us")
            if word
        ]
        words = [opener, *phrase.split()]
        filler = cycle(pool)
        while len(words) < fields.length:
            words.append(next(filler))
        text = " ".join(words[: fields.length])
        if fields.emoticon:
            text = f"{text} {rng.choice(_MOCK_EMOTICONS)}"
        if fields.language != "English":
            text = f"[{fields.language}] {text}"
        lines.append(f"{index}. {text}")
    return "\n".join(lines)


class MockBackend:
    """Deterministic in-process backend; the default for tests and demos."""

    name = "mock"
    is_deterministic = True

    def __init__(self, seed: int = 0):
        self.seed = seed

    def generate(self, prompt: str, temperature: float = 0.8, seed: int | None = None) -> str:
        return mock_generate(prompt, self.seed if seed is None else seed)


class LiveBackend:
    """Adapter for a chat-completion HTTP service.

    Credential comes from the GUESTLIFT_LLM_API_KEY environment variable (or
    the api_key argument); requests are throttled by a max-in-flight gate and
    a per-minute budget.
    """

    name = "live"
    is_deterministic = False

    def __init__(
        self,
        endpoint: str | None,
        model: str = "gpt-4",
        api_key: str | None = None,
        temperature: float = 0.8,
        max_in_flight: int = 2,
        requests_per_minute: int = 30,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(CREDENTIAL_ENV_VAR)
        self.temperature = temperature
        self.requests_per_minute = requests_per_minute
        self._gate = threading.BoundedSemaphore(max_in_flight)
        self._recent: deque[float] = deque()
        self._budget_lock = threading.Lock()

    def _wait_for_budget(self) -> None:
        while True:
            with self._budget_lock:
                now = time.monotonic()
                while self._recent and now - self._recent[0] > 60.0:
                    self._recent.popleft()
                if len(self._recent) < self.requests_per_minute:
                    self._recent.append(now)
                    return
                wait = 60.0 - (now - self._recent[0])
            time.sleep(min(wait, 1.0))

    def generate(self, prompt: str, temperature: float | None = None, seed: int | None = None) -> str:
        if not self.endpoint:
            raise BackendUnavailable("live backend endpoint is not configured")
        if not self.api_key:
            raise BackendUnavailable(f"live backend credential missing: set {CREDENTIAL_ENV_VAR}")
        self._wait_for_budget()
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature if temperature is None else temperature,
            "n": 1,
        }
        with self._gate:
            try:
                response = httpx.post(
                    self.endpoint,
                    json=payload,
                    headers={"Authorization": f"Bearer {self.api_key}"},
                    timeout=30.0,
                )
            except httpx.HTTPError as exc:
                raise BackendUnavailable(f"live backend request failed: {exc}") from exc
        if response.status_code != 200:
            raise BackendUnavailable(f"live backend returned HTTP {response.status_code}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendUnavailable("live backend returned an unexpected payload") from exc


# --- generation --------------------------------------------------------------

_VARIANT_LINE_RE = re.compile(r"\s*(\d+)[.)]\s+(.*\S)\s*$")


def _parse_variants(raw: str) -> list[str]:
    lines = [line for line in raw.splitlines() if line.strip()]
    numbered = []
    for line in lines:
        match = _VARIANT_LINE_RE.fullmatch(line)
        if match:
            numbered.append(match.group(2))
    if numbered:
        return numbered
    return [line.strip() for line in lines]


def generate_copies(
    spec: AdCopySpec,
    backend,
    temperature: float = 0.8,
    seed: int | None = None,
) -> list[AdCopy]:
    """Build the prompt, call the backend, and parse exactly spec.copies
    variants; a parse miss is retried once with a format reminder appended."""
    prompt = build_prompt(spec)
    raw = backend.generate(prompt, temperature=temperature, seed=seed)
    variants = _parse_variants(raw)
    if len(variants) != spec.copies:
        reminder = (
            f"{prompt}\nReturn exactly {spec.copies} numbered lines, one ad copy per line."
        )
        raw = backend.generate(reminder, temperature=temperature, seed=seed)
        variants = _parse_variants(raw)
        if len(variants) != spec.copies:
            raise ParseFailure(raw, spec.copies)
    return [
        AdCopy(text=text, index=i + 1, word_count=count_words(text), has_emoticon=has_emoticon(text))
        for i, text in enumerate(variants)
    ]
