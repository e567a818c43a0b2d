"""Persuasion targeting: the emotion wheel, the six persuasion principles,
guest categorization from quiz answers, and message directives.

The taxonomy ships in two presets: "wheel", the published five-family wheel of
emotions, and "message_corpus", which swaps the Fear family for the
{Attention, Urgency, Regret} variant used in the campaign message corpus.
Which keywords a grid cell contributes is configuration data; the shipped
default composes a cue bank per sub-emotion with one per principle, authored
from the campaign message corpus vocabulary.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

PRINCIPLES: tuple[str, ...] = (
    "authority",
    "commitment",
    "social_proof",
    "liking",
    "reciprocity",
    "scarcity",
)

_WHEEL = (
    ("Joy", ("Gratification", "Fascination", "Excitement")),
    ("Trust", ("Intimacy", "Gratitude", "Safety")),
    ("Pride", ("Luck", "Exclusivity", "Achievement")),
    ("Anticipation", ("Encouragement", "Curiosity", "Challenge")),
    ("Fear", ("Guilt", "Urgency", "Anxiety")),
)

_MESSAGE_CORPUS = (
    ("Joy", ("Gratification", "Fascination", "Excitement")),
    ("Trust", ("Intimacy", "Gratitude", "Safety")),
    ("Pride", ("Luck", "Exclusivity", "Achievement")),
    ("Anticipation", ("Encouragement", "Curiosity", "Challenge")),
    ("Fear", ("Attention", "Urgency", "Regret")),
)

SUB_EMOTION_CUES: dict[str, tuple[str, ...]] = {
    "Gratification": ("price cuts", "72 hour sale"),
    "Fascination": ("drop everything", "fascinating offer awaits"),
    "Excitement": ("wow", "something awesome", "unbeatable prices"),
    "Intimacy": ("deal of the day", "treat yourself"),
    "Gratitude": ("early access", "because we appreciate you", "gratitude returned"),
    "Safety": ("it's true", "secure", "limited time only"),
    "Luck": ("lucky you", "limited spots"),
    "Exclusivity": ("sneak preview", "reward yourself"),
    "Achievement": ("nicely done", "exclusive offer"),
    "Encouragement": ("for real", "bargain price"),
    "Curiosity": ("open now", "your invitation"),
    "Challenge": ("take the challenge", "get prepared"),
    "Guilt": ("don't miss out", "you deserve better"),
    "Urgency": ("limited time", "move fast", "offer ends soon"),
    "Anxiety": ("last chance", "running out"),
    "Attention": ("special announcement", "just announced"),
    "Regret": ("can't miss", "regret nothing"),
}

PRINCIPLE_CUES: dict[str, tuple[str, ...]] = {
    "authority": ("expert approved", "recommended by our specialists"),
    "commitment": ("stay on track", "keep your promise to yourself"),
    "social_proof": ("guests love it", "most booked"),
    "liking": ("just for you", "you're welcome"),
    "reciprocity": ("our gift to you", "we owe you one"),
    "scarcity": ("while it lasts", "only a few left"),
}


class InfluenceError(ValueError):
    """Base class for taxonomy/categorization failures."""


class WrongArity(InfluenceError):
    pass


class DuplicateName(InfluenceError):
    pass


class EmptySheet(InfluenceError):
    pass


class UnknownOption(InfluenceError):
    pass


@dataclass(frozen=True)
class EmotionTaxonomy:
    """Five emotion families of exactly three sub-emotions each."""

    version: str
    families: tuple[tuple[str, tuple[str, ...]], ...]

    def sub_emotions(self) -> tuple[str, ...]:
        """All sub-emotions flattened in declaration order (the tie-break order)."""
        return tuple(sub for _, subs in self.families for sub in subs)

    def family_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.families)

    def family_of(self, sub_emotion: str) -> str:
        for name, subs in self.families:
            if sub_emotion in subs:
                return name
        raise InfluenceError(f"unknown sub-emotion: {sub_emotion!r}")


def _validate_families(version: str, families: tuple[tuple[str, tuple[str, ...]], ...]) -> EmotionTaxonomy:
    if len(families) != 5 or any(len(subs) != 3 for _, subs in families):
        raise WrongArity("taxonomy must declare exactly 5 families of 3 sub-emotions each")
    names = [name for name, _ in families]
    subs = [sub for _, sub_list in families for sub in sub_list]
    for pool in (names, subs):
        seen = set()
        for name in pool:
            if name in seen:
                raise DuplicateName(f"duplicate taxonomy name: {name!r}")
            seen.add(name)
    return EmotionTaxonomy(version=version, families=families)


_PRESETS: dict[str, EmotionTaxonomy] = {
    "wheel": _validate_families("wheel", _WHEEL),
    "message_corpus": _validate_families("message_corpus", _MESSAGE_CORPUS),
}

DEFAULT_TAXONOMY = _PRESETS["wheel"]


def taxonomy_preset(name: str) -> EmotionTaxonomy:
    try:
        return _PRESETS[name]
    except KeyError:
        raise InfluenceError(
            f"unknown taxonomy preset: {name!r} (available: {', '.join(sorted(_PRESETS))})"
        ) from None


def load_taxonomy(document: str | dict) -> EmotionTaxonomy:
    """Load a taxonomy from a preset name or a config document.

    Document shape: {"version": str, "families": [{"name": str,
    "subEmotions": [str, str, str]}, ...]}.
    """
    if isinstance(document, str):
        return taxonomy_preset(document)
    if not isinstance(document, dict):
        raise InfluenceError("taxonomy document must be a preset name or an object")
    families_in = document.get("families")
    if not isinstance(families_in, list):
        raise WrongArity("taxonomy document must list families")
    families = tuple(
        (str(entry.get("name", "")), tuple(str(s) for s in entry.get("subEmotions", ())))
        for entry in families_in
    )
    return _validate_families(str(document.get("version", "custom")), families)


@dataclass(frozen=True)
class PersuasionCategory:
    """One cell of the influence grid: (family, sub-emotion, principle)."""

    emotion: str
    sub_emotion: str
    principle: str

    def to_doc(self) -> dict:
        return {
            "emotion": self.emotion,
            "subEmotion": self.sub_emotion,
            "principle": self.principle,
        }

    @classmethod
    def from_doc(cls, document: dict) -> "PersuasionCategory":
        return cls(
            emotion=str(document["emotion"]),
            sub_emotion=str(document["subEmotion"]),
            principle=str(document["principle"]),
        )


@dataclass(frozen=True)
class QuizOption:
    """One selectable quiz answer with its configured weight vectors."""

    id: str
    sub_emotion_weights: dict[str, float]
    principle_weights: dict[str, float]

    def __post_init__(self):
        for bank in (self.sub_emotion_weights, self.principle_weights):
            for name, weight in bank.items():
                if weight < 0:
                    raise InfluenceError(f"negative weight for {name!r} in option {self.id!r}")


@dataclass(frozen=True)
class QuizAnswerSheet:
    """A guest's chosen options, one per answered question."""

    reservation: str
    answers: tuple[tuple[str, QuizOption], ...]


@dataclass(frozen=True)
class QuizDefinition:
    """Question -> option -> weight-vector lookup for resolving raw answers."""

    questions: dict[str, dict[str, QuizOption]]

    def resolve(self, reservation: str, raw_answers: Iterable[Mapping]) -> QuizAnswerSheet:
        answers = []
        for raw in raw_answers:
            question_id = str(raw.get("questionId", ""))
            option_id = str(raw.get("optionId", ""))
            options = self.questions.get(question_id)
            if options is None:
                raise UnknownOption(f"unknown question: {question_id!r}")
            option = options.get(option_id)
            if option is None:
                raise UnknownOption(f"unknown option {option_id!r} for question {question_id!r}")
            answers.append((question_id, option))
        return QuizAnswerSheet(reservation=reservation, answers=tuple(answers))


def load_quiz(document: dict) -> QuizDefinition:
    """Load a quiz definition document.

    Shape: {"questions": [{"id": str, "options": [{"id": str, "subEmotions":
    {name: weight}, "principles": {name: weight}}, ...]}, ...]}.
    """
    questions: dict[str, dict[str, QuizOption]] = {}
    for question in document.get("questions", ()):
        question_id = str(question.get("id", ""))
        options: dict[str, QuizOption] = {}
        for option in question.get("options", ()):
            option_id = str(option.get("id", ""))
            options[option_id] = QuizOption(
                id=option_id,
                sub_emotion_weights={str(k): float(v) for k, v in option.get("subEmotions", {}).items()},
                principle_weights={str(k): float(v) for k, v in option.get("principles", {}).items()},
            )
        questions[question_id] = options
    return QuizDefinition(questions=questions)


def categorize_guest(sheet: QuizAnswerSheet, taxonomy: EmotionTaxonomy) -> PersuasionCategory:
    """Weighted-vote argmax over sub-emotions and principles.

    Ties break toward the earlier name in taxonomy declaration order (and the
    canonical principle order).  Weight sums use exact summation so the result
    is independent of answer order.
    """
    if not sheet.answers:
        raise EmptySheet(f"no quiz answers for reservation {sheet.reservation}")
    subs = taxonomy.sub_emotions()
    sub_contributions: dict[str, list[float]] = defaultdict(list)
    principle_contributions: dict[str, list[float]] = defaultdict(list)
    for _, option in sheet.answers:
        for name, weight in option.sub_emotion_weights.items():
            if name not in subs:
                raise UnknownOption(f"option {option.id!r} weights unknown sub-emotion {name!r}")
            sub_contributions[name].append(weight)
        for name, weight in option.principle_weights.items():
            if name not in PRINCIPLES:
                raise UnknownOption(f"option {option.id!r} weights unknown principle {name!r}")
            principle_contributions[name].append(weight)
    sub_totals = {name: math.fsum(sub_contributions[name]) for name in subs}
    principle_totals = {name: math.fsum(principle_contributions[name]) for name in PRINCIPLES}
    winning_sub = max(subs, key=lambda name: sub_totals[name])
    winning_principle = max(PRINCIPLES, key=lambda name: principle_totals[name])
    return PersuasionCategory(
        emotion=taxonomy.family_of(winning_sub),
        sub_emotion=winning_sub,
        principle=winning_principle,
    )


@dataclass(frozen=True)
class MessageDirective:
    """What a persuasive message for this category should sound like."""

    category: PersuasionCategory
    tone_keywords: tuple[str, ...]
    emotion_keyword: str


def directive_for(
    category: PersuasionCategory,
    taxonomy: EmotionTaxonomy,
    grid: Mapping | None = None,
) -> MessageDirective:
    """Keyword bundle for one influence-grid cell; total over all cells.

    ``grid`` may override the shipped cue banks with {"subEmotionCues": {...},
    "principleCues": {...}}.
    """
    if category.sub_emotion not in taxonomy.sub_emotions():
        raise InfluenceError(f"unknown sub-emotion: {category.sub_emotion!r}")
    if taxonomy.family_of(category.sub_emotion) != category.emotion:
        raise InfluenceError(
            f"sub-emotion {category.sub_emotion!r} does not belong to family {category.emotion!r}"
        )
    if category.principle not in PRINCIPLES:
        raise InfluenceError(f"unknown principle: {category.principle!r}")
    sub_cues = dict(SUB_EMOTION_CUES)
    principle_cues = dict(PRINCIPLE_CUES)
    if grid:
        sub_cues.update({str(k): tuple(v) for k, v in grid.get("subEmotionCues", {}).items()})
        principle_cues.update({str(k): tuple(v) for k, v in grid.get("principleCues", {}).items()})
    # Custom taxonomies without authored cues still resolve: the sub-emotion's
    # own name becomes its cue.
    emotion_cues = sub_cues.get(category.sub_emotion, (category.sub_emotion.lower(),))
    tone_cues = principle_cues.get(category.principle, (category.principle.replace("_", " "),))
    return MessageDirective(
        category=category,
        tone_keywords=tuple(emotion_cues) + tuple(tone_cues),
        emotion_keyword=category.sub_emotion.lower(),
    )
