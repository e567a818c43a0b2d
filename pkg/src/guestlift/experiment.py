"""Conversion-uplift experiment harness.

Simulates a guest population with persuasion-susceptibility ground truth,
runs the categorize -> directive -> ad-copy pipeline, shows each guest a
generic control message and a category-matched treatment message, and
measures the conversion-rate uplift with a two-proportion z-test.

Ground truth is a logistic-odds response model: a matched message multiplies
the guest's conversion odds.  Both arms share each impression's uniform draw
(common random numbers), so the null case (multiplier 1.0) measures exactly
zero uplift and the measured uplift is non-decreasing in the multiplier for
any seed.  All randomness comes from per-guest sub-seeds, so sharding the
population across workers cannot change results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from random import Random
from statistics import NormalDist

import httpx

from .influence import (
    DEFAULT_TAXONOMY,
    PRINCIPLES,
    EmotionTaxonomy,
    PersuasionCategory,
    categorize_guest,
    directive_for,
    load_quiz,
)
from .promptsmith import AdCopySpec, MockBackend, build_prompt, generate_copies, spec_to_doc

CONTROL_MESSAGE = "This week's offers from our hotel team"

_QUIZ_QUESTION_ID = "q1"


class ServiceUnreachable(RuntimeError):
    """The experiment could not reach the upsell service."""


def _cell_key(family: str, sub_emotion: str, principle: str) -> str:
    return f"{family}/{sub_emotion}/{principle}"


def _all_cells(taxonomy: EmotionTaxonomy) -> list[tuple[str, str, str]]:
    return [
        (family, sub, principle)
        for family, subs in taxonomy.families
        for sub in subs
        for principle in PRINCIPLES
    ]


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters; categoryMix maps "Family/Sub/principle" cell
    keys to weights and defaults to uniform over all 90 cells."""

    guests: int = 1000
    seed: int = 0
    base_rate: float = 0.05
    matched_odds_multiplier: float = 2.0
    impressions_per_guest: int = 1
    category_mix: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.guests < 1:
            raise ValueError("guests must be >= 1")
        if not 0.0 < self.base_rate < 1.0:
            raise ValueError("baseRate must be in (0, 1)")
        if self.matched_odds_multiplier <= 0.0:
            raise ValueError("matchedOddsMultiplier must be > 0")
        if self.impressions_per_guest < 1:
            raise ValueError("impressionsPerGuest must be >= 1")
        for key, weight in self.category_mix:
            if weight < 0:
                raise ValueError(f"categoryMix weight for {key!r} must be >= 0")
        if self.category_mix and not any(w > 0 for _, w in self.category_mix):
            raise ValueError("categoryMix must have positive total weight")

    @classmethod
    def from_document(cls, document: dict) -> "SimConfig":
        mix = tuple(
            (str(key), float(weight))
            for key, weight in document.get("categoryMix", {}).items()
        )
        return cls(
            guests=int(document.get("guests", cls.guests)),
            seed=int(document.get("seed", cls.seed)),
            base_rate=float(document.get("baseRate", cls.base_rate)),
            matched_odds_multiplier=float(
                document.get("matchedOddsMultiplier", cls.matched_odds_multiplier)
            ),
            impressions_per_guest=int(
                document.get("impressionsPerGuest", cls.impressions_per_guest)
            ),
            category_mix=mix,
        )


@dataclass(frozen=True)
class SimGuest:
    reservation: str
    category: PersuasionCategory
    answers: tuple[dict, ...]


@dataclass(frozen=True)
class Population:
    guests: tuple[SimGuest, ...]
    quiz_document: dict
    ratings: tuple[dict, ...]
    orders: tuple[dict, ...]


def _quiz_document(taxonomy: EmotionTaxonomy) -> dict:
    """One question whose options map 1:1 onto influence-grid cells."""
    options = [
        {
            "id": _cell_key(*cell),
            "subEmotions": {cell[1]: 1.0},
            "principles": {cell[2]: 1.0},
        }
        for cell in _all_cells(taxonomy)
    ]
    return {"questions": [{"id": _QUIZ_QUESTION_ID, "options": options}]}


def simulate_population(cfg: SimConfig, taxonomy: EmotionTaxonomy | None = None) -> Population:
    """Deterministic synthetic dataset: guests with ground-truth categories,
    quiz sheets concentrated on the true cell, plus token ratings/orders."""
    taxonomy = taxonomy or DEFAULT_TAXONOMY
    cells = _all_cells(taxonomy)
    if cfg.category_mix:
        keys = {_cell_key(*cell): cell for cell in cells}
        chosen_cells = []
        weights = []
        for key, weight in cfg.category_mix:
            if key not in keys:
                raise ValueError(f"categoryMix key {key!r} is not an influence-grid cell")
            chosen_cells.append(keys[key])
            weights.append(weight)
    else:
        chosen_cells = cells
        weights = [1.0] * len(cells)

    guests = []
    ratings = []
    orders = []
    for i in range(cfg.guests):
        rng = Random(f"{cfg.seed}:cat:{i}")
        family, sub, principle = rng.choices(chosen_cells, weights=weights)[0]
        reservation = f"guest-{i:05d}"
        guests.append(
            SimGuest(
                reservation=reservation,
                category=PersuasionCategory(emotion=family, sub_emotion=sub, principle=principle),
                answers=(
                    {"questionId": _QUIZ_QUESTION_ID, "optionId": _cell_key(family, sub, principle)},
                ),
            )
        )
        taste = Random(f"{cfg.seed}:taste:{i}")
        ratings.append(
            {
                "reservationNumber": reservation,
                "item": f"wine-{taste.randint(1, 8):02d}",
                "stars": taste.randint(1, 5),
            }
        )
        if i % 3 == 0:
            orders.append(
                {
                    "accommodationId": "sim",
                    "reservationNumber": reservation,
                    "lines": ["starter", "main"] if taste.random() < 0.5 else ["main", "dessert"],
                }
            )
    return Population(
        guests=tuple(guests),
        quiz_document=_quiz_document(taxonomy),
        ratings=tuple(ratings),
        orders=tuple(orders),
    )


def uplift(control: float, treatment: float) -> float:
    """Relative conversion-rate change, treatment/control - 1."""
    return treatment / control - 1.0


def two_proportion_ztest(
    control_successes: int, control_n: int, treatment_successes: int, treatment_n: int
) -> tuple[float, float]:
    """Pooled two-proportion z-test; returns (z, two-sided p).

    A degenerate pooled rate (0 or 1) has zero standard error and reports
    (0.0, 1.0) — no evidence either way.
    """
    pooled = (control_successes + treatment_successes) / (control_n + treatment_n)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / control_n + 1.0 / treatment_n))
    if se == 0.0:
        return 0.0, 1.0
    z = (treatment_successes / treatment_n - control_successes / control_n) / se
    p = 2.0 * (1.0 - NormalDist().cdf(abs(z)))
    return z, p


@dataclass(frozen=True)
class ExperimentReport:
    control_rate: float
    treatment_rate: float
    uplift: float
    z_statistic: float
    p_value: float
    control_n: int
    treatment_n: int
    control_conversions: int
    treatment_conversions: int
    seed: int

    def to_doc(self) -> dict:
        return {
            "controlRate": self.control_rate,
            "treatmentRate": self.treatment_rate,
            "uplift": self.uplift,
            "zStatistic": self.z_statistic,
            "pValue": self.p_value,
            "controlN": self.control_n,
            "treatmentN": self.treatment_n,
            "controlConversions": self.control_conversions,
            "treatmentConversions": self.treatment_conversions,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2) + "\n"


def _matched_probability(base_rate: float, multiplier: float) -> float:
    odds = base_rate / (1.0 - base_rate) * multiplier
    return odds / (1.0 + odds)


def _treatment_copy(category: PersuasionCategory, taxonomy: EmotionTaxonomy, backend, client) -> str:
    directive = directive_for(category, taxonomy)
    spec = AdCopySpec(
        task="a special offer",
        topic="hotel guest services",
        emotion=directive.emotion_keyword,
        tone=directive.tone_keywords[0],
        length_words=12,
        include_emoticon=True,
        copies=1,
    )
    if client is not None:
        try:
            response = client.post("/ads/suggest", json=spec_to_doc(spec))
        except httpx.HTTPError as exc:
            raise ServiceUnreachable(f"/ads/suggest request failed: {exc}") from exc
        if response.status_code != 200:
            raise ServiceUnreachable(f"/ads/suggest returned HTTP {response.status_code}")
        return response.json()[0]["text"]
    return generate_copies(spec, backend)[0].text


def run_experiment(
    cfg: SimConfig,
    client=None,
    taxonomy: EmotionTaxonomy | None = None,
) -> ExperimentReport:
    """Run the paired control/treatment simulation and measure uplift.

    ``client`` (an httpx-compatible client bound to a running service) routes
    ad-copy generation through POST /ads/suggest; without it the mock backend
    is wired in-process.  Guest categorization always runs in-process through
    the influential model, using the simulated quiz sheets.
    """
    taxonomy = taxonomy or DEFAULT_TAXONOMY
    population = simulate_population(cfg, taxonomy)
    quiz = load_quiz(population.quiz_document)
    backend = MockBackend(cfg.seed)
    p_matched = _matched_probability(cfg.base_rate, cfg.matched_odds_multiplier)

    copy_cache: dict[str, str] = {}
    control_conversions = 0
    treatment_conversions = 0
    for i, guest in enumerate(population.guests):
        sheet = quiz.resolve(guest.reservation, guest.answers)
        predicted = categorize_guest(sheet, taxonomy)
        matched = predicted == guest.category
        key = _cell_key(predicted.emotion, predicted.sub_emotion, predicted.principle)
        if key not in copy_cache:
            copy_cache[key] = _treatment_copy(predicted, taxonomy, backend, client)
        p_treatment = p_matched if matched else cfg.base_rate
        rng = Random(f"{cfg.seed}:conv:{i}")
        for _ in range(cfg.impressions_per_guest):
            # One latent draw per impression, shared by both arms (common
            # random numbers): the same guest seeing the two messages.
            u = rng.random()
            if u < cfg.base_rate:
                control_conversions += 1
            if u < p_treatment:
                treatment_conversions += 1

    n = cfg.guests * cfg.impressions_per_guest
    control_rate = control_conversions / n
    treatment_rate = treatment_conversions / n
    z, p = two_proportion_ztest(control_conversions, n, treatment_conversions, n)
    return ExperimentReport(
        control_rate=control_rate,
        treatment_rate=treatment_rate,
        uplift=uplift(control_rate, treatment_rate) if control_rate > 0 else 0.0,
        z_statistic=z,
        p_value=p,
        control_n=n,
        treatment_n=n,
        control_conversions=control_conversions,
        treatment_conversions=treatment_conversions,
        seed=cfg.seed,
    )
