"""The six recommenders: quiz-driven, content-based, the two collaborative
filters, order completion, and the popularity fallback."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping

from ..domain import CatalogItem, Order, RatingsMatrix, WinePreferenceProfile
from .similarity import DEFAULT_MIN_OVERLAP, pairwise_item_sims, pairwise_user_sims

if TYPE_CHECKING:
    from .snapshot import ModelSnapshot

DEFAULT_K = 5
DEFAULT_TOP_N = 5
DEFAULT_PRICE_PENALTY = 0.5


class EngineError(Exception):
    """Base class for recommender failures."""


class EmptyCatalog(EngineError):
    pass


class ColdStartNoRatings(EngineError):
    """The guest has no usable (non-neutral) ratings; fall back to popularity."""


class UnknownUser(EngineError):
    pass


class UnknownItem(EngineError):
    pass


class StaleSnapshot(EngineError):
    """The snapshot belongs to a different accommodation than the order."""


@dataclass(frozen=True)
class Recommendation:
    """One ranked result: an item, its relevance score, and a short why."""

    item: str
    score: float
    kind: str
    explain: str


def _clamp_stars(value: float) -> float:
    return max(1.0, min(5.0, value))


def _ranked(scored: Iterable[tuple[str, float]], kind: str, explains: Mapping[str, str], top_n: int) -> list[Recommendation]:
    ordered = sorted(scored, key=lambda pair: (-pair[1], pair[0]))
    return [Recommendation(item, score, kind, explains.get(item, "")) for item, score in ordered[:top_n]]


# --- knowledge-based ---------------------------------------------------------

def kbr_score(
    profile: WinePreferenceProfile, item: CatalogItem, price_penalty: float = DEFAULT_PRICE_PENALTY
) -> float:
    """Attribute match in [0, 1]: price gate times (1 - normalized L1 distance).

    The L1 distance over the ten attributes is normalized by the widest
    possible spread, 10 attributes x 2 level steps = 20.
    """
    if item.category != "wine":
        raise EngineError(f"kbr scores wine items only, got category {item.category!r}")
    distance = sum(abs(p - q) for p, q in zip(profile.vector(), item.vector()))
    gate = 1.0 if profile.price == item.price_bucket else price_penalty
    return gate * (1.0 - distance / 20.0)


def recommend_kbr(
    profile: WinePreferenceProfile,
    catalog: Iterable[CatalogItem],
    top_n: int = DEFAULT_TOP_N,
    price_penalty: float = DEFAULT_PRICE_PENALTY,
) -> list[Recommendation]:
    """Top-N catalog wines by quiz-profile match.  Excludes nothing: the quiz
    precedes any purchase history."""
    wines = [item for item in catalog if item.category == "wine"]
    if not wines:
        raise EmptyCatalog(f"no wine catalog for accommodation {profile.accommodation!r}")
    scored = []
    explains = {}
    for item in wines:
        score = kbr_score(profile, item, price_penalty)
        bucket = "match" if profile.price == item.price_bucket else "mismatch"
        distance = sum(abs(p - q) for p, q in zip(profile.vector(), item.vector()))
        scored.append((item.id, score))
        explains[item.id] = f"price bucket {bucket}, attribute distance {distance}/20"
    return _ranked(scored, "kbr", explains, top_n)


# --- content-based -----------------------------------------------------------

def _attribute_cosine(a: tuple[int, ...], b: tuple[int, ...]) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = sum(x * x for x in a)
    nb = sum(y * y for y in b)
    return dot / math.sqrt(na * nb)


def recommend_cbr(
    reservation: str,
    ratings: RatingsMatrix,
    catalog: Iterable[CatalogItem],
    top_n: int = DEFAULT_TOP_N,
) -> list[Recommendation]:
    """Rank unrated wines by attribute similarity to the guest's rated ones,
    weighted by how far each rating sits from the neutral 3 stars.

    Raises ColdStartNoRatings when the guest has no ratings, none of the rated
    items carries an attribute vector, or all ratings are neutral.
    """
    row = ratings.row(reservation)
    by_id = {item.id: item for item in catalog if item.category == "wine"}
    rated = [(item_id, stars) for item_id, stars in row.items() if item_id in by_id]
    denominator = sum(abs(stars - 3) for _, stars in rated)
    if denominator == 0:
        raise ColdStartNoRatings(f"no rating signal for reservation {reservation}")
    scored = []
    explains = {}
    for candidate in by_id.values():
        if candidate.id in row:
            continue  # never re-recommend a rated item
        numerator = sum(
            _attribute_cosine(candidate.vector(), by_id[item_id].vector()) * (stars - 3)
            for item_id, stars in rated
        )
        scored.append((candidate.id, numerator / denominator))
        explains[candidate.id] = f"attribute match against {len(rated)} rated wines"
    return _ranked(scored, "cbr", explains, top_n)


# --- collaborative filtering -------------------------------------------------

def _sim_lookup(sims: Mapping[tuple[str, str], float], a: str, b: str) -> float | None:
    return sims.get((a, b) if a <= b else (b, a))


def _means(vectors: Mapping[str, Mapping[str, int]]) -> dict[str, float]:
    return {label: sum(row.values()) / len(row) for label, row in vectors.items() if row}


def _knn(
    sims: Mapping[tuple[str, str], float],
    target: str,
    others: Iterable[tuple[str, int]],
    k: int,
) -> list[tuple[float, str, int]]:
    """The k most-similar (positive, defined) raters/items with their ratings."""
    neighbors = []
    for label, stars in others:
        s = _sim_lookup(sims, target, label)
        if s is not None and s > 0:
            neighbors.append((s, label, stars))
    neighbors.sort(key=lambda t: (-t[0], t[1]))
    return neighbors[:k]


def _center_predict(
    base_mean: float,
    top: list[tuple[float, str, int]],
    means: Mapping[str, float],
) -> float:
    numerator = sum(s * (stars - means[label]) for s, label, stars in top)
    denominator = sum(abs(s) for s, _, _ in top)
    return _clamp_stars(base_mean + numerator / denominator)


def predict_uucf(
    matrix: RatingsMatrix,
    reservation: str,
    item: str,
    k: int = DEFAULT_K,
    kind: str = "cosine",
    min_overlap: int = DEFAULT_MIN_OVERLAP,
) -> float | None:
    """Mean-centered user-neighborhood prediction, clamped to [1, 5].

    None (undefined) when no other guest with positive similarity rated the
    item.
    """
    if reservation not in matrix.rows:
        raise UnknownUser(reservation)
    if item not in matrix.cols:
        raise UnknownItem(item)
    sims = pairwise_user_sims(matrix, kind, min_overlap)
    means = _means({u: matrix.row(u) for u in matrix.rows})
    others = [(v, matrix.stars(v, item)) for v in matrix.rows if v != reservation and matrix.stars(v, item) is not None]
    top = _knn(sims, reservation, others, k)
    if not top:
        return None
    return _center_predict(means[reservation], top, means)


def predict_iicf(
    matrix: RatingsMatrix,
    reservation: str,
    item: str,
    k: int = DEFAULT_K,
    kind: str = "adjusted_cosine",
    min_overlap: int = DEFAULT_MIN_OVERLAP,
) -> float | None:
    """Mirror of predict_uucf over item-item similarities."""
    if reservation not in matrix.rows:
        raise UnknownUser(reservation)
    if item not in matrix.cols:
        raise UnknownItem(item)
    sims = pairwise_item_sims(matrix, kind, min_overlap)
    item_means = _means({i: matrix.col(i) for i in matrix.cols})
    row = matrix.row(reservation)
    others = [(j, stars) for j, stars in row.items() if j != item]
    top = _knn(sims, item, others, k)
    if not top:
        return None
    return _center_predict(item_means[item], top, item_means)


def recommend_uucf(
    matrix: RatingsMatrix,
    k: int = DEFAULT_K,
    top_n: int = DEFAULT_TOP_N,
    kind: str = "cosine",
    min_overlap: int = DEFAULT_MIN_OVERLAP,
    popularity: Mapping[str, int] | None = None,
) -> dict[str, list[Recommendation]]:
    """Ranked unrated-item predictions for every guest in the matrix.

    Guests with no defined prediction fall back to the popularity ranking
    (flagged kind=pos_pop) when popularity data is available.
    """
    sims = pairwise_user_sims(matrix, kind, min_overlap)
    means = _means({u: matrix.row(u) for u in matrix.rows})
    raters: dict[str, list[tuple[str, int]]] = {
        i: [(v, stars) for v, stars in matrix.col(i).items()] for i in matrix.cols
    }
    results: dict[str, list[Recommendation]] = {}
    for u in matrix.rows:
        row = matrix.row(u)
        scored = []
        explains = {}
        for i in matrix.cols:
            if i in row:
                continue  # never re-recommend a rated item
            top = _knn(sims, u, [(v, stars) for v, stars in raters[i] if v != u], k)
            if not top:
                continue
            scored.append((i, _center_predict(means[u], top, means)))
            explains[i] = "neighbors: " + ", ".join(label for _, label, _ in top)
        if scored:
            results[u] = _ranked(scored, "uucf", explains, top_n)
        else:
            results[u] = popularity_ranking(popularity or {}, set(row), top_n, note="no similar raters")
    return results


def recommend_iicf(
    matrix: RatingsMatrix,
    k: int = DEFAULT_K,
    top_n: int = DEFAULT_TOP_N,
    kind: str = "adjusted_cosine",
    min_overlap: int = DEFAULT_MIN_OVERLAP,
    popularity: Mapping[str, int] | None = None,
) -> dict[str, list[Recommendation]]:
    """Mirror of recommend_uucf over item-item similarities."""
    sims = pairwise_item_sims(matrix, kind, min_overlap)
    item_means = _means({i: matrix.col(i) for i in matrix.cols})
    results: dict[str, list[Recommendation]] = {}
    for u in matrix.rows:
        row = matrix.row(u)
        scored = []
        explains = {}
        for i in matrix.cols:
            if i in row:
                continue  # never re-recommend a rated item
            top = _knn(sims, i, [(j, stars) for j, stars in row.items()], k)
            if not top:
                continue
            scored.append((i, _center_predict(item_means[i], top, item_means)))
            explains[i] = "similar items: " + ", ".join(label for _, label, _ in top)
        if scored:
            results[u] = _ranked(scored, "iicf", explains, top_n)
        else:
            results[u] = popularity_ranking(popularity or {}, set(row), top_n, note="no similar items")
    return results


# --- point of sale -----------------------------------------------------------

def popularity_ranking(
    popularity: Mapping[str, int],
    exclude: set[str],
    top_n: int = DEFAULT_TOP_N,
    note: str = "",
) -> list[Recommendation]:
    """Most-purchased items outside the excluded set."""
    suffix = f" ({note})" if note else ""
    scored = [(item, float(count)) for item, count in popularity.items() if item not in exclude]
    explains = {item: f"purchased {int(score)} times{suffix}" for item, score in scored}
    return _ranked(scored, "pos_pop", explains, top_n)


def complete_order_iicf(
    order: Order, snapshot: "ModelSnapshot", top_n: int = DEFAULT_TOP_N
) -> list[Recommendation]:
    """Items that usually accompany the order's lines.

    score(candidate) = sum over order lines of coPurchase(candidate, line)
    normalized by the line's own purchase count; zero-scoring candidates are
    dropped (no co-purchase evidence means no completion).
    """
    if snapshot.accommodation != order.accommodation:
        raise StaleSnapshot(
            f"snapshot is for {snapshot.accommodation!r}, order is for {order.accommodation!r}"
        )
    if not order.lines:
        raise EngineError("order completion needs at least one line")
    in_order = set(order.lines)
    partners: dict[str, list[str]] = {}
    scores: dict[str, float] = {}
    for (x, y), count in snapshot.co_purchase.items():
        for line, candidate in ((x, y), (y, x)):
            if line not in in_order or candidate in in_order:
                continue
            line_popularity = snapshot.popularity.get(line, 0)
            if line_popularity == 0:
                continue
            scores[candidate] = scores.get(candidate, 0.0) + count / line_popularity
            partners.setdefault(candidate, []).append(line)
    explains = {
        candidate: "co-purchased with " + ", ".join(sorted(lines))
        for candidate, lines in partners.items()
    }
    return _ranked(scores.items(), "pos_iicf", explains, top_n)


def recommend_pop(order: Order, snapshot: "ModelSnapshot", top_n: int = DEFAULT_TOP_N) -> list[Recommendation]:
    """Most-purchased items not already in the order."""
    return popularity_ranking(snapshot.popularity, set(order.lines), top_n)
