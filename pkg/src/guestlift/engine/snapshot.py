"""Immutable per-accommodation model state and its periodic rebuild."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from itertools import combinations
from typing import Iterable

from ..domain import (
    EPOCH,
    Order,
    Rating,
    RatingsMatrix,
    format_timestamp,
    parse_timestamp,
    timestamp_sort_key,
)
from .config import EngineConfig
from .similarity import pairwise_item_sims, pairwise_user_sims

SNAPSHOT_DOCUMENT_VERSION = 1


@dataclass(frozen=True)
class ModelSnapshot:
    """Everything the POS recommenders (and fixtures) need, frozen at build time.

    Similarity maps are keyed by sorted label pairs and include self-pairs
    where defined; co_purchase counts how often two items appear in the same
    order; popularity counts orders containing each item.
    """

    accommodation: str
    built_at: datetime
    user_sims: dict[tuple[str, str], float]
    item_sims: dict[tuple[str, str], float]
    co_purchase: dict[tuple[str, str], int]
    popularity: dict[str, int]
    source_rating_count: int

    def user_sim(self, a: str, b: str) -> float | None:
        return self.user_sims.get((a, b) if a <= b else (b, a))

    def item_sim(self, a: str, b: str) -> float | None:
        return self.item_sims.get((a, b) if a <= b else (b, a))

    def co_count(self, a: str, b: str) -> int:
        return self.co_purchase.get((a, b) if a <= b else (b, a), 0)


def update_state(
    acm: str,
    ratings: Iterable[Rating],
    purchase_log: Iterable[Order],
    config: EngineConfig | None = None,
    built_at: datetime | None = None,
) -> ModelSnapshot:
    """Rebuild the accommodation's model snapshot from scratch.

    Deterministic: when built_at is not given the snapshot is stamped with the
    newest input timestamp (the epoch for empty inputs), so identical inputs
    always produce identical snapshots.
    """
    cfg = config or EngineConfig()
    ratings = list(ratings)
    orders = [order for order in purchase_log if order.accommodation == acm]

    matrix = RatingsMatrix.from_ratings(ratings)
    user_sims = pairwise_user_sims(matrix, cfg.similarity_kind, cfg.min_overlap)
    item_sims = pairwise_item_sims(matrix, cfg.item_similarity_kind, cfg.min_overlap)

    co_purchase: dict[tuple[str, str], int] = {}
    popularity: dict[str, int] = {}
    for order in orders:
        for item in order.lines:
            popularity[item] = popularity.get(item, 0) + 1
        for pair in combinations(sorted(order.lines), 2):
            co_purchase[pair] = co_purchase.get(pair, 0) + 1

    if built_at is None:
        stamps = [r.at for r in ratings] + [o.opened_at for o in orders]
        built_at = max(stamps, key=timestamp_sort_key) if stamps else EPOCH

    return ModelSnapshot(
        accommodation=acm,
        built_at=built_at,
        user_sims=user_sims,
        item_sims=item_sims,
        co_purchase=co_purchase,
        popularity=popularity,
        source_rating_count=len(ratings),
    )


def snapshot_to_document(snapshot: ModelSnapshot) -> dict:
    """Versioned export for fixtures and debugging; key order is canonical."""
    return {
        "version": SNAPSHOT_DOCUMENT_VERSION,
        "accommodationId": snapshot.accommodation,
        "builtAt": format_timestamp(snapshot.built_at),
        "userSims": [[a, b, s] for (a, b), s in sorted(snapshot.user_sims.items())],
        "itemSims": [[a, b, s] for (a, b), s in sorted(snapshot.item_sims.items())],
        "coPurchase": [[a, b, n] for (a, b), n in sorted(snapshot.co_purchase.items())],
        "popularity": {item: snapshot.popularity[item] for item in sorted(snapshot.popularity)},
        "sourceRatingCount": snapshot.source_rating_count,
    }


def snapshot_from_document(document: dict) -> ModelSnapshot:
    version = document.get("version")
    if version != SNAPSHOT_DOCUMENT_VERSION:
        raise ValueError(f"unsupported snapshot document version: {version!r}")
    return ModelSnapshot(
        accommodation=document["accommodationId"],
        built_at=parse_timestamp(document["builtAt"]),
        user_sims={(a, b): float(s) for a, b, s in document["userSims"]},
        item_sims={(a, b): float(s) for a, b, s in document["itemSims"]},
        co_purchase={(a, b): int(n) for a, b, n in document["coPurchase"]},
        popularity={item: int(n) for item, n in document["popularity"].items()},
        source_rating_count=int(document["sourceRatingCount"]),
    )
