"""Recommender engine configuration."""

from __future__ import annotations

from dataclasses import dataclass

from .similarity import KINDS


@dataclass(frozen=True)
class EngineConfig:
    """Tunables for the recommenders and the periodic state rebuild.

    Document keys: similarity.kind (user-user), similarity.item_kind
    (item-item), knn.k, knn.min_overlap, kbr.price_penalty, recommend.top_n,
    rebuild.period_seconds.
    """

    similarity_kind: str = "cosine"
    item_similarity_kind: str = "adjusted_cosine"
    k: int = 5
    min_overlap: int = 2
    price_penalty: float = 0.5
    top_n: int = 5
    rebuild_period_seconds: float = 0.0  # 0 disables the timer

    def __post_init__(self):
        if self.similarity_kind not in KINDS:
            raise ValueError(f"similarity.kind must be one of {KINDS}")
        if self.item_similarity_kind not in KINDS:
            raise ValueError(f"similarity.item_kind must be one of {KINDS}")
        if self.k < 1:
            raise ValueError("knn.k must be >= 1")
        if self.min_overlap < 1:
            raise ValueError("knn.min_overlap must be >= 1")
        if not 0.0 <= self.price_penalty <= 1.0:
            raise ValueError("kbr.price_penalty must be in [0, 1]")
        if self.top_n < 1:
            raise ValueError("recommend.top_n must be >= 1")
        if self.rebuild_period_seconds < 0:
            raise ValueError("rebuild.period_seconds must be >= 0")

    @classmethod
    def from_document(cls, document: dict) -> "EngineConfig":
        similarity = document.get("similarity", {})
        knn = document.get("knn", {})
        kbr = document.get("kbr", {})
        recommend = document.get("recommend", {})
        rebuild = document.get("rebuild", {})
        return cls(
            similarity_kind=similarity.get("kind", cls.similarity_kind),
            item_similarity_kind=similarity.get("item_kind", cls.item_similarity_kind),
            k=int(knn.get("k", cls.k)),
            min_overlap=int(knn.get("min_overlap", cls.min_overlap)),
            price_penalty=float(kbr.get("price_penalty", cls.price_penalty)),
            top_n=int(recommend.get("top_n", cls.top_n)),
            rebuild_period_seconds=float(rebuild.get("period_seconds", cls.rebuild_period_seconds)),
        )
