"""Recommender engine: similarity kernels, the six recommenders, and the
periodic model-state rebuild."""

from .config import EngineConfig
from .recommenders import (
    ColdStartNoRatings,
    EmptyCatalog,
    EngineError,
    Recommendation,
    StaleSnapshot,
    UnknownItem,
    UnknownUser,
    complete_order_iicf,
    kbr_score,
    popularity_ranking,
    predict_iicf,
    predict_uucf,
    recommend_cbr,
    recommend_iicf,
    recommend_kbr,
    recommend_pop,
    recommend_uucf,
)
from .similarity import similarity
from .snapshot import ModelSnapshot, snapshot_from_document, snapshot_to_document, update_state

__all__ = [
    "ColdStartNoRatings",
    "EmptyCatalog",
    "EngineConfig",
    "EngineError",
    "ModelSnapshot",
    "Recommendation",
    "StaleSnapshot",
    "UnknownItem",
    "UnknownUser",
    "complete_order_iicf",
    "kbr_score",
    "popularity_ranking",
    "predict_iicf",
    "predict_uucf",
    "recommend_cbr",
    "recommend_iicf",
    "recommend_kbr",
    "recommend_pop",
    "recommend_uucf",
    "similarity",
    "snapshot_from_document",
    "snapshot_to_document",
    "update_state",
]
