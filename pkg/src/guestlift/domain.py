"""Shared domain types for the upsell service.

Guests, wine-preference profiles, catalog items, ratings, orders, and the
serialized document shapes they travel in.  Everything here is a plain value
type: safe to copy between threads, no I/O.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:
    from .influence import PersuasionCategory

WINE_ATTRIBUTES: tuple[str, ...] = (
    "color", "tannins", "fruitness", "acidity", "body",
    "earthy", "spices", "herbal", "floral", "oaky",
)

ATTRIBUTE_LEVELS = (1, 2, 3)

DEFAULT_PRICE_BUCKETS: tuple[str, ...] = ("less_60", "60_120", "over_120")

RECOMMENDER_KINDS = ("kbr", "cbr", "uucf", "iicf", "pos_iicf", "pos_pop")
# POS recommenders return generic items; the wine ones return wines.
POS_KINDS = ("pos_iicf", "pos_pop")

ITEM_CATEGORIES = ("wine", "dish", "spa", "other")

EPOCH = datetime(1970, 1, 1)

_ACM_RE = re.compile(r"[a-z0-9_-]{1,16}")


class DomainError(ValueError):
    """Base class for domain validation failures."""


class MissingAttribute(DomainError):
    def __init__(self, name: str):
        super().__init__(f"missing attribute: {name}")
        self.name = name


class InvalidLevel(DomainError):
    def __init__(self, name: str, value: object):
        super().__init__(f"invalid level for {name}: {value!r} (expected one of {ATTRIBUTE_LEVELS})")
        self.name = name
        self.value = value


class UnknownPriceBucket(DomainError):
    def __init__(self, value: object, buckets: tuple[str, ...] = DEFAULT_PRICE_BUCKETS):
        super().__init__(f"unknown price bucket: {value!r} (expected one of {', '.join(buckets)})")
        self.value = value


def validate_accommodation_id(value: object) -> str:
    if not isinstance(value, str) or not _ACM_RE.fullmatch(value):
        raise DomainError(f"bad accommodation id: {value!r}")
    return value


def validate_reservation_number(value: object) -> str:
    if isinstance(value, int) and not isinstance(value, bool):
        value = str(value)
    if not isinstance(value, str) or not value or not value.isdigit():
        raise DomainError(f"bad reservation number: {value!r}")
    return value


def parse_timestamp(value: object) -> datetime:
    if isinstance(value, datetime):
        return value
    try:
        return datetime.fromisoformat(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"bad timestamp: {value!r}") from exc


def format_timestamp(ts: datetime) -> str:
    """Serialize in the stored-document style: millisecond precision unless
    the value carries finer-grained microseconds."""
    if ts.microsecond % 1000 == 0:
        return ts.isoformat(timespec="milliseconds")
    return ts.isoformat()


def timestamp_sort_key(ts: datetime) -> datetime:
    """Ordering key that treats zone-naive timestamps as UTC.

    Stored documents mix offset-carrying and naive stamps; the originals are
    kept verbatim for round-tripping and this key is used wherever they must
    be compared.
    """
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts


@dataclass(frozen=True)
class WinePreferenceProfile:
    """A guest's wine quiz answers: ten sensory attributes plus a price bucket."""

    accommodation: str
    reservation: str
    profile_name: str
    preferences: dict[str, int]  # the ten WINE_ATTRIBUTES -> level 1..3
    price: str
    captured_at: datetime
    doc_id: str | None = None     # opaque "_id" passthrough from the source document
    doc_class: str | None = None  # opaque "_class" passthrough

    def vector(self) -> tuple[int, ...]:
        """Preference levels in canonical attribute order."""
        return tuple(self.preferences[a] for a in WINE_ATTRIBUTES)


def _parse_level(name: str, value: object) -> int:
    # Stored documents carry levels as quoted digits; bare integers are accepted too.
    if isinstance(value, bool):
        raise InvalidLevel(name, value)
    if isinstance(value, str):
        stripped = value.strip()
        if not stripped.lstrip("-").isdigit():
            raise InvalidLevel(name, value)
        value = int(stripped)
    if not isinstance(value, int) or value not in ATTRIBUTE_LEVELS:
        raise InvalidLevel(name, value)
    return value


def parse_wine_profile(
    document: str | bytes | dict,
    price_buckets: tuple[str, ...] = DEFAULT_PRICE_BUCKETS,
) -> WinePreferenceProfile:
    """Parse a serialized quiz-profile document into a WinePreferenceProfile.

    Unknown fields are ignored; ``_id``/``_class`` are carried through
    opaquely.  Attribute levels may arrive as quoted digits or bare integers;
    the price bucket lives inside ``preferences`` (top-level is accepted too).
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise DomainError(f"profile document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise DomainError("profile document must be a JSON object")

    for field_name in ("accommodationId", "reservationNumber", "preferences", "dateTime"):
        if field_name not in document:
            raise MissingAttribute(field_name)
    prefs_in = document["preferences"]
    if not isinstance(prefs_in, dict):
        raise DomainError("preferences must be an object")

    preferences: dict[str, int] = {}
    for name in WINE_ATTRIBUTES:
        if name not in prefs_in:
            raise MissingAttribute(name)
        preferences[name] = _parse_level(name, prefs_in[name])

    price = prefs_in.get("price", document.get("price"))
    if price is None:
        raise MissingAttribute("price")
    if price not in price_buckets:
        raise UnknownPriceBucket(price, tuple(price_buckets))

    return WinePreferenceProfile(
        accommodation=validate_accommodation_id(document["accommodationId"]),
        reservation=validate_reservation_number(document["reservationNumber"]),
        profile_name=str(document.get("profileName", "")),
        preferences=preferences,
        price=price,
        captured_at=parse_timestamp(document["dateTime"]),
        doc_id=document.get("_id"),
        doc_class=document.get("_class"),
    )


def serialize_wine_profile(profile: WinePreferenceProfile) -> str:
    """Serialize back to the document shape accepted by parse_wine_profile.

    Field order is stable; attribute levels are emitted as quoted digits to
    match the stored-document convention, with the price bucket nested under
    ``preferences``.
    """
    doc: dict[str, object] = {}
    if profile.doc_id is not None:
        doc["_id"] = profile.doc_id
    doc["accommodationId"] = profile.accommodation
    doc["reservationNumber"] = profile.reservation
    doc["profileName"] = profile.profile_name
    prefs: dict[str, str] = {name: str(profile.preferences[name]) for name in WINE_ATTRIBUTES}
    prefs["price"] = profile.price
    doc["preferences"] = prefs
    doc["dateTime"] = format_timestamp(profile.captured_at)
    if profile.doc_class is not None:
        doc["_class"] = profile.doc_class
    return json.dumps(doc)


@dataclass(frozen=True)
class RecommendationDocument:
    """Parsed form of a recommendation response document."""

    accommodation: str
    items: tuple[str, ...]
    reservation: str
    kind: str
    timestamp: datetime


def serialize_recommendation(
    acm: str,
    items: Iterable[str],
    reservation: str,
    kind: str,
    timestamp: datetime,
    allow_empty: bool = True,
) -> str:
    """Serialize a recommendation result document.

    The document contains exactly the fields {accommodationId,
    recommendedWines (or recommendedItems for the POS kinds),
    reservationNumber, timestamp, type}, in that order.
    """
    if kind not in RECOMMENDER_KINDS:
        raise DomainError(f"unknown recommender kind: {kind!r}")
    items = list(items)
    if not items and not allow_empty:
        raise DomainError("empty recommendation list")
    items_key = "recommendedItems" if kind in POS_KINDS else "recommendedWines"
    doc = {
        "accommodationId": validate_accommodation_id(acm),
        items_key: items,
        "reservationNumber": validate_reservation_number(reservation),
        "timestamp": format_timestamp(timestamp),
        "type": kind,
    }
    return json.dumps(doc)


def parse_recommendation(document: str | bytes | dict) -> RecommendationDocument:
    """Parse a recommendation document produced by serialize_recommendation."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise DomainError(f"recommendation document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise DomainError("recommendation document must be a JSON object")
    kind = document.get("type")
    if kind not in RECOMMENDER_KINDS:
        raise DomainError(f"unknown recommender kind: {kind!r}")
    items_key = "recommendedItems" if kind in POS_KINDS else "recommendedWines"
    if items_key not in document:
        raise MissingAttribute(items_key)
    for field_name in ("accommodationId", "reservationNumber", "timestamp"):
        if field_name not in document:
            raise MissingAttribute(field_name)
    items = document[items_key]
    if not isinstance(items, list) or not all(isinstance(i, str) for i in items):
        raise DomainError(f"{items_key} must be a list of item tokens")
    return RecommendationDocument(
        accommodation=validate_accommodation_id(document["accommodationId"]),
        items=tuple(items),
        reservation=validate_reservation_number(document["reservationNumber"]),
        kind=kind,
        timestamp=parse_timestamp(document["timestamp"]),
    )


@dataclass(frozen=True)
class CatalogItem:
    """An expert-described sellable item; wines carry the full attribute vector."""

    id: str
    accommodation: str
    category: str
    attributes: dict[str, int]
    price_bucket: str
    display_name: str = ""

    def __post_init__(self):
        if self.category not in ITEM_CATEGORIES:
            raise DomainError(f"unknown item category: {self.category!r}")
        if self.category == "wine":
            for name in WINE_ATTRIBUTES:
                if name not in self.attributes:
                    raise MissingAttribute(name)
        for name, level in self.attributes.items():
            if level not in ATTRIBUTE_LEVELS:
                raise InvalidLevel(name, level)

    def vector(self) -> tuple[int, ...]:
        try:
            return tuple(self.attributes[a] for a in WINE_ATTRIBUTES)
        except KeyError as exc:
            raise MissingAttribute(exc.args[0]) from None


def parse_catalog_item(document: dict) -> CatalogItem:
    """Parse one catalog file entry."""
    if not isinstance(document, dict):
        raise DomainError("catalog item must be a JSON object")
    for field_name in ("id", "accommodationId", "category"):
        if field_name not in document:
            raise MissingAttribute(field_name)
    attributes_in = document.get("attributes", {})
    if not isinstance(attributes_in, dict):
        raise DomainError("attributes must be an object")
    attributes = {name: _parse_level(name, value) for name, value in attributes_in.items()}
    return CatalogItem(
        id=str(document["id"]),
        accommodation=validate_accommodation_id(document["accommodationId"]),
        category=document["category"],
        attributes=attributes,
        price_bucket=str(document.get("priceBucket", "")),
        display_name=str(document.get("displayName", "")),
    )


@dataclass(frozen=True)
class Rating:
    """One five-star feedback record."""

    reservation: str
    item: str
    stars: int
    at: datetime

    def __post_init__(self):
        if isinstance(self.stars, bool) or not isinstance(self.stars, int) or not 1 <= self.stars <= 5:
            raise DomainError(f"stars out of range: {self.stars!r}")


def parse_rating(document: dict) -> Rating:
    if not isinstance(document, dict):
        raise DomainError("rating must be a JSON object")
    for field_name in ("reservationNumber", "item", "stars"):
        if field_name not in document:
            raise MissingAttribute(field_name)
    stars = document["stars"]
    if isinstance(stars, str) and stars.strip().isdigit():
        stars = int(stars.strip())
    return Rating(
        reservation=validate_reservation_number(document["reservationNumber"]),
        item=str(document["item"]),
        stars=stars,
        at=parse_timestamp(document.get("at", EPOCH)),
    )


class RatingsMatrix:
    """Sparse guest x item star matrix.

    Duplicate (guest, item) ratings resolve latest-wins by rating timestamp,
    then by ingestion order.  Row and column label order is first-seen, which
    keeps downstream computations deterministic for a given rating sequence.
    """

    def __init__(self):
        self.rows: list[str] = []
        self.cols: list[str] = []
        self._cells: dict[tuple[str, str], int] = {}
        self._row_set: set[str] = set()
        self._col_set: set[str] = set()

    @classmethod
    def from_ratings(cls, ratings: Iterable[Rating]) -> "RatingsMatrix":
        matrix = cls()
        winners: dict[tuple[str, str], tuple[datetime, int, int]] = {}
        for seq, rating in enumerate(ratings):
            key = (rating.reservation, rating.item)
            prev = winners.get(key)
            if prev is None or (timestamp_sort_key(rating.at), seq) >= (timestamp_sort_key(prev[0]), prev[1]):
                winners[key] = (rating.at, seq, rating.stars)
        for (reservation, item), (_, _, stars) in winners.items():
            matrix.set(reservation, item, stars)
        return matrix

    def set(self, reservation: str, item: str, stars: int) -> None:
        if not 1 <= stars <= 5:
            raise DomainError(f"stars out of range: {stars!r}")
        if reservation not in self._row_set:
            self._row_set.add(reservation)
            self.rows.append(reservation)
        if item not in self._col_set:
            self._col_set.add(item)
            self.cols.append(item)
        self._cells[(reservation, item)] = stars

    def stars(self, reservation: str, item: str) -> int | None:
        return self._cells.get((reservation, item))

    def row(self, reservation: str) -> dict[str, int]:
        """Items rated by one guest, in column order."""
        return {
            item: self._cells[(reservation, item)]
            for item in self.cols
            if (reservation, item) in self._cells
        }

    def col(self, item: str) -> dict[str, int]:
        """Guests who rated one item, in row order."""
        return {
            reservation: self._cells[(reservation, item)]
            for reservation in self.rows
            if (reservation, item) in self._cells
        }

    @property
    def cell_count(self) -> int:
        return len(self._cells)

    def cells(self) -> dict[tuple[str, str], int]:
        return dict(self._cells)


@dataclass(frozen=True)
class Order:
    """A point-of-sale order: the items a guest has already picked."""

    accommodation: str
    reservation: str
    lines: tuple[str, ...]
    opened_at: datetime = EPOCH

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        if len(set(self.lines)) != len(self.lines):
            raise DomainError("order lines contain a duplicate item")


def parse_order(document: dict) -> Order:
    if not isinstance(document, dict):
        raise DomainError("order must be a JSON object")
    for field_name in ("accommodationId", "reservationNumber", "lines"):
        if field_name not in document:
            raise MissingAttribute(field_name)
    lines = document["lines"]
    if not isinstance(lines, list) or not all(isinstance(line, str) for line in lines):
        raise DomainError("order lines must be a list of item tokens")
    return Order(
        accommodation=validate_accommodation_id(document["accommodationId"]),
        reservation=validate_reservation_number(document["reservationNumber"]),
        lines=tuple(lines),
        opened_at=parse_timestamp(document.get("openedAt", EPOCH)),
    )


@dataclass
class GuestProfile:
    """Everything the service has learned about one guest.

    ``direct`` is an append-only interaction log of (at, kind, subject)
    entries; ``indirect`` collects quiz/questionnaire submissions.
    """

    reservation: str
    demographics: dict[str, str] = field(default_factory=dict)
    indirect: list = field(default_factory=list)
    direct: list[tuple[datetime, str, str]] = field(default_factory=list)
    persuasion: "PersuasionCategory | None" = None

    def record(self, at: datetime, kind: str, subject: str) -> None:
        self.direct.append((at, kind, subject))
