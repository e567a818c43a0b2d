"""Campaign message store: a JSON snapshot plus an append-only event log.

Message definitions (name, status, channels, variants, titles) live in
``{acm}/messages.snapshot`` which is atomically rewritten on every mutation.
Engagement events (impressions, clicks, conversions) are append-only NDJSON
lines in ``{acm}/events.log``; the counters served by
:meth:`CampaignStore.message_stats` are a pure fold over that log, so
reopening a store on the same directory reproduces identical state.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

from .domain import format_timestamp, parse_timestamp, validate_accommodation_id
from .promptsmith import AdCopy

SNAPSHOT_VERSION = 1

STATUSES = ("paused", "enabled")

CHANNELS = ("wifi", "tv", "app")

EVENT_KINDS = ("impression", "click", "conversion")


class CampaignError(ValueError):
    """Base class for campaign store failures."""


class DuplicateName(CampaignError):
    def __init__(self, name: str):
        super().__init__(f"a message named {name!r} already exists")
        self.name = name


class NotFound(CampaignError):
    def __init__(self, message_id: str):
        super().__init__(f"no message with id {message_id!r}")
        self.message_id = message_id


class InvariantViolation(CampaignError):
    """The mutation would leave an enabled message undeliverable."""


class OrphanConversion(CampaignError):
    def __init__(self, message_id: str, reservation: str):
        super().__init__(
            f"conversion for message {message_id!r} by reservation {reservation!r} "
            "has no prior impression"
        )
        self.message_id = message_id
        self.reservation = reservation


def _variant_doc(variant) -> dict:
    if isinstance(variant, AdCopy):
        return variant.to_doc()
    if isinstance(variant, dict) and "text" in variant:
        return dict(variant)
    raise CampaignError("variants must be AdCopy values or their documents")


@dataclass(frozen=True)
class CampaignMessage:
    """One marketing message and its editable state.

    ``title`` maps a language code to the (limited rich-text) title shown on
    that language's surface; translations of a message live here.
    ``variants`` holds the generated ad-copy documents the editor can choose
    from, ``chosen_variant`` the 1-based pick.
    """

    id: str
    accommodation: str
    name: str
    title: dict = field(default_factory=dict)
    status: str = "paused"
    channels: tuple[str, ...] = ()
    spec: dict | None = None
    variants: tuple[dict, ...] = ()
    chosen_variant: int | None = None
    category: dict | None = None
    created_at: datetime = datetime(1970, 1, 1, tzinfo=timezone.utc)
    updated_at: datetime = datetime(1970, 1, 1, tzinfo=timezone.utc)

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "accommodationId": self.accommodation,
            "name": self.name,
            "title": dict(self.title),
            "status": self.status,
            "channels": list(self.channels),
            "spec": self.spec,
            "variants": [dict(variant) for variant in self.variants],
            "chosenVariant": self.chosen_variant,
            "category": self.category,
            "createdAt": format_timestamp(self.created_at),
            "updatedAt": format_timestamp(self.updated_at),
        }

    @classmethod
    def from_doc(cls, document: dict) -> "CampaignMessage":
        return cls(
            id=str(document["id"]),
            accommodation=str(document["accommodationId"]),
            name=str(document["name"]),
            title=dict(document.get("title", {})),
            status=str(document.get("status", "paused")),
            channels=tuple(document.get("channels", ())),
            spec=document.get("spec"),
            variants=tuple(dict(v) for v in document.get("variants", ())),
            chosen_variant=document.get("chosenVariant"),
            category=document.get("category"),
            created_at=parse_timestamp(document["createdAt"]),
            updated_at=parse_timestamp(document["updatedAt"]),
        )


def _check_deliverable(message: CampaignMessage) -> None:
    if message.status != "enabled":
        return
    if not message.channels:
        raise InvariantViolation(f"enabled message {message.id} must have at least one channel")
    if message.chosen_variant is None:
        raise InvariantViolation(f"enabled message {message.id} must have a chosen variant")


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class CampaignStore:
    """Per-accommodation message store backed by two files.

    Single logical writer: all public methods serialize mutations behind one
    lock; reads hand out immutable message values.
    """

    def __init__(self, root: str | Path, accommodation: str, clock: Callable[[], datetime] | None = None):
        self.accommodation = validate_accommodation_id(accommodation)
        self.root = Path(root) / self.accommodation
        self.root.mkdir(parents=True, exist_ok=True)
        self._snapshot_path = self.root / "messages.snapshot"
        self._log_path = self.root / "events.log"
        self._clock = clock or _utc_now
        self._lock = threading.RLock()
        self._messages: dict[str, CampaignMessage] = {}
        self._next_id = 1
        self._impressions: dict[str, int] = {}
        self._clicks: dict[str, int] = {}
        self._conversions: dict[str, int] = {}
        self._impressed_pairs: set[tuple[str, str]] = set()
        self._load()

    # -- persistence ----------------------------------------------------------

    def _load(self) -> None:
        if self._snapshot_path.exists():
            document = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
            if document.get("version") != SNAPSHOT_VERSION:
                raise CampaignError(f"unsupported snapshot version {document.get('version')!r}")
            self._next_id = int(document["nextId"])
            for message_doc in document["messages"]:
                message = CampaignMessage.from_doc(message_doc)
                self._messages[message.id] = message
        if self._log_path.exists():
            with self._log_path.open(encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if line:
                        self._fold_event(json.loads(line))

    def _write_snapshot(self) -> None:
        document = {
            "version": SNAPSHOT_VERSION,
            "nextId": self._next_id,
            "messages": [self._messages[mid].to_doc() for mid in sorted(self._messages)],
        }
        tmp_path = self._snapshot_path.with_suffix(".snapshot.tmp")
        tmp_path.write_text(json.dumps(document, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp_path, self._snapshot_path)

    def _append_event(self, event: dict) -> None:
        with self._log_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _fold_event(self, event: dict) -> None:
        kind = event["type"]
        message_id = event["messageId"]
        if kind == "impression":
            self._impressions[message_id] = self._impressions.get(message_id, 0) + 1
            self._impressed_pairs.add((message_id, event["reservationNumber"]))
        elif kind == "click":
            self._clicks[message_id] = self._clicks.get(message_id, 0) + 1
        elif kind == "conversion":
            pair = (message_id, event["reservationNumber"])
            if pair not in self._impressed_pairs:
                raise OrphanConversion(message_id, event["reservationNumber"])
            self._conversions[message_id] = self._conversions.get(message_id, 0) + 1
        else:
            raise CampaignError(f"unknown event type {kind!r}")

    # -- message CRUD -----------------------------------------------------------

    def list_messages(self) -> list[CampaignMessage]:
        with self._lock:
            return [self._messages[mid] for mid in sorted(self._messages)]

    def get_message(self, message_id: str) -> CampaignMessage:
        with self._lock:
            message = self._messages.get(message_id)
            if message is None:
                raise NotFound(message_id)
            return message

    def create_message(
        self,
        name: str,
        title: dict | None = None,
        spec: dict | None = None,
        variants: Iterable = (),
        category: dict | None = None,
    ) -> CampaignMessage:
        if not name or not name.strip():
            raise CampaignError("message name must be non-empty")
        with self._lock:
            if any(existing.name == name for existing in self._messages.values()):
                raise DuplicateName(name)
            now = self._clock()
            message = CampaignMessage(
                id=f"msg-{self._next_id:06d}",
                accommodation=self.accommodation,
                name=name,
                title=dict(title or {}),
                spec=spec,
                variants=tuple(_variant_doc(v) for v in variants),
                category=category,
                created_at=now,
                updated_at=now,
            )
            self._next_id += 1
            self._messages[message.id] = message
            self._write_snapshot()
            return message

    def _mutate(self, message_id: str, **changes) -> CampaignMessage:
        message = self.get_message(message_id)
        updated = replace(message, updated_at=self._clock(), **changes)
        _check_deliverable(updated)
        self._messages[message_id] = updated
        self._write_snapshot()
        return updated

    def set_status(self, message_id: str, status: str) -> CampaignMessage:
        if status not in STATUSES:
            raise CampaignError(f"status must be one of {STATUSES}, got {status!r}")
        with self._lock:
            return self._mutate(message_id, status=status)

    def set_channels(self, message_id: str, channels: Iterable[str]) -> CampaignMessage:
        cleaned = []
        for channel in channels:
            if channel not in CHANNELS:
                raise CampaignError(f"channels must be a subset of {CHANNELS}, got {channel!r}")
            if channel not in cleaned:
                cleaned.append(channel)
        with self._lock:
            return self._mutate(message_id, channels=tuple(cleaned))

    def set_variants(self, message_id: str, variants: Iterable, spec: dict | None = None) -> CampaignMessage:
        new_variants = tuple(_variant_doc(v) for v in variants)
        with self._lock:
            message = self.get_message(message_id)
            chosen = message.chosen_variant
            if chosen is not None and chosen > len(new_variants):
                chosen = None
            changes: dict = {"variants": new_variants, "chosen_variant": chosen}
            if spec is not None:
                changes["spec"] = spec
            return self._mutate(message_id, **changes)

    def choose_variant(self, message_id: str, index: int) -> CampaignMessage:
        with self._lock:
            message = self.get_message(message_id)
            if not 1 <= index <= len(message.variants):
                raise InvariantViolation(
                    f"variant index {index} out of range 1..{len(message.variants)}"
                )
            return self._mutate(message_id, chosen_variant=index)

    def add_translation(self, message_id: str, language: str, title: str) -> CampaignMessage:
        """Set the message title for a language (e.g. "de")."""
        if not language or not language.strip():
            raise CampaignError("translation language must be non-empty")
        with self._lock:
            message = self.get_message(message_id)
            titles = dict(message.title)
            titles[language] = title
            return self._mutate(message_id, title=titles)

    def set_category(self, message_id: str, category: dict | None) -> CampaignMessage:
        with self._lock:
            return self._mutate(message_id, category=category)

    # -- engagement events ------------------------------------------------------

    def record_event(self, message_id: str, reservation: str, kind: str, at: datetime | None = None) -> None:
        if kind not in EVENT_KINDS:
            raise CampaignError(f"event kind must be one of {EVENT_KINDS}, got {kind!r}")
        with self._lock:
            if message_id not in self._messages:
                raise NotFound(message_id)
            event = {
                "type": kind,
                "messageId": message_id,
                "reservationNumber": str(reservation),
                "at": format_timestamp(at or self._clock()),
            }
            self._fold_event(event)  # validates (may raise OrphanConversion)
            self._append_event(event)

    def record_impression(self, message_id: str, reservation: str, at: datetime | None = None) -> None:
        self.record_event(message_id, reservation, "impression", at)

    def record_click(self, message_id: str, reservation: str, at: datetime | None = None) -> None:
        self.record_event(message_id, reservation, "click", at)

    def record_conversion(self, message_id: str, reservation: str, at: datetime | None = None) -> None:
        self.record_event(message_id, reservation, "conversion", at)

    def message_stats(self, message_id: str) -> dict:
        with self._lock:
            if message_id not in self._messages:
                raise NotFound(message_id)
            impressions = self._impressions.get(message_id, 0)
            clicks = self._clicks.get(message_id, 0)
            conversions = self._conversions.get(message_id, 0)
            rate = conversions / impressions if impressions else 0.0
            return {
                "messageId": message_id,
                "impressions": impressions,
                "clicks": clicks,
                "conversions": conversions,
                "conversionRate": rate,
            }
