"""Campaign message store: CRUD, delivery invariants, and event-log replay."""

import json
from datetime import datetime, timedelta, timezone

import pytest

from guestlift.campaigns import (
    CampaignError,
    CampaignStore,
    DuplicateName,
    InvariantViolation,
    NotFound,
    OrphanConversion,
)
from guestlift.promptsmith import AdCopy


class _TickingClock:
    """Deterministic clock: each call advances one second."""

    def __init__(self):
        self.now = datetime(2024, 3, 1, 12, 0, 0, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        self.now += timedelta(seconds=1)
        return self.now


@pytest.fixture()
def store(tmp_path):
    return CampaignStore(tmp_path, "smp", clock=_TickingClock())


VARIANTS = [
    AdCopy(text="Spa night for two 😊", index=1, word_count=4, has_emoticon=True),
    AdCopy(text="Unwind together this weekend", index=2, word_count=4, has_emoticon=False),
]


def test_create_list_get_round_trip(store):
    message = store.create_message("spa-weekend", title={"en": "Spa weekend"}, variants=VARIANTS)
    assert message.id == "msg-000001"
    assert message.status == "paused"
    assert message.channels == ()
    assert message.variants[0]["text"] == "Spa night for two 😊"

    second = store.create_message("late-checkout")
    assert second.id == "msg-000002"
    assert [m.id for m in store.list_messages()] == ["msg-000001", "msg-000002"]
    assert store.get_message("msg-000001").name == "spa-weekend"

    with pytest.raises(DuplicateName):
        store.create_message("spa-weekend")
    with pytest.raises(NotFound):
        store.get_message("msg-999999")
    with pytest.raises(CampaignError):
        store.create_message("   ")


def test_enable_requires_channels_and_a_chosen_variant(store):
    message = store.create_message("spa-weekend", variants=VARIANTS)
    with pytest.raises(InvariantViolation):
        store.set_status(message.id, "enabled")

    store.set_channels(message.id, ["wifi", "tv", "wifi"])  # duplicates collapse
    assert store.get_message(message.id).channels == ("wifi", "tv")
    with pytest.raises(InvariantViolation):
        store.set_status(message.id, "enabled")  # still no chosen variant

    store.choose_variant(message.id, 1)
    enabled = store.set_status(message.id, "enabled")
    assert enabled.status == "enabled"

    # Undeliverable edits are refused while enabled.
    with pytest.raises(InvariantViolation):
        store.set_channels(message.id, [])
    with pytest.raises(InvariantViolation):
        store.set_variants(message.id, [])
    assert store.get_message(message.id).channels == ("wifi", "tv")
    assert store.get_message(message.id).variants == tuple(v.to_doc() for v in VARIANTS)

    paused = store.set_status(message.id, "paused")
    assert paused.status == "paused"
    store.set_channels(message.id, [])  # fine while paused

    with pytest.raises(CampaignError):
        store.set_status(message.id, "archived")
    with pytest.raises(CampaignError):
        store.set_channels(message.id, ["sms"])


def test_variant_choice_bounds_and_shrinking(store):
    message = store.create_message("spa-weekend", variants=VARIANTS)
    with pytest.raises(InvariantViolation):
        store.choose_variant(message.id, 0)
    with pytest.raises(InvariantViolation):
        store.choose_variant(message.id, 3)
    store.choose_variant(message.id, 2)

    # Replacing the variant list with a shorter one clears a dangling choice.
    shrunk = store.set_variants(message.id, VARIANTS[:1])
    assert shrunk.chosen_variant is None
    assert len(shrunk.variants) == 1

    with pytest.raises(CampaignError):
        store.set_variants(message.id, [{"no_text": True}])


def test_translations_accumulate_per_language(store):
    message = store.create_message("spa-weekend", title={"en": "Spa weekend"})
    store.add_translation(message.id, "de", "Wellness-Wochenende")
    store.add_translation(message.id, "el", "Σαββατοκύριακο σπα")
    titles = store.get_message(message.id).title
    assert titles == {
        "en": "Spa weekend",
        "de": "Wellness-Wochenende",
        "el": "Σαββατοκύριακο σπα",
    }
    store.add_translation(message.id, "de", "Spa-Wochenende")
    assert store.get_message(message.id).title["de"] == "Spa-Wochenende"
    with pytest.raises(CampaignError):
        store.add_translation(message.id, " ", "x")


def test_event_counters_fold_from_the_log(store):
    message = store.create_message("spa-weekend")
    store.record_impression(message.id, "151792")
    store.record_impression(message.id, "151793")
    store.record_click(message.id, "151792")
    store.record_conversion(message.id, "151792")

    stats = store.message_stats(message.id)
    assert stats == {
        "messageId": message.id,
        "impressions": 2,
        "clicks": 1,
        "conversions": 1,
        "conversionRate": 0.5,
    }

    fresh = store.create_message("untouched")
    assert store.message_stats(fresh.id)["conversionRate"] == 0.0

    with pytest.raises(NotFound):
        store.record_impression("msg-999999", "151792")
    with pytest.raises(CampaignError):
        store.record_event(message.id, "151792", "hover")


def test_conversion_without_prior_impression_is_rejected(store):
    message = store.create_message("spa-weekend")
    store.record_impression(message.id, "151792")
    with pytest.raises(OrphanConversion):
        store.record_conversion(message.id, "151793")  # different guest, no impression
    # The rejected event must not leak into the counters or the log.
    assert store.message_stats(message.id)["conversions"] == 0
    store.record_conversion(message.id, "151792")
    assert store.message_stats(message.id)["conversions"] == 1


def test_reopening_the_directory_reproduces_identical_state(tmp_path):
    clock = _TickingClock()
    store = CampaignStore(tmp_path, "smp", clock=clock)
    message = store.create_message("spa-weekend", title={"en": "Spa"}, variants=VARIANTS)
    store.set_channels(message.id, ["wifi"])
    store.choose_variant(message.id, 1)
    store.set_status(message.id, "enabled")
    store.record_impression(message.id, "151792")
    store.record_click(message.id, "151792")
    store.record_conversion(message.id, "151792")
    before_docs = [m.to_doc() for m in store.list_messages()]
    before_stats = store.message_stats(message.id)

    reopened = CampaignStore(tmp_path, "smp", clock=clock)
    assert [m.to_doc() for m in reopened.list_messages()] == before_docs
    assert reopened.message_stats(message.id) == before_stats

    # Replay state is live, not a display copy: the orphan guard still holds.
    with pytest.raises(OrphanConversion):
        reopened.record_conversion(message.id, "151799")
    reopened.record_impression(message.id, "151799")
    reopened.record_conversion(message.id, "151799")
    assert reopened.message_stats(message.id)["conversions"] == 2


def test_on_disk_layout_is_a_snapshot_plus_ndjson_log(tmp_path):
    store = CampaignStore(tmp_path, "smp", clock=_TickingClock())
    message = store.create_message("spa-weekend")
    store.record_impression(message.id, "151792")
    store.record_click(message.id, "151792")

    snapshot_path = tmp_path / "smp" / "messages.snapshot"
    log_path = tmp_path / "smp" / "events.log"
    snapshot = json.loads(snapshot_path.read_text(encoding="utf-8"))
    assert snapshot["version"] == 1
    assert snapshot["messages"][0]["name"] == "spa-weekend"

    events = [json.loads(line) for line in log_path.read_text(encoding="utf-8").splitlines()]
    assert [e["type"] for e in events] == ["impression", "click"]
    assert all(e["messageId"] == message.id for e in events)

    # Ids continue past the highest allocated one after a reload.
    reopened = CampaignStore(tmp_path, "smp", clock=_TickingClock())
    assert reopened.create_message("second").id == "msg-000002"


def test_message_document_shape(store):
    message = store.create_message("spa-weekend", variants=VARIANTS, category={
        "emotion": "Fear", "subEmotion": "Urgency", "principle": "scarcity",
    })
    doc = message.to_doc()
    assert set(doc) == {
        "id", "accommodationId", "name", "title", "status", "channels", "spec",
        "variants", "chosenVariant", "category", "createdAt", "updatedAt",
    }
    assert doc["accommodationId"] == "smp"
    assert doc["category"]["subEmotion"] == "Urgency"
