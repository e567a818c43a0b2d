"""HTTP endpoints over the seeded demo accommodation."""

import json

import pytest
from fastapi.testclient import TestClient

from guestlift.config import AccommodationConfig, ServiceConfig
from guestlift.domain import parse_recommendation
from guestlift.service import create_app

GOLDEN_KBR_BODY = (
    '{"accommodationId": "smp", "recommendedWines": ["DI_MIN_PAL_WIN_46", '
    '"DI_MIN_PAL_WIN_33"], "reservationNumber": "151792", '
    '"timestamp": "2018-07-10T11:44:12.856229", "type": "kbr"}'
)

URGENCY_ANSWERS = {
    "answers": [
        {"questionId": "q1", "optionId": "q1-deadline"},
        {"questionId": "q2", "optionId": "q2-lastroom"},
        {"questionId": "q3", "optionId": "q3-endssoon"},
    ]
}


def test_healthz_reports_kernel_and_roster(client):
    body = client.get("/healthz").json()
    assert body["status"] == "ok"
    assert body["kernel"] in ("compiled", "python")
    assert body["accommodations"] == ["smp"]


# --- wine recommenders -----------------------------------------------------------

def test_kbr_returns_the_stored_response_byte_for_byte(client):
    response = client.get("/wine/kbr", params={"acm": "smp", "reservation": "151792"})
    assert response.status_code == 200
    assert response.text == GOLDEN_KBR_BODY
    # and it parses back through the domain layer
    parsed = parse_recommendation(response.text)
    assert parsed.kind == "kbr"


def test_kbr_reads_are_side_effect_free(client):
    first = client.get("/wine/kbr", params={"acm": "smp", "reservation": "151792"})
    second = client.get("/wine/kbr", params={"acm": "smp", "reservation": "151792"})
    assert first.text == second.text


def test_kbr_error_paths(client):
    assert client.get("/wine/kbr", params={"acm": "smp", "reservation": "999999"}).status_code == 404
    assert client.get("/wine/kbr", params={"acm": "nowhere", "reservation": "151792"}).status_code == 404
    missing = client.get("/wine/kbr", params={"reservation": "151792"})
    assert missing.status_code == 422
    problem = missing.json()
    assert set(problem) == {"code", "message", "detail"}


def test_profile_ingestion_feeds_kbr(client):
    doc = {
        "accommodationId": "smp",
        "reservationNumber": "151800",
        "profileName": "Dana",
        "preferences": {
            "color": "1", "tannins": "1", "fruitness": "1", "acidity": "1", "body": "1",
            "earthy": "1", "spices": "1", "herbal": "1", "floral": "1", "oaky": "1",
            "price": "over_120",
        },
        "dateTime": "2018-06-02T10:00:00.000+03:00",
    }
    created = client.post("/wine/profiles", params={"acm": "smp"}, json=doc)
    assert created.status_code == 201
    body = parse_recommendation(created.text)
    assert body.kind == "kbr" and body.reservation == "151800"

    followup = client.get("/wine/kbr", params={"acm": "smp", "reservation": "151800"})
    assert followup.status_code == 200
    # The all-ones over_120 profile pins the matching catalog wine first.
    assert parse_recommendation(followup.text).items[0] == "DI_MIN_PAL_WIN_07"

    mismatched = dict(doc, accommodationId="other")
    assert client.post("/wine/profiles", params={"acm": "smp"}, json=mismatched).status_code == 422


def test_cbr_recommends_for_rated_guests(client):
    response = client.get("/wine/cbr", params={"acm": "smp", "reservation": "151792"})
    assert response.status_code == 200
    parsed = parse_recommendation(response.text)
    assert parsed.kind == "cbr"
    # 151792 rated 46/33/12, leaving 07 as the only candidate wine.
    assert parsed.items == ("DI_MIN_PAL_WIN_07",)
    assert "X-Recommender-Note" not in response.headers


def test_cbr_falls_back_to_popularity_on_neutral_ratings(client):
    client.post("/ratings", params={"acm": "smp"},
                json={"reservationNumber": "151801", "item": "DI_MIN_PAL_WIN_46", "stars": 3})
    response = client.get("/wine/cbr", params={"acm": "smp", "reservation": "151801"})
    assert response.status_code == 200
    parsed = parse_recommendation(response.text)
    assert parsed.kind == "pos_pop"
    assert "cold start" in response.headers["X-Recommender-Note"]

    assert client.get("/wine/cbr", params={"acm": "smp", "reservation": "424242"}).status_code == 404


def test_cf_endpoints_return_one_document_per_rater(client):
    for path, kinds in (("/wine/uucf", {"uucf", "pos_pop"}), ("/wine/iicf", {"iicf", "pos_pop"})):
        response = client.get(path, params={"acm": "smp"})
        assert response.status_code == 200
        documents = response.json()
        assert set(documents) == {"151792", "151793", "151794", "151795"}
        for reservation, doc in documents.items():
            assert doc["reservationNumber"] == reservation
            assert doc["type"] in kinds
            # The items field is named after the recommender that produced it:
            # wine recommenders write recommendedWines, the popularity
            # fallback writes recommendedItems.
            field = "recommendedItems" if doc["type"] == "pos_pop" else "recommendedWines"
            assert isinstance(doc[field], list)


def test_new_rating_changes_a_neighbors_cf_list(client):
    before = client.get("/wine/uucf", params={"acm": "smp"}).json()
    client.post("/ratings", params={"acm": "smp"},
                json={"reservationNumber": "151795", "item": "DI_MIN_PAL_WIN_46",
                      "stars": 5, "at": "2018-06-20T09:00:00+03:00"})
    after = client.get("/wine/uucf", params={"acm": "smp"}).json()
    assert before != after


def test_cf_on_an_unrated_accommodation_is_an_empty_map(tmp_path):
    config = ServiceConfig(
        data_dir=tmp_path / "data",
        accommodations=(AccommodationConfig(id="bare"),),
    )
    with TestClient(create_app(config)) as bare_client:
        assert bare_client.get("/wine/uucf", params={"acm": "bare"}).json() == {}
        assert bare_client.get("/wine/iicf", params={"acm": "bare"}).json() == {}


# --- point of sale -----------------------------------------------------------------

def _order_body(lines, reservation="151792"):
    return {"accommodationId": "smp", "reservationNumber": reservation, "lines": lines}


def test_order_completion_over_the_seeded_purchase_log(client):
    response = client.post("/pos/iicf", params={"acm": "smp"}, json=_order_body(["moussaka"]))
    assert response.status_code == 200
    parsed = parse_recommendation(response.text)
    assert parsed.kind == "pos_iicf"
    # baklava rides with moussaka in 3 of its 4 orders: strongest completion.
    assert parsed.items[0] == "baklava"
    assert "moussaka" not in parsed.items


def test_popularity_completion_excludes_the_order_itself(client):
    response = client.post("/pos/pop", params={"acm": "smp"}, json=_order_body(["moussaka"]))
    assert response.status_code == 200
    parsed = parse_recommendation(response.text)
    assert parsed.kind == "pos_pop"
    assert parsed.items and "moussaka" not in parsed.items


def test_pos_rejects_mismatched_or_malformed_orders(client):
    wrong_acm = {"accommodationId": "elsewhere", "reservationNumber": "1", "lines": ["x"]}
    assert client.post("/pos/iicf", params={"acm": "smp"}, json=wrong_acm).status_code == 422
    bad_lines = {"accommodationId": "smp", "reservationNumber": "1", "lines": "moussaka"}
    assert client.post("/pos/pop", params={"acm": "smp"}, json=bad_lines).status_code == 422
    not_json = client.post(
        "/pos/iicf", params={"acm": "smp"},
        content="{oops", headers={"Content-Type": "application/json"},
    )
    assert not_json.status_code == 422


def test_update_state_reports_the_rebuild_and_coalesces(app, client):
    first = client.post("/pos/update_state", params={"acm": "smp"})
    assert first.status_code == 200
    assert first.json() == {
        "builtAt": "2018-07-10T11:44:12.856229",
        "sourceRatingCount": 12,
    }
    state = app.state.states["smp"]
    builds = state.rebuild_count
    # Repeated triggers without new data reuse the snapshot.
    client.post("/pos/update_state", params={"acm": "smp"})
    client.post("/pos/update_state", params={"acm": "smp"})
    assert state.rebuild_count == builds

    client.post("/ratings", params={"acm": "smp"},
                json={"reservationNumber": "151793", "item": "DI_MIN_PAL_WIN_12", "stars": 4})
    refreshed = client.post("/pos/update_state", params={"acm": "smp"})
    assert refreshed.json()["sourceRatingCount"] == 13
    assert state.rebuild_count == builds + 1

    assert client.post("/pos/update_state", params={"acm": "ghost"}).status_code == 404


# --- guest categorization ------------------------------------------------------------

def test_quiz_assigns_the_unanimous_category(client):
    response = client.post("/guests/151792/quiz", params={"acm": "smp"}, json=URGENCY_ANSWERS)
    assert response.status_code == 200
    assert response.json() == {"emotion": "Fear", "subEmotion": "Urgency", "principle": "scarcity"}


def test_quiz_rejects_empty_or_unknown_answers(client):
    empty = client.post("/guests/151792/quiz", params={"acm": "smp"}, json={"answers": []})
    assert empty.status_code == 422
    unknown = client.post(
        "/guests/151792/quiz", params={"acm": "smp"},
        json={"answers": [{"questionId": "q1", "optionId": "nope"}]},
    )
    assert unknown.status_code == 422
    assert unknown.json()["code"] == "UnknownOption"
    no_list = client.post("/guests/151792/quiz", params={"acm": "smp"}, json={"answers": "all"})
    assert no_list.status_code == 422


# --- ad copy ---------------------------------------------------------------------

def test_ads_suggest_serves_the_frozen_mock_output(client, frozen_ad_copies):
    response = client.post("/ads/suggest", json=frozen_ad_copies["spec"])
    assert response.status_code == 200
    assert response.json() == frozen_ad_copies["copies"]


def test_ads_suggest_validates_the_spec(client):
    bad = dict(copies=0, task="t", topic="o", emotion="e", tone="n")
    assert client.post("/ads/suggest", json=bad).status_code == 422
    assert client.post("/ads/suggest", json={"task": "t"}).status_code == 422


def test_ads_suggest_without_a_live_backend_is_503(service_config):
    live = service_config.with_overrides(backend_kind="live")
    with TestClient(create_app(live)) as live_client:
        response = live_client.post(
            "/ads/suggest",
            json={"task": "t", "topic": "o", "emotion": "joy", "tone": "fun"},
        )
    assert response.status_code == 503
    assert response.json()["code"] == "BackendUnavailable"


# --- campaign messages ----------------------------------------------------------------

def test_message_editor_workflow(client, frozen_ad_copies):
    created = client.post("/messages", params={"acm": "smp"}, json={
        "name": "couples-massage-push",
        "title": {"en": "Couples massage -20%"},
        "spec": frozen_ad_copies["spec"],
    })
    assert created.status_code == 201
    message = created.json()
    message_id = message["id"]
    assert message["status"] == "paused"
    assert [v["text"] for v in message["variants"]] == [
        v["text"] for v in frozen_ad_copies["copies"]
    ]

    listed = client.get("/messages", params={"acm": "smp"}).json()
    assert [m["id"] for m in listed] == [message_id]

    chosen = client.post(f"/messages/{message_id}/variant", params={"acm": "smp"}, json={"index": 1})
    assert chosen.json()["chosenVariant"] == 1

    translated = client.post(
        f"/messages/{message_id}/translations", params={"acm": "smp"},
        json={"language": "de", "title": "Paarmassage -20%"},
    )
    assert translated.json()["title"]["de"] == "Paarmassage -20%"

    channelled = client.post(
        f"/messages/{message_id}/channels", params={"acm": "smp"},
        json={"channels": ["wifi", "tv"]},
    )
    assert channelled.json()["channels"] == ["wifi", "tv"]

    enabled = client.post(
        f"/messages/{message_id}/status", params={"acm": "smp"}, json={"status": "enabled"}
    )
    assert enabled.json()["status"] == "enabled"

    fetched = client.get(f"/messages/{message_id}", params={"acm": "smp"}).json()
    assert fetched == enabled.json()


def test_message_invariants_and_conflicts_over_http(client):
    message_id = client.post(
        "/messages", params={"acm": "smp"}, json={"name": "plain"}
    ).json()["id"]

    # No channels and no variant chosen: enabling must be refused.
    refused = client.post(
        f"/messages/{message_id}/status", params={"acm": "smp"}, json={"status": "enabled"}
    )
    assert refused.status_code == 409
    assert refused.json()["code"] == "InvariantViolation"

    duplicate = client.post("/messages", params={"acm": "smp"}, json={"name": "plain"})
    assert duplicate.status_code == 409
    assert duplicate.json()["code"] == "DuplicateName"

    assert client.get("/messages/msg-999999", params={"acm": "smp"}).status_code == 404
    assert client.post("/messages", params={"acm": "smp"}, json={"name": "  "}).status_code == 422

    replaced = client.post(
        f"/messages/{message_id}/variants", params={"acm": "smp"},
        json={"variants": [{"text": "hand-written copy", "index": 1,
                            "wordCount": 3, "hasEmoticon": False}]},
    )
    assert replaced.status_code == 200
    assert len(replaced.json()["variants"]) == 1


def test_event_ingestion_and_stats(client):
    message_id = client.post(
        "/messages", params={"acm": "smp"}, json={"name": "stats-demo"}
    ).json()["id"]

    orphan = client.post("/events", params={"acm": "smp"}, json={
        "messageId": message_id, "reservationNumber": "151792", "kind": "conversion",
    })
    assert orphan.status_code == 409
    assert orphan.json()["code"] == "OrphanConversion"

    for kind in ("impression", "click", "conversion"):
        posted = client.post("/events", params={"acm": "smp"}, json={
            "messageId": message_id, "reservationNumber": "151792", "kind": kind,
            "at": "2018-07-12T09:00:00+03:00",
        })
        assert posted.status_code == 200

    stats = client.get(f"/messages/{message_id}/stats", params={"acm": "smp"}).json()
    assert stats == {
        "messageId": message_id,
        "impressions": 1,
        "clicks": 1,
        "conversions": 1,
        "conversionRate": 1.0,
    }

    missing_field = client.post("/events", params={"acm": "smp"}, json={"messageId": message_id})
    assert missing_field.status_code == 422
    bad_kind = client.post("/events", params={"acm": "smp"}, json={
        "messageId": message_id, "reservationNumber": "1", "kind": "hover",
    })
    assert bad_kind.status_code == 422


def test_campaign_state_survives_an_app_restart(service_config, frozen_ad_copies):
    with TestClient(create_app(service_config)) as first:
        message_id = first.post("/messages", params={"acm": "smp"}, json={
            "name": "durable", "spec": frozen_ad_copies["spec"],
        }).json()["id"]
        first.post("/events", params={"acm": "smp"}, json={
            "messageId": message_id, "reservationNumber": "151792", "kind": "impression",
        })
        before = first.get(f"/messages/{message_id}", params={"acm": "smp"}).json()

    with TestClient(create_app(service_config)) as second:
        after = second.get(f"/messages/{message_id}", params={"acm": "smp"}).json()
        assert after == before
        stats = second.get(f"/messages/{message_id}/stats", params={"acm": "smp"}).json()
        assert stats["impressions"] == 1
