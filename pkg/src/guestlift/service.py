"""HTTP facade: wine and point-of-sale recommenders, guest categorization,
ad-copy suggestions, campaign messages, and engagement events.

All shared state lives per accommodation.  Reads are side-effect-free and
work from immutable snapshots or live matrices; ingestion endpoints bump a
data version so POST /pos/update_state can coalesce redundant rebuilds.
Every error is a uniform problem document {code, message, detail}.
"""

from __future__ import annotations

import json
import threading
from collections import Counter
from contextlib import asynccontextmanager
from datetime import datetime
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from . import campaigns
from .campaigns import CampaignStore
from .config import AccommodationConfig, ServiceConfig, load_taxonomy_setting
from .domain import (
    EPOCH,
    CatalogItem,
    DomainError,
    Order,
    Rating,
    RatingsMatrix,
    WinePreferenceProfile,
    format_timestamp,
    parse_catalog_item,
    parse_order,
    parse_rating,
    parse_timestamp,
    parse_wine_profile,
    serialize_recommendation,
    timestamp_sort_key,
)
from .engine import (
    ColdStartNoRatings,
    EngineConfig,
    EngineError,
    EmptyCatalog,
    ModelSnapshot,
    StaleSnapshot,
    UnknownItem,
    UnknownUser,
    complete_order_iicf,
    popularity_ranking,
    recommend_cbr,
    recommend_iicf,
    recommend_kbr,
    recommend_pop,
    recommend_uucf,
    update_state,
)
from .engine import kernels
from .influence import (
    EmptySheet,
    InfluenceError,
    QuizDefinition,
    UnknownOption,
    categorize_guest,
    load_quiz,
)
from .promptsmith import (
    BackendUnavailable,
    ParseFailure,
    generate_copies,
    spec_from_doc,
)


class ApiError(Exception):
    """An error with a fixed HTTP status and problem code."""

    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


def _problem(status: int, code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def _load_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


class AccommodationState:
    """Everything the service knows about one accommodation."""

    def __init__(self, config: AccommodationConfig, data_dir: Path, engine_config: EngineConfig):
        self.id = config.id
        self.engine_config = engine_config
        self.catalog: dict[str, CatalogItem] = {}
        self.profiles: dict[str, WinePreferenceProfile] = {}
        self.ratings: list[Rating] = []
        self.orders: list[Order] = []
        self.quiz: QuizDefinition | None = None
        self.guest_categories: dict[str, dict] = {}
        self.state_stamp: datetime = EPOCH
        self.data_version = 0
        self.snapshot: ModelSnapshot | None = None
        self.snapshot_version = -1
        self.rebuild_count = 0
        self.rebuild_lock = threading.Lock()
        self.store = CampaignStore(data_dir, config.id)

        if config.catalog is not None:
            for doc in _load_json(config.catalog):
                item = parse_catalog_item(doc)
                self.catalog[item.id] = item
        if config.quiz is not None:
            self.quiz = load_quiz(_load_json(config.quiz))
        if config.profiles is not None:
            for doc in _load_json(config.profiles):
                self.add_profile(parse_wine_profile(doc))
        if config.ratings is not None:
            for doc in _load_json(config.ratings):
                self.add_rating(parse_rating(doc))
        if config.orders is not None:
            for doc in _load_json(config.orders):
                self.add_order(parse_order(doc))
        self.ensure_snapshot()

    # -- ingestion (bumps the data version) ------------------------------------

    def _touch(self, at: datetime) -> None:
        if timestamp_sort_key(at) > timestamp_sort_key(self.state_stamp):
            self.state_stamp = at
        self.data_version += 1

    def add_profile(self, profile: WinePreferenceProfile) -> None:
        current = self.profiles.get(profile.reservation)
        if current is None or timestamp_sort_key(profile.captured_at) >= timestamp_sort_key(current.captured_at):
            self.profiles[profile.reservation] = profile
        self._touch(profile.captured_at)

    def add_rating(self, rating: Rating) -> None:
        self.ratings.append(rating)
        self._touch(rating.at)

    def add_order(self, order: Order) -> None:
        self.orders.append(order)
        self._touch(order.opened_at)

    # -- derived views ----------------------------------------------------------

    def matrix(self) -> RatingsMatrix:
        return RatingsMatrix.from_ratings(list(self.ratings))

    def popularity(self) -> dict[str, int]:
        return dict(Counter(line for order in self.orders for line in order.lines))

    def ensure_snapshot(self) -> ModelSnapshot:
        """Rebuild the model snapshot unless the data hasn't changed."""
        with self.rebuild_lock:
            if self.snapshot is None or self.snapshot_version != self.data_version:
                version = self.data_version
                self.snapshot = update_state(
                    self.id, list(self.ratings), list(self.orders), self.engine_config
                )
                self.snapshot_version = version
                self.rebuild_count += 1
            return self.snapshot


def _register_error_handlers(app: FastAPI) -> None:
    def api_error(request: Request, exc: ApiError):
        return _problem(exc.status, exc.code, exc.message, exc.detail)

    def validation_error(request: Request, exc: RequestValidationError):
        return _problem(422, "ValidationError", "request validation failed", exc.errors())

    def domain_error(request: Request, exc: DomainError):
        return _problem(422, type(exc).__name__, str(exc))

    def campaign_error(request: Request, exc: campaigns.CampaignError):
        status = {
            campaigns.DuplicateName: 409,
            campaigns.NotFound: 404,
            campaigns.InvariantViolation: 409,
            campaigns.OrphanConversion: 409,
        }.get(type(exc), 422)
        return _problem(status, type(exc).__name__, str(exc))

    def engine_error(request: Request, exc: EngineError):
        status = {
            EmptyCatalog: 409,
            StaleSnapshot: 409,
            UnknownUser: 404,
            UnknownItem: 404,
            ColdStartNoRatings: 409,
        }.get(type(exc), 422)
        return _problem(status, type(exc).__name__, str(exc))

    def influence_error(request: Request, exc: InfluenceError):
        return _problem(422, type(exc).__name__, str(exc))

    def backend_unavailable(request: Request, exc: BackendUnavailable):
        return _problem(503, "BackendUnavailable", str(exc))

    def parse_failure(request: Request, exc: ParseFailure):
        return _problem(502, "ParseFailure", str(exc), {"raw": exc.raw})

    def value_error(request: Request, exc: ValueError):
        return _problem(422, "InvalidValue", str(exc))

    app.add_exception_handler(ApiError, api_error)
    app.add_exception_handler(RequestValidationError, validation_error)
    app.add_exception_handler(DomainError, domain_error)
    app.add_exception_handler(campaigns.CampaignError, campaign_error)
    app.add_exception_handler(EngineError, engine_error)
    app.add_exception_handler(InfluenceError, influence_error)
    app.add_exception_handler(BackendUnavailable, backend_unavailable)
    app.add_exception_handler(ParseFailure, parse_failure)
    app.add_exception_handler(ValueError, value_error)


def create_app(config: ServiceConfig) -> FastAPI:
    taxonomy = load_taxonomy_setting(config.taxonomy)
    backend = config.backend.build(config.seed)
    config.data_dir.mkdir(parents=True, exist_ok=True)
    states = {
        acm.id: AccommodationState(acm, config.data_dir, config.engine)
        for acm in config.accommodations
    }

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        stop = threading.Event()
        thread = None
        period = config.engine.rebuild_period_seconds
        if period > 0:
            def rebuild_loop():
                while not stop.wait(period):
                    for state in states.values():
                        state.ensure_snapshot()

            thread = threading.Thread(target=rebuild_loop, daemon=True, name="rebuild-timer")
            thread.start()
        yield
        stop.set()
        if thread is not None:
            thread.join(timeout=2.0)

    app = FastAPI(title="guestlift", lifespan=lifespan)
    _register_error_handlers(app)
    app.state.states = states
    app.state.config = config
    app.state.taxonomy = taxonomy
    app.state.backend = backend

    def get_state(acm: str | None) -> AccommodationState:
        if not acm:
            raise ApiError(422, "MissingParameter", "query parameter 'acm' is required")
        state = states.get(acm)
        if state is None:
            raise ApiError(404, "UnknownAccommodation", f"no accommodation {acm!r}")
        return state

    async def read_body(request: Request) -> dict:
        try:
            payload = await request.json()
        except json.JSONDecodeError as exc:
            raise ApiError(422, "MalformedBody", f"request body is not valid JSON: {exc}")
        if not isinstance(payload, dict):
            raise ApiError(422, "MalformedBody", "request body must be a JSON object")
        return payload

    def recommendation_response(body: str, status: int = 200, note: str | None = None) -> Response:
        headers = {"X-Recommender-Note": note} if note else None
        return Response(content=body, status_code=status, media_type="application/json", headers=headers)

    # -- health -----------------------------------------------------------------

    @app.get("/healthz")
    def healthz():
        return {
            "status": "ok",
            "kernel": kernels.BACKEND,
            "accommodations": sorted(states),
        }

    # -- wine recommenders --------------------------------------------------------

    @app.get("/wine/kbr")
    def wine_kbr(acm: str, reservation: str):
        state = get_state(acm)
        profile = state.profiles.get(reservation)
        if profile is None:
            raise ApiError(404, "NoProfile", f"no quiz profile for reservation {reservation!r}")
        recs = recommend_kbr(
            profile,
            state.catalog.values(),
            top_n=state.engine_config.top_n,
            price_penalty=state.engine_config.price_penalty,
        )
        body = serialize_recommendation(
            acm, [r.item for r in recs], reservation, "kbr", state.state_stamp
        )
        return recommendation_response(body)

    @app.get("/wine/cbr")
    def wine_cbr(acm: str, reservation: str):
        state = get_state(acm)
        matrix = state.matrix()
        if reservation not in state.profiles and not matrix.row(reservation):
            raise ApiError(404, "UnknownReservation", f"reservation {reservation!r} has no profile or ratings")
        note = None
        try:
            recs = recommend_cbr(reservation, matrix, state.catalog.values(), state.engine_config.top_n)
            kind = "cbr"
        except ColdStartNoRatings as exc:
            recs = popularity_ranking(
                state.popularity(), set(matrix.row(reservation)), state.engine_config.top_n
            )
            kind = "pos_pop"
            note = f"cold start, falling back to popularity: {exc}"
        body = serialize_recommendation(acm, [r.item for r in recs], reservation, kind, state.state_stamp)
        return recommendation_response(body, note=note)

    def _cf_map(acm: str, results: dict, default_kind: str, stamp: datetime) -> JSONResponse:
        documents = {}
        for reservation, recs in results.items():
            kind = recs[0].kind if recs else default_kind
            body = serialize_recommendation(acm, [r.item for r in recs], reservation, kind, stamp)
            documents[reservation] = json.loads(body)
        return JSONResponse(documents)

    @app.get("/wine/uucf")
    def wine_uucf(acm: str):
        state = get_state(acm)
        cfg = state.engine_config
        results = recommend_uucf(
            state.matrix(),
            k=cfg.k,
            top_n=cfg.top_n,
            kind=cfg.similarity_kind,
            min_overlap=cfg.min_overlap,
            popularity=state.popularity(),
        )
        return _cf_map(acm, results, "uucf", state.state_stamp)

    @app.get("/wine/iicf")
    def wine_iicf(acm: str):
        state = get_state(acm)
        cfg = state.engine_config
        results = recommend_iicf(
            state.matrix(),
            k=cfg.k,
            top_n=cfg.top_n,
            kind=cfg.item_similarity_kind,
            min_overlap=cfg.min_overlap,
            popularity=state.popularity(),
        )
        return _cf_map(acm, results, "iicf", state.state_stamp)

    # -- point of sale ------------------------------------------------------------

    def _parse_order_for(state: AccommodationState, payload: dict) -> Order:
        order = parse_order(payload)
        if order.accommodation != state.id:
            raise ApiError(
                422,
                "AccommodationMismatch",
                f"order is for {order.accommodation!r}, endpoint is {state.id!r}",
            )
        return order

    @app.post("/pos/iicf")
    async def pos_iicf(request: Request, acm: str):
        state = get_state(acm)
        order = _parse_order_for(state, await read_body(request))
        snapshot = state.ensure_snapshot()
        recs = complete_order_iicf(order, snapshot, state.engine_config.top_n)
        body = serialize_recommendation(
            acm, [r.item for r in recs], order.reservation, "pos_iicf", snapshot.built_at
        )
        return recommendation_response(body)

    @app.post("/pos/pop")
    async def pos_pop(request: Request, acm: str):
        state = get_state(acm)
        order = _parse_order_for(state, await read_body(request))
        snapshot = state.ensure_snapshot()
        recs = recommend_pop(order, snapshot, state.engine_config.top_n)
        body = serialize_recommendation(
            acm, [r.item for r in recs], order.reservation, "pos_pop", snapshot.built_at
        )
        return recommendation_response(body)

    @app.post("/pos/update_state")
    def pos_update_state(acm: str):
        state = get_state(acm)
        snapshot = state.ensure_snapshot()
        return {
            "builtAt": format_timestamp(snapshot.built_at),
            "sourceRatingCount": snapshot.source_rating_count,
        }

    # -- ingestion ----------------------------------------------------------------

    @app.post("/wine/profiles")
    async def post_wine_profile(request: Request, acm: str):
        state = get_state(acm)
        profile = parse_wine_profile(await read_body(request))
        if profile.accommodation != state.id:
            raise ApiError(
                422,
                "AccommodationMismatch",
                f"profile is for {profile.accommodation!r}, endpoint is {state.id!r}",
            )
        state.add_profile(profile)
        recs = recommend_kbr(
            profile,
            state.catalog.values(),
            top_n=state.engine_config.top_n,
            price_penalty=state.engine_config.price_penalty,
        )
        body = serialize_recommendation(
            acm, [r.item for r in recs], profile.reservation, "kbr", state.state_stamp
        )
        return recommendation_response(body, status=201)

    @app.post("/ratings")
    async def post_rating(request: Request, acm: str):
        state = get_state(acm)
        rating = parse_rating(await read_body(request))
        state.add_rating(rating)
        return {"status": "ok", "ratings": len(state.ratings)}

    @app.post("/orders")
    async def post_order(request: Request, acm: str):
        state = get_state(acm)
        order = _parse_order_for(state, await read_body(request))
        state.add_order(order)
        return {"status": "ok", "orders": len(state.orders)}

    # -- guest categorization -------------------------------------------------------

    @app.post("/guests/{reservation}/quiz")
    async def post_quiz(request: Request, reservation: str, acm: str):
        state = get_state(acm)
        if state.quiz is None:
            raise ApiError(404, "NoQuiz", f"accommodation {state.id!r} has no persuasion quiz")
        payload = await read_body(request)
        answers = payload.get("answers")
        if not isinstance(answers, list):
            raise ApiError(422, "MalformedBody", "body must contain an 'answers' list")
        sheet = state.quiz.resolve(reservation, answers)
        category = categorize_guest(sheet, app.state.taxonomy)
        doc = category.to_doc()
        state.guest_categories[reservation] = doc
        return doc

    # -- ad copy ----------------------------------------------------------------

    @app.post("/ads/suggest")
    async def ads_suggest(request: Request):
        spec = spec_from_doc(await read_body(request))
        copies = generate_copies(spec, backend)
        return JSONResponse([copy.to_doc() for copy in copies])

    # -- campaign messages ---------------------------------------------------------

    @app.post("/messages")
    async def post_message(request: Request, acm: str):
        state = get_state(acm)
        payload = await read_body(request)
        name = payload.get("name")
        if not isinstance(name, str) or not name.strip():
            raise ApiError(422, "MalformedBody", "message 'name' must be a non-empty string")
        title = payload.get("title") or {}
        if not isinstance(title, dict):
            raise ApiError(422, "MalformedBody", "message 'title' must map language to text")
        spec_doc = payload.get("spec")
        variants = []
        if spec_doc is not None:
            spec = spec_from_doc(spec_doc)
            if payload.get("generate", True):
                variants = generate_copies(spec, backend)
        message = state.store.create_message(
            name=name,
            title=title,
            spec=spec_doc,
            variants=variants,
            category=payload.get("category"),
        )
        return JSONResponse(message.to_doc(), status_code=201)

    @app.get("/messages")
    def list_messages(acm: str):
        state = get_state(acm)
        return [message.to_doc() for message in state.store.list_messages()]

    @app.get("/messages/{message_id}")
    def get_message(message_id: str, acm: str):
        state = get_state(acm)
        return state.store.get_message(message_id).to_doc()

    @app.post("/messages/{message_id}/status")
    async def set_message_status(request: Request, message_id: str, acm: str):
        state = get_state(acm)
        payload = await read_body(request)
        return state.store.set_status(message_id, payload.get("status")).to_doc()

    @app.post("/messages/{message_id}/channels")
    async def set_message_channels(request: Request, message_id: str, acm: str):
        state = get_state(acm)
        payload = await read_body(request)
        channels = payload.get("channels")
        if not isinstance(channels, list):
            raise ApiError(422, "MalformedBody", "body must contain a 'channels' list")
        return state.store.set_channels(message_id, channels).to_doc()

    @app.post("/messages/{message_id}/variant")
    async def choose_message_variant(request: Request, message_id: str, acm: str):
        state = get_state(acm)
        payload = await read_body(request)
        index = payload.get("index")
        if not isinstance(index, int) or isinstance(index, bool):
            raise ApiError(422, "MalformedBody", "body must contain an integer 'index'")
        return state.store.choose_variant(message_id, index).to_doc()

    @app.post("/messages/{message_id}/variants")
    async def set_message_variants(request: Request, message_id: str, acm: str):
        state = get_state(acm)
        payload = await read_body(request)
        variants = payload.get("variants")
        if not isinstance(variants, list):
            raise ApiError(422, "MalformedBody", "body must contain a 'variants' list")
        return state.store.set_variants(message_id, variants, spec=payload.get("spec")).to_doc()

    @app.post("/messages/{message_id}/translations")
    async def add_message_translation(request: Request, message_id: str, acm: str):
        state = get_state(acm)
        payload = await read_body(request)
        language = payload.get("language")
        title = payload.get("title")
        if not isinstance(language, str) or not isinstance(title, str):
            raise ApiError(422, "MalformedBody", "body must contain 'language' and 'title' strings")
        return state.store.add_translation(message_id, language, title).to_doc()

    @app.get("/messages/{message_id}/stats")
    def message_stats(message_id: str, acm: str):
        state = get_state(acm)
        return state.store.message_stats(message_id)

    @app.post("/events")
    async def post_event(request: Request, acm: str):
        state = get_state(acm)
        payload = await read_body(request)
        for field_name in ("messageId", "reservationNumber", "kind"):
            if field_name not in payload:
                raise ApiError(422, "MalformedBody", f"event is missing {field_name!r}")
        at = parse_timestamp(payload["at"]) if "at" in payload else None
        state.store.record_event(
            str(payload["messageId"]),
            str(payload["reservationNumber"]),
            str(payload["kind"]),
            at,
        )
        return {"status": "ok"}

    return app
