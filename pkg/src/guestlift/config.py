"""Service configuration: one JSON file describing bind address, backends,
engine tunables, and the accommodation roster with its data files."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .domain import validate_accommodation_id
from .engine.config import EngineConfig
from .promptsmith import LiveBackend, MockBackend


@dataclass(frozen=True)
class BackendConfig:
    """LLM backend selection; `kind` is "mock" (default) or "live"."""

    kind: str = "mock"
    endpoint: str | None = None
    model: str = "gpt-4"
    temperature: float = 0.8
    max_in_flight: int = 2
    requests_per_minute: int = 30

    def __post_init__(self):
        if self.kind not in ("mock", "live"):
            raise ValueError(f"backend.kind must be 'mock' or 'live', got {self.kind!r}")

    @classmethod
    def from_document(cls, document: dict) -> "BackendConfig":
        return cls(
            kind=str(document.get("kind", cls.kind)),
            endpoint=document.get("endpoint"),
            model=str(document.get("model", cls.model)),
            temperature=float(document.get("temperature", cls.temperature)),
            max_in_flight=int(document.get("maxInFlight", cls.max_in_flight)),
            requests_per_minute=int(document.get("requestsPerMinute", cls.requests_per_minute)),
        )

    def build(self, seed: int = 0):
        if self.kind == "mock":
            return MockBackend(seed)
        return LiveBackend(
            endpoint=self.endpoint,
            model=self.model,
            temperature=self.temperature,
            max_in_flight=self.max_in_flight,
            requests_per_minute=self.requests_per_minute,
        )


@dataclass(frozen=True)
class AccommodationConfig:
    """Data files seeding one accommodation; any of them may be absent."""

    id: str
    catalog: Path | None = None
    quiz: Path | None = None
    profiles: Path | None = None
    ratings: Path | None = None
    orders: Path | None = None


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    data_dir: Path = Path("data")
    seed: int = 0
    taxonomy: str = "wheel"
    backend: BackendConfig = BackendConfig()
    engine: EngineConfig = EngineConfig()
    accommodations: tuple[AccommodationConfig, ...] = ()

    def with_overrides(
        self,
        port: int | None = None,
        data_dir: str | Path | None = None,
        backend_kind: str | None = None,
        seed: int | None = None,
    ) -> "ServiceConfig":
        config = self
        if port is not None:
            config = replace(config, port=port)
        if data_dir is not None:
            config = replace(config, data_dir=Path(data_dir))
        if backend_kind is not None:
            config = replace(config, backend=replace(config.backend, kind=backend_kind))
        if seed is not None:
            config = replace(config, seed=seed)
        return config


def _resolve_input(base: Path, value, what: str) -> Path | None:
    if value is None:
        return None
    path = (base / str(value)).resolve() if not Path(str(value)).is_absolute() else Path(str(value))
    if not path.is_file():
        raise FileNotFoundError(f"{what} file not found: {path}")
    return path


def load_config(path: str | Path) -> ServiceConfig:
    """Read a service config file; relative data paths resolve against it."""
    path = Path(path)
    document = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(document, dict):
        raise ValueError("service config must be a JSON object")
    base = path.parent

    accommodations = []
    for entry in document.get("accommodations", ()):
        acm = validate_accommodation_id(entry["id"])
        accommodations.append(
            AccommodationConfig(
                id=acm,
                catalog=_resolve_input(base, entry.get("catalog"), f"{acm} catalog"),
                quiz=_resolve_input(base, entry.get("quiz"), f"{acm} quiz"),
                profiles=_resolve_input(base, entry.get("profiles"), f"{acm} profiles"),
                ratings=_resolve_input(base, entry.get("ratings"), f"{acm} ratings"),
                orders=_resolve_input(base, entry.get("orders"), f"{acm} orders"),
            )
        )

    taxonomy = str(document.get("taxonomy", "wheel"))
    if taxonomy.endswith(".json"):
        resolved = _resolve_input(base, taxonomy, "taxonomy")
        taxonomy = str(resolved)

    data_dir = Path(str(document.get("dataDir", "data")))
    if not data_dir.is_absolute():
        data_dir = base / data_dir

    return ServiceConfig(
        host=str(document.get("host", "127.0.0.1")),
        port=int(document.get("port", 8080)),
        data_dir=data_dir,
        seed=int(document.get("seed", 0)),
        taxonomy=taxonomy,
        backend=BackendConfig.from_document(document.get("backend", {})),
        engine=EngineConfig.from_document(document),
        accommodations=tuple(accommodations),
    )


def load_taxonomy_setting(value: str):
    """A taxonomy setting is either a preset name or a JSON file path."""
    from .influence import load_taxonomy, taxonomy_preset

    if value.endswith(".json"):
        return load_taxonomy(json.loads(Path(value).read_text(encoding="utf-8")))
    return taxonomy_preset(value)
