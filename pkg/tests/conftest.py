"""Shared fixtures: the seeded demo accommodation and an app bound to it."""

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from guestlift.config import load_config
from guestlift.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture()
def service_config(tmp_path):
    """The demo config with campaign data redirected to a scratch directory."""
    return load_config(FIXTURES / "config.json").with_overrides(data_dir=tmp_path / "data")


@pytest.fixture()
def app(service_config):
    return create_app(service_config)


@pytest.fixture()
def client(app):
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture(scope="session")
def frozen_ad_copies() -> dict:
    """Mock-backend output for the demo ad-copy request, frozen at seed 7."""
    path = Path(__file__).resolve().parent / "data" / "ad_copies_seed7.json"
    return json.loads(path.read_text(encoding="utf-8"))
