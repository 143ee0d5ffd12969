import numpy as np
import pytest

from app.config import settings
from app.models import ValuationSequence


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def storage(tmp_path, monkeypatch):
    """Point STORAGE_PATH at a temporary directory"""
    monkeypatch.setattr(settings, "STORAGE_PATH", str(tmp_path / "storage"))
    return tmp_path / "storage"


@pytest.fixture
def open_api(monkeypatch):
    monkeypatch.setattr(settings, "API_SECRET_KEY", None)


@pytest.fixture
def client(storage, open_api):
    from fastapi.testclient import TestClient
    from app.main import app

    return TestClient(app)


@pytest.fixture
def two_rounds():
    # both rounds trade at any price in [0.5, 0.6]
    return ValuationSequence.from_pairs([(0.2, 0.6), (0.5, 0.9)])
