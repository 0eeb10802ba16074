import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def api_key(monkeypatch):
    monkeypatch.setenv("DISTELECT_API_KEY", "test-key")


@pytest.fixture
def replay_server():
    """Factory for loopback replay servers; everything started gets stopped."""
    from distelect.stubserver import ReplayServer

    servers = []

    def start(fixtures, **kwargs):
        server = ReplayServer(fixtures, **kwargs).start()
        servers.append(server)
        return server

    yield start
    for server in servers:
        server.stop()


@pytest.fixture
def fixture_store_path():
    return FIXTURES / "cells_synthetic.json"


@pytest.fixture
def fixture_truth_path():
    return FIXTURES / "truth_synthetic.csv"


@pytest.fixture
def expected_dir():
    return FIXTURES / "expected"
