import json
from pathlib import Path

import pytest

from borrowviz import run_build

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_root() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def manifest() -> dict:
    return json.loads((FIXTURES / "manifest.json").read_text())


@pytest.fixture(scope="session")
def build():
    """Build a named fixture workspace once per test session."""
    cache = {}

    def _build(name: str):
        if name not in cache:
            cache[name] = run_build(FIXTURES / name)
        return cache[name]

    return _build


@pytest.fixture(scope="session")
def load_source():
    def _loader_for(name: str):
        workspace = FIXTURES / name

        def load(file: str):
            path = Path(file)
            if not path.is_absolute():
                path = workspace / path
            try:
                return path.read_text()
            except OSError:
                return None

        return load

    return _loader_for
