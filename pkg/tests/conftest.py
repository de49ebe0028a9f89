from __future__ import annotations

from pathlib import Path

import pytest

from revstyle.corpus import load_corpus
from revstyle.textproc import load_lexicons

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def lexicons():
    return load_lexicons()


@pytest.fixture(scope="session")
def fixture_corpus():
    return load_corpus(FIXTURES / "revision_example.jsonl")


@pytest.fixture(scope="session")
def fixture_path():
    return FIXTURES / "revision_example.jsonl"
