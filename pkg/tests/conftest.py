from __future__ import annotations

from pathlib import Path

import pytest

from dxsim.corpus import Corpus, load_corpus
from dxsim.embedding import EmbeddingBackendConfig, EmbeddingSet, embed_corpus, l2_normalize

DATA_DIR = Path(__file__).parent / "data"

# One PASS/FAIL line per acceptance criterion at the end of every run.
_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance_outcomes[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_outcomes.items():
        label = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{label}  {name}")


@pytest.fixture(scope="session")
def fixture_corpus_path() -> Path:
    return DATA_DIR / "cases_small.jsonl"


@pytest.fixture(scope="session")
def fixture_corpus(fixture_corpus_path) -> Corpus:
    return load_corpus(str(fixture_corpus_path))


@pytest.fixture(scope="session")
def hashed_backend() -> EmbeddingBackendConfig:
    return EmbeddingBackendConfig(kind="hashed", dim=256, seed=42)


@pytest.fixture(scope="session")
def fixture_embeddings(fixture_corpus, hashed_backend) -> EmbeddingSet:
    return embed_corpus(hashed_backend, fixture_corpus)


def make_set(raw_vectors: dict[str, list[float]], fingerprint: str = "test:fixture") -> EmbeddingSet:
    """EmbeddingSet from hand-written raw vectors (normalized on the way in)."""
    by_id = {doc_id: l2_normalize(values) for doc_id, values in raw_vectors.items()}
    dim = next(iter(by_id.values())).dim
    return EmbeddingSet(by_id=by_id, dim=dim, backend_fingerprint=fingerprint)
