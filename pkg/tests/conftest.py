"""Pytest configuration and fixtures for tagmatch tests.

This module provides centralized test fixtures for:
- The "popular series" corpus used by graph-construction and matcher tests
- A small synthetic corpus, generated once per session
- Logging reset between tests
"""

from collections.abc import Generator

import numpy as np
import pytest
import structlog

from app.core.logging import clear_run_context
from libs.graph_match.concept_graph import ConceptGraph
from libs.graph_match.parsers import DependencyParse
from services.dataset import Corpus, SyntheticConfig, SyntheticCorpus, generate_synthetic
from tests import factories

# ============================================================================
# Pytest Configuration
# ============================================================================


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line("markers", "unit: Unit tests (fast, no external dependencies)")
    config.addinivalue_line("markers", "integration: Integration tests (run whole commands on generated data)")
    config.addinivalue_line("markers", "slow: Slow tests (may take >5 seconds)")


@pytest.fixture(autouse=True)
def _reset_logging_context() -> Generator[None, None, None]:
    """Run context and bound contextvars never leak from one test into the next."""
    yield
    clear_run_context()
    structlog.contextvars.clear_contextvars()


# ============================================================================
# Corpus Fixtures
# ============================================================================


@pytest.fixture
def series_graph() -> ConceptGraph:
    return factories.series_graph()


@pytest.fixture
def series_sentence() -> DependencyParse:
    return factories.series_sentence()


@pytest.fixture
def series_corpus() -> Corpus:
    return factories.series_corpus()


@pytest.fixture(scope="session")
def small_synthetic() -> SyntheticCorpus:
    """Small enough for per-test training runs."""
    return generate_synthetic(
        SyntheticConfig(num_concepts=12, num_sentences=80, entities_per_concept=3, embedding_dim=6, seed=3)
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
