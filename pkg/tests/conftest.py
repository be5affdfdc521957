from __future__ import annotations

import random

import pytest

from fimpipe.curriculum import CurriculumDistribution, build_corpus_stats
from fimpipe.syntax import load_taxonomy
from fimpipe.synth import make_corpus


@pytest.fixture(scope="session")
def taxonomy():
    return load_taxonomy()


@pytest.fixture(scope="session")
def table2():
    return CurriculumDistribution.default()


@pytest.fixture(scope="session")
def corpus120(taxonomy):
    """120 synthetic files across python/typescript/javascript plus stats."""
    files = make_corpus(120, seed=11)
    stats = build_corpus_stats(files, sample_cap=4000, taxonomy=taxonomy, seed=1)
    return files, stats


@pytest.fixture()
def rng():
    return random.Random(1234)
