import pathlib

import numpy as np
import pytest

from fomcurve import textprep

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
GOLDENS = pathlib.Path(__file__).parent / "goldens"


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDENS


def tiny_prep_config(stopwords=(), names=(), markers=(), rules=None, exceptions=None):
    """Minimal preprocessing config for unit tests."""
    if rules is None:
        rules = (("ies", "y"), ("sses", "ss"), ("ss", "ss"), ("us", "us"),
                 ("is", "is"), ("xes", "x"), ("ches", "ch"), ("shes", "sh"),
                 ("zes", "z"), ("ied", "y"), ("ed", "e"), ("s", ""))
    return textprep.PreprocessConfig(
        stopwords=frozenset(stopwords),
        names=frozenset(names),
        voting_markers=tuple(markers),
        lemma_rules=tuple(rules),
        lemma_exceptions=dict(exceptions or {}),
    )


def random_count_matrix(rng, n_docs, n_terms):
    """Random count matrix with no empty documents or unused terms."""
    while True:
        counts = rng.poisson(1.0, size=(n_docs, n_terms))
        if (counts.sum(axis=1) > 0).all() and (counts.sum(axis=0) > 0).all():
            return counts.astype(np.int64)
