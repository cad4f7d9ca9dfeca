import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.algebra import parse_combo  # noqa: E402
from core.forest import parse_forest  # noqa: E402
from core.spaces import random_form as _random_form  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def random_form(rng):
    """random_form(N, n, p, divfree=False, terms=3) drawn from the seeded generator."""

    def draw(N, n, p=0, divfree=False, terms=3):
        return _random_form(N, n, p, rng, divfree=divfree, terms=terms)

    return draw


def F(text):
    return parse_forest(text)


def C(text):
    return parse_combo(text)


@pytest.fixture
def state_dir(tmp_path, monkeypatch):
    """Isolated settings file and state directory for CLI and config tests."""
    state = tmp_path / "state"
    config = tmp_path / "config.yml"
    config.write_text(f"state_dir: {state}\ncache: true\n")
    monkeypatch.setenv("AROMAKIT_CONFIG", str(config))
    monkeypatch.delenv("AROMAKIT_THREADS", raising=False)
    return state
