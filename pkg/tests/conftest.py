import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent))

from lib.settings import reset_settings  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test reads the repository settings.json, not a cached override."""
    monkeypatch.delenv("RIGIDITYKIT_SETTINGS", raising=False)
    monkeypatch.delenv("RIGIDITYKIT_SEED", raising=False)
    reset_settings()
    yield
    reset_settings()


def rational_lists(min_size: int = 3, max_size: int = 6, bound: int = 50):
    """Distinct rationals with |p|, q <= bound."""
    return st.lists(
        st.fractions(min_value=-bound, max_value=bound, max_denominator=bound),
        min_size=min_size,
        max_size=max_size,
        unique=True,
    )
