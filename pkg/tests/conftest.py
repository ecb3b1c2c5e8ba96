import random

import pytest
from hypothesis import HealthCheck, settings
import hypothesis.strategies as st

from xscore.loaders import fixture_path, load_json

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rng_for(seed):
    return random.Random(seed)


@pytest.fixture
def fixture():
    """Load a bundled fixture: JSON is decoded, anything else returned as text."""
    def load(name):
        path = fixture_path(name)
        return load_json(path) if name.endswith(".json") else path.read_text()
    return load


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        ok, text = mod.RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}")
