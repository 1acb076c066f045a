from functools import lru_cache

import pytest

from parasolv.realization import build_realization
from parasolv.rootsystem import cartan_from_types, root_system

ACCEPTANCE_LINES = []


@lru_cache(maxsize=None)
def realization(*types, form="split"):
    """Cached builtin realization; ``types`` are ``(series, rank)`` pairs or one series and rank."""
    if len(types) == 2 and isinstance(types[0], str):
        types = (types,)
    return build_realization(root_system(cartan_from_types(types)), form)


@pytest.fixture
def real():
    return realization


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
