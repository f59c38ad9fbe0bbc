import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dgdeform.catalog import catalog_get
from dgdeform.sampling import Bounds, random_element, random_homogeneous

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SMALL = Bounds(max_terms=3, max_word=4, max_coeff=5)


@pytest.fixture(scope="session")
def derham2():
    return catalog_get("derham", n=2)


@pytest.fixture(scope="session")
def derham3():
    return catalog_get("derham", n=3)


def seeds():
    return st.integers(min_value=0, max_value=2**32 - 1)


def element_of(ctx, seed, homogeneous=False, degrees=None, bounds=SMALL):
    rng = random.Random(seed)
    if homogeneous or degrees:
        return random_homogeneous(rng, ctx, bounds, degrees)
    return random_element(rng, ctx, bounds)


# one line per acceptance criterion, shown in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
