import pytest

from nodalci.generators import generate


@pytest.fixture(scope="session")
def examples():
    """Generated examples, built once per session and keyed by (family, degrees, seed)."""
    cache = {}

    def get(family, degrees, seed=1):
        key = (family, tuple(degrees), seed)
        if key not in cache:
            cache[key] = generate(family, degrees, seed)
        return cache[key]

    return get
