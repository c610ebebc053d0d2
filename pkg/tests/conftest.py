import pytest

from covcert import bounds, numberfields

# precision used throughout the suite; chosen so the full run stays fast
# while leaving enclosure widths orders of magnitude below every tolerance
PREC = 160


@pytest.fixture(scope="session")
def catalog():
    return numberfields.default_catalog()


@pytest.fixture(scope="session")
def table():
    return bounds.load_odlyzko_table()
