import pytest

from qnrherald import DetectorParams, SourceParams


@pytest.fixture
def source():
    return SourceParams(1.0)


@pytest.fixture
def detector():
    """Representative on-off detector: eta = 0.8, delta = 0.0005."""
    return DetectorParams(0.8, 0.0005)
