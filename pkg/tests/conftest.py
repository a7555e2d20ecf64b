from pathlib import Path

import pytest


@pytest.fixture
def fixtures() -> Path:
    """Directory of frozen input/golden files (see fixtures/README.md)."""
    return Path(__file__).parent / "fixtures"
