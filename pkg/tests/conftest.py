import pytest

from config import Settings


@pytest.fixture
def settings() -> Settings:
    return Settings(database_url="sqlite://")
