import pytest

from tests.tables import RETURN_COUNTS, TOTAL_COUNTS

SETTINGS = ("ORDER", "DIGITS", "ORACLE_LIMIT", "FORMAT", "KERNEL_CACHE_SIZE", "MAX_WORKERS", "LOG_LEVEL")


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Run every test away from any real .env file and SKM_* variables."""
    for name in SETTINGS:
        monkeypatch.delenv(f"SKM_{name}", raising=False)
    monkeypatch.chdir(tmp_path)
    yield tmp_path


@pytest.fixture
def return_counts():
    return list(RETURN_COUNTS)


@pytest.fixture
def total_counts():
    return list(TOTAL_COUNTS)
