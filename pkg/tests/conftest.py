import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from geovote import kernels  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
BACKENDS = kernels.available_backends()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture(params=sorted(BACKENDS))
def backend(request, monkeypatch):
    """Run a test once per importable kernel backend."""
    impl = BACKENDS[request.param]
    for name in ("haversine", "haversine_batch", "centroid", "dbscan_labels"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[num])
