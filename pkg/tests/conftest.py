import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qwboost import _backend  # noqa: E402


@pytest.fixture(params=_backend.available())
def backend(request):
    prev = _backend.kernels
    _backend.use(request.param)
    yield request.param
    _backend.kernels = prev


def pytest_terminal_summary(terminalreporter):
    lines = [value for key in ("passed", "failed") for rep in terminalreporter.stats.get(key, [])
             for name, value in getattr(rep, "user_properties", ()) if name == "criterion"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split()[1]):
            terminalreporter.write_line(line)
