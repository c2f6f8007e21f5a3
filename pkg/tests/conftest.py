import sys

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("qlra", deadline=None, max_examples=200)
settings.load_profile("qlra")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in module.CRITERIA:
        if name in module.RESULTS:
            terminalreporter.write_line(module.RESULTS[name])
