import numpy as np
import pytest

from helpers import ACCEPTANCE, seed


@pytest.fixture
def rng():
    return np.random.default_rng(seed())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", f"acceptance criteria (seed {seed()})")
    for n in sorted(ACCEPTANCE):
        r = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {r['status']}: {r['title']} [{r['detail']}]")
