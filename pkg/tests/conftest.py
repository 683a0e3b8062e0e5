import sys

import numpy as np
import pytest

from moistrover.field import path_pixel_mask, render_aerial, rhombus_layout


@pytest.fixture(scope="session")
def rhombus_layout_default():
    return rhombus_layout(200.0, 160.0, 25.0)


@pytest.fixture(scope="session")
def rhombus_aerial(rhombus_layout_default):
    return render_aerial(rhombus_layout_default, px_per_cm=2.0)


@pytest.fixture(scope="session")
def rhombus_path_cells(rhombus_layout_default):
    """Per-cell (20 px = 10 cm) fraction of path pixels, from the geometry alone."""
    mask = path_pixel_mask(rhombus_layout_default, 2.0)
    frac = mask.reshape(16, 20, 20, 20).mean(axis=(1, 3))
    return frac


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
