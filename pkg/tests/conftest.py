import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from submig import make_directions, preset_fig2, preset_fig3


@pytest.fixture(scope="session")
def fig2():
    """Uniform-contrast three-target scene with its wavelength-0.4 frequency."""
    return preset_fig2()


@pytest.fixture(scope="session")
def fig3():
    """Mixed-contrast three-target scene with its wavelength-0.2 frequency."""
    return preset_fig3()


@pytest.fixture(scope="session")
def dirs16():
    return make_directions(16)
