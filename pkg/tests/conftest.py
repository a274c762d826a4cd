import numpy as np
import pytest

from radperturb import _kernels
from radperturb.volume import RoiMask, Volume

BACKENDS = sorted(_kernels.available_backends())


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per kernel backend by swapping the module attributes."""
    mod = _kernels.available_backends()[request.param]
    for name in _kernels._FUNCTIONS:
        monkeypatch.setattr(_kernels, name, getattr(mod, name))
    return request.param


def ball(shape, centre, radius):
    idx = np.indices(shape).astype(float)
    r2 = sum((i - c) ** 2 for i, c in zip(idx, centre))
    return r2 <= radius * radius


def make_pair(data, mask, spacing=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0)):
    return Volume(data, spacing, origin), RoiMask(np.asarray(mask, dtype=float), spacing, origin)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance results collected by test_acceptance.py, printed once at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
