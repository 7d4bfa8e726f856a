import numpy as np
import pytest

from mblcavity import _fallback, numerics, response
from mblcavity._backend import BACKEND
from mblcavity.params import CircuitParams
from mblcavity.pipeline import single_particle

try:
    from mblcavity import _kernels
except ImportError:  # extension not built
    _kernels = None


@pytest.fixture(params=["compiled", "python"])
def backend(request, monkeypatch):
    """Run a test once per kernel implementation."""
    if request.param == "compiled":
        if _kernels is None:
            pytest.skip("compiled kernels not built")
        mod = _kernels
    else:
        mod = _fallback
    monkeypatch.setattr(numerics, "kernels", mod)
    monkeypatch.setattr(response, "kernels", mod)
    return request.param


@pytest.fixture(scope="session")
def params():
    return CircuitParams()


@pytest.fixture(scope="session")
def stages(params):
    cache = {}

    def get(phi):
        if phi not in cache:
            cache[phi] = single_particle(params, phi)
        return cache[phi]
    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return np.tril(a) + np.tril(a, -1).T


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
