import os
import subprocess
import sys

import numpy as np
import pytest

from dma_nearfield import BACKEND, available_backends
from dma_nearfield.beamdepth import BRACKET_CAP, BRACKET_LOWER, BRACKET_STEP, MONOTONE_UPPER

BACKENDS = available_backends()
needs_compiled = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")


def test_active_backend_listed():
    assert BACKEND in BACKENDS


@pytest.mark.parametrize("name", ["python", "cython"])
def test_env_selection(name):
    if name not in BACKENDS:
        pytest.skip("compiled kernels not built")
    env = dict(os.environ, DMA_NEARFIELD_BACKEND=name)
    out = subprocess.run([sys.executable, "-c", "import dma_nearfield; print(dma_nearfield.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == name


@needs_compiled
class TestParity:
    py, cy = BACKENDS["python"], BACKENDS.get("cython")

    def test_constants(self):
        for name in ("ERFI_SERIES_RADIUS", "FRESNEL_SERIES_LIMIT", "K_SMALL_X", "LOG_DBL_MAX"):
            assert getattr(self.py, name) == getattr(self.cy, name)

    def test_erfi(self):
        rng = np.random.default_rng(1)
        for z in rng.uniform(-20, 20, 400) + 1j * rng.uniform(-20, 20, 400):
            if (z * z).real > 700:
                continue
            a, b = self.py.erfi(complex(z)), self.cy.erfi(complex(z))
            assert abs(a - b) <= 1e-14 * max(abs(a), 1e-300)

    def test_fresnel(self):
        for x in np.linspace(-50, 50, 401):
            assert np.allclose(self.py.fresnel(x), self.cy.fresnel(x), rtol=1e-14, atol=0)

    def test_kernel(self):
        rng = np.random.default_rng(2)
        for x, w in zip(rng.uniform(0, 12, 400), rng.uniform(0, 15, 400)):
            assert self.py.kernel_k(x, w) == pytest.approx(self.cy.kernel_k(x, w), rel=1e-13)
        assert self.py.kernel_k(1e-8, 2.0) == self.cy.kernel_k(1e-8, 2.0)

    def test_x_delta_grid(self):
        ds = np.array([0.2, 0.55, 0.9])
        ws = np.array([0.0, 1.3, 7.7, 15.0])
        out_py, out_cy = np.empty((3, 4)), np.empty((3, 4))
        args = (BRACKET_LOWER, MONOTONE_UPPER, 1e-10, BRACKET_STEP, BRACKET_CAP)
        self.py.x_delta_grid(ds, ws, *args, out_py)
        self.cy.x_delta_grid(ds, ws, *args, out_cy)
        assert np.allclose(out_py, out_cy, atol=1e-9, rtol=0)

    def test_errors(self):
        for mod in (self.py, self.cy):
            with pytest.raises(OverflowError):
                mod.erfi(28 + 0j)
            assert np.isnan(mod.x_delta(0.001, 0.0, BRACKET_LOWER, MONOTONE_UPPER, 1e-8, BRACKET_STEP, BRACKET_CAP))
