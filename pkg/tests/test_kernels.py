import os
import subprocess
import sys

import numpy as np
import pytest

from epdyn import _kernels_py, kernels

try:
    from epdyn import _kernels as _compiled
except ImportError:  # pragma: no cover - extension not built
    _compiled = None

needs_compiled = pytest.mark.skipif(_compiled is None, reason="compiled kernels not built")


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    if _compiled is not None and os.environ.get("EPDYN_PURE_PYTHON", "") in ("", "0"):
        assert kernels.BACKEND == "cython"


def test_environment_forces_fallback():
    code = "import epdyn; print(epdyn.BACKEND)"
    env = dict(os.environ, EPDYN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
def test_bessel_parity():
    x = np.concatenate([np.linspace(0, 30, 301), [1e3, 1e5]])
    for name in ("j0", "j1"):
        assert np.allclose(getattr(_compiled, name)(x), getattr(_kernels_py, name)(x), rtol=0, atol=1e-15)


@needs_compiled
@pytest.mark.parametrize("num, den", [
    ([-1.0], [1.0, -1.7, 0.75]),
    ([-1.0, 0.0, -0.4375], [1.0, 0.0, 1.32, 0.0, 0.4375]),
])
def test_circle_panel_parity(num, den):
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    a = np.linspace(0, 2 * np.pi, 41)[:-1]
    b = a + 2 * np.pi / 40
    for t in (0.5, 20.0, 300.0):
        v1, e1 = _compiled.circle_panels(num, den, 0.999, t, a, b)
        v2, e2 = _kernels_py.circle_panels(num, den, 0.999, t, a, b)
        scale = max(1.0, np.max(np.abs(v2)))
        assert np.max(np.abs(np.asarray(v1) - v2)) < 1e-13 * scale
        # estimates below the roundoff floor are noise and differ between backends
        assert np.allclose(e1, e2, rtol=1e-6, atol=1e-13 * scale)


@needs_compiled
@pytest.mark.parametrize("en", [-2.1 - 0.3j, -1.3 + 0j, 0.4 + 0.2j])
def test_time_panel_parity(en):
    a = np.linspace(0, 10, 21)[:-1]
    b = a + 0.5
    for shift in (0.0, 10.0):
        v1, _ = _compiled.bessel_time_panels(en, a, b, shift)
        v2, _ = _kernels_py.bessel_time_panels(en, a, b, shift)
        assert np.max(np.abs(np.asarray(v1) - v2)) < 1e-14


def test_panels_integrate_exactly_known_integral():
    # the angle integrand is (1/lam - lam) dlam / (i dphi) = 1 - lam^2
    num = np.array([1.0 + 0j])
    den = np.array([1.0 + 0j])
    a = np.linspace(0, 2 * np.pi, 9)[:-1]
    b = a + np.pi / 4
    v, _ = kernels.circle_panels(num, den, 1.0, 0.0, a, b)
    assert abs(np.sum(v) - 2 * np.pi) < 1e-12
