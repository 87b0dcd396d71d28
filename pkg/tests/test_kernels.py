import os
import subprocess
import sys

import numpy as np
import pytest

from opint import kernels


@pytest.mark.parametrize("backend", kernels.available_backends())
def test_exp_sums_matches_direct_sum(backend, rng):
    coeffs = rng.standard_normal((37, 5)) + 1j * rng.standard_normal((37, 5))
    x = rng.uniform(-50, 50, 2100)
    got = kernels.exp_sums(0.1, 0.25, coeffs, x, backend=backend)
    centers = 0.1 + 0.25 * np.arange(37)
    want = np.exp(-1j * np.outer(x, centers)) @ coeffs
    assert np.abs(got - want).max() < 1e-11


def test_backends_agree(rng):
    if len(kernels.available_backends()) < 2:
        pytest.skip("compiled kernels not built")
    coeffs = rng.standard_normal((64, 5)) + 0j
    x = np.linspace(-100, 100, 501)
    a = kernels.exp_sums(0.0, 0.5, coeffs, x, backend="cython")
    b = kernels.exp_sums(0.0, 0.5, coeffs, x, backend="numpy")
    assert np.abs(a - b).max() < 1e-10


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.exp_sums(0.0, 1.0, np.zeros((1, 1)), np.zeros(1), backend="fortran")


def test_environment_forces_fallback():
    env = dict(os.environ, OPINT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import opint.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
