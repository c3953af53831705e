import math
import os
import subprocess
import sys

import numpy as np
import pytest

from dynrays import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def grid(n, lo=-8, hi=8, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, n), rng.uniform(lo, hi, n)


@needs_numba
class TestEquivalence:
    @pytest.mark.parametrize("invariant", [True, False])
    def test_escape_discrete_outputs(self, invariant):
        re, im = grid(50_000)
        a = math.pi / 2
        args = (re, im, a, 0.0, -a, 0.0, 60, 50.0, 1e-12, invariant)
        nb, np_ = K.escape_orbits_nb(*args), K.escape_orbits_np(*args)
        for x, y in zip(nb[:3], np_[:3]):
            assert np.array_equal(x, y)

    def test_escape_short_orbits_agree_closely(self):
        # before chaos amplifies last-bit libm differences
        re, im = grid(20_000, -3, 3)
        args = (re, im, 0.8, 0.3, -0.4, 0.1, 2, 50.0, 1e-12, False)
        nb, np_ = K.escape_orbits_nb(*args), K.escape_orbits_np(*args)
        z_nb, z_np = nb[3] + 1j * nb[4], np_[3] + 1j * np_[4]
        assert np.all(np.abs(z_nb - z_np) <= 1e-12 * np.maximum(1.0, np.abs(z_np)))
        assert np.allclose(nb[5], np_[5], rtol=1e-12, atol=0)

    def test_survival(self):
        rng = np.random.default_rng(1)
        re = 10 + 2 * math.pi * rng.random(50_000)
        im = 2 * math.pi * rng.random(50_000)
        ph = rng.random((50_000, 6))
        args = (re, im, 0.0, 0.0, 10.0, 6, ph)
        assert np.array_equal(K.survival_nb(*args), K.survival_np(*args))

    def test_row_sums(self):
        rng = np.random.default_rng(2)
        j0 = rng.integers(0, 2000, 3000).astype(np.int64)
        j1 = j0 + rng.integers(0, 10 ** 8, 3000)
        j1[:500] = j0[:500] + rng.integers(0, 64, 500)
        v = rng.uniform(-3e3, 3e3, 3000)
        sgn = np.where(rng.random(3000) < 0.5, 1.0, -1.0)
        gx, gw = K.gl_nodes()
        args = (j0, j1, v, sgn, math.pi ** 2, 0.0, 1.6, 256, gx, gw)
        assert np.allclose(K.row_sums_nb(*args), K.row_sums_np(*args), rtol=1e-13, atol=0)


def direct_row(j0, j1, v, sgn, c, d):
    t = (np.arange(j0, j1 + 1) + 0.5) * math.pi * sgn
    w = t + 1j * v
    return math.fsum((np.abs(w * w + c) ** (-d / 2)).tolist())


class TestRowSumAccuracy:
    @pytest.mark.parametrize("j0,ncol,v,d", [
        (0, 200_000, 1.5, 1.6), (3, 500_000, -400.0, 1.4), (300, 1_000_000, 20_000.0, 1.6),
        (1000, 300_000, 2.0, 2.5), (0, 65, 0.0, 1.6), (17, 3_000_000, 1e5, 1.6)])
    def test_against_exact_sum(self, j0, ncol, v, d):
        c = complex(math.pi ** 2)
        for sgn in (1.0, -1.0):
            got = K.row_sums(np.array([j0]), np.array([j0 + ncol - 1]), np.array([v]),
                             np.array([sgn]), c, d)[0]
            want = direct_row(j0, j0 + ncol - 1, v, sgn, c, d)
            assert abs(got - want) <= 1e-12 * want


def run_python(code, **env):
    full = dict(os.environ, **env)
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env=full, check=True)
    return out.stdout.strip()


class TestSwitch:
    def test_env_disables_numba(self):
        out = run_python("from dynrays import _kernels as K; print(K.USE_NUMBA)",
                         DYNRAYS_NO_NUMBA="1")
        assert out == "False"

    def test_same_results_either_way(self):
        code = ("from dynrays import *; import math;"
                "e = escaping_density(MapSpec.sinh(1), -0.5+2.6j, 1.0, SampleSpec(3, 20000, 10));"
                "s = exponential_survival(1, 10, 5, SampleSpec(3, 20000));"
                "print(e.fraction, [x.fraction for x in s])")
        assert run_python(code, DYNRAYS_NO_NUMBA="1") == run_python(code, DYNRAYS_NO_NUMBA="0")

    @needs_numba
    def test_thread_cap(self):
        out = run_python("import numba; from dynrays import _kernels as K;"
                         "K.configure_threads(); print(numba.get_num_threads())",
                         DYN_THREADS="1")
        assert out == "1"
