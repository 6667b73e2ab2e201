"""Backend equivalence and small-oracle checks for the numeric kernels."""

import itertools
import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mwo_acs import _jit, kernels
from mwo_acs.halton import first_primes, halton, radical_inverse
from mwo_acs.model import generate_synthetic_instance
from mwo_acs.objective import filter_arrays


def test_halton_base2_prefix():
    pts = halton(np.arange(1, 5), 1)
    assert pts[:, 0].tolist() == [0.5, 0.25, 0.75, 0.125]


def test_first_primes():
    assert first_primes(10).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    p = first_primes(4500)
    assert p.size == 4500 and p[-1] == 43051
    assert first_primes(0).size == 0


@given(st.integers(1, 10**6), st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_radical_inverse_exact(i, base):
    # digit reversal done in exact rational arithmetic
    v, f, k = Fraction(0), Fraction(1, base), i
    while k:
        v += f * (k % base)
        k //= base
        f /= base
    assert radical_inverse(i, base) == pytest.approx(float(v), abs=1e-15)
    assert 0 < radical_inverse(i, base) < 1


def test_halton_backends_bitwise():
    idx = np.arange(1, 200, dtype=np.int64)
    bases = first_primes(40)
    a = kernels.halton_points_jit(idx, bases)
    b = kernels.halton_points_np(idx, bases)
    assert np.array_equal(a, b)


@given(st.lists(st.integers(1, 30), min_size=1, max_size=9), st.data())
def test_subset_sum_counts_bruteforce(values, data):
    k = data.draw(st.integers(0, len(values)))
    arr = np.array(values, dtype=np.int64)
    want = np.zeros(arr.sum() + 1)
    for combo in itertools.combinations(values, k):
        want[sum(combo)] += 1
    assert np.array_equal(kernels.subset_sum_counts_np(arr, k), want)
    assert np.array_equal(kernels.subset_sum_counts_jit(arr, k), want)


@pytest.fixture(scope="module")
def acs_case():
    inst = generate_synthetic_instance(11, 6, 25, 8)
    a = inst.arrays
    return inst, (inst.t_s, inst.t_m, a.mat_concepts, a.student_req, a.required, a.durations,
                  a.t_lo, a.t_hi, a.style_dist, a.penalties, a.weights)


@pytest.mark.parametrize("per_student", [False, True])
@given(seed=st.integers(0, 2**32 - 1))
def test_acs_fitness_backends(acs_case, per_student, seed):
    inst, rest = acs_case
    pos = np.random.default_rng(seed).random((8, inst.dim))
    a = kernels.acs_fitness_jit(pos, *rest, per_student)
    b = kernels.acs_fitness_np(pos, *rest, per_student)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-9)


@pytest.mark.parametrize("per_student", [False, True])
@pytest.mark.parametrize("norm", ["catalog", "selected"])
@given(seed=st.integers(0, 2**32 - 1), density=st.floats(0.05, 0.95))
def test_acs_filtered_backends(acs_case, per_student, norm, seed, density):
    from mwo_acs.sequencer import SequenceParams
    inst, rest = acs_case
    f = filter_arrays(inst, SequenceParams(challenge_norm=norm))
    rng = np.random.default_rng(seed)
    pos = (rng.random((8, inst.dim)) < density).astype(np.float64)
    a = kernels.acs_fitness_filtered_jit(pos, *rest, per_student, *f)
    b = kernels.acs_fitness_filtered_np(pos, *rest, per_student, *f)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-9)


def test_backend_flag_values():
    assert _jit.BACKEND in ("numba", "numpy")
    assert _jit.USE_NUMBA == (_jit.BACKEND == "numba")


def _run_py(code, backend):
    env = dict(os.environ, MWO_ACS_BACKEND=backend)
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)


def test_env_flag_selects_numpy_backend():
    out = _run_py("from mwo_acs import kernels; print(kernels.BACKEND, "
                  "kernels.acs_fitness is kernels.acs_fitness_np)", "numpy")
    assert out.returncode == 0, out.stderr
    assert out.stdout.split() == ["numpy", "True"]


def test_env_flag_rejects_garbage():
    out = _run_py("import mwo_acs", "fortran")
    assert out.returncode != 0 and "MWO_ACS_BACKEND" in out.stderr


def test_optimizer_identical_across_backends():
    code = ("from mwo_acs import benchmarks, optimize, OptimizerConfig\n"
            "f = benchmarks.get('tf9')\n"
            "r = optimize(f, 4, OptimizerConfig(seed=3, max_iterations=60, bounds=(0.0, 10.0)))\n"
            "print(repr(r.best_fitness), r.evaluation_count)")
    a, b = _run_py(code, "numba"), _run_py(code, "numpy")
    assert a.returncode == 0 and b.returncode == 0
    # Kernels agree to rounding; the RNG stream is backend independent.
    fa, ea = a.stdout.split()
    fb, eb = b.stdout.split()
    assert ea == eb and float(fa) == pytest.approx(float(fb), rel=1e-9)
