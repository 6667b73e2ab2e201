import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from mwo_acs import benchmarks, kernels
from mwo_acs.benchmarks import OutOfBoundsWarning


# Straight-from-formula scalar oracles, written without numpy reductions.
def sphere(x):
    return sum(v * v for v in x)


def schwefel_222(x):
    return sum(abs(v) for v in x) + math.prod(abs(v) for v in x)


def schwefel_12(x):
    return sum(sum(x[: i + 1]) ** 2 for i in range(len(x)))


def schwefel_sine(x):
    return sum(-v * math.sin(math.sqrt(abs(v))) for v in x)


def ackley(x):
    n = len(x)
    a = -20 * math.exp(-0.2 * math.sqrt(sum(v * v for v in x) / n))
    b = -math.exp(sum(math.cos(2 * math.pi * v) for v in x) / n)
    return a + b + 20 + math.e


def penalized(x):
    n = len(x)
    y = [1 + (v + 1) / 4 for v in x]
    s = 10 * math.sin(math.pi * y[0]) ** 2
    for i in range(n - 1):
        s += (y[i] - 1) ** 2 * (1 + 10 * math.sin(math.pi * y[i + 1]) ** 2)
    s += (y[-1] - 1) ** 2

    def u(v, a=10, k=100, m=4):
        if v > a:
            return k * (v - a) ** m
        if v < -a:
            return k * (-v - a) ** m
        return 0.0

    return math.pi / n * s + sum(u(v) for v in x)


def camel(x):
    a, b = x
    return 4 * a**2 - 2.1 * a**4 + a**6 / 3 + a * b - 4 * b**2 + 4 * b**4


A = [(4, 4, 4, 4), (1, 1, 1, 1), (8, 8, 8, 8), (6, 6, 6, 6), (3, 7, 3, 7), (2, 9, 2, 9), (5, 5, 3, 3)]
C = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3]


def shekel(m):
    def f(x):
        return -sum(1 / (sum((xi - ai) ** 2 for xi, ai in zip(x, A[r])) + C[r]) for r in range(m))
    return f


ORACLES = {
    "tf1": sphere, "tf2": schwefel_222, "tf3": schwefel_12, "tf4": schwefel_sine,
    "tf5": ackley, "tf6": penalized, "tf7": camel, "tf8": shekel(5), "tf9": shekel(7),
}


def test_catalog_metadata():
    cat = benchmarks.catalog()
    assert [f.id for f in cat] == [f"tf{i}" for i in range(1, 10)]
    assert [f.dim for f in cat] == [30, 30, 30, 30, 30, 30, 2, 4, 4]
    assert [(f.lower, f.upper) for f in cat] == [
        (-100, 100), (-10, 10), (-100, 100), (-500, 500), (-32, 32), (-50, 50),
        (-5, 5), (0, 10), (0, 10)]
    assert benchmarks.get("tf2").lower == -10 and benchmarks.get("tf2").upper == 10
    assert benchmarks.get("tf8").known_optimum == -10.153
    assert benchmarks.get("9").dim == 4


def test_get_unknown():
    with pytest.raises(KeyError):
        benchmarks.get("tf10")


def test_point_values():
    assert benchmarks.evaluate("tf1", np.zeros(30)) == 0.0
    assert benchmarks.evaluate("tf1", np.ones(30)) == 30.0
    assert abs(benchmarks.evaluate("tf5", np.zeros(30))) <= 8.882e-16
    assert abs(benchmarks.evaluate("tf7", benchmarks.get("tf7").minimizer_point()) + 1.0316) < 1e-4
    assert abs(benchmarks.evaluate("tf4", np.full(30, 420.9687)) + 12569.49) < 0.01


@pytest.mark.parametrize("fid,tol", [("tf1", 1e-8), ("tf2", 1e-8), ("tf3", 1e-8), ("tf6", 1e-8),
                                     ("tf7", 1e-3), ("tf8", 1e-3), ("tf9", 1e-3)])
def test_known_minimizers(fid, tol):
    f = benchmarks.get(fid)
    assert abs(f(f.minimizer_point()) - f.known_optimum) <= tol


@pytest.mark.parametrize("fid", sorted(ORACLES))
def test_random_points_match_oracle(fid):
    f = benchmarks.get(fid)
    rng = np.random.default_rng(abs(hash(fid)) % 2**32)
    X = rng.uniform(f.lower, f.upper, (100, f.dim))
    got = f.batch(X)
    want = np.array([ORACLES[fid](list(x)) for x in X])
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("fid", sorted(ORACLES))
def test_backends_agree(fid):
    f = benchmarks.get(fid)
    X = np.random.default_rng(3).uniform(f.lower, f.upper, (50, f.dim))
    np.testing.assert_allclose(kernels.BENCHMARK_KERNELS_JIT[f.index](X),
                               kernels.BENCHMARK_KERNELS_NP[f.index](X), rtol=1e-12, atol=1e-9)


def test_out_of_bounds_warns_but_evaluates():
    with pytest.warns(OutOfBoundsWarning):
        v = benchmarks.evaluate("tf1", np.full(30, 200.0))
    assert v == 30 * 200.0**2
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        benchmarks.evaluate("tf1", np.zeros(30))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        benchmarks.evaluate("tf1", np.zeros(3))


vec30 = arrays(np.float64, 30, elements=st.floats(-100, 100))


@given(vec30)
def test_nonnegative_unimodal(x):
    for fid in ("tf1", "tf2", "tf3"):
        assert benchmarks.evaluate(fid, x / (10 if fid == "tf2" else 1)) >= 0


@given(arrays(np.float64, 30, elements=st.floats(-32, 32)))
def test_ackley_nonnegative_to_floor(x):
    assert benchmarks.evaluate("tf5", x) >= -1e-15


@given(vec30)
def test_sphere_symmetry(x):
    f = benchmarks.get("tf1")
    assert f(x) == f(-x)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_camel_symmetry(a, b):
    f = benchmarks.get("tf7")
    assert f(np.array([a, b])) == pytest.approx(f(np.array([-a, -b])), rel=1e-12, abs=1e-12)


@given(arrays(np.float64, 12, elements=st.floats(-100, 100)),
       arrays(np.float64, 18, elements=st.floats(-100, 100)))
def test_sphere_separable(a, b):
    f = benchmarks.get("tf1")
    whole = f(np.concatenate([a, b]))
    assert whole == pytest.approx(kernels.tf1_np(a[None])[0] + kernels.tf1_np(b[None])[0], rel=1e-12)
