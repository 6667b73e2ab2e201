"""The nine benchmark test functions TF1-TF9.

=====  ===================  ===  ============  ==========
id     name                 dim  box           optimum
=====  ===================  ===  ============  ==========
tf1    sphere               30   [-100, 100]   0
tf2    Schwefel 2.22        30   [-10, 10]     0
tf3    Schwefel 1.2         30   [-100, 100]   0
tf4    Schwefel sine        30   [-500, 500]   -12569.49
tf5    Ackley               30   [-32, 32]     0
tf6    penalized (Levy)     30   [-50, 50]     0
tf7    six-hump camel       2    [-5, 5]       -1.0316
tf8    Shekel m=5           4    [0, 10]       -10.153
tf9    Shekel m=7           4    [0, 10]       -10.403
=====  ===================  ===  ============  ==========
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels


class OutOfBoundsWarning(UserWarning):
    """Raised (as a warning) when a point lies outside the search box."""


@dataclass(frozen=True)
class BenchmarkFunction:
    id: str
    name: str
    kind: str
    dim: int
    lower: float
    upper: float
    known_optimum: float
    minimizer: tuple | None = None

    @property
    def index(self):
        return int(self.id[2:])

    def batch(self, x):
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise ValueError(f"{self.id} expects points of dimension {self.dim}")
        return kernels.BENCHMARK_KERNELS[self.index](x)

    def __call__(self, x):
        return float(self.batch(np.asarray(x, dtype=np.float64)[None, :])[0])

    def minimizer_point(self):
        if self.minimizer is None:
            return None
        m = np.asarray(self.minimizer, dtype=np.float64)
        return np.full(self.dim, m[0]) if m.size == 1 else m


_CATALOG = (
    BenchmarkFunction("tf1", "sphere", "unimodal", 30, -100.0, 100.0, 0.0, (0.0,)),
    BenchmarkFunction("tf2", "schwefel_2_22", "unimodal", 30, -10.0, 10.0, 0.0, (0.0,)),
    BenchmarkFunction("tf3", "schwefel_1_2", "unimodal", 30, -100.0, 100.0, 0.0, (0.0,)),
    BenchmarkFunction("tf4", "schwefel_sine", "multimodal", 30, -500.0, 500.0, -12569.49, (420.9687,)),
    BenchmarkFunction("tf5", "ackley", "multimodal", 30, -32.0, 32.0, 0.0, (0.0,)),
    BenchmarkFunction("tf6", "penalized", "multimodal", 30, -50.0, 50.0, 0.0, (-1.0,)),
    BenchmarkFunction("tf7", "six_hump_camel", "hybrid", 2, -5.0, 5.0, -1.0316,
                      (0.08984201310031806, -0.7126564030207396)),
    # Shekel minimizers refined numerically; the box corner (4,4,4,4) is within 1e-5.
    BenchmarkFunction("tf8", "shekel_5", "hybrid", 4, 0.0, 10.0, -10.153,
                      (4.00003715, 4.00013327, 4.00003715, 4.00013327)),
    BenchmarkFunction("tf9", "shekel_7", "hybrid", 4, 0.0, 10.0, -10.403,
                      (4.00057291, 4.00068936, 3.99948971, 3.99960616)),
)
_BY_ID = {f.id: f for f in _CATALOG}


def catalog():
    return list(_CATALOG)


def get(fid):
    key = str(fid).lower()
    if key.isdigit():
        key = f"tf{key}"
    try:
        return _BY_ID[key]
    except KeyError:
        raise KeyError(f"unknown benchmark function {fid!r}") from None


def evaluate(fid, x):
    """Evaluate one point. Out-of-box points are scored but warned about."""
    f = get(fid)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (f.dim,):
        raise ValueError(f"{f.id} expects a vector of length {f.dim}, got shape {x.shape}")
    if np.any(x < f.lower) or np.any(x > f.upper):
        warnings.warn(f"point outside {f.id} search box [{f.lower}, {f.upper}]",
                      OutOfBoundsWarning, stacklevel=2)
    return f(x)
