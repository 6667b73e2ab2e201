"""Summary statistics and the two-sided Wilcoxon rank-sum test.

The rank-sum statistic ``W`` is the sum of the midranks of sample ``a`` in
the pooled sample. Midranks are doubled so they stay integers, which lets
the exact null distribution be built with an integer subset-sum table.

* both samples of size <= 8: exact enumeration of all ``C(n_a + n_b, n_a)``
  rank assignments, ``p = P(|W - mu| >= |w_obs - mu|)``;
* otherwise: tie-corrected normal approximation with a 0.5 continuity
  correction, ``p = erfc(z / sqrt(2))``.

If every pooled value is tied the statistic carries no information; the
p-value is NaN and the verdict is ``'='``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import kernels

EXACT_MAX_N = 8


class Summary(NamedTuple):
    mean: float
    std: float
    n: int


class RankSumResult(NamedTuple):
    p_value: float
    verdict: str
    statistic: float
    method: str  # "exact", "normal" or "degenerate"


def summarize(values):
    """Mean and sample standard deviation (``ddof=1``; 0 for one value)."""
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample")
    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return Summary(float(np.mean(x)), std, int(x.size))


def doubled_midranks(pooled):
    """Twice the 1-based midranks of ``pooled``, as int64."""
    pooled = np.asarray(pooled, dtype=np.float64)
    order = np.argsort(pooled, kind="stable")
    sorted_vals = pooled[order]
    ranks = np.empty(pooled.size, dtype=np.int64)
    # group boundaries of equal values
    starts = np.flatnonzero(np.r_[True, sorted_vals[1:] != sorted_vals[:-1]])
    ends = np.r_[starts[1:], pooled.size]
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = (s + 1) + e  # (first + last) 1-based ranks
    return ranks


def _tie_groups(pooled):
    _, counts = np.unique(np.asarray(pooled, dtype=np.float64), return_counts=True)
    return counts


def exact_p_value(ranks2, n_a):
    """Two-sided exact p from doubled ranks; the first ``n_a`` belong to ``a``."""
    ranks2 = np.ascontiguousarray(ranks2, dtype=np.int64)
    n = ranks2.size
    w2 = int(ranks2[:n_a].sum())
    mu2 = n_a * (n + 1)  # twice the null mean of W
    counts = kernels.subset_sum_counts(ranks2, n_a)
    sums = np.arange(counts.size)
    extreme = np.abs(sums - mu2) >= abs(w2 - mu2)
    return float(counts[extreme].sum() / counts.sum())


def normal_p_value(ranks2, n_a, tie_counts):
    n = ranks2.size
    n_b = n - n_a
    w = ranks2[:n_a].sum() / 2.0
    mu = n_a * (n + 1) / 2.0
    tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (n * (n - 1))
    var = n_a * n_b / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return math.nan
    z = max(abs(w - mu) - 0.5, 0.0) / math.sqrt(var)
    return math.erfc(z / math.sqrt(2.0))


def wilcoxon_rank_sum(a, b, alpha=0.05):
    """Two-sided rank-sum test of ``a`` against ``b`` (minimisation verdict).

    Returns
    -------
    RankSumResult
        ``verdict`` is ``'+'`` when ``a`` is significantly better (lower
        mean), ``'-'`` when significantly worse, ``'='`` otherwise.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    if np.isnan(a).any() or np.isnan(b).any():
        raise ValueError("samples must not contain NaN")
    pooled = np.concatenate([a, b])
    ranks2 = doubled_midranks(pooled)
    stat = ranks2[: a.size].sum() / 2.0
    if np.all(pooled == pooled[0]):
        return RankSumResult(math.nan, "=", float(stat), "degenerate")
    if a.size <= EXACT_MAX_N and b.size <= EXACT_MAX_N:
        p, method = exact_p_value(ranks2, a.size), "exact"
    else:
        p, method = normal_p_value(ranks2, a.size, _tie_groups(pooled)), "normal"
    return RankSumResult(p, verdict(p, a, b, alpha), float(stat), method)


def verdict(p, a, b, alpha=0.05):
    if not p < alpha:  # also catches NaN
        return "="
    ma, mb = float(np.mean(a)), float(np.mean(b))
    if ma < mb:
        return "+"
    if ma > mb:
        return "-"
    return "="
