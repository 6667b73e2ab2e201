"""Hot numeric kernels, each with a numba loop and a numpy fallback.

Naming: ``<name>_jit`` is the ``@njit`` loop version, ``<name>_np`` the
vectorised numpy version, and the bare ``<name>`` is whichever one the
backend flag selected (see :mod:`mwo_acs._jit`). Kernels are pure: they
never draw random numbers, so the optimizer's RNG stream is the same
under both backends.

Population-level kernels take a 2-D ``(n, dim)`` float array and return
one value per row.
"""

import math

import numpy as np

from ._jit import BACKEND, USE_NUMBA, njit

__all__ = [
    "BACKEND",
    "BENCHMARK_KERNELS",
    "acs_fitness",
    "acs_fitness_filtered",
    "halton_points",
    "subset_sum_counts",
]

# Standard 4-D Shekel coefficients; TF8 uses the first 5 rows, TF9 the first 7.
SHEKEL_A = np.array(
    [
        [4.0, 4.0, 4.0, 4.0],
        [1.0, 1.0, 1.0, 1.0],
        [8.0, 8.0, 8.0, 8.0],
        [6.0, 6.0, 6.0, 6.0],
        [3.0, 7.0, 3.0, 7.0],
        [2.0, 9.0, 2.0, 9.0],
        [5.0, 5.0, 3.0, 3.0],
    ]
)
SHEKEL_C = np.array([0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3])


# ---------------------------------------------------------------------------
# Benchmark functions
# ---------------------------------------------------------------------------


@njit(cache=True)
def tf1_jit(x):
    n, d = x.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += x[i, j] * x[i, j]
        out[i] = s
    return out


def tf1_np(x):
    return np.sum(x * x, axis=1)


@njit(cache=True)
def tf2_jit(x):
    n, d = x.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        p = 1.0
        for j in range(d):
            a = abs(x[i, j])
            s += a
            p *= a
        out[i] = s + p
    return out


def tf2_np(x):
    a = np.abs(x)
    return np.sum(a, axis=1) + np.prod(a, axis=1)


@njit(cache=True)
def tf3_jit(x):
    n, d = x.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        partial = 0.0
        for j in range(d):
            partial += x[i, j]
            s += partial * partial
        out[i] = s
    return out


def tf3_np(x):
    c = np.cumsum(x, axis=1)
    return np.sum(c * c, axis=1)


@njit(cache=True)
def tf4_jit(x):
    n, d = x.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(d):
            s -= x[i, j] * math.sin(math.sqrt(abs(x[i, j])))
        out[i] = s
    return out


def tf4_np(x):
    return np.sum(-x * np.sin(np.sqrt(np.abs(x))), axis=1)


@njit(cache=True)
def tf5_jit(x):
    n, d = x.shape
    out = np.empty(n)
    for i in range(n):
        sq = 0.0
        cs = 0.0
        for j in range(d):
            sq += x[i, j] * x[i, j]
            cs += math.cos(2.0 * math.pi * x[i, j])
        out[i] = (
            -20.0 * math.exp(-0.2 * math.sqrt(sq / d))
            - math.exp(cs / d)
            + 20.0
            + math.e
        )
    return out


def tf5_np(x):
    d = x.shape[1]
    sq = np.sum(x * x, axis=1)
    cs = np.sum(np.cos(2.0 * np.pi * x), axis=1)
    return -20.0 * np.exp(-0.2 * np.sqrt(sq / d)) - np.exp(cs / d) + 20.0 + np.e


@njit(cache=True)
def _u_penalty(v, a, k, m):
    if v > a:
        return k * (v - a) ** m
    if v < -a:
        return k * (-v - a) ** m
    return 0.0


@njit(cache=True)
def tf6_jit(x):
    n, d = x.shape
    out = np.empty(n)
    for i in range(n):
        y_first = 1.0 + (x[i, 0] + 1.0) / 4.0
        s = 10.0 * math.sin(math.pi * y_first) ** 2
        for j in range(d - 1):
            yj = 1.0 + (x[i, j] + 1.0) / 4.0
            yn = 1.0 + (x[i, j + 1] + 1.0) / 4.0
            s += (yj - 1.0) ** 2 * (1.0 + 10.0 * math.sin(math.pi * yn) ** 2)
        y_last = 1.0 + (x[i, d - 1] + 1.0) / 4.0
        s += (y_last - 1.0) ** 2
        pen = 0.0
        for j in range(d):
            pen += _u_penalty(x[i, j], 10.0, 100.0, 4.0)
        out[i] = math.pi / d * s + pen
    return out


def _u_penalty_np(x, a, k, m):
    return k * (x - a) ** m * (x > a) + k * (-x - a) ** m * (x < -a)


def tf6_np(x):
    d = x.shape[1]
    y = 1.0 + (x + 1.0) / 4.0
    body = (
        10.0 * np.sin(np.pi * y[:, 0]) ** 2
        + np.sum((y[:, :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[:, 1:]) ** 2), axis=1)
        + (y[:, -1] - 1.0) ** 2
    )
    return np.pi / d * body + np.sum(_u_penalty_np(x, 10.0, 100.0, 4.0), axis=1)


@njit(cache=True)
def tf7_jit(x):
    n = x.shape[0]
    out = np.empty(n)
    for i in range(n):
        a = x[i, 0]
        b = x[i, 1]
        out[i] = 4.0 * a**2 - 2.1 * a**4 + a**6 / 3.0 + a * b - 4.0 * b**2 + 4.0 * b**4
    return out


def tf7_np(x):
    a = x[:, 0]
    b = x[:, 1]
    return 4.0 * a**2 - 2.1 * a**4 + a**6 / 3.0 + a * b - 4.0 * b**2 + 4.0 * b**4


@njit(cache=True)
def _shekel_jit(x, m, a_mat, c_vec):
    n, d = x.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for r in range(m):
            dist = 0.0
            for j in range(d):
                diff = x[i, j] - a_mat[r, j]
                dist += diff * diff
            s -= 1.0 / (dist + c_vec[r])
        out[i] = s
    return out


def tf8_jit(x):
    return _shekel_jit(x, 5, SHEKEL_A, SHEKEL_C)


def tf9_jit(x):
    return _shekel_jit(x, 7, SHEKEL_A, SHEKEL_C)


def _shekel_np(x, m):
    diff = x[:, None, :] - SHEKEL_A[None, :m, :]
    return -np.sum(1.0 / (np.sum(diff * diff, axis=2) + SHEKEL_C[None, :m]), axis=1)


def tf8_np(x):
    return _shekel_np(x, 5)


def tf9_np(x):
    return _shekel_np(x, 7)


BENCHMARK_KERNELS_JIT = {
    1: tf1_jit, 2: tf2_jit, 3: tf3_jit, 4: tf4_jit, 5: tf5_jit,
    6: tf6_jit, 7: tf7_jit, 8: tf8_jit, 9: tf9_jit,
}
BENCHMARK_KERNELS_NP = {
    1: tf1_np, 2: tf2_np, 3: tf3_np, 4: tf4_np, 5: tf5_np,
    6: tf6_np, 7: tf7_np, 8: tf8_np, 9: tf9_np,
}


# ---------------------------------------------------------------------------
# ACS fitness over a population of continuous positions
# ---------------------------------------------------------------------------


@njit(cache=True)
def acs_fitness_jit(
    pos, t_s, t_m, mat_concepts, student_req, required, durations,
    t_lo, t_hi, style_dist, penalties, weights, per_student,
):
    n = pos.shape[0]
    t_c = mat_concepts.shape[1]
    out = np.zeros((n, 4))
    covered = np.zeros(t_c, dtype=np.bool_)
    for p in range(n):
        covered[:] = False
        o1 = 0.0
        o2 = 0.0
        o3 = 0.0
        for i in range(t_s):
            if per_student:
                covered[:] = False
            total = 0.0
            base = i * t_m
            for j in range(t_m):
                if pos[p, base + j] > 0.5:
                    total += durations[j]
                    o3 += style_dist[i, j]
                    for c in range(t_c):
                        if mat_concepts[j, c]:
                            covered[c] = True
            if total < t_lo[i] or total > t_hi[i]:
                o2 += penalties[2]
            if per_student:
                for c in range(t_c):
                    if covered[c] and not student_req[i, c]:
                        o1 += penalties[0]
                    elif student_req[i, c] and not covered[c]:
                        o1 += penalties[1]
        if not per_student:
            for c in range(t_c):
                if covered[c] and not required[c]:
                    o1 += penalties[0]
                elif required[c] and not covered[c]:
                    o1 += penalties[1]
        out[p, 0] = o1
        out[p, 1] = o2
        out[p, 2] = o3
        out[p, 3] = weights[0] * o1 + weights[1] * o2 + weights[2] * o3
    return out


def acs_fitness_np(
    pos, t_s, t_m, mat_concepts, student_req, required, durations,
    t_lo, t_hi, style_dist, penalties, weights, per_student,
):
    n = pos.shape[0]
    sel = pos.reshape(n, t_s, t_m) > 0.5
    self_f = sel.astype(np.float64)
    o3 = np.einsum("nij,ij->n", self_f, style_dist)
    totals = self_f @ durations
    o2 = penalties[2] * np.sum((totals < t_lo) | (totals > t_hi), axis=1)
    concept_f = mat_concepts.astype(np.float64)
    if per_student:
        cov = (self_f @ concept_f) > 0
        req = student_req.astype(bool)[None, :, :]
        redundant = np.sum(cov & ~req, axis=(1, 2))
        missing = np.sum(req & ~cov, axis=(1, 2))
    else:
        cov = (np.any(sel, axis=1).astype(np.float64) @ concept_f) > 0
        req = required.astype(bool)[None, :]
        redundant = np.sum(cov & ~req, axis=1)
        missing = np.sum(req & ~cov, axis=1)
    o1 = penalties[0] * redundant + penalties[1] * missing
    out = np.empty((n, 4))
    out[:, 0] = o1
    out[:, 1] = o2
    out[:, 2] = o3
    out[:, 3] = weights[0] * o1 + weights[1] * o2 + weights[2] * o3
    return out


@njit(cache=True)
def _beats(s_new, id_new, s_old, id_old):
    return s_new > s_old or (s_new == s_old and id_new < id_old)


@njit(cache=True)
def acs_fitness_filtered_jit(
    pos, t_s, t_m, mat_concepts, student_req, required, durations,
    t_lo, t_hi, style_dist, penalties, weights, per_student,
    order, classes, p_score, m_score, difficulty, n_pre, alpha, limits, norm,
):
    n = pos.shape[0]
    t_c = mat_concepts.shape[1]
    out = np.zeros((n, 4))
    covered = np.zeros(t_c, dtype=np.bool_)
    cap = 1
    for c in range(3):
        cap = max(cap, limits[c])
    top_s = np.empty((3, cap))
    top_id = np.empty((3, cap), dtype=np.int64)
    counts = np.zeros(3, dtype=np.int64)
    for p in range(n):
        covered[:] = False
        o1 = 0.0
        o2 = 0.0
        o3 = 0.0
        for i in range(t_s):
            if per_student:
                covered[:] = False
            base = i * t_m
            big_k = 0
            for j in range(t_m):
                if pos[p, base + j] > 0.5:
                    big_k += 1
            counts[:] = 0
            k = 0
            for r in range(t_m):
                j = order[r]
                if pos[p, base + j] <= 0.5:
                    continue
                k += 1
                b = math.exp(-k / big_k)
                nrm = norm if norm > 0 else float(big_k)
                ch = b * difficulty[j] + (1.0 - b) * n_pre[j] / nrm
                sc = alpha[0] * p_score[j] + alpha[1] * m_score[j] + alpha[2] * ch
                c = classes[i, j]
                lim = limits[c]
                if lim == 0:
                    continue
                cnt = counts[c]
                if cnt == lim and not _beats(sc, j, top_s[c, cnt - 1], top_id[c, cnt - 1]):
                    continue
                pos_ins = cnt if cnt < lim else lim - 1
                while pos_ins > 0 and _beats(sc, j, top_s[c, pos_ins - 1], top_id[c, pos_ins - 1]):
                    if pos_ins < lim:
                        top_s[c, pos_ins] = top_s[c, pos_ins - 1]
                        top_id[c, pos_ins] = top_id[c, pos_ins - 1]
                    pos_ins -= 1
                top_s[c, pos_ins] = sc
                top_id[c, pos_ins] = j
                if cnt < lim:
                    counts[c] = cnt + 1
            total = 0.0
            for c in range(3):
                for q in range(counts[c]):
                    j = top_id[c, q]
                    total += durations[j]
                    o3 += style_dist[i, j]
                    for cc in range(t_c):
                        if mat_concepts[j, cc]:
                            covered[cc] = True
            if total < t_lo[i] or total > t_hi[i]:
                o2 += penalties[2]
            if per_student:
                for c in range(t_c):
                    if covered[c] and not student_req[i, c]:
                        o1 += penalties[0]
                    elif student_req[i, c] and not covered[c]:
                        o1 += penalties[1]
        if not per_student:
            for c in range(t_c):
                if covered[c] and not required[c]:
                    o1 += penalties[0]
                elif required[c] and not covered[c]:
                    o1 += penalties[1]
        out[p, 0] = o1
        out[p, 1] = o2
        out[p, 2] = o3
        out[p, 3] = weights[0] * o1 + weights[1] * o2 + weights[2] * o3
    return out


def filtered_selection_np(pos, t_s, t_m, order, classes, p_score, m_score,
                          difficulty, n_pre, alpha, limits, norm):
    """Boolean ``(n, t_s, t_m)`` mask of the class-capped selection."""
    n = pos.shape[0]
    sel = pos.reshape(n, t_s, t_m) > 0.5
    sel_o = sel[:, :, order]
    k = np.cumsum(sel_o, axis=2)
    big_k = k[:, :, -1:]
    safe_k = np.maximum(big_k, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.exp(-k / safe_k)
        nrm = norm if norm > 0 else safe_k
        ch = b * difficulty[order] + (1.0 - b) * n_pre[order] / nrm
    score = alpha[0] * p_score[order] + alpha[1] * m_score[order] + alpha[2] * ch
    cls_o = classes[:, order][None, :, :]
    ids = np.broadcast_to(order, sel_o.shape)
    kept_o = np.zeros(sel_o.shape, dtype=bool)
    for c in range(3):
        member = sel_o & (cls_o == c)
        key = np.where(member, -score, np.inf)
        rank_order = np.lexsort((ids, key), axis=-1)
        ranks = np.empty_like(rank_order)
        np.put_along_axis(ranks, rank_order, np.arange(t_m)[None, None, :], axis=-1)
        kept_o |= member & (ranks < limits[c])
    kept = np.zeros_like(kept_o)
    kept[:, :, order] = kept_o
    return kept


def acs_fitness_filtered_np(
    pos, t_s, t_m, mat_concepts, student_req, required, durations,
    t_lo, t_hi, style_dist, penalties, weights, per_student,
    order, classes, p_score, m_score, difficulty, n_pre, alpha, limits, norm,
):
    kept = filtered_selection_np(pos, t_s, t_m, order, classes, p_score, m_score,
                                 difficulty, n_pre, alpha, limits, norm)
    as_pos = kept.reshape(pos.shape[0], t_s * t_m).astype(np.float64)
    return acs_fitness_np(as_pos, t_s, t_m, mat_concepts, student_req, required,
                          durations, t_lo, t_hi, style_dist, penalties, weights,
                          per_student)


# ---------------------------------------------------------------------------
# Halton points (radical inverse in one prime base per dimension)
# ---------------------------------------------------------------------------


@njit(cache=True)
def halton_points_jit(indices, bases):
    m = indices.shape[0]
    d = bases.shape[0]
    out = np.empty((m, d))
    for r in range(m):
        for k in range(d):
            b = bases[k]
            i = indices[r]
            f = 1.0
            v = 0.0
            while i > 0:
                f = f / b
                v += f * (i % b)
                i //= b
            out[r, k] = v
    return out


def halton_points_np(indices, bases):
    idx = np.repeat(np.asarray(indices, dtype=np.int64)[:, None], len(bases), axis=1)
    b = np.asarray(bases, dtype=np.int64)[None, :]
    f = np.ones(idx.shape)
    v = np.zeros(idx.shape)
    while np.any(idx > 0):
        active = idx > 0
        f = np.where(active, f / b, f)
        v = v + np.where(active, f * (idx % b), 0.0)
        idx = idx // b
    return v


# ---------------------------------------------------------------------------
# Subset-sum distribution, the core of the exact rank-sum test
# ---------------------------------------------------------------------------


@njit(cache=True)
def subset_sum_counts_jit(values, k):
    total = 0
    for v in values:
        total += v
    table = np.zeros((k + 1, total + 1))
    table[0, 0] = 1.0
    for v in values:
        for j in range(k, 0, -1):
            for s in range(total, v - 1, -1):
                table[j, s] += table[j - 1, s - v]
    return table[k].copy()


def subset_sum_counts_np(values, k):
    values = np.asarray(values, dtype=np.int64)
    total = int(values.sum())
    table = np.zeros((k + 1, total + 1))
    table[0, 0] = 1.0
    for v in values:
        v = int(v)
        shifted = table[:-1, : total + 1 - v].copy()
        table[1:, v:] += shifted
    return table[k].copy()


if USE_NUMBA:
    BENCHMARK_KERNELS = BENCHMARK_KERNELS_JIT
    acs_fitness = acs_fitness_jit
    acs_fitness_filtered = acs_fitness_filtered_jit
    halton_points = halton_points_jit
    subset_sum_counts = subset_sum_counts_jit
else:
    BENCHMARK_KERNELS = BENCHMARK_KERNELS_NP
    acs_fitness = acs_fitness_np
    acs_fitness_filtered = acs_fitness_filtered_np
    halton_points = halton_points_np
    subset_sum_counts = subset_sum_counts_np
