"""Penalty-based fitness of a material selection.

The fitness combines three penalties with the instance weights::

    F = w1 * O1 + w2 * O2 + w3 * O3

* ``O1`` concept coverage: ``e1 * redundant + e2 * missing`` where the
  covered set is the union over every selected material of every student
  and the required set is the union of all students' requirements.
* ``O2`` time: ``e3`` per student whose selected total duration falls
  outside that student's window.
* ``O3`` style: L1 distance between a student's style vector and each
  material selected for that student.

With ``per_student=True`` the coverage term is evaluated row by row
against each student's own requirement set and summed.

With ``filtered=True`` each student's row is first reduced to the
class-capped subset that :func:`mwo_acs.sequencer.build_sequence` would
keep (top combined scores per priority class, up to the instance limits),
and all three penalties are computed on that subset. The optimizer then
scores exactly what a student will be handed.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from .model import binarize, classify_materials
from .sequencer import (CLASS_ORDER, SequenceParams, medium_score,
                        priority_score)


class FitnessBreakdown(NamedTuple):
    o1: float
    o2: float
    o3: float
    total: float


def _check_selection(selection, instance):
    selection = np.asarray(selection)
    if selection.shape != (instance.t_s, instance.t_m):
        raise ValueError(
            f"selection has shape {selection.shape}, "
            f"expected ({instance.t_s}, {instance.t_m})"
        )
    return selection.astype(bool)


def covered_concepts(selection, instance):
    sel = _check_selection(selection, instance)
    picked = np.flatnonzero(sel.any(axis=0))
    out = set()
    for j in picked:
        out |= instance.materials[j].concepts
    return frozenset(out)


def required_concepts(instance):
    out = set()
    for s in instance.students:
        out |= s.required_concepts
    return frozenset(out)


def coverage_penalty(selection, instance, per_student=False):
    e1, e2, _ = instance.penalties
    sel = _check_selection(selection, instance)
    if per_student:
        total = 0.0
        for s in instance.students:
            have = set()
            for j in np.flatnonzero(sel[s.id]):
                have |= instance.materials[j].concepts
            common = len(have & s.required_concepts)
            total += e1 * (len(have) - common) + e2 * (len(s.required_concepts) - common)
        return total
    covered = covered_concepts(sel, instance)
    required = required_concepts(instance)
    common = len(covered & required)
    return e1 * (len(covered) - common) + e2 * (len(required) - common)


def time_penalty(selection, instance):
    sel = _check_selection(selection, instance)
    arr = instance.arrays
    totals = sel.astype(np.float64) @ arr.durations
    violations = np.count_nonzero((totals < arr.t_lo) | (totals > arr.t_hi))
    return instance.penalties[2] * violations


def style_penalty(selection, instance):
    sel = _check_selection(selection, instance)
    return float(np.sum(instance.arrays.style_dist[sel]))


def fitness(position, instance, per_student=False, filtered=False, params=None):
    """Full breakdown for one continuous position (decoded at 0.5)."""
    binarize(position, instance.t_s, instance.t_m)  # shape check
    row = np.asarray(position, dtype=np.float64)[None, :]
    obj = AcsObjective(instance, per_student, filtered=filtered, params=params)
    o1, o2, o3, total = obj.batch_breakdown(row)[0]
    return FitnessBreakdown(float(o1), float(o2), float(o3), float(total))


def breakdown_of_selection(selection, instance, per_student=False):
    """Component-by-component breakdown of an explicit 0/1 matrix."""
    o1 = coverage_penalty(selection, instance, per_student)
    o2 = time_penalty(selection, instance)
    o3 = style_penalty(selection, instance)
    w1, w2, w3 = instance.weights
    return FitnessBreakdown(o1, o2, o3, w1 * o1 + w2 * o2 + w3 * o3)


class FilterArrays(NamedTuple):
    order: np.ndarray  # material ids by (difficulty, id)
    classes: np.ndarray  # (t_s, t_m) int8 index into CLASS_ORDER
    p_score: np.ndarray
    m_score: np.ndarray
    difficulty: np.ndarray
    n_pre: np.ndarray
    alpha: np.ndarray
    limits: np.ndarray
    norm: float  # catalog size, or -1 to normalise by the selection size


def filter_arrays(instance, params=None):
    """Per-material score tables matching the sequencer's class filter."""
    params = params or SequenceParams()
    graph = instance.graph
    mats = instance.materials
    longest = max(m.duration for m in mats)
    code = {cls: c for c, cls in enumerate(CLASS_ORDER)}
    classes = np.empty((instance.t_s, instance.t_m), dtype=np.int8)
    for i in range(instance.t_s):
        for mc in classify_materials(instance, i):
            classes[i, mc.material_id] = code[mc.priority]
    order = sorted(range(instance.t_m), key=lambda j: (mats[j].difficulty, j))
    return FilterArrays(
        order=np.array(order, dtype=np.int64),
        classes=classes,
        p_score=np.array([priority_score(m.id, graph) for m in mats]),
        m_score=np.array([medium_score(m.difficulty, m.duration, params, longest) for m in mats]),
        difficulty=np.array([m.difficulty for m in mats]),
        n_pre=np.array([float(len(graph.prerequisites(m.id))) for m in mats]),
        alpha=np.array(params.alpha, dtype=np.float64),
        limits=np.array(instance.priority_limits, dtype=np.int64),
        norm=float(instance.t_m) if params.challenge_norm == "catalog" else -1.0,
    )


def filtered_selection(position, instance, params=None):
    """0/1 matrix of the class-capped selection encoded by ``position``."""
    binarize(position, instance.t_s, instance.t_m)  # shape check
    f = filter_arrays(instance, params)
    row = np.asarray(position, dtype=np.float64)[None, :]
    kept = kernels.filtered_selection_np(row, instance.t_s, instance.t_m, *f)
    return kept[0].astype(np.uint8)


class AcsObjective:
    """Callable objective over continuous positions in ``[0, 1]^dim``.

    ``obj(x)`` scores one position; ``obj.batch(X)`` scores the rows of a
    population matrix through the fitness kernel.

    Parameters
    ----------
    instance : AcsInstance
    per_student : bool
        Score coverage against each student's own requirements.
    filtered : bool
        Score the class-capped subset of each row instead of the raw row.
    params : SequenceParams, optional
        Score parameters for the filter; defaults match the sequencer.
    """

    def __init__(self, instance, per_student=False, filtered=False, params=None):
        self.instance = instance
        self.per_student = bool(per_student)
        self.filtered = bool(filtered)
        self.params = params or SequenceParams()
        self._filter = filter_arrays(instance, self.params) if self.filtered else None
        self.dim = instance.dim
        self.lower = 0.0
        self.upper = 1.0

    def batch_breakdown(self, positions):
        positions = np.ascontiguousarray(positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != self.dim:
            raise ValueError(f"positions must have shape (n, {self.dim})")
        a = self.instance.arrays
        args = (
            positions, self.instance.t_s, self.instance.t_m,
            a.mat_concepts, a.student_req, a.required, a.durations,
            a.t_lo, a.t_hi, a.style_dist, a.penalties, a.weights, self.per_student,
        )
        if self.filtered:
            return kernels.acs_fitness_filtered(*args, *self._filter)
        return kernels.acs_fitness(*args)

    def batch(self, positions):
        return self.batch_breakdown(positions)[:, 3]

    def __call__(self, x):
        return float(self.batch(np.asarray(x, dtype=np.float64)[None, :])[0])
