"""Turn a material selection into ordered per-student learning sequences.

For one student the selected materials are classified (high / medium /
challenging), sorted by ascending difficulty, and scored::

    P = importance * sum of incoming prerequisite strengths   (1 if none)
    M = lam * difficulty + (1 - lam) * duration / longest_duration
    C = b * difficulty + (1 - b) * n_prerequisites / norm,   b = exp(-k / K)
    S = a1 * P + a2 * M + a3 * C

where ``k`` is the 1-based position in the difficulty-sorted selection and
``K`` its length. Each class keeps its top-scoring members up to the
instance's priority limits. The survivors are emitted by descending ``S``
(ties: ascending id) with the constraint that a material never appears
before one of its in-sequence prerequisites.

The quality metrics are simple, explicit definitions:

* coverage rate: share of the student's required concepts taught;
* difficulty progression: share of adjacent pairs whose difficulty does
  not drop by more than ``progression_tolerance``;
* difficulty alignment: share of materials with
  ``difficulty <= ability + alignment_margin``;
* time satisfaction: total duration within the student's window;
* prerequisite compliance: share of in-sequence prerequisite pairs in order.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .model import Priority, classify_materials

CLASS_ORDER = (Priority.HIGH, Priority.MEDIUM, Priority.CHALLENGING)


@dataclass(frozen=True)
class SequenceParams:
    lam: float = 0.5
    alpha: tuple = (0.5, 0.3, 0.2)
    progression_tolerance: float = 0.05
    alignment_margin: float = 0.0
    challenge_norm: str = "catalog"

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if len(self.alpha) != 3 or abs(sum(self.alpha) - 1.0) > 1e-9:
            raise ValueError("alpha must have three entries summing to 1")
        if self.progression_tolerance < 0:
            raise ValueError("progression_tolerance must be nonnegative")
        if self.challenge_norm not in ("catalog", "selected"):
            raise ValueError("challenge_norm must be 'catalog' or 'selected'")


class ScoreRow(NamedTuple):
    priority: float
    medium: float
    challenge: float
    combined: float


@dataclass(frozen=True)
class LearningSequence:
    student_id: int
    materials: tuple
    classes: tuple
    scores: tuple

    def __len__(self):
        return len(self.materials)


@dataclass(frozen=True)
class SequenceMetrics:
    coverage_rate: float
    difficulty_progression: float
    difficulty_alignment: float
    time_satisfaction: bool
    prerequisite_compliance: float

    def to_dict(self):
        return asdict(self)


# ---------------------------------------------------------------------------
# Scores
# ---------------------------------------------------------------------------


def priority_score(material_id, graph):
    """Importance times the summed incoming prerequisite strength.

    A material without prerequisites counts the sum as 1, so roots keep
    their importance ordering instead of all scoring zero.
    """
    if material_id < 0 or (graph.importance and material_id not in graph.importance):
        raise KeyError(f"unknown material id {material_id}")
    pre = graph.prerequisites(material_id)
    strength = sum(pre.values()) if pre else 1.0
    return graph.weight(material_id) * strength


def medium_score(difficulty, duration, params, t_max_time):
    if t_max_time <= 0:
        raise ValueError("t_max_time must be positive")
    return params.lam * difficulty + (1.0 - params.lam) * duration / t_max_time


def challenge_score(difficulty, n_prerequisites, k, K, norm):
    if K <= 0:
        raise ValueError("sequence length K must be positive")
    if not 1 <= k <= K:
        raise ValueError("position k must satisfy 1 <= k <= K")
    b = math.exp(-k / K)
    return b * difficulty + (1.0 - b) * n_prerequisites / norm


def combined_score(p, m, c, params):
    a1, a2, a3 = params.alpha
    if abs(a1 + a2 + a3 - 1.0) > 1e-9:
        raise ValueError("alpha weights must sum to 1")
    return a1 * p + a2 * m + a3 * c


# ---------------------------------------------------------------------------
# Building and evaluating sequences
# ---------------------------------------------------------------------------


def _topological_by_score(ids, scores, graph):
    members = set(ids)
    blockers = {i: {j for j in graph.prerequisites(i) if j in members} for i in ids}
    dependants = {i: [] for i in ids}
    for i, pre in blockers.items():
        for j in pre:
            dependants[j].append(i)
    remaining = {i: len(pre) for i, pre in blockers.items()}
    heap = [(-scores[i], i) for i in ids if remaining[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, i = heapq.heappop(heap)
        order.append(i)
        for d in dependants[i]:
            remaining[d] -= 1
            if remaining[d] == 0:
                heapq.heappush(heap, (-scores[d], d))
    if len(order) != len(ids):
        raise ValueError("prerequisite cycle among selected materials")
    return order


def build_sequence(selection, instance, params, student_index):
    """Ordered, class-capped learning sequence for one student."""
    selection = np.asarray(selection)
    if selection.shape != (instance.t_s, instance.t_m):
        raise ValueError("selection shape does not match the instance")
    row = selection[student_index]
    graph = instance.graph
    chosen = [mc for mc in classify_materials(instance, student_index) if row[mc.material_id]]
    K = len(chosen)
    longest = max(m.duration for m in instance.materials)
    norm = instance.t_m if params.challenge_norm == "catalog" else max(K, 1)

    scored = {}
    for k, mc in enumerate(chosen, start=1):
        m = instance.materials[mc.material_id]
        p = priority_score(m.id, graph)
        med = medium_score(m.difficulty, m.duration, params, longest)
        ch = challenge_score(m.difficulty, len(graph.prerequisites(m.id)), k, K, norm)
        scored[m.id] = ScoreRow(p, med, ch, combined_score(p, med, ch, params))

    limits = dict(zip(CLASS_ORDER, instance.priority_limits))
    kept = {}
    for cls in CLASS_ORDER:
        members = [mc.material_id for mc in chosen if mc.priority is cls]
        members.sort(key=lambda i: (-scored[i].combined, i))
        for i in members[: limits[cls]]:
            kept[i] = cls

    combined = {i: scored[i].combined for i in kept}
    order = _topological_by_score(sorted(kept), combined, graph)
    return LearningSequence(
        student_id=instance.students[student_index].id,
        materials=tuple(order),
        classes=tuple(kept[i].value for i in order),
        scores=tuple(scored[i] for i in order),
    )


def build_all_sequences(selection, instance, params=None):
    params = params or SequenceParams()
    return [build_sequence(selection, instance, params, i) for i in range(instance.t_s)]


def evaluate_sequence(sequence, instance, params, student_index):
    student = instance.students[student_index]
    mats = [instance.materials[i] for i in sequence.materials]

    taught = set()
    for m in mats:
        taught |= m.concepts
    need = student.required_concepts
    coverage = 100.0 * len(taught & need) / len(need) if need else 100.0

    diffs = [m.difficulty for m in mats]
    pairs = list(zip(diffs, diffs[1:]))
    if pairs:
        smooth = sum(1 for a, b in pairs if b >= a - params.progression_tolerance)
        progression = 100.0 * smooth / len(pairs)
    else:
        progression = 100.0

    if mats:
        aligned = sum(1 for m in mats if m.difficulty <= student.ability + params.alignment_margin)
        alignment = 100.0 * aligned / len(mats)
    else:
        alignment = 100.0

    total = sum(m.duration for m in mats)
    on_time = student.time_lower <= total <= student.time_upper

    position = {mid: k for k, mid in enumerate(sequence.materials)}
    checked = ok = 0
    for i in sequence.materials:
        for j in instance.graph.prerequisites(i):
            if j in position:
                checked += 1
                ok += position[j] < position[i]
    compliance = 100.0 * ok / checked if checked else 100.0

    return SequenceMetrics(coverage, progression, alignment, bool(on_time), compliance)


def sequence_report(selection, instance, params=None):
    """JSON-ready report: one entry per student with sequence and metrics."""
    params = params or SequenceParams()
    students = []
    for i in range(instance.t_s):
        seq = build_sequence(selection, instance, params, i)
        students.append({
            "student": seq.student_id,
            "sequence": list(seq.materials),
            "classes": list(seq.classes),
            "metrics": evaluate_sequence(seq, instance, params, i).to_dict(),
        })
    return {"params": asdict(params), "students": students}


def write_difficulty_csv(report, instance, path):
    """Plot-ready ``student,position,material,difficulty`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["student", "position", "material", "difficulty"])
        for entry in report["students"]:
            for k, mid in enumerate(entry["sequence"], start=1):
                w.writerow([entry["student"], k, mid, repr(instance.materials[mid].difficulty)])
