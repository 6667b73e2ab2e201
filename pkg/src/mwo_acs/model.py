"""Problem model for adaptive curriculum sequencing (ACS).

An :class:`AcsInstance` bundles students, learning materials, a
prerequisite graph over materials, and the penalty/weight/priority-limit
parameters of the objective. Everything here is immutable once built.

Selection layout
----------------
A candidate solution is a flat vector of length ``t_s * t_m``. It is
decoded student-major: entry ``i * t_m + j`` is the decision "material
``j`` is selected for student ``i``". A value strictly greater than 0.5
decodes to 1.
"""

from __future__ import annotations

import enum
import graphlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

STYLE_DIMS = 4
MAX_CONCEPTS_PER_MATERIAL = 3
MAX_CONCEPTS_PER_STUDENT = 3

DEFAULT_PENALTIES = (1.0, 1e9, 1000.0)
DEFAULT_WEIGHTS = (0.25, 0.25, 0.25)
DEFAULT_PRIORITY_LIMITS = (3, 6, 1)


@dataclass(frozen=True)
class StudentProfile:
    id: int
    required_concepts: frozenset
    ability: float
    time_lower: float
    time_upper: float
    style: tuple


@dataclass(frozen=True)
class LearningMaterial:
    id: int
    concepts: frozenset
    difficulty: float
    duration: float
    style: tuple


@dataclass(frozen=True)
class ConceptGraph:
    """Concept count plus the prerequisite relation between materials.

    ``prerequisite_strength[(j, i)]`` is the strength with which material
    ``j`` is a prerequisite of material ``i``. ``importance`` maps a
    material id to its importance weight. An empty map weighs every
    material 1; a non-empty map must list every material.
    """

    concept_count: int
    prerequisite_strength: dict = field(default_factory=dict)
    importance: dict = field(default_factory=dict)

    def prerequisites(self, material_id):
        """Map of prerequisite id -> strength for ``material_id``."""
        return self._incoming.get(material_id, {})

    def weight(self, material_id):
        return float(self.importance.get(material_id, 1.0))

    @cached_property
    def _incoming(self):
        incoming = {}
        for (j, i), r in self.prerequisite_strength.items():
            incoming.setdefault(i, {})[j] = r
        return incoming


@dataclass(frozen=True)
class AcsInstance:
    students: tuple
    materials: tuple
    graph: ConceptGraph
    penalties: tuple = DEFAULT_PENALTIES
    weights: tuple = DEFAULT_WEIGHTS
    priority_limits: tuple = DEFAULT_PRIORITY_LIMITS

    @property
    def t_s(self):
        return len(self.students)

    @property
    def t_m(self):
        return len(self.materials)

    @property
    def t_c(self):
        return self.graph.concept_count

    @property
    def dim(self):
        return self.t_s * self.t_m

    @cached_property
    def arrays(self):
        """Dense array view used by the fitness kernels."""
        return InstanceArrays.from_instance(self)


class InstanceArrays(NamedTuple):
    mat_concepts: np.ndarray  # (t_m, t_c) uint8
    student_req: np.ndarray  # (t_s, t_c) uint8
    required: np.ndarray  # (t_c,) uint8
    durations: np.ndarray
    t_lo: np.ndarray
    t_hi: np.ndarray
    style_dist: np.ndarray  # (t_s, t_m) L1 style distance
    penalties: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_instance(cls, inst):
        t_c = inst.t_c
        mat_concepts = np.zeros((inst.t_m, t_c), dtype=np.uint8)
        for m in inst.materials:
            mat_concepts[m.id, sorted(m.concepts)] = 1
        student_req = np.zeros((inst.t_s, t_c), dtype=np.uint8)
        for s in inst.students:
            student_req[s.id, sorted(s.required_concepts)] = 1
        p_student = np.array([s.style for s in inst.students], dtype=np.float64)
        p_material = np.array([m.style for m in inst.materials], dtype=np.float64)
        style_dist = np.abs(p_student[:, None, :] - p_material[None, :, :]).sum(axis=2)
        return cls(
            mat_concepts=mat_concepts,
            student_req=student_req,
            required=student_req.max(axis=0).astype(np.uint8),
            durations=np.array([m.duration for m in inst.materials], dtype=np.float64),
            t_lo=np.array([s.time_lower for s in inst.students], dtype=np.float64),
            t_hi=np.array([s.time_upper for s in inst.students], dtype=np.float64),
            style_dist=np.ascontiguousarray(style_dist),
            penalties=np.array(inst.penalties, dtype=np.float64),
            weights=np.array(inst.weights, dtype=np.float64),
        )


class Priority(enum.Enum):
    HIGH = "high"
    MEDIUM = "medium"
    CHALLENGING = "challenging"


class MaterialClass(NamedTuple):
    material_id: int
    priority: Priority
    full_coverage: bool


class Violation(NamedTuple):
    field: str
    rule: str

    def __str__(self):
        return f"{self.field}: {self.rule}"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _in_unit(v):
    return 0.0 <= v <= 1.0


def validate_instance(instance):
    """Check every structural invariant and return a list of violations.

    An empty list means the instance is valid. Nothing is raised.
    """
    out = []
    t_c = instance.graph.concept_count
    concept_ids = set(range(t_c))

    if t_c < 1:
        out.append(Violation("graph.concept_count", "must be at least 1"))
    if instance.dim <= 0:
        out.append(Violation("dim", "students x materials must be positive"))

    psi = tuple(instance.priority_limits)
    if len(psi) != 3:
        out.append(Violation("priority_limits", "expected three limits"))
    elif not (psi[1] > psi[0] > psi[2]):
        out.append(Violation("priority_limits", "must satisfy psi2 > psi1 > psi3"))
    elif any(int(p) != p or p < 0 for p in psi):
        out.append(Violation("priority_limits", "limits must be nonnegative integers"))

    if len(instance.weights) != 3 or any(w < 0 for w in instance.weights):
        out.append(Violation("weights", "three nonnegative weights required"))
    if len(instance.penalties) != 3 or any(e < 0 for e in instance.penalties):
        out.append(Violation("penalties", "three nonnegative penalties required"))

    for pos, s in enumerate(instance.students):
        name = f"students[{pos}]"
        if s.id != pos:
            out.append(Violation(f"{name}.id", "ids must be zero-based and dense"))
        if not s.required_concepts:
            out.append(Violation(f"{name}.required_concepts", "must be nonempty"))
        elif not set(s.required_concepts) <= concept_ids:
            out.append(Violation(f"{name}.required_concepts", "unknown concept id"))
        if not _in_unit(s.ability):
            out.append(Violation(f"{name}.ability", "must lie in [0, 1]"))
        if s.time_lower > s.time_upper:
            out.append(Violation(f"{name}.time_lower", "time range inverted"))
        if len(s.style) != STYLE_DIMS:
            out.append(Violation(f"{name}.style", "must have exactly 4 entries"))
        elif not all(_in_unit(v) for v in s.style):
            out.append(Violation(f"{name}.style", "entries must lie in [0, 1]"))

    for pos, m in enumerate(instance.materials):
        name = f"materials[{pos}]"
        if m.id != pos:
            out.append(Violation(f"{name}.id", "ids must be zero-based and dense"))
        if not m.concepts:
            out.append(Violation(f"{name}.concepts", "must be nonempty"))
        elif not set(m.concepts) <= concept_ids:
            out.append(Violation(f"{name}.concepts", "unknown concept id"))
        if not _in_unit(m.difficulty):
            out.append(Violation(f"{name}.difficulty", "must lie in [0, 1]"))
        if not m.duration > 0:
            out.append(Violation(f"{name}.duration", "must be positive"))
        if len(m.style) != STYLE_DIMS:
            out.append(Violation(f"{name}.style", "must have exactly 4 entries"))
        elif not all(_in_unit(v) for v in m.style):
            out.append(Violation(f"{name}.style", "entries must lie in [0, 1]"))

    t_m = instance.t_m
    sorter = graphlib.TopologicalSorter()
    for (j, i), r in instance.graph.prerequisite_strength.items():
        edge = f"graph.prerequisites[{j}->{i}]"
        if not (0 <= j < t_m and 0 <= i < t_m):
            out.append(Violation(edge, "unknown material id"))
        if not (0.0 < r <= 1.0):
            out.append(Violation(edge, "strength must lie in (0, 1]"))
        sorter.add(i, j)
    try:
        sorter.prepare()
    except graphlib.CycleError:
        out.append(Violation("graph.prerequisites", "prerequisite cycle"))
    importance = instance.graph.importance
    for mid, w in importance.items():
        if not 0 <= mid < t_m:
            out.append(Violation(f"graph.importance[{mid}]", "unknown material id"))
        if w < 0:
            out.append(Violation(f"graph.importance[{mid}]", "must be nonnegative"))
    if importance and len(set(importance) & set(range(t_m))) != t_m:
        out.append(Violation("graph.importance", "must list every material or none"))
    return out


# ---------------------------------------------------------------------------
# Synthetic instances
# ---------------------------------------------------------------------------


def _seeded_concept_sets(rng, n_items, t_c, cap):
    # Round-robin every concept onto a random item first so the union covers 0..t_c-1.
    owner = rng.permutation(n_items)
    sets = [set() for _ in range(n_items)]
    for p, c in enumerate(rng.permutation(t_c)):
        sets[owner[p % n_items]].add(int(c))
    for s in sets:
        target = max(len(s), int(rng.integers(1, min(cap, t_c) + 1)))
        while len(s) < target:
            s.add(int(rng.integers(t_c)))
    return [frozenset(s) for s in sets]


def generate_synthetic_instance(seed, t_s, t_m, t_c, *, penalties=DEFAULT_PENALTIES,
                                weights=DEFAULT_WEIGHTS,
                                priority_limits=DEFAULT_PRIORITY_LIMITS):
    """Build a reproducible random ACS instance.

    Concepts are spread so every concept is taught by at least one material
    and required by at least one student. Each student's time window is
    centred on a witness selection (one material per required concept), so
    a selection with zero time penalty always exists.
    """
    if min(t_s, t_m, t_c) < 1:
        raise ValueError("t_s, t_m and t_c must all be at least 1")
    capacity = min(t_m * MAX_CONCEPTS_PER_MATERIAL, t_s * MAX_CONCEPTS_PER_STUDENT)
    if t_c > capacity:
        raise ValueError(
            f"t_c={t_c} exceeds the {capacity} distinct concepts representable "
            f"with {t_s} students and {t_m} materials"
        )
    rng = np.random.default_rng(seed)

    mat_sets = _seeded_concept_sets(rng, t_m, t_c, MAX_CONCEPTS_PER_MATERIAL)
    difficulty = rng.random(t_m)
    duration = rng.uniform(0.5, 3.0, t_m)
    mat_style = rng.random((t_m, STYLE_DIMS))
    materials = tuple(
        LearningMaterial(j, mat_sets[j], float(difficulty[j]), float(duration[j]),
                         tuple(float(v) for v in mat_style[j]))
        for j in range(t_m)
    )

    req_sets = _seeded_concept_sets(rng, t_s, t_c, MAX_CONCEPTS_PER_STUDENT)
    ability = rng.random(t_s)
    stu_style = rng.random((t_s, STYLE_DIMS))
    teaching = [[j for j in range(t_m) if c in mat_sets[j]] for c in range(t_c)]
    students = []
    for i in range(t_s):
        witness = {int(rng.choice(teaching[c])) for c in sorted(req_sets[i])}
        need = sum(duration[j] for j in witness)
        lo = float(need * rng.uniform(0.6, 0.95))
        hi = float(need * rng.uniform(1.05, 1.5))
        students.append(StudentProfile(i, req_sets[i], float(ability[i]), lo, hi,
                                       tuple(float(v) for v in stu_style[i])))

    # Prerequisites only run from easier to harder materials, so the graph is a DAG.
    by_difficulty = np.argsort(difficulty, kind="stable")
    strengths = {}
    for rank in range(1, t_m):
        i = int(by_difficulty[rank])
        n_pre = min(int(rng.integers(0, 3)), rank)
        if n_pre == 0:
            continue
        picks = rng.choice(rank, size=n_pre, replace=False)
        for p in sorted(int(q) for q in picks):
            j = int(by_difficulty[p])
            strengths[(j, i)] = float(1.0 - 0.9 * rng.random())
    importance = {j: float(w) for j, w in enumerate(rng.uniform(0.5, 1.5, t_m))}

    return AcsInstance(
        students=tuple(students),
        materials=materials,
        graph=ConceptGraph(t_c, strengths, importance),
        penalties=tuple(float(e) for e in penalties),
        weights=tuple(float(w) for w in weights),
        priority_limits=tuple(int(p) for p in priority_limits),
    )


# ---------------------------------------------------------------------------
# Decoding and filtering
# ---------------------------------------------------------------------------


def binarize(position, t_s, t_m):
    """Decode a flat position into a ``(t_s, t_m)`` 0/1 selection matrix."""
    position = np.asarray(position, dtype=np.float64)
    if position.ndim != 1 or position.shape[0] != t_s * t_m:
        raise ValueError(
            f"position has shape {position.shape}, expected ({t_s * t_m},)"
        )
    return (position > 0.5).astype(np.uint8).reshape(t_s, t_m)


def classify_materials(instance, student_index):
    """Assign every material a priority class for one student.

    Materials come back sorted by ascending difficulty, ties broken by id.
    """
    if not 0 <= student_index < instance.t_s:
        raise IndexError(f"student index {student_index} out of range")
    student = instance.students[student_index]
    need = student.required_concepts
    ordered = sorted(instance.materials, key=lambda m: (m.difficulty, m.id))
    out = []
    for m in ordered:
        full = need <= m.concepts
        if m.difficulty > student.ability:
            cls = Priority.CHALLENGING
        elif full:
            cls = Priority.HIGH
        else:
            cls = Priority.MEDIUM
        out.append(MaterialClass(m.id, cls, full))
    return out


# ---------------------------------------------------------------------------
# JSON I/O
# ---------------------------------------------------------------------------


def instance_to_dict(instance):
    g = instance.graph
    return {
        "students": [
            {
                "id": s.id,
                "required_concepts": sorted(s.required_concepts),
                "ability": s.ability,
                "time_lower": s.time_lower,
                "time_upper": s.time_upper,
                "style": list(s.style),
            }
            for s in instance.students
        ],
        "materials": [
            {
                "id": m.id,
                "concepts": sorted(m.concepts),
                "difficulty": m.difficulty,
                "duration": m.duration,
                "style": list(m.style),
            }
            for m in instance.materials
        ],
        "graph": {
            "concept_count": g.concept_count,
            "prerequisites": [
                {"from": j, "to": i, "strength": r}
                for (j, i), r in sorted(g.prerequisite_strength.items())
            ],
            "importance": {str(k): v for k, v in sorted(g.importance.items())},
        },
        "penalties": list(instance.penalties),
        "weights": list(instance.weights),
        "priority_limits": list(instance.priority_limits),
    }


def instance_from_dict(doc):
    try:
        students = tuple(
            StudentProfile(
                int(s["id"]), frozenset(int(c) for c in s["required_concepts"]),
                float(s["ability"]), float(s["time_lower"]), float(s["time_upper"]),
                tuple(float(v) for v in s["style"]),
            )
            for s in doc["students"]
        )
        materials = tuple(
            LearningMaterial(
                int(m["id"]), frozenset(int(c) for c in m["concepts"]),
                float(m["difficulty"]), float(m["duration"]),
                tuple(float(v) for v in m["style"]),
            )
            for m in doc["materials"]
        )
        g = doc["graph"]
        graph = ConceptGraph(
            int(g["concept_count"]),
            {(int(e["from"]), int(e["to"])): float(e["strength"]) for e in g.get("prerequisites", [])},
            {int(k): float(v) for k, v in g.get("importance", {}).items()},
        )
        return AcsInstance(
            students, materials, graph,
            penalties=tuple(float(e) for e in doc.get("penalties", DEFAULT_PENALTIES)),
            weights=tuple(float(w) for w in doc.get("weights", DEFAULT_WEIGHTS)),
            priority_limits=tuple(int(p) for p in doc.get("priority_limits", DEFAULT_PRIORITY_LIMITS)),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed instance document: {exc!r}") from exc


def save_instance(instance, path):
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=2) + "\n")


def load_instance(path):
    return instance_from_dict(json.loads(Path(path).read_text()))
