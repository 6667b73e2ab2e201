import csv
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mwo_acs.model import ConceptGraph, classify_materials, generate_synthetic_instance
from mwo_acs.sequencer import (
    LearningSequence, SequenceParams, build_all_sequences, build_sequence, challenge_score,
    combined_score, evaluate_sequence, medium_score, priority_score, sequence_report,
    write_difficulty_csv,
)

from conftest import make_instance

P = SequenceParams()


def test_priority_examples():
    g = ConceptGraph(1, {(0, 2): 0.5, (1, 2): 0.25}, {0: 1.0, 1: 1.0, 2: 2.0, 3: 0.0, 4: 3.0})
    assert priority_score(2, g) == 1.5
    assert priority_score(3, g) == 0.0
    assert priority_score(4, g) == 3.0
    with pytest.raises(KeyError):
        priority_score(9, g)
    with pytest.raises(KeyError):
        priority_score(-1, ConceptGraph(1))


def test_medium_examples():
    assert medium_score(0.6, 5.0, SequenceParams(lam=1.0), 3.0) == 0.6
    assert medium_score(0.6, 1.5, SequenceParams(lam=0.0), 3.0) == 0.5
    assert medium_score(0.6, 0.6, SequenceParams(lam=0.5), 3.0) == pytest.approx(0.4)
    with pytest.raises(ValueError):
        medium_score(0.5, 1.0, P, 0.0)


def test_challenge_examples():
    assert challenge_score(0.7, 3, 1, 10**6, 10) == pytest.approx(0.7, abs=1e-5)
    assert math.exp(-1) == pytest.approx(0.3679, abs=1e-4)
    assert challenge_score(1.0, 0, 4, 4, 10) == pytest.approx(math.exp(-1))
    k_half = math.log(2)  # exp(-k/K) = 0.5 with k/K = ln 2
    assert challenge_score(0.8, 0, k_half * 1000, 1000, 10) == pytest.approx(0.4)
    with pytest.raises(ValueError):
        challenge_score(0.5, 0, 1, 0, 10)
    with pytest.raises(ValueError):
        challenge_score(0.5, 0, 3, 2, 10)


def test_combined_examples():
    assert combined_score(1, 2, 3, SequenceParams(alpha=(1, 0, 0))) == 1
    assert combined_score(1, 2, 3, SequenceParams(alpha=(0, 0, 1))) == 3
    assert combined_score(1, 2, 3, P) == pytest.approx(1.7)


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10), st.floats(-5, 5))
def test_combined_linear(p, m, c, k):
    assert combined_score(k * p, k * m, k * c, P) == pytest.approx(k * combined_score(p, m, c, P),
                                                                  abs=1e-9)


def test_params_validation():
    with pytest.raises(ValueError):
        SequenceParams(alpha=(0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        SequenceParams(lam=2.0)
    with pytest.raises(ValueError):
        SequenceParams(challenge_norm="both")


def test_singleton_sequence():
    inst = make_instance([({0}, .5, 0, 9)], [({0}, .3, 1.0), ({0}, .3, 1.0)], 1)
    seq = build_sequence(np.array([[1, 0]]), inst, P, 0)
    assert seq.materials == (0,) and len(seq) == 1


def test_prerequisite_precedes_even_when_scored_lower():
    # b (id 1) depends on a (id 0) and therefore has the larger priority score
    inst = make_instance([({0}, .9, 0, 9)], [({0}, .3, 1.0), ({0}, .4, 1.0)], 1,
                         edges={(0, 1): 1.0}, importance={0: 0.1, 1: 5.0})
    seq = build_sequence(np.array([[1, 1]]), inst, P, 0)
    assert seq.scores[1].combined > seq.scores[0].combined
    assert seq.materials == (0, 1)


def test_high_class_cap_keeps_top_scores():
    mats = [({0}, 0.01 * (j + 1), 1.0) for j in range(10)]
    imp = {j: float(w) for j, w in enumerate([3, 9, 1, 7, 5, 2, 8, 4, 6, 0.5])}
    inst = make_instance([({0}, .9, 0, 99)], mats, 1, importance=imp)
    seq = build_sequence(np.ones((1, 10)), inst, P, 0)
    assert seq.classes == ("high",) * 3
    # sort-and-truncate oracle on the combined scores
    scores = {}
    for k, j in enumerate(sorted(range(10), key=lambda j: (mats[j][1], j)), start=1):
        p = imp[j]
        m = 0.5 * mats[j][1] + 0.5 * 1.0
        b = math.exp(-k / 10)
        c = b * mats[j][1]
        scores[j] = 0.5 * p + 0.3 * m + 0.2 * c
    top = sorted(scores, key=lambda j: (-scores[j], j))[:3]
    assert set(seq.materials) == set(top) == {1, 6, 3}
    assert list(seq.materials) == top


def test_norm_selected_changes_challenge():
    inst = make_instance([({0}, .9, 0, 99)], [({0}, .2, 1.0), ({0}, .3, 1.0)] + [({1}, .5, 1.0)] * 8,
                         2, edges={(0, 1): 1.0})
    sel = np.zeros((1, 10))
    sel[0, :2] = 1
    a = build_sequence(sel, inst, SequenceParams(challenge_norm="catalog"), 0)
    b = build_sequence(sel, inst, SequenceParams(challenge_norm="selected"), 0)
    assert a.scores[1].challenge < b.scores[1].challenge


def test_build_shape_error(small_instance):
    with pytest.raises(ValueError):
        build_sequence(np.ones((1, 1)), small_instance, P, 0)


@given(seed=st.integers(0, 2**32 - 1), density=st.floats(0.0, 1.0))
def test_sequence_invariants(seed, density):
    inst = generate_synthetic_instance(seed % 50, 4, 20, 6)
    sel = (np.random.default_rng(seed).random((4, 20)) < density).astype(np.uint8)
    seqs = build_all_sequences(sel, inst)
    again = build_all_sequences(sel, inst)
    assert seqs == again
    for i, seq in enumerate(seqs):
        assert set(seq.materials) <= set(np.flatnonzero(sel[i]).tolist())
        counts = [seq.classes.count(c) for c in ("high", "medium", "challenging")]
        assert all(c <= lim for c, lim in zip(counts, inst.priority_limits))
        met = evaluate_sequence(seq, inst, P, i)
        assert met.prerequisite_compliance == 100.0
        shuffled = LearningSequence(seq.student_id, tuple(reversed(seq.materials)),
                                    seq.classes, seq.scores)
        assert evaluate_sequence(shuffled, inst, P, i).coverage_rate == met.coverage_rate


def _seq(ids):
    return LearningSequence(0, tuple(ids), (), ())


def test_metric_examples():
    inst = make_instance([({0, 1}, .5, 2.0, 3.5)],
                         [({0}, .1, 1.0), ({1}, .3, 1.5), ({2}, .45, 1.0), ({1}, .9, 2.0)], 3,
                         edges={(0, 1): 1.0})
    m = evaluate_sequence(_seq([0, 1, 2]), inst, P, 0)
    assert m.difficulty_progression == 100.0
    assert m.difficulty_alignment == 100.0
    assert m.coverage_rate == 100.0
    assert m.time_satisfaction is True
    assert m.prerequisite_compliance == 100.0

    bad = evaluate_sequence(_seq([1, 0, 3]), inst, P, 0)
    assert bad.prerequisite_compliance == 0.0
    assert bad.difficulty_progression == 50.0
    assert bad.difficulty_alignment == pytest.approx(200 / 3)
    assert bad.time_satisfaction is False

    half = evaluate_sequence(_seq([2]), inst, P, 0)
    assert half.coverage_rate == 0.0
    empty = evaluate_sequence(_seq([]), inst, P, 0)
    assert empty.difficulty_progression == empty.difficulty_alignment == 100.0
    # slack tau: a 0.04 drop is tolerated, 0.06 is not
    tau = make_instance([({0}, .9, 0, 9)], [({0}, .50, 1.0), ({0}, .46, 1.0), ({0}, .40, 1.0)], 1)
    assert evaluate_sequence(_seq([0, 1]), tau, P, 0).difficulty_progression == 100.0
    assert evaluate_sequence(_seq([1, 2]), tau, P, 0).difficulty_progression == 0.0


def test_report_and_csv(tmp_path, small_instance):
    sel = np.ones((small_instance.t_s, small_instance.t_m), dtype=np.uint8)
    rep = sequence_report(sel, small_instance)
    assert len(rep["students"]) == small_instance.t_s
    assert set(rep["students"][0]["metrics"]) == {
        "coverage_rate", "difficulty_progression", "difficulty_alignment",
        "time_satisfaction", "prerequisite_compliance"}
    out = tmp_path / "d.csv"
    write_difficulty_csv(rep, small_instance, out)
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == sum(len(s["sequence"]) for s in rep["students"])
    first = rows[0]
    assert float(first["difficulty"]) == small_instance.materials[int(first["material"])].difficulty


def test_classes_match_classifier(small_instance):
    sel = np.ones((small_instance.t_s, small_instance.t_m), dtype=np.uint8)
    for i, seq in enumerate(build_all_sequences(sel, small_instance)):
        cls = {mc.material_id: mc.priority.value for mc in classify_materials(small_instance, i)}
        assert all(cls[j] == c for j, c in zip(seq.materials, seq.classes))
