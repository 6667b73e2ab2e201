import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mwo_acs.model import (AcsInstance, ConceptGraph, LearningMaterial,
                           StudentProfile, generate_synthetic_instance)

settings.register_profile(
    "repo", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


def make_instance(students, materials, t_c, edges=None, importance=None, **kw):
    """Build an instance from compact tuples.

    students:  (concepts, ability, lo, hi[, style])
    materials: (concepts, difficulty, duration[, style])
    """
    s_objs = []
    for i, s in enumerate(students):
        style = s[4] if len(s) > 4 else (0.5, 0.5, 0.5, 0.5)
        s_objs.append(StudentProfile(i, frozenset(s[0]), s[1], s[2], s[3], tuple(style)))
    m_objs = []
    for j, m in enumerate(materials):
        style = m[3] if len(m) > 3 else (0.5, 0.5, 0.5, 0.5)
        m_objs.append(LearningMaterial(j, frozenset(m[0]), m[1], m[2], tuple(style)))
    graph = ConceptGraph(t_c, dict(edges or {}), dict(importance or {}))
    return AcsInstance(tuple(s_objs), tuple(m_objs), graph, **kw)


@pytest.fixture(scope="session")
def small_instance():
    return generate_synthetic_instance(7, 4, 12, 6)


@pytest.fixture(scope="session")
def paper_scale_instance():
    return generate_synthetic_instance(42, 30, 150, 20)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
