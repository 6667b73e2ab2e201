"""Per-student course material selection and ordering with an elite-guided
walrus optimizer.

Subpackages of interest:

* :mod:`mwo_acs.model` - students, materials, concept graph, instances
* :mod:`mwo_acs.objective` - penalty fitness of a material selection
* :mod:`mwo_acs.optimizer` - the optimizer and its WO ablation
* :mod:`mwo_acs.benchmarks` - test functions TF1-TF9
* :mod:`mwo_acs.sequencer` - learning sequences and their quality metrics
* :mod:`mwo_acs.stats` / :mod:`mwo_acs.campaign` - repeated runs and statistics

Numeric kernels run under numba when available; set ``MWO_ACS_BACKEND=numpy``
before import to force the pure-numpy versions.
"""

from ._jit import BACKEND
from .benchmarks import BenchmarkFunction, catalog, evaluate
from .model import (
    AcsInstance,
    ConceptGraph,
    LearningMaterial,
    StudentProfile,
    binarize,
    classify_materials,
    generate_synthetic_instance,
    load_instance,
    save_instance,
    validate_instance,
)
from .objective import AcsObjective, FitnessBreakdown, fitness
from .optimizer import OptimizerConfig, RunRecord, optimize
from .sequencer import SequenceParams, build_sequence, evaluate_sequence
from .stats import summarize, wilcoxon_rank_sum

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AcsInstance",
    "AcsObjective",
    "BenchmarkFunction",
    "ConceptGraph",
    "FitnessBreakdown",
    "LearningMaterial",
    "OptimizerConfig",
    "RunRecord",
    "SequenceParams",
    "StudentProfile",
    "binarize",
    "build_sequence",
    "catalog",
    "classify_materials",
    "evaluate",
    "evaluate_sequence",
    "fitness",
    "generate_synthetic_instance",
    "load_instance",
    "optimize",
    "save_instance",
    "summarize",
    "validate_instance",
    "wilcoxon_rank_sum",
]
