"""Multi-window vector-valued Gabor frames on periodic subsets of the integers."""

from .admissibility import (
    AdmissibilityReport,
    admissibility_report,
    basis_admissible,
    cardinality_necessary,
    frame_admissible,
    min_windows,
)
from .frames import FrameReport, GramField, Tolerances, analyze, frame_bounds, gram_field
from .lattice import GaborGeometry, PeriodicSet, k_set, reduce_geometry
from .synthesis import NotAdmissible, SynthesisPlan, UnsupportedChannelCount, plan, synthesize, verify_synthesis
from .zak import SparseSequence, ThetaGrid

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "FrameReport",
    "GaborGeometry",
    "GramField",
    "NotAdmissible",
    "PeriodicSet",
    "SparseSequence",
    "SynthesisPlan",
    "ThetaGrid",
    "Tolerances",
    "UnsupportedChannelCount",
    "admissibility_report",
    "analyze",
    "basis_admissible",
    "cardinality_necessary",
    "frame_admissible",
    "frame_bounds",
    "gram_field",
    "k_set",
    "min_windows",
    "plan",
    "reduce_geometry",
    "synthesize",
    "verify_synthesis",
]
