"""codecat: software-category inference for object-oriented codebases.

Categorizes classes/interfaces of a dependency graph by propagating
category constraints to a fixpoint, checks dependency rules, and reports
generation candidates for model-driven development pipelines.
"""

from .errors import CodecatError
from .extractor import ExtractionConfig, ExtractionResult, extract_from_source
from .graph import (
    CodeUnit,
    DependencyEdge,
    DependencyGraph,
    DependencyKind,
    add_naming_edges,
    filter_by_kind,
    graph_from_doc,
    graph_to_doc,
    load_graph,
)
from .inference import (
    CandidateReport,
    InferenceState,
    PropagationReport,
    SeedAssignment,
    ViolationReport,
    check_violations,
    generation_candidates,
    init_state,
    oracle_enumerate,
)
from .lattice import (
    Category,
    CategoryLattice,
    DependencyMatrix,
    Refinement,
    build_lattice,
    lattice_from_doc,
    lattice_to_doc,
)

__version__ = "0.1.0"

__all__ = [
    "Category",
    "CategoryLattice",
    "CandidateReport",
    "CodeUnit",
    "CodecatError",
    "DependencyEdge",
    "DependencyGraph",
    "DependencyKind",
    "DependencyMatrix",
    "ExtractionConfig",
    "ExtractionResult",
    "InferenceState",
    "PropagationReport",
    "Refinement",
    "SeedAssignment",
    "ViolationReport",
    "add_naming_edges",
    "build_lattice",
    "check_violations",
    "extract_from_source",
    "filter_by_kind",
    "generation_candidates",
    "graph_from_doc",
    "graph_to_doc",
    "init_state",
    "lattice_from_doc",
    "lattice_to_doc",
    "load_graph",
    "oracle_enumerate",
]
