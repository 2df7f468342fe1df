"""Document builders shared by the CLI and the session service.

Both front ends serialize through dump_doc, so identical states always
produce byte-identical report payloads. Exports embed the lattice, graph,
and seeds, making them self-contained and re-importable.
"""

from __future__ import annotations

import json

from .errors import DocumentParseError
from .graph import DependencyGraph, graph_from_doc, graph_to_doc
from .inference import (
    CandidateReport,
    InferenceState,
    NarrowingStep,
    PropagationReport,
    SeedAssignment,
    ViolationReport,
    seeds_from_doc,
    seeds_to_doc,
)
from .lattice import CategoryLattice, lattice_from_doc, lattice_to_doc


def dump_doc(doc: dict) -> str:
    """Canonical JSON serialization: sorted keys, two-space indent, final
    newline. The single source of report bytes for CLI and HTTP."""
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def candidate_report_doc(report: CandidateReport) -> dict:
    def entry(e):
        return {
            "unit": e.unit,
            "candidates": sorted(e.candidates),
            "resolved": e.resolved,
            "category": e.category,
        }

    return {
        "specific": list(report.specific),
        "definite": [entry(e) for e in report.entries if e.tier == "definite"],
        "possible": [entry(e) for e in report.entries if e.tier == "possible"],
        "none": [entry(e) for e in report.entries if e.tier == "none"],
    }


def violation_report_doc(report: ViolationReport) -> dict:
    return {
        "violations": [
            {
                "from": v.src,
                "to": v.dst,
                "kind": v.kind,
                "location": v.location,
                "from_category": v.from_category,
                "to_category": v.to_category,
            }
            for v in report.violations
        ]
    }


def narrowing_step_doc(step: NarrowingStep) -> dict:
    return {
        "unit": step.unit,
        "removed": sorted(step.removed),
        "direction": step.direction,
        "neighbor": step.neighbor,
        "neighbor_candidates": (
            sorted(step.neighbor_candidates)
            if step.neighbor_candidates is not None
            else None
        ),
        "edge": (
            {"from": step.edge[0], "to": step.edge[1], "kind": step.edge[2]}
            if step.edge is not None
            else None
        ),
    }


def _narrowing_step_from_doc(doc: dict) -> NarrowingStep:
    edge = doc.get("edge")
    return NarrowingStep(
        unit=doc["unit"],
        removed=frozenset(doc["removed"]),
        direction=doc["direction"],
        neighbor=doc.get("neighbor"),
        neighbor_candidates=(
            frozenset(doc["neighbor_candidates"])
            if doc.get("neighbor_candidates") is not None
            else None
        ),
        edge=(edge["from"], edge["to"], edge["kind"]) if edge else None,
    )


def state_export_doc(state: InferenceState) -> dict:
    return {
        "lattice": lattice_to_doc(state.lattice),
        "graph": graph_to_doc(state.graph),
        "seeds": seeds_to_doc(state.seeds),
        "iteration": state.iteration,
        "candidates": {u: sorted(c) for u, c in sorted(state.candidates.items())},
        "conflicts": [c.unit for c in state.conflicts()],
        "narrowing_log": [narrowing_step_doc(s) for s in state.narrowing_log],
    }


_EXPORT_FIELDS = {
    "lattice", "graph", "seeds", "iteration", "candidates", "conflicts", "narrowing_log",
}


def state_from_export(doc: dict) -> InferenceState:
    """Reconstruct a state verbatim; state_export_doc round-trips exactly."""
    if not isinstance(doc, dict):
        raise DocumentParseError("state export must be a JSON object")
    missing = {"lattice", "graph", "seeds", "iteration", "candidates"} - set(doc)
    if missing:
        raise DocumentParseError(f"missing fields: {', '.join(sorted(missing))}")
    unknown = set(doc) - _EXPORT_FIELDS
    if unknown:
        raise DocumentParseError(f"unknown fields: {', '.join(sorted(unknown))}")
    lattice = lattice_from_doc(doc["lattice"])
    graph = graph_from_doc(doc["graph"])
    seeds = seeds_from_doc(doc["seeds"])
    candidates_raw = doc["candidates"]
    if set(candidates_raw) != set(graph.unit_ids()):
        raise DocumentParseError("candidates must cover exactly the graph units", "candidates")
    candidates = {}
    for unit, cats in candidates_raw.items():
        for c in cats:
            if c not in lattice:
                raise DocumentParseError(f"unknown category {c!r}", f"candidates.{unit}")
        candidates[unit] = frozenset(cats)
    iteration = doc["iteration"]
    if not isinstance(iteration, int) or iteration < 0:
        raise DocumentParseError("iteration must be a non-negative integer", "iteration")
    log = [_narrowing_step_from_doc(s) for s in doc.get("narrowing_log", [])]
    return InferenceState(graph, lattice, seeds, candidates, iteration, log)


def load_state_file(path: str) -> InferenceState:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise DocumentParseError(e.msg, f"line {e.lineno} column {e.colno}") from e
    return state_from_export(doc)


def propagation_report_doc(report: PropagationReport) -> dict:
    return {
        "iteration": report.iteration,
        "fixpoint_already_reached": report.reached_fixpoint_already,
        "diff": {
            unit: {"before": sorted(before), "after": sorted(after)}
            for unit, (before, after) in report.changed.items()
        },
        "newly_resolved": sorted(report.newly_resolved),
        "newly_conflicted": sorted(report.newly_conflicted),
        "steps": [narrowing_step_doc(s) for s in report.steps],
    }


def state_view_doc(state: InferenceState, diff: dict | None = None) -> dict:
    """Read model for interactive clients: per-unit candidate sets, seed
    provenance, tiers (when the lattice declares specific categories), the
    conflict list, and the diff of the last mutation."""
    seeds_by_unit = {s.unit: s.provenance for s in state.seeds}
    tiers: dict[str, str] = {}
    if state.lattice.specific:
        report = state.generation_candidates()
        tiers = {e.unit: e.tier for e in report.entries}
    units = {}
    for unit in sorted(state.candidates):
        cands = state.candidates[unit]
        units[unit] = {
            "candidates": sorted(cands),
            "resolved": len(cands) == 1,
            "category": next(iter(cands)) if len(cands) == 1 else None,
            "conflict": not cands,
            "seeded": seeds_by_unit.get(unit),
            "tier": tiers.get(unit),
        }
    return {
        "categories": list(state.lattice.ids),
        "specific": list(state.lattice.specific),
        "iteration": state.iteration,
        "units": units,
        "conflicts": [c.unit for c in state.conflicts()],
        "diff": diff or {},
    }
