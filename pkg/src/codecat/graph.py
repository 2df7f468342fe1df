"""Dependency graphs of code units (classes and interfaces).

Graphs are immutable after construction and canonically ordered: units
sorted by id, edges by (from, to, kind, location). Exporting the same
graph therefore always produces identical bytes.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace

from .errors import (
    DanglingEndpointError,
    DocumentParseError,
    DuplicateUnitError,
)


class DependencyKind(enum.Enum):
    INHERITANCE = "Inheritance"
    IMPLEMENTATION = "Implementation"
    IMPORT = "Import"
    INSTANTIATION = "Instantiation"
    EXCEPTION_THROWING = "ExceptionThrowing"
    USAGE = "Usage"
    NAMING = "Naming"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


ALL_KINDS = frozenset(DependencyKind)

UNIT_KINDS = ("class", "interface")


@dataclass(frozen=True)
class CodeUnit:
    id: str
    simple_name: str
    kind: str = "class"  # "class" | "interface"
    location: str | None = None
    external: bool = False


@dataclass(frozen=True)
class DependencyEdge:
    src: str
    dst: str
    kind: DependencyKind
    location: str | None = None

    @property
    def is_self(self) -> bool:
        return self.src == self.dst

    def sort_key(self) -> tuple:
        return (self.src, self.dst, self.kind.value, self.location or "")


class DependencyGraph:
    """Units plus a multiset of typed edges; endpoints must resolve."""

    def __init__(self, units, edges):
        unit_map: dict[str, CodeUnit] = {}
        for unit in units:
            if unit.id in unit_map:
                raise DuplicateUnitError(unit.id)
            unit_map[unit.id] = unit
        edges = tuple(sorted(edges, key=DependencyEdge.sort_key))
        for edge in edges:
            for endpoint in (edge.src, edge.dst):
                if endpoint not in unit_map:
                    raise DanglingEndpointError(
                        endpoint, f"{edge.src} -> {edge.dst} ({edge.kind.value})"
                    )
        self.units: dict[str, CodeUnit] = {
            uid: unit_map[uid] for uid in sorted(unit_map)
        }
        self.edges: tuple[DependencyEdge, ...] = edges

    def unit_ids(self) -> tuple[str, ...]:
        return tuple(self.units)

    def __contains__(self, unit_id: str) -> bool:
        return unit_id in self.units

    def dependency_pairs(self) -> tuple[tuple[str, str], ...]:
        """Distinct non-self (from, to) pairs, in canonical order; edge
        multiplicity and kind do not strengthen constraints."""
        return tuple(
            sorted({(e.src, e.dst) for e in self.edges if not e.is_self})
        )

    def representative_edge(self, src: str, dst: str) -> DependencyEdge:
        """The canonically-first edge for a pair, used in explanation traces."""
        for edge in self.edges:
            if edge.src == src and edge.dst == dst:
                return edge
        raise KeyError((src, dst))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DependencyGraph):
            return NotImplemented
        return self.units == other.units and self.edges == other.edges

    def __repr__(self) -> str:
        return f"DependencyGraph({len(self.units)} units, {len(self.edges)} edges)"


def add_naming_edges(graph: DependencyGraph, config) -> DependencyGraph:
    """Add one Naming edge per unit to the unit whose simple name is the
    longest strict prefix (of at least config.naming_min_prefix characters)
    of its own simple name. Existing edges are preserved; idempotent.
    """
    if not config.naming_enabled:
        raise ValueError("naming-edge inference is disabled in this config")
    min_prefix = config.naming_min_prefix
    if min_prefix < 1:
        raise ValueError("naming_min_prefix must be >= 1")

    existing = set(graph.edges)
    new_edges = list(graph.edges)
    units = list(graph.units.values())
    for unit in units:
        prefixes = [
            v
            for v in units
            if v.id != unit.id
            and len(v.simple_name) >= min_prefix
            and len(v.simple_name) < len(unit.simple_name)
            and unit.simple_name.startswith(v.simple_name)
        ]
        if not prefixes:
            continue
        longest = max(len(v.simple_name) for v in prefixes)
        for v in prefixes:
            if len(v.simple_name) != longest:
                continue
            edge = DependencyEdge(unit.id, v.id, DependencyKind.NAMING, None)
            if edge not in existing:
                existing.add(edge)
                new_edges.append(edge)
    return DependencyGraph(units, new_edges)


def filter_by_kind(graph: DependencyGraph, kinds) -> DependencyGraph:
    kinds = frozenset(kinds)
    return DependencyGraph(
        graph.units.values(), [e for e in graph.edges if e.kind in kinds]
    )


# -- dependency-graph document ----------------------------------------------

_UNIT_FIELDS = {"id", "simple_name", "kind", "location", "external"}
_EDGE_FIELDS = {"from", "to", "kind", "location"}
_DOC_FIELDS = {"units", "edges"}

_KIND_BY_VALUE = {k.value: k for k in DependencyKind}


def graph_from_doc(doc: dict) -> DependencyGraph:
    if not isinstance(doc, dict):
        raise DocumentParseError("graph document must be a JSON object")
    unknown = set(doc) - _DOC_FIELDS
    if unknown:
        raise DocumentParseError(f"unknown fields: {', '.join(sorted(unknown))}")

    units = []
    for i, raw in enumerate(doc.get("units", [])):
        if not isinstance(raw, dict):
            raise DocumentParseError("unit must be an object", f"units[{i}]")
        extra = set(raw) - _UNIT_FIELDS
        if extra:
            raise DocumentParseError(
                f"unknown fields: {', '.join(sorted(extra))}", f"units[{i}]"
            )
        uid = raw.get("id")
        if not isinstance(uid, str) or not uid:
            raise DocumentParseError("unit id must be a non-empty string", f"units[{i}].id")
        simple = raw.get("simple_name", uid.rsplit(".", 1)[-1])
        if not isinstance(simple, str) or not simple:
            raise DocumentParseError(
                "simple_name must be a non-empty string", f"units[{i}].simple_name"
            )
        kind = raw.get("kind", "class")
        if kind not in UNIT_KINDS:
            raise DocumentParseError(
                f"unit kind must be one of {UNIT_KINDS}", f"units[{i}].kind"
            )
        location = raw.get("location")
        if location is not None and not isinstance(location, str):
            raise DocumentParseError("location must be a string or null", f"units[{i}].location")
        external = raw.get("external", False)
        if not isinstance(external, bool):
            raise DocumentParseError("external must be a boolean", f"units[{i}].external")
        units.append(CodeUnit(uid, simple, kind, location, external))

    edges = []
    for i, raw in enumerate(doc.get("edges", [])):
        if not isinstance(raw, dict):
            raise DocumentParseError("edge must be an object", f"edges[{i}]")
        extra = set(raw) - _EDGE_FIELDS
        if extra:
            raise DocumentParseError(
                f"unknown fields: {', '.join(sorted(extra))}", f"edges[{i}]"
            )
        src, dst = raw.get("from"), raw.get("to")
        if not isinstance(src, str) or not isinstance(dst, str):
            raise DocumentParseError("from/to must be strings", f"edges[{i}]")
        kind_name = raw.get("kind")
        if kind_name not in _KIND_BY_VALUE:
            raise DocumentParseError(
                f"unknown dependency kind {kind_name!r}", f"edges[{i}].kind"
            )
        location = raw.get("location")
        if location is not None and not isinstance(location, str):
            raise DocumentParseError("location must be a string or null", f"edges[{i}].location")
        edges.append(DependencyEdge(src, dst, _KIND_BY_VALUE[kind_name], location))

    return DependencyGraph(units, edges)


def graph_to_doc(graph: DependencyGraph) -> dict:
    return {
        "units": [
            {
                "id": u.id,
                "simple_name": u.simple_name,
                "kind": u.kind,
                "location": u.location,
                "external": u.external,
            }
            for u in graph.units.values()
        ],
        "edges": [
            {
                "from": e.src,
                "to": e.dst,
                "kind": e.kind.value,
                "location": e.location,
            }
            for e in graph.edges
        ],
    }


def load_graph_file(path: str) -> DependencyGraph:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise DocumentParseError(e.msg, f"line {e.lineno} column {e.colno}") from e
    return graph_from_doc(doc)


# public alias for ingesting pre-extracted graph documents
load_graph = graph_from_doc
