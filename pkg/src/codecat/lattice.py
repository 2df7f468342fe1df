"""Software-category lattice: a validated acyclic refinement graph.

Categories are partially ordered by refinement edges pointing from the
refining (more specific) category to the refined (more general) one; a
single root is reachable from everywhere. Every dependency-permission and
category-combination rule used elsewhere in the package is derived from
this graph alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import (
    AmbiguousCombinationError,
    DocumentParseError,
    LatticeValidationError,
    NoCommonRefinementError,
    UnknownIdError,
    ValidationFinding,
)


@dataclass(frozen=True)
class Category:
    """One software category; id is the token other documents refer to."""

    id: str
    name: str = ""
    description: str = ""


@dataclass(frozen=True)
class Refinement:
    """child refines parent: child-classes may use parent-classes."""

    child: str
    parent: str


class DependencyMatrix:
    """Boolean allowed-dependency table; rows are the depending category."""

    def __init__(self, ids: tuple[str, ...], cells: dict[tuple[str, str], bool]):
        for c in ids:
            if not cells.get((c, c), False):
                raise ValueError(f"matrix diagonal must be allowed, got ({c},{c})=False")
        self.ids = ids
        self._cells = dict(cells)

    def allows(self, c1: str, c2: str) -> bool:
        return self._cells[(c1, c2)]

    def to_doc(self) -> dict:
        return {
            "categories": list(self.ids),
            "allowed": {
                c1: {c2: self._cells[(c1, c2)] for c2 in self.ids} for c1 in self.ids
            },
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DependencyMatrix):
            return NotImplemented
        return set(self.ids) == set(other.ids) and all(
            self._cells[(a, b)] == other._cells[(a, b)]
            for a in self.ids
            for b in self.ids
        )

    def __repr__(self) -> str:
        return f"DependencyMatrix({len(self.ids)} categories)"


class CategoryLattice:
    """Validated category graph; immutable and safe to share across threads.

    Construct via build_lattice / lattice_from_doc, which run full
    validation and precompute the reachability closures.
    """

    def __init__(
        self,
        categories: tuple[Category, ...],
        refinements: tuple[Refinement, ...],
        root: str,
        specific: tuple[str, ...],
        ancestors: dict[str, frozenset[str]],
        descendants: dict[str, frozenset[str]],
        path_counts: dict[str, int],
    ):
        self.categories = categories
        self.refinements = refinements
        self.root = root
        self.specific = specific
        self._by_id = {c.id: c for c in categories}
        self._ancestors = ancestors
        self._descendants = descendants
        self._path_counts = path_counts
        self._matrix: DependencyMatrix | None = None
        # memoized unions of closures over candidate sets; hot path of the
        # propagation engine. Concurrent writes are benign: values for a
        # given key are always equal, so the lattice stays share-safe.
        self._desc_union_cache: dict[frozenset[str], frozenset[str]] = {}
        self._anc_union_cache: dict[frozenset[str], frozenset[str]] = {}

    # -- lookups ------------------------------------------------------------

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.categories)

    def __contains__(self, category_id: str) -> bool:
        return category_id in self._by_id

    def category(self, category_id: str) -> Category:
        self._require(category_id)
        return self._by_id[category_id]

    def _require(self, category_id: str) -> None:
        if category_id not in self._by_id:
            raise UnknownIdError(category_id)

    # -- reachability -------------------------------------------------------

    def ancestors_of(self, category_id: str) -> frozenset[str]:
        """All categories reachable from category_id via refinement edges,
        including category_id itself."""
        self._require(category_id)
        return self._ancestors[category_id]

    def descendants_of(self, category_id: str) -> frozenset[str]:
        """All categories from which category_id is reachable, including
        category_id itself."""
        self._require(category_id)
        return self._descendants[category_id]

    def is_pure(self, category_id: str) -> bool:
        """True iff exactly one refinement path leads to the root (the root's
        empty path counts as one)."""
        self._require(category_id)
        return self._path_counts[category_id] == 1

    def may_depend(self, c1: str, c2: str) -> bool:
        """True iff a c1-class is allowed to depend on a c2-class."""
        self._require(c1)
        self._require(c2)
        return c2 in self._ancestors[c1]

    def allowed_matrix(self) -> DependencyMatrix:
        if self._matrix is None:
            ids = self.ids
            cells = {
                (a, b): b in self._ancestors[a] for a in ids for b in ids
            }
            self._matrix = DependencyMatrix(ids, cells)
        return self._matrix

    def combine(self, c1: str, c2: str) -> str:
        """The most general category that refines both c1 and c2.

        Computed as the unique element of descendants_of(c1) ∩
        descendants_of(c2) whose descendants cover the whole intersection;
        commutative by construction.
        """
        self._require(c1)
        self._require(c2)
        common = self._descendants[c1] & self._descendants[c2]
        if not common:
            raise NoCommonRefinementError(c1, c2)
        undominated = [
            m
            for m in common
            if not any(y != m and m in self._descendants[y] for y in common)
        ]
        if len(undominated) > 1:
            raise AmbiguousCombinationError(c1, c2, tuple(sorted(undominated)))
        return undominated[0]

    # -- closure unions (used by constraint propagation) ----------------------

    def descendants_union(self, category_ids: frozenset[str]) -> frozenset[str]:
        """Union of descendants_of over a candidate set (empty set -> empty)."""
        cached = self._desc_union_cache.get(category_ids)
        if cached is None:
            cached = frozenset().union(*(self._descendants[c] for c in category_ids)) \
                if category_ids else frozenset()
            self._desc_union_cache[category_ids] = cached
        return cached

    def ancestors_union(self, category_ids: frozenset[str]) -> frozenset[str]:
        """Union of ancestors_of over a candidate set (empty set -> empty)."""
        cached = self._anc_union_cache.get(category_ids)
        if cached is None:
            cached = frozenset().union(*(self._ancestors[c] for c in category_ids)) \
                if category_ids else frozenset()
            self._anc_union_cache[category_ids] = cached
        return cached

    def __repr__(self) -> str:
        return f"CategoryLattice({len(self.categories)} categories, root={self.root!r})"


def build_lattice(
    categories,
    refinements,
    root: str,
    specific=(),
) -> CategoryLattice:
    """Validate the raw category graph and return a lattice.

    Collects every violated rule before failing, so a single run reports
    all problems of a document at once.
    """
    categories = tuple(categories)
    refinements = tuple(refinements)
    specific = tuple(specific)
    findings: list[ValidationFinding] = []

    seen: set[str] = set()
    for cat in categories:
        if not cat.id:
            findings.append(ValidationFinding("EmptyId", "category with empty id"))
        elif cat.id in seen:
            findings.append(
                ValidationFinding("DuplicateId", f"duplicate category id {cat.id!r}", (cat.id,))
            )
        seen.add(cat.id)

    known = {c.id for c in categories if c.id}
    for ref in refinements:
        for endpoint in (ref.child, ref.parent):
            if endpoint not in known:
                findings.append(
                    ValidationFinding(
                        "UnknownId",
                        f"refinement {ref.child!r} -> {ref.parent!r} references unknown id {endpoint!r}",
                        (endpoint,),
                    )
                )
    if root not in known:
        findings.append(
            ValidationFinding("UnknownId", f"root {root!r} is not a category", (root,))
        )
    for s in specific:
        if s not in known:
            findings.append(
                ValidationFinding("UnknownId", f"specific category {s!r} is unknown", (s,))
            )

    parents: dict[str, list[str]] = {c: [] for c in known}
    for ref in refinements:
        if ref.child in known and ref.parent in known:
            if ref.parent not in parents[ref.child]:
                parents[ref.child].append(ref.parent)

    findings.extend(_cycle_findings(known, parents))

    parentless = sorted(c for c in known if not parents[c])
    if len(parentless) > 1:
        findings.append(
            ValidationFinding(
                "MultipleRoots",
                "more than one category has no parent: " + ", ".join(parentless),
                tuple(parentless),
            )
        )
    if root in known and parents[root]:
        findings.append(
            ValidationFinding(
                "RootHasParent",
                f"declared root {root!r} refines {', '.join(sorted(parents[root]))}",
                (root,),
            )
        )

    ancestors = {c: _reach(c, parents) for c in known}
    if root in known:
        for c in sorted(known):
            if root not in ancestors[c]:
                findings.append(
                    ValidationFinding(
                        "UnreachableCategory",
                        f"{c!r} cannot reach the root {root!r}",
                        (c,),
                    )
                )

    if findings:
        raise LatticeValidationError(findings)

    children: dict[str, list[str]] = {c: [] for c in known}
    for child, ps in parents.items():
        for p in ps:
            children[p].append(child)
    descendants = {c: _reach(c, children) for c in known}

    path_counts: dict[str, int] = {}

    def count_paths(c: str) -> int:
        if c not in path_counts:
            path_counts[c] = (
                1 if c == root else sum(count_paths(p) for p in parents[c])
            )
        return path_counts[c]

    for c in known:
        count_paths(c)

    ordered = tuple(sorted(categories, key=lambda cat: cat.id))
    return CategoryLattice(
        ordered,
        refinements,
        root,
        tuple(sorted(set(specific))),
        ancestors,
        descendants,
        path_counts,
    )


def _reach(start: str, edges: dict[str, list[str]]) -> frozenset[str]:
    """Reflexive-transitive closure of start along edges."""
    seen = {start}
    stack = [start]
    while stack:
        for nxt in edges[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


def _cycle_findings(known: set[str], parents: dict[str, list[str]]) -> list[ValidationFinding]:
    """One CycleDetected finding per back edge found in a single DFS pass,
    each carrying the cycle path in refinement order."""
    findings = []
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {c: WHITE for c in known}
    stack: list[str] = []

    def visit(node: str) -> None:
        color[node] = GRAY
        stack.append(node)
        for parent in sorted(parents[node]):
            if color[parent] == GRAY:
                cycle = stack[stack.index(parent):] + [parent]
                findings.append(
                    ValidationFinding(
                        "CycleDetected",
                        "refinement cycle: " + " -> ".join(cycle),
                        tuple(cycle),
                    )
                )
            elif color[parent] == WHITE:
                visit(parent)
        stack.pop()
        color[node] = BLACK

    for c in sorted(known):
        if color[c] == WHITE:
            visit(c)
    return findings


# -- category-graph document ----------------------------------------------

_CATEGORY_FIELDS = {"id", "name", "description"}
_REFINEMENT_FIELDS = {"child", "parent"}
_DOC_FIELDS = {"categories", "refinements", "root", "specific"}


def lattice_from_doc(doc: dict) -> CategoryLattice:
    """Parse and validate a category-graph document (see README for schema).

    Unknown fields are rejected; array order carries no meaning.
    """
    if not isinstance(doc, dict):
        raise DocumentParseError("category document must be a JSON object")
    unknown = set(doc) - _DOC_FIELDS
    if unknown:
        raise DocumentParseError(f"unknown fields: {', '.join(sorted(unknown))}")
    for required in ("categories", "refinements", "root"):
        if required not in doc:
            raise DocumentParseError(f"missing field {required!r}")

    categories = []
    for i, raw in enumerate(_expect_list(doc, "categories")):
        if not isinstance(raw, dict):
            raise DocumentParseError("category must be an object", f"categories[{i}]")
        extra = set(raw) - _CATEGORY_FIELDS
        if extra:
            raise DocumentParseError(
                f"unknown fields: {', '.join(sorted(extra))}", f"categories[{i}]"
            )
        cid = raw.get("id")
        if not isinstance(cid, str):
            raise DocumentParseError("category id must be a string", f"categories[{i}].id")
        categories.append(
            Category(cid, _expect_str(raw, "name", f"categories[{i}]") or cid,
                     _expect_str(raw, "description", f"categories[{i}]"))
        )

    refinements = []
    for i, raw in enumerate(_expect_list(doc, "refinements")):
        if not isinstance(raw, dict):
            raise DocumentParseError("refinement must be an object", f"refinements[{i}]")
        extra = set(raw) - _REFINEMENT_FIELDS
        if extra:
            raise DocumentParseError(
                f"unknown fields: {', '.join(sorted(extra))}", f"refinements[{i}]"
            )
        child, parent = raw.get("child"), raw.get("parent")
        if not isinstance(child, str) or not isinstance(parent, str):
            raise DocumentParseError(
                "child and parent must be strings", f"refinements[{i}]"
            )
        refinements.append(Refinement(child, parent))

    root = doc["root"]
    if not isinstance(root, str):
        raise DocumentParseError("root must be a string", "root")
    specific = doc.get("specific", [])
    if not isinstance(specific, list) or not all(isinstance(s, str) for s in specific):
        raise DocumentParseError("specific must be a list of strings", "specific")

    return build_lattice(categories, refinements, root, specific)


def lattice_to_doc(lattice: CategoryLattice) -> dict:
    return {
        "categories": [
            {"id": c.id, "name": c.name, "description": c.description}
            for c in lattice.categories
        ],
        "refinements": sorted(
            ({"child": r.child, "parent": r.parent} for r in lattice.refinements),
            key=lambda r: (r["child"], r["parent"]),
        ),
        "root": lattice.root,
        "specific": list(lattice.specific),
    }


def load_lattice_file(path: str) -> CategoryLattice:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise DocumentParseError(e.msg, f"line {e.lineno} column {e.colno}") from e
    return lattice_from_doc(doc)


def _expect_list(doc: dict, key: str) -> list:
    value = doc.get(key, [])
    if not isinstance(value, list):
        raise DocumentParseError(f"{key} must be an array", key)
    return value


def _expect_str(raw: dict, key: str, where: str) -> str:
    value = raw.get(key, "")
    if not isinstance(value, str):
        raise DocumentParseError(f"{key} must be a string", f"{where}.{key}")
    return value
