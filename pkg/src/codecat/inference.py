"""Iterative category inference over a dependency graph.

Each unit carries a set of still-possible categories. For every non-self
edge u -> v two narrowing rules apply until nothing changes:

  (1) candidates(u) &= union of descendants_of(c) for c in candidates(v)
      -- u must be allowed to depend on some remaining candidate of v
  (2) candidates(v) &= union of ancestors_of(c) for c in candidates(u)
      -- v must be usable by some remaining candidate of u

This is arc consistency on the may-depend constraint: the fixpoint is
unique regardless of processing order, sets only ever shrink, and no
feasible total assignment is ever excluded. An empty candidate set marks a
conflict; per the union formulas above, emptiness spreads to everything
reachable through constraints, so the conflict report shows the full blast
radius rather than a single root cause.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    CategoryNotInCandidatesError,
    DocumentParseError,
    DuplicateSeedError,
    EmptySpecificSetError,
    IncompleteAssignmentError,
    SearchSpaceTooLargeError,
    UnknownCategoryError,
    UnknownUnitError,
)
from .graph import DependencyGraph
from .lattice import CategoryLattice

SEED = "seed"
MANUAL = "manual"

OUTGOING = "outgoing_constraint"
INCOMING = "incoming_constraint"
SEED_STEP = "seed"

ORACLE_LIMIT = 10_000_000


@dataclass(frozen=True)
class SeedAssignment:
    unit: str
    category: str
    provenance: str = SEED  # "seed" | "manual"


@dataclass(frozen=True)
class NarrowingStep:
    """One effective narrowing of a unit's candidate set, with its cause."""

    unit: str
    removed: frozenset[str]
    direction: str  # "seed" | "outgoing_constraint" | "incoming_constraint"
    neighbor: str | None = None
    neighbor_candidates: frozenset[str] | None = None
    edge: tuple[str, str, str] | None = None  # (from, to, kind)


@dataclass(frozen=True)
class PropagationReport:
    iteration: int
    changed: dict[str, tuple[frozenset[str], frozenset[str]]]
    newly_resolved: tuple[str, ...]
    newly_conflicted: tuple[str, ...]
    steps: tuple[NarrowingStep, ...]

    @property
    def reached_fixpoint_already(self) -> bool:
        return not self.changed


@dataclass(frozen=True)
class Conflict:
    unit: str
    trace: tuple[NarrowingStep, ...]


@dataclass(frozen=True)
class CandidateEntry:
    unit: str
    tier: str  # "definite" | "possible" | "none"
    candidates: frozenset[str]
    resolved: bool
    category: str | None


@dataclass(frozen=True)
class CandidateReport:
    specific: tuple[str, ...]
    entries: tuple[CandidateEntry, ...]

    def tier(self, name: str) -> tuple[str, ...]:
        return tuple(e.unit for e in self.entries if e.tier == name)


@dataclass(frozen=True)
class Violation:
    src: str
    dst: str
    kind: str
    location: str | None
    from_category: str
    to_category: str


@dataclass(frozen=True)
class ViolationReport:
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return bool(self.violations)


class InferenceState:
    """Candidate sets per unit plus the narrowing history that produced them.

    One logical writer at a time; quiescent states are safe to read from
    any thread. Candidate sets never grow over the life of a state; a
    forced re-assignment returns a fresh state instead.
    """

    def __init__(self, graph: DependencyGraph, lattice: CategoryLattice,
                 seeds: list[SeedAssignment], candidates: dict[str, frozenset[str]],
                 iteration: int, narrowing_log: list[NarrowingStep]):
        self.graph = graph
        self.lattice = lattice
        self.seeds = seeds
        self.candidates = candidates
        self.iteration = iteration
        self.narrowing_log = narrowing_log

    # -- queries -------------------------------------------------------------

    def seed_for(self, unit: str) -> SeedAssignment | None:
        for seed in self.seeds:
            if seed.unit == unit:
                return seed
        return None

    def conflicts(self) -> list[Conflict]:
        return [
            Conflict(unit, self.explain(unit))
            for unit in sorted(self.candidates)
            if not self.candidates[unit]
        ]

    def explain(self, unit: str) -> tuple[NarrowingStep, ...]:
        if unit not in self.graph:
            raise UnknownUnitError(unit)
        return tuple(step for step in self.narrowing_log if step.unit == unit)

    def resolved_assignment(self) -> dict[str, str]:
        """The total assignment, requiring every unit to be a singleton."""
        missing = tuple(u for u in self.candidates if len(self.candidates[u]) != 1)
        if missing:
            raise IncompleteAssignmentError(missing)
        return {u: next(iter(cands)) for u, cands in self.candidates.items()}

    def generation_candidates(self, specific=None) -> CandidateReport:
        return generation_candidates(self, specific)

    def clone(self) -> "InferenceState":
        return InferenceState(
            self.graph, self.lattice, list(self.seeds), dict(self.candidates),
            self.iteration, list(self.narrowing_log),
        )

    # -- mutations -----------------------------------------------------------

    def propagate(self, rng: random.Random | None = None) -> PropagationReport:
        """Run both narrowing rules to the fixpoint; one call is one round.

        The default worklist order is lexicographic for reproducible logs;
        rng shuffles it, which never changes the resulting fixpoint.
        """
        lattice = self.lattice
        before = dict(self.candidates)
        steps: list[NarrowingStep] = []

        pairs = self.graph.dependency_pairs()
        # arcs: (target, source, direction); direction says which rule runs
        arcs = [(u, v, OUTGOING) for (u, v) in pairs]
        arcs += [(v, u, INCOMING) for (u, v) in pairs]
        reading = {}  # unit -> arcs that must re-run when that unit narrows
        for arc in arcs:
            reading.setdefault(arc[1], []).append(arc)
        if rng is not None:
            rng.shuffle(arcs)

        queue = deque(arcs)
        queued = set(arcs)
        while queue:
            target, source, direction = queue.popleft()
            queued.discard((target, source, direction))
            neighbor_set = self.candidates[source]
            if direction == OUTGOING:
                allowed = lattice.descendants_union(neighbor_set)
                edge = self.graph.representative_edge(target, source)
                edge_key = (target, source)
            else:
                allowed = lattice.ancestors_union(neighbor_set)
                edge = self.graph.representative_edge(source, target)
                edge_key = (source, target)
            old = self.candidates[target]
            new = old & allowed
            if new == old:
                continue
            self.candidates[target] = new
            steps.append(
                NarrowingStep(
                    unit=target,
                    removed=old - new,
                    direction=direction,
                    neighbor=source,
                    neighbor_candidates=neighbor_set,
                    edge=(edge_key[0], edge_key[1], edge.kind.value),
                )
            )
            wake = reading.get(target, ())
            if rng is not None:
                wake = list(wake)
                rng.shuffle(wake)
            for arc in wake:
                if arc not in queued:
                    queued.add(arc)
                    queue.append(arc)

        self.narrowing_log.extend(steps)
        self.iteration += 1
        changed = {
            unit: (before[unit], self.candidates[unit])
            for unit in sorted(before)
            if before[unit] != self.candidates[unit]
        }
        return PropagationReport(
            iteration=self.iteration,
            changed=changed,
            newly_resolved=tuple(
                u for u, (b, a) in changed.items() if len(a) == 1 and len(b) != 1
            ),
            newly_conflicted=tuple(
                u for u, (b, a) in changed.items() if not a and b
            ),
            steps=tuple(steps),
        )

    def assign(self, unit: str, category: str, force: bool = False) -> "InferenceState":
        """Manually pin a unit to a category.

        Inside the current candidate set this narrows in place and returns
        self. Outside it, force=False rejects; force=True rebuilds a fresh
        state from the graph, lattice, and updated seed list, because
        monotone narrowing cannot be widened incrementally.
        """
        if unit not in self.graph:
            raise UnknownUnitError(unit)
        if category not in self.lattice:
            raise UnknownCategoryError(category)
        current = self.candidates[unit]
        if category in current:
            existing = self.seed_for(unit)
            if existing is not None and existing.category == category:
                return self
            self.seeds.append(SeedAssignment(unit, category, MANUAL))
            new = frozenset({category})
            if new != current:
                self.candidates[unit] = new
                self.narrowing_log.append(
                    NarrowingStep(unit=unit, removed=current - new, direction=SEED_STEP)
                )
            return self
        if not force:
            raise CategoryNotInCandidatesError(unit, category, current)
        seeds = [s for s in self.seeds if s.unit != unit]
        seeds.append(SeedAssignment(unit, category, MANUAL))
        return init_state(self.graph, self.lattice, seeds)


def init_state(graph: DependencyGraph, lattice: CategoryLattice, seeds) -> InferenceState:
    """Seeded units start as singletons, everything else as the full set."""
    seeds = [
        s if isinstance(s, SeedAssignment) else SeedAssignment(*s) for s in seeds
    ]
    seen: set[str] = set()
    for seed in seeds:
        if seed.unit not in graph:
            raise UnknownUnitError(seed.unit)
        if seed.category not in lattice:
            raise UnknownCategoryError(seed.category)
        if seed.unit in seen:
            raise DuplicateSeedError(seed.unit)
        seen.add(seed.unit)

    full = frozenset(lattice.ids)
    candidates = {unit: full for unit in graph.unit_ids()}
    log: list[NarrowingStep] = []
    for seed in seeds:
        singleton = frozenset({seed.category})
        removed = candidates[seed.unit] - singleton
        candidates[seed.unit] = singleton
        if removed:
            log.append(NarrowingStep(unit=seed.unit, removed=removed, direction=SEED_STEP))
    return InferenceState(graph, lattice, list(seeds), candidates, 0, log)


def check_violations(graph: DependencyGraph, lattice: CategoryLattice,
                     assignment: dict[str, str]) -> ViolationReport:
    """Every non-self edge whose endpoint categories the matrix forbids.

    assignment must give exactly one known category to every unit of the
    graph; self-edges are always allowed.
    """
    for unit, category in assignment.items():
        if unit not in graph:
            raise UnknownUnitError(unit)
        if category not in lattice:
            raise UnknownCategoryError(category)
    missing = tuple(u for u in graph.unit_ids() if u not in assignment)
    if missing:
        raise IncompleteAssignmentError(missing)

    violations = [
        Violation(e.src, e.dst, e.kind.value, e.location,
                  assignment[e.src], assignment[e.dst])
        for e in graph.edges
        if not e.is_self and not lattice.may_depend(assignment[e.src], assignment[e.dst])
    ]
    return ViolationReport(tuple(violations))


def generation_candidates(state: InferenceState, specific=None) -> CandidateReport:
    """Tier every unit against the closure of the specific categories.

    definite: non-empty candidates entirely inside the closure; possible:
    some overlap; none: no overlap or a conflicted (empty) set.
    """
    lattice = state.lattice
    chosen = tuple(sorted(specific)) if specific is not None else lattice.specific
    if not chosen:
        raise EmptySpecificSetError()
    closure: frozenset[str] = frozenset()
    for s in chosen:
        closure |= lattice.descendants_of(s)  # raises UnknownIdError on bad override

    entries = []
    for unit in sorted(state.candidates):
        cands = state.candidates[unit]
        if cands and cands <= closure:
            tier = "definite"
        elif cands & closure:
            tier = "possible"
        else:
            tier = "none"
        entries.append(
            CandidateEntry(
                unit=unit,
                tier=tier,
                candidates=cands,
                resolved=len(cands) == 1,
                category=next(iter(cands)) if len(cands) == 1 else None,
            )
        )
    return CandidateReport(chosen, tuple(entries))


def oracle_enumerate(graph: DependencyGraph, lattice: CategoryLattice, seeds) -> list[dict[str, str]]:
    """Exhaustively enumerate every consistent total assignment.

    Test oracle, independent of the propagation engine: depth-first search
    over units in id order, checking may_depend on each decided non-self
    edge. Refuses search spaces above ORACLE_LIMIT combinations.
    """
    seeds = [
        s if isinstance(s, SeedAssignment) else SeedAssignment(*s) for s in seeds
    ]
    seed_map: dict[str, str] = {}
    for seed in seeds:
        if seed.unit not in graph:
            raise UnknownUnitError(seed.unit)
        if seed.category not in lattice:
            raise UnknownCategoryError(seed.category)
        if seed.unit in seed_map:
            raise DuplicateSeedError(seed.unit)
        seed_map[seed.unit] = seed.category

    units = list(graph.unit_ids())
    domains = [
        (seed_map[u],) if u in seed_map else tuple(sorted(lattice.ids)) for u in units
    ]
    combinations = math.prod(len(d) for d in domains) if units else 1
    if combinations > ORACLE_LIMIT:
        raise SearchSpaceTooLargeError(combinations, ORACLE_LIMIT)

    index = {u: i for i, u in enumerate(units)}
    # per unit: constraints decidable once units[..i] are assigned
    checks: list[list[tuple[int, int]]] = [[] for _ in units]
    for src, dst in graph.dependency_pairs():
        i, j = index[src], index[dst]
        checks[max(i, j)].append((i, j))

    results: list[dict[str, str]] = []
    chosen: list[str] = []

    def descend(depth: int) -> None:
        if depth == len(units):
            results.append(dict(zip(units, chosen)))
            return
        for category in domains[depth]:
            chosen.append(category)
            if all(
                lattice.may_depend(chosen[i], chosen[j]) for i, j in checks[depth]
            ):
                descend(depth + 1)
            chosen.pop()

    descend(0)
    return results


# -- seeds document -----------------------------------------------------------

_ASSIGNMENT_FIELDS = {"unit", "category", "provenance"}


def seeds_from_doc(doc: dict) -> list[SeedAssignment]:
    if not isinstance(doc, dict):
        raise DocumentParseError("seeds document must be a JSON object")
    unknown = set(doc) - {"assignments"}
    if unknown:
        raise DocumentParseError(f"unknown fields: {', '.join(sorted(unknown))}")
    seeds = []
    for i, raw in enumerate(doc.get("assignments", [])):
        if not isinstance(raw, dict):
            raise DocumentParseError("assignment must be an object", f"assignments[{i}]")
        extra = set(raw) - _ASSIGNMENT_FIELDS
        if extra:
            raise DocumentParseError(
                f"unknown fields: {', '.join(sorted(extra))}", f"assignments[{i}]"
            )
        unit, category = raw.get("unit"), raw.get("category")
        if not isinstance(unit, str) or not isinstance(category, str):
            raise DocumentParseError("unit and category must be strings", f"assignments[{i}]")
        provenance = raw.get("provenance", SEED)
        if provenance not in (SEED, MANUAL):
            raise DocumentParseError(
                "provenance must be 'seed' or 'manual'", f"assignments[{i}].provenance"
            )
        seeds.append(SeedAssignment(unit, category, provenance))
    return seeds


def seeds_to_doc(seeds) -> dict:
    return {
        "assignments": [
            {"unit": s.unit, "category": s.category, "provenance": s.provenance}
            for s in seeds
        ]
    }
