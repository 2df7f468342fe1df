import json
from pathlib import Path

import pytest

from codecat.graph import CodeUnit, DependencyEdge, DependencyGraph, DependencyKind
from codecat.inference import SeedAssignment
from codecat.lattice import Category, Refinement, build_lattice

FIXTURES = Path(__file__).parent / "fixtures"

USAGE = DependencyKind.USAGE
INHERITANCE = DependencyKind.INHERITANCE


def make_lattice(ids, refinements, root, specific=()):
    """Build a lattice from bare id tuples: refinements as (child, parent)."""
    return build_lattice(
        [Category(i) for i in ids],
        [Refinement(c, p) for c, p in refinements],
        root,
        specific,
    )


def cookbook_lattice():
    return make_lattice(
        ["0'", "DG", "D", "T", "DT"],
        [("DG", "0'"), ("D", "DG"), ("T", "DG"), ("DT", "D"), ("DT", "T")],
        "0'",
        ["D"],
    )


def make_graph(unit_ids, edges):
    """edges: (from, to) pairs (Usage) or (from, to, kind) triples."""
    units = [CodeUnit(u, u) for u in unit_ids]
    built = []
    for edge in edges:
        if len(edge) == 2:
            built.append(DependencyEdge(edge[0], edge[1], USAGE))
        else:
            built.append(DependencyEdge(edge[0], edge[1], edge[2]))
    return DependencyGraph(units, built)


COOKBOOK_UNITS = [
    "CookBook", "AbstractPanel", "Book", "JPanel", "CookBookPanel",
    "CookBookReader", "Reader", "Author", "PanelClientOne", "PanelClientTwo",
]

COOKBOOK_EDGES = [
    ("CookBookPanel", "CookBook"),
    ("CookBookPanel", "AbstractPanel", INHERITANCE),
    ("PanelClientOne", "CookBookPanel"),
    ("PanelClientTwo", "CookBookPanel"),
    ("CookBookReader", "CookBook"),
    ("CookBookReader", "Reader"),
    ("Reader", "Book"),
    ("Author", "Book"),
    ("Book", "Author"),
    ("AbstractPanel", "JPanel", INHERITANCE),
]

COOKBOOK_SEEDS = [
    SeedAssignment("CookBook", "D"),
    SeedAssignment("AbstractPanel", "T"),
    SeedAssignment("Book", "DG"),
    SeedAssignment("JPanel", "T"),
]


@pytest.fixture(scope="session")
def lattice():
    return cookbook_lattice()


@pytest.fixture()
def cookbook_graph():
    return make_graph(COOKBOOK_UNITS, COOKBOOK_EDGES)


@pytest.fixture()
def cookbook_seeds():
    return list(COOKBOOK_SEEDS)


@pytest.fixture()
def conflict_graph():
    return make_graph(["X", "Y"], [("X", "Y")])


@pytest.fixture()
def conflict_seeds():
    return [SeedAssignment("X", "D"), SeedAssignment("Y", "T")]


def fixture_doc(name):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


def fixture_path(name) -> Path:
    return FIXTURES / name


def corpus_files(corpus: str):
    root = FIXTURES / corpus
    return sorted(
        (str(p.relative_to(root)).replace("\\", "/"), p.read_text(encoding="utf-8"))
        for p in root.rglob("*.ext")
    )
