"""Exception types shared across the codecat package."""

from __future__ import annotations

from dataclasses import dataclass, field


class CodecatError(Exception):
    """Base class for every failure this package raises on purpose."""


@dataclass(frozen=True)
class ValidationFinding:
    """One violated rule discovered while validating a category graph.

    code is a stable machine-readable token (CycleDetected, MultipleRoots,
    UnreachableCategory, UnknownId, DuplicateId, EmptyId, RootHasParent);
    subject carries the ids involved (e.g. the cycle path in order).
    """

    code: str
    message: str
    subject: tuple[str, ...] = ()


class LatticeValidationError(CodecatError):
    """Raised by build_lattice with the complete list of violated rules."""

    def __init__(self, findings: list[ValidationFinding]):
        self.findings = tuple(findings)
        super().__init__("; ".join(f"{f.code}: {f.message}" for f in findings))

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}


class UnknownIdError(CodecatError):
    """A category id was referenced that the lattice does not contain."""

    def __init__(self, category_id: str):
        self.category_id = category_id
        super().__init__(f"unknown category id: {category_id!r}")


class NoCommonRefinementError(CodecatError):
    def __init__(self, c1: str, c2: str):
        self.pair = (c1, c2)
        super().__init__(f"no category refines both {c1!r} and {c2!r}")


class AmbiguousCombinationError(CodecatError):
    def __init__(self, c1: str, c2: str, candidates: tuple[str, ...]):
        self.pair = (c1, c2)
        self.candidates = candidates
        super().__init__(
            f"combining {c1!r} and {c2!r} is ambiguous between {', '.join(candidates)}"
        )


class DocumentParseError(CodecatError):
    """A JSON document is malformed or violates its schema.

    position is a human-readable locator: either "line L column C" for JSON
    syntax errors or a path such as "units[3].kind" for schema violations.
    """

    def __init__(self, message: str, position: str = ""):
        self.position = position
        super().__init__(f"{message}" + (f" (at {position})" if position else ""))


class DanglingEndpointError(CodecatError):
    def __init__(self, unit_id: str, edge: str):
        self.unit_id = unit_id
        super().__init__(f"edge {edge} references unknown unit {unit_id!r}")


class DuplicateUnitError(CodecatError):
    def __init__(self, unit_id: str):
        self.unit_id = unit_id
        super().__init__(f"duplicate unit id: {unit_id!r}")


class SourceLexError(CodecatError):
    def __init__(self, file: str, line: int, message: str):
        self.file = file
        self.line = line
        super().__init__(f"{file}:{line}: {message}")


class UnsupportedConstructError(CodecatError):
    def __init__(self, file: str, line: int, message: str):
        self.file = file
        self.line = line
        super().__init__(f"{file}:{line}: unsupported construct: {message}")


class UnknownUnitError(CodecatError):
    def __init__(self, unit_id: str):
        self.unit_id = unit_id
        super().__init__(f"unknown unit: {unit_id!r}")


class UnknownCategoryError(CodecatError):
    def __init__(self, category_id: str):
        self.category_id = category_id
        super().__init__(f"unknown category: {category_id!r}")


class DuplicateSeedError(CodecatError):
    def __init__(self, unit_id: str):
        self.unit_id = unit_id
        super().__init__(f"more than one seed assignment for unit {unit_id!r}")


class CategoryNotInCandidatesError(CodecatError):
    """Manual assignment outside the unit's remaining candidate set."""

    def __init__(self, unit_id: str, category_id: str, candidates: frozenset[str]):
        self.unit_id = unit_id
        self.category_id = category_id
        self.candidates = candidates
        listed = ", ".join(sorted(candidates)) or "(none)"
        super().__init__(
            f"{category_id!r} is not a remaining candidate of {unit_id!r}; "
            f"current candidates: {listed}"
        )


class IncompleteAssignmentError(CodecatError):
    def __init__(self, missing: tuple[str, ...]):
        self.missing = missing
        super().__init__(f"units without a single category: {', '.join(missing)}")


class EmptySpecificSetError(CodecatError):
    def __init__(self) -> None:
        super().__init__("the lattice declares no specific categories to report on")


class SearchSpaceTooLargeError(CodecatError):
    def __init__(self, combinations: int, limit: int):
        self.combinations = combinations
        self.limit = limit
        super().__init__(
            f"exhaustive enumeration of {combinations} assignments exceeds limit {limit}"
        )
