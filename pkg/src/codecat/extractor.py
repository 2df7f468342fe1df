"""Dependency extraction from source files in a small class-based OO dialect.

Supported surface: package/import headers, class/interface declarations
with extends/implements, and bodies scanned token-wise. Heritage clauses,
`new`, and `throws` claim their type tokens with the specific dependency
kind; any other token that names a known type becomes a Usage occurrence,
as does a member access through a variable of known type. There is no type
checking and no generics/overload resolution.
"""

from __future__ import annotations

import fnmatch
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SourceLexError, UnsupportedConstructError
from .graph import CodeUnit, DependencyEdge, DependencyGraph, DependencyKind

MODIFIERS = {"public", "private", "protected", "static", "final", "abstract"}
PRIMITIVES = {
    "void", "int", "long", "short", "byte", "char", "boolean", "double", "float", "var",
}
STATEMENT_WORDS = {
    "return", "if", "else", "while", "do", "for", "switch", "case", "default",
    "break", "continue", "this", "super", "null", "true", "false",
    "try", "catch", "finally", "throw", "instanceof", "assert",
}
SKIP_WORDS = MODIFIERS | PRIMITIVES | STATEMENT_WORDS


@dataclass(frozen=True)
class ExtractionConfig:
    ignore_unused_imports: bool = False
    # (glob pattern, category id), matched against qualified names of
    # undeclared references, in declaration order, first match wins
    package_seed_patterns: tuple[tuple[str, str], ...] = ()
    naming_enabled: bool = False
    naming_min_prefix: int = 3


@dataclass(frozen=True)
class ExtractionResult:
    graph: DependencyGraph
    # human-readable notes about dropped unresolved references, sorted
    warnings: tuple[str, ...]
    # (unit id, category id) seed suggestions for external units created
    # through package_seed_patterns
    seeds: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident" | "punct"
    text: str
    line: int


@dataclass
class _Import:
    simple: str
    qualified: str
    line: int
    used: bool = False


@dataclass
class _Decl:
    name: str
    unit_kind: str  # "class" | "interface"
    line: int
    extends: list[tuple[str, int]] = field(default_factory=list)
    implements: list[tuple[str, int]] = field(default_factory=list)
    body: tuple[int, int] = (0, 0)  # token index range, exclusive of braces


@dataclass
class _FileScan:
    name: str
    tokens: list[_Token]
    package: str = ""
    imports: list[_Import] = field(default_factory=list)
    decls: list[_Decl] = field(default_factory=list)


def extract_from_source(files, config: ExtractionConfig = ExtractionConfig()) -> ExtractionResult:
    """Extract a dependency graph from source files.

    files is an iterable of paths or (name, text) pairs; locations in the
    output use the given name verbatim. Output is canonically ordered, so
    repeated runs over the same input are byte-identical.
    """
    sources: list[tuple[str, str]] = []
    for item in files:
        if isinstance(item, tuple):
            sources.append(item)
        else:
            path = Path(item)
            sources.append((str(item), path.read_text(encoding="utf-8")))
    sources.sort(key=lambda pair: pair[0])

    scans = [_scan_structure(name, _lex(name, text)) for name, text in sources]

    units: dict[str, CodeUnit] = {}
    for scan in scans:
        for decl in scan.decls:
            uid = f"{scan.package}.{decl.name}" if scan.package else decl.name
            units[uid] = CodeUnit(
                uid, decl.name, decl.unit_kind, f"{scan.name}:{decl.line}", external=False
            )

    ctx = _Resolution(units, config)
    edges: list[DependencyEdge] = []
    for scan in scans:
        edges.extend(_emit_file_edges(scan, ctx, config))

    graph = DependencyGraph(ctx.units.values(), edges)
    return ExtractionResult(
        graph, tuple(sorted(ctx.warnings)), tuple(sorted(ctx.seeds.items()))
    )


class _Resolution:
    """Shared name-resolution state: declared units, created externals,
    drop warnings, and seed suggestions from package patterns."""

    def __init__(self, units: dict[str, CodeUnit], config: ExtractionConfig):
        self.units = units
        self.config = config
        self.warnings: set[str] = set()
        self.seeds: dict[str, str] = {}

    def external(self, qualified: str) -> str | None:
        """Create (or reuse) an external unit when a pattern matches."""
        if qualified in self.units:
            return qualified
        for pattern, category in self.config.package_seed_patterns:
            if fnmatch.fnmatchcase(qualified, pattern):
                simple = qualified.rsplit(".", 1)[-1]
                self.units[qualified] = CodeUnit(qualified, simple, "class", None, external=True)
                self.seeds[qualified] = category
                return qualified
        return None

    def warn(self, qualified: str, file: str) -> None:
        self.warnings.add(f"{file}: unresolved reference {qualified!r} dropped")


def _emit_file_edges(scan: _FileScan, ctx: _Resolution, config: ExtractionConfig) -> list[DependencyEdge]:
    edges: list[DependencyEdge] = []
    import_by_simple = {imp.simple: imp for imp in scan.imports}

    def resolve(name: str, file_line: int, strong: bool) -> str | None:
        """Resolve a type reference to a unit id.

        Strong positions (heritage, throws, new, declarations, imports) may
        create external units via package patterns and warn when dropping;
        weak positions (bare tokens in bodies) only ever hit names already
        known or explicitly imported.
        """
        if "." in name:
            if name in ctx.units:
                return name
            if strong:
                resolved = ctx.external(name)
                if resolved is None:
                    ctx.warn(name, scan.name)
                return resolved
            return None
        local = f"{scan.package}.{name}" if scan.package else name
        if local in ctx.units:
            return local
        imp = import_by_simple.get(name)
        if imp is not None:
            imp.used = True
            if imp.qualified in ctx.units:
                return imp.qualified
            resolved = ctx.external(imp.qualified)
            if resolved is None:
                ctx.warn(imp.qualified, scan.name)
            return resolved
        if strong:
            resolved = ctx.external(local)
            if resolved is None:
                ctx.warn(local, scan.name)
            return resolved
        return None

    for decl in scan.decls:
        src = f"{scan.package}.{decl.name}" if scan.package else decl.name

        def edge(target: str | None, kind: DependencyKind, line: int) -> None:
            if target is not None:
                edges.append(DependencyEdge(src, target, kind, f"{scan.name}:{line}"))

        for name, line in decl.extends:
            edge(resolve(name, line, strong=True), DependencyKind.INHERITANCE, line)
        for name, line in decl.implements:
            edge(resolve(name, line, strong=True), DependencyKind.IMPLEMENTATION, line)
        edges.extend(_scan_body(scan, decl, src, resolve))

    # import edges last: body scanning above decides the used flags
    for imp in scan.imports:
        target = imp.qualified if imp.qualified in ctx.units else ctx.external(imp.qualified)
        if target is None:
            ctx.warn(imp.qualified, scan.name)
            continue
        if config.ignore_unused_imports and not imp.used:
            continue
        for decl in scan.decls:
            src = f"{scan.package}.{decl.name}" if scan.package else decl.name
            edges.append(
                DependencyEdge(src, target, DependencyKind.IMPORT, f"{scan.name}:{imp.line}")
            )
    return edges


def _scan_body(scan: _FileScan, decl: _Decl, src: str, resolve) -> list[DependencyEdge]:
    tokens = scan.tokens
    start, end = decl.body
    edges: list[DependencyEdge] = []
    variables = _collect_variables(tokens, start, end, resolve)

    def edge(target: str | None, kind: DependencyKind, line: int) -> None:
        if target is not None:
            edges.append(DependencyEdge(src, target, kind, f"{scan.name}:{line}"))

    i = start
    while i < end:
        tok = tokens[i]
        if tok.kind != "ident":
            i += 1
            continue
        word = tok.text
        if word == "new":
            name, line, i = _dotted(tokens, i + 1, end)
            if name and name not in SKIP_WORDS:
                edge(resolve(name, line, strong=True), DependencyKind.INSTANTIATION, line)
            continue
        if word == "throws":
            i += 1
            while i < end:
                name, line, i = _dotted(tokens, i, end)
                if not name:
                    break
                if name not in SKIP_WORDS:
                    edge(resolve(name, line, strong=True), DependencyKind.EXCEPTION_THROWING, line)
                if i < end and tokens[i].kind == "punct" and tokens[i].text == ",":
                    i += 1
                    continue
                break
            continue
        if word in SKIP_WORDS or word in ("class", "interface", "extends", "implements", "package", "import"):
            i += 1
            continue

        nxt = tokens[i + 1] if i + 1 < end else None
        if word in variables and nxt is not None and nxt.kind == "punct" and nxt.text == ".":
            # member access / method call through a variable of known type
            edge(variables[word], DependencyKind.USAGE, tok.line)
            i += 2
            if i < end and tokens[i].kind == "ident":
                i += 1  # the member name itself is not a type reference
            continue

        known = resolve(word, tok.line, strong=False)
        if known is not None:
            edge(known, DependencyKind.USAGE, tok.line)
            if nxt is not None and nxt.kind == "ident":
                i += 2  # declaration `B b` or method signature `B m(`
                continue
            if nxt is not None and nxt.kind == "punct" and nxt.text == ".":
                i += 2
                if i < end and tokens[i].kind == "ident":
                    i += 1  # static member name
                continue
            i += 1
            continue

        if nxt is not None and nxt.kind == "ident":
            # looks like a declaration with an undeclared type
            resolved = resolve(word, tok.line, strong=True)
            edge(resolved, DependencyKind.USAGE, tok.line)
            i += 2
            continue
        i += 1
    return edges


def _collect_variables(tokens: list[_Token], start: int, end: int, resolve) -> dict[str, str]:
    """Pre-pass over a type body mapping variable names (fields, locals,
    parameters) to the unit id of their declared type, so member accesses
    resolve regardless of declaration order. `B name (` is a method
    signature, not a variable."""
    variables: dict[str, str] = {}
    for i in range(start, end):
        tok = tokens[i]
        if tok.kind != "ident" or tok.text in SKIP_WORDS or tok.text == "new":
            continue
        if i > start and tokens[i - 1].kind == "ident" and tokens[i - 1].text in ("new", "throws"):
            continue
        nxt = tokens[i + 1] if i + 1 < end else None
        if nxt is None or nxt.kind != "ident":
            continue
        after = tokens[i + 2] if i + 2 < end else None
        if after is not None and after.kind == "punct" and after.text == "(":
            continue
        type_id = resolve(tok.text, tok.line, strong=False)
        if type_id is not None:
            variables[nxt.text] = type_id
    return variables


def _dotted(tokens: list[_Token], i: int, end: int) -> tuple[str, int, int]:
    """Parse a dotted identifier starting at i; returns (name, line, next_i).
    name is "" when i does not start an identifier."""
    if i >= end or tokens[i].kind != "ident":
        return "", 0, i
    line = tokens[i].line
    parts = [tokens[i].text]
    i += 1
    while (
        i + 1 < end
        and tokens[i].kind == "punct"
        and tokens[i].text == "."
        and tokens[i + 1].kind == "ident"
    ):
        parts.append(tokens[i + 1].text)
        i += 2
    return ".".join(parts), line, i


# -- structural pass ---------------------------------------------------------


def _scan_structure(name: str, tokens: list[_Token]) -> _FileScan:
    scan = _FileScan(name, tokens)
    i = 0
    n = len(tokens)

    def fail(line: int, message: str):
        raise UnsupportedConstructError(name, line, message)

    if i < n and tokens[i].kind == "ident" and tokens[i].text == "package":
        pkg, line, i = _dotted(tokens, i + 1, n)
        if not pkg:
            fail(tokens[i - 1].line if i else 1, "package name expected")
        i = _expect_semi(tokens, i, n, name)
        scan.package = pkg

    while i < n and tokens[i].kind == "ident" and tokens[i].text == "import":
        start_line = tokens[i].line
        qualified, line, i = _dotted(tokens, i + 1, n)
        if not qualified:
            fail(start_line, "import name expected")
        if i < n and tokens[i].kind == "punct" and tokens[i].text == ".":
            fail(start_line, "wildcard imports are not supported")
        if i < n and tokens[i].kind == "punct" and tokens[i].text == "*":
            fail(start_line, "wildcard imports are not supported")
        i = _expect_semi(tokens, i, n, name)
        scan.imports.append(_Import(qualified.rsplit(".", 1)[-1], qualified, start_line))

    while i < n:
        tok = tokens[i]
        if tok.kind == "punct" and tok.text == ";":
            i += 1
            continue
        if tok.kind == "ident" and tok.text in MODIFIERS:
            i += 1
            continue
        if tok.kind == "ident" and tok.text in ("class", "interface"):
            decl = _Decl("", tok.text, tok.line)
            i += 1
            if i >= n or tokens[i].kind != "ident":
                fail(tok.line, f"{tok.text} name expected")
            decl.name = tokens[i].text
            i += 1
            while i < n and tokens[i].kind == "ident" and tokens[i].text in ("extends", "implements"):
                clause = tokens[i].text
                if clause == "implements" and decl.unit_kind == "interface":
                    fail(tokens[i].line, "interfaces cannot implement")
                i += 1
                while True:
                    tname, tline, i = _dotted(tokens, i, n)
                    if not tname:
                        fail(tok.line, f"type name expected after {clause}")
                    target = decl.extends if clause == "extends" else decl.implements
                    target.append((tname, tline))
                    if i < n and tokens[i].kind == "punct" and tokens[i].text == ",":
                        i += 1
                        continue
                    break
            if i >= n or tokens[i].kind != "punct" or tokens[i].text != "{":
                fail(tok.line, "declaration body expected")
            depth = 1
            body_start = i + 1
            i += 1
            while i < n and depth:
                if tokens[i].kind == "punct":
                    if tokens[i].text == "{":
                        depth += 1
                    elif tokens[i].text == "}":
                        depth -= 1
                i += 1
            if depth:
                fail(tok.line, "unbalanced braces")
            decl.body = (body_start, i - 1)
            scan.decls.append(decl)
            continue
        fail(tok.line, f"unexpected token {tok.text!r} at top level")
    return scan


def _expect_semi(tokens: list[_Token], i: int, n: int, name: str) -> int:
    if i >= n or tokens[i].kind != "punct" or tokens[i].text != ";":
        line = tokens[i].line if i < n else (tokens[-1].line if tokens else 1)
        raise UnsupportedConstructError(name, line, "';' expected")
    return i + 1


# -- lexer -------------------------------------------------------------------


def _lex(name: str, text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    line = 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch in " \t\r\f":
            i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            start_line = line
            i += 2
            while i < n and not (text[i] == "*" and i + 1 < n and text[i + 1] == "/"):
                if text[i] == "\n":
                    line += 1
                i += 1
            if i >= n:
                raise SourceLexError(name, start_line, "unterminated block comment")
            i += 2
            continue
        if ch in "\"'":
            start_line = line
            quote = ch
            i += 1
            while i < n and text[i] != quote:
                if text[i] == "\n":
                    raise SourceLexError(name, start_line, "unterminated string literal")
                if text[i] == "\\":
                    i += 1
                i += 1
            if i >= n:
                raise SourceLexError(name, start_line, "unterminated string literal")
            i += 1
            continue
        if ch.isdigit():
            while i < n and (text[i].isalnum() or text[i] in "._"):
                i += 1
            continue
        if ch.isalpha() or ch in "_$":
            start = i
            while i < n and (text[i].isalnum() or text[i] in "_$"):
                i += 1
            tokens.append(_Token("ident", text[start:i], line))
            continue
        if ch.isprintable():
            tokens.append(_Token("punct", ch, line))
            i += 1
            continue
        raise SourceLexError(name, line, f"illegal character {ch!r}")
    return tokens
