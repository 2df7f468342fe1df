"""Batch command-line interface.

Exit codes: 0 success, 1 analysis ran but found conflicts or violations,
2 invalid input, 3 internal error. Outputs are deterministic for identical
inputs; the only timestamp lives in a single text-mode header line that
--no-timestamp suppresses.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from datetime import datetime, timezone
from pathlib import Path

from .errors import (
    CodecatError,
    DocumentParseError,
    EmptySpecificSetError,
    LatticeValidationError,
)
from .extractor import ExtractionConfig, extract_from_source
from .graph import (
    DependencyKind,
    add_naming_edges,
    filter_by_kind,
    graph_to_doc,
    load_graph_file,
)
from .inference import check_violations, init_state, oracle_enumerate, seeds_from_doc
from .lattice import load_lattice_file
from .reports import (
    candidate_report_doc,
    dump_doc,
    load_state_file,
    state_export_doc,
    violation_report_doc,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

_KIND_NAMES = {k.value for k in DependencyKind}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_INPUT
    try:
        return args.func(args)
    except LatticeValidationError as exc:
        _print_findings(args, exc)
        return EXIT_INPUT
    except CodecatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - report, don't crash the shell
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codecat",
        description="Categorize classes of a codebase by constraint propagation "
        "over its dependency graph and report generation candidates.",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--no-timestamp", action="store_true",
                       help="suppress the header line of text output")

    p = sub.add_parser("validate", help="validate a category-graph document")
    p.add_argument("--categories", required=True, metavar="PATH")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("extract", help="extract a dependency graph from source files")
    p.add_argument("--src", required=True, metavar="DIR")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--naming", action="store_true", help="infer naming edges (prefix rule)")
    p.add_argument("--naming-min-prefix", type=int, default=3, metavar="N")
    p.add_argument("--ignore-unused-imports", action="store_true")
    p.add_argument("--package-map", metavar="PATH",
                   help="JSON mapping glob patterns of undeclared references to categories")
    p.add_argument("--kinds", metavar="LIST", help="comma-separated dependency kinds to keep")
    common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("infer", help="propagate categories to a fixpoint")
    p.add_argument("--categories", required=True, metavar="PATH")
    p.add_argument("--graph", required=True, metavar="PATH")
    p.add_argument("--seeds", required=True, metavar="PATH")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--kinds", metavar="LIST")
    p.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
    common(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("candidates", help="report generation candidates from a state export")
    p.add_argument("--state", required=True, metavar="PATH")
    p.add_argument("--specific", metavar="LIST",
                   help="comma-separated category ids overriding the lattice's specific set")
    common(p)
    p.set_defaults(func=cmd_candidates)

    p = sub.add_parser("check", help="check a total assignment against the allowed matrix")
    p.add_argument("--state", metavar="PATH", help="state export with all units resolved")
    p.add_argument("--categories", metavar="PATH")
    p.add_argument("--graph", metavar="PATH")
    p.add_argument("--seeds", metavar="PATH", help="seeds document assigning every unit")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("serve", help="run the interactive session service")
    p.add_argument("--port", type=int, default=8000, metavar="N")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", metavar="PATH", help="static UI bundle to serve at /")
    p.add_argument("--persist-dir", metavar="PATH", help="snapshot sessions to this directory")
    p.set_defaults(func=cmd_serve)

    return parser


def _header(args, command: str) -> None:
    if args.format == "text" and not args.no_timestamp:
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        print(f"# codecat {command} {stamp}")


def _print_findings(args, exc: LatticeValidationError) -> None:
    fmt = getattr(args, "format", "text")
    if fmt == "json":
        doc = {
            "valid": False,
            "findings": [
                {"code": f.code, "message": f.message, "subject": list(f.subject)}
                for f in exc.findings
            ],
        }
        print(dump_doc(doc), end="")
    else:
        for f in exc.findings:
            print(f"{f.code}: {f.message}")


def _parse_kinds(raw: str | None):
    if raw is None:
        return None
    kinds = []
    for name in raw.split(","):
        name = name.strip()
        if name not in _KIND_NAMES:
            raise CodecatError(f"unknown dependency kind {name!r}")
        kinds.append(DependencyKind(name))
    return frozenset(kinds)


def cmd_validate(args) -> int:
    lattice = load_lattice_file(args.categories)  # LatticeValidationError -> main
    _header(args, "validate")
    if args.format == "json":
        doc = {
            "valid": True,
            "categories": len(lattice.categories),
            "refinements": len(lattice.refinements),
            "root": lattice.root,
            "specific": list(lattice.specific),
        }
        print(dump_doc(doc), end="")
    else:
        print(
            f"OK: {len(lattice.categories)} categories, "
            f"{len(lattice.refinements)} refinements, root {lattice.root!r}"
        )
    return EXIT_OK


def _load_package_map(path: str | None):
    if path is None:
        return ()
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or not isinstance(doc.get("patterns"), list):
        raise CodecatError("package map must be an object with a 'patterns' array")
    patterns = []
    for raw in doc["patterns"]:
        if not isinstance(raw, dict) or "pattern" not in raw or "category" not in raw:
            raise CodecatError("each pattern needs 'pattern' and 'category'")
        patterns.append((raw["pattern"], raw["category"]))
    return tuple(patterns)


def cmd_extract(args) -> int:
    src = Path(args.src)
    if not src.is_dir():
        raise CodecatError(f"source directory not found: {args.src}")
    files = sorted(
        (str(p.relative_to(src)).replace("\\", "/"), p.read_text(encoding="utf-8"))
        for p in src.rglob("*")
        if p.is_file() and not any(part.startswith(".") for part in p.relative_to(src).parts)
    )
    config = ExtractionConfig(
        ignore_unused_imports=args.ignore_unused_imports,
        package_seed_patterns=_load_package_map(args.package_map),
        naming_enabled=args.naming,
        naming_min_prefix=args.naming_min_prefix,
    )
    result = extract_from_source(files, config)
    graph = result.graph
    if args.naming:
        graph = add_naming_edges(graph, config)
    kinds = _parse_kinds(args.kinds)
    if kinds is not None:
        graph = filter_by_kind(graph, kinds)

    Path(args.out).write_text(dump_doc(graph_to_doc(graph)), encoding="utf-8")
    _header(args, "extract")
    if args.format == "json":
        doc = {
            "units": len(graph.units),
            "edges": len(graph.edges),
            "warnings": list(result.warnings),
            "seed_suggestions": [
                {"unit": u, "category": c} for u, c in result.seeds
            ],
            "out": args.out,
        }
        print(dump_doc(doc), end="")
    else:
        print(f"extracted {len(graph.units)} units, {len(graph.edges)} edges -> {args.out}")
        for warning in result.warnings:
            print(f"warning: {warning}")
        for unit, category in result.seeds:
            print(f"seed suggestion: {unit} -> {category}")
    return EXIT_OK


def _load_seeds_file(path: str):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise DocumentParseError(e.msg, f"line {e.lineno} column {e.colno}") from e
    return seeds_from_doc(doc)


def cmd_infer(args) -> int:
    lattice = load_lattice_file(args.categories)
    graph = load_graph_file(args.graph)
    seeds = _load_seeds_file(args.seeds)
    kinds = _parse_kinds(args.kinds)
    if kinds is not None:
        graph = filter_by_kind(graph, kinds)

    state = init_state(graph, lattice, seeds)
    state.propagate()
    Path(args.out).write_text(dump_doc(state_export_doc(state)), encoding="utf-8")

    conflicts = [c.unit for c in state.conflicts()]
    resolved = sum(1 for c in state.candidates.values() if len(c) == 1)

    oracle_note = None
    if args.oracle:
        assignments = oracle_enumerate(graph, lattice, seeds)
        sound = all(
            a[u] in state.candidates[u] for a in assignments for u in state.candidates
        )
        oracle_note = {"assignments": len(assignments), "fixpoint_sound": sound}

    _header(args, "infer")
    if args.format == "json":
        doc = {
            "units": len(state.candidates),
            "resolved": resolved,
            "conflicts": conflicts,
            "iteration": state.iteration,
            "out": args.out,
        }
        if oracle_note is not None:
            doc["oracle"] = oracle_note
        print(dump_doc(doc), end="")
    else:
        print(
            f"inferred categories for {len(state.candidates)} units: "
            f"{resolved} resolved, {len(conflicts)} conflicts -> {args.out}"
        )
        for unit in conflicts:
            print(f"conflict: {unit}")
        if oracle_note is not None:
            print(
                f"oracle: {oracle_note['assignments']} consistent assignments, "
                f"fixpoint sound: {oracle_note['fixpoint_sound']}"
            )
    return EXIT_FINDINGS if conflicts else EXIT_OK


def cmd_candidates(args) -> int:
    state = load_state_file(args.state)
    specific = None
    if args.specific is not None:
        specific = [s.strip() for s in args.specific.split(",") if s.strip()]
        if not specific:
            raise EmptySpecificSetError()
    report = state.generation_candidates(specific)
    doc = candidate_report_doc(report)
    _header(args, "candidates")
    if args.format == "json":
        print(dump_doc(doc), end="")
    else:
        print(f"specific categories: {', '.join(report.specific)}")
        for tier in ("definite", "possible"):
            entries = doc[tier]
            print(f"{tier} ({len(entries)}):")
            for e in entries:
                shown = e["category"] if e["resolved"] else "{" + ", ".join(e["candidates"]) + "}"
                print(f"  {e['unit']} ({shown})")
    return EXIT_OK


def cmd_check(args) -> int:
    if args.state:
        state = load_state_file(args.state)
        graph, lattice = state.graph, state.lattice
        assignment = state.resolved_assignment()
    elif args.categories and args.graph and args.seeds:
        lattice = load_lattice_file(args.categories)
        graph = load_graph_file(args.graph)
        assignment = {s.unit: s.category for s in _load_seeds_file(args.seeds)}
    else:
        raise CodecatError("check needs --state or all of --categories/--graph/--seeds")

    report = check_violations(graph, lattice, assignment)
    _header(args, "check")
    if args.format == "json":
        print(dump_doc(violation_report_doc(report)), end="")
    else:
        if not report:
            print("no violations")
        for v in report.violations:
            where = f" at {v.location}" if v.location else ""
            print(
                f"violation: {v.src} ({v.from_category}) -> {v.dst} ({v.to_category}) "
                f"[{v.kind}]{where}"
            )
    return EXIT_FINDINGS if report else EXIT_OK


def cmd_serve(args) -> int:
    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.bind((args.host, args.port))
        probe.close()
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    import uvicorn

    from .service import create_app

    app = create_app(persist_dir=args.persist_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
