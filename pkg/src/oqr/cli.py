"""Command-line entry point.

Verbs: validate, translate, execute, oracle, fuzz, concept save|list|show|
delete, serve. Exit codes: 0 success, 1 user error, 2 internal error,
3 fuzz divergence. OQR_STORE sets the default concept-store file.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback

from . import dlq
from .backend import format_rowset
from .errors import OqrError
from .fuzz import run_campaign
from .session import Workspace

EXIT_OK = 0
EXIT_USER = 1
EXIT_INTERNAL = 2
EXIT_DIVERGENCE = 3


def _add_inputs(parser: argparse.ArgumentParser, data: bool = False,
                store: bool = False) -> None:
    parser.add_argument("--ontology", required=True, help="ontology definition file (ODF)")
    parser.add_argument("--mappings", required=True, help="ontology mapping file (OMF)")
    if data:
        parser.add_argument("--data", help="directory of <db>.<relation>.csv files")
    if store:
        parser.add_argument("--store", default=os.environ.get("OQR_STORE"),
                            help="concept store file (default: $OQR_STORE)")


def _add_query(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--expr", help="restriction expression text")
    group.add_argument("--concept", help="saved concept name")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oqr",
                                     description="ontology-assisted query reformulation")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="load and validate ontology/mappings/data")
    _add_inputs(p, data=True, store=True)

    p = sub.add_parser("translate", help="translate an expression or concept to RA/SQL")
    _add_inputs(p, store=True)
    _add_query(p)
    p.add_argument("--emit", choices=("sql", "ra", "both"), default="sql")

    p = sub.add_parser("execute", help="translate and evaluate over CSV data")
    _add_inputs(p, data=True, store=True)
    _add_query(p)
    p.add_argument("--keys-only", action="store_true",
                   help="project the result down to entity keys")
    p.add_argument("--emit", choices=("sql", "ra", "both"), default=None,
                   help="also print the translation")

    p = sub.add_parser("oracle", help="brute-force result, bypassing the engine")
    _add_inputs(p, data=True, store=True)
    _add_query(p)

    p = sub.add_parser("fuzz", help="differential campaign: engine vs oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=1000)

    concept = sub.add_parser("concept", help="concept store operations")
    concept_sub = concept.add_subparsers(dest="concept_verb", required=True)

    p = concept_sub.add_parser("save", help="save a concept block")
    _add_inputs(p, store=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--text", help="concept block text: concept <Name> { assert ...; }")
    source.add_argument("--file", help="file containing one concept block")

    p = concept_sub.add_parser("list", help="list stored concepts")
    _add_inputs(p, store=True)

    p = concept_sub.add_parser("show", help="print a stored concept")
    p.add_argument("name")
    _add_inputs(p, store=True)

    p = concept_sub.add_parser("delete", help="delete a stored concept")
    p.add_argument("name")
    _add_inputs(p, store=True)

    p = sub.add_parser("serve", help="start the HTTP service")
    _add_inputs(p, data=True, store=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", help="directory of built wizard assets to serve at /")

    return parser


def _workspace(args: argparse.Namespace, need_store: bool = False) -> Workspace:
    store = getattr(args, "store", None)
    if need_store and store is None:
        raise OqrError("a concept store is required (use --store or set OQR_STORE)")
    return Workspace.load(
        ontology=args.ontology,
        mappings=args.mappings,
        data=getattr(args, "data", None),
        store=store,
    )


def _print_translation(response, emit: str) -> None:
    if emit == "sql":
        print(response.sql)
        return
    if emit == "ra":
        print(response.ra_text)
        return
    print(f"DL:  {response.dl_text}")
    print(f"RA:  {response.ra_text}")
    print(f"SQL: {response.sql}")
    for warning in response.warnings:
        print(f"warning: {warning}", file=sys.stderr)


def _run_validate(args) -> int:
    ws = _workspace(args)
    ont, reg = ws.ont, ws.reg
    print(f"ontology: {len(ont.classes)} classes, {len(ont.properties)} properties, "
          f"{len(ont.individuals)} individuals, {len(ont.links)} links, "
          f"{len(ont.disjoint_pairs)} disjoint pairs")
    print(f"mappings: {len(reg.relations)} relations, {len(reg.bindings)} bindings, "
          f"{len(reg.foreign_keys)} foreign keys")
    if ws.db is not None:
        total = sum(len(t.rows) for t in ws.db.tables.values())
        print(f"data: {len(ws.db.tables)} tables, {total} rows")
    for warning in ont.warnings + (ws.db.warnings if ws.db else ()):
        print(f"warning: {warning}", file=sys.stderr)
    print("ok")
    return EXIT_OK


def _run_translate(args) -> int:
    ws = _workspace(args, need_store=args.concept is not None)
    response = ws.translate(expr=args.expr, concept=args.concept)
    _print_translation(response, args.emit)
    return EXIT_OK


def _run_execute(args) -> int:
    ws = _workspace(args, need_store=args.concept is not None)
    response, rows, kind = ws.execute(expr=args.expr, concept=args.concept,
                                      keys_only=args.keys_only)
    if args.emit is not None:
        _print_translation(response, args.emit)
    print(format_rowset(rows), end="")
    return EXIT_OK


def _run_oracle(args) -> int:
    ws = _workspace(args, need_store=args.concept is not None)
    rows, kind = ws.oracle(expr=args.expr, concept=args.concept)
    print(format_rowset(rows), end="")
    return EXIT_OK


def _run_fuzz(args) -> int:
    result = run_campaign(seed=args.seed, cases=args.cases,
                          progress=lambda n: print(f"... {n} cases", file=sys.stderr))
    if result.ok:
        print(f"{result.agreed}/{result.cases} agree")
        return EXIT_OK
    print(f"divergence after {result.agreed} agreeing cases", file=sys.stderr)
    print(result.divergence.report(), file=sys.stderr)
    return EXIT_DIVERGENCE


def _run_concept(args) -> int:
    ws = _workspace(args, need_store=True)
    store = ws.store
    if args.concept_verb == "save":
        text = args.text
        if text is None:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        definition = dlq.parse_concept(text.strip(), ws.ont)
        entry = store.save(definition, ws.reg)
        print(f"saved {entry.name}")
    elif args.concept_verb == "list":
        for name in store.list():
            print(name)
    elif args.concept_verb == "show":
        entry = store.get(args.name)
        print(f"# concept {entry.name} created {entry.created} modified {entry.modified}")
        print(entry.text)
    elif args.concept_verb == "delete":
        store.delete(args.name)
        print(f"deleted {args.name}")
    return EXIT_OK


def _run_serve(args) -> int:
    import uvicorn

    from .service import create_app

    ws = _workspace(args)
    app = create_app(ws, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


_RUNNERS = {
    "validate": _run_validate,
    "translate": _run_translate,
    "execute": _run_execute,
    "oracle": _run_oracle,
    "fuzz": _run_fuzz,
    "concept": _run_concept,
    "serve": _run_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _RUNNERS[args.verb](args)
    except OqrError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_USER
    except (FileNotFoundError, NotADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
