"""In-memory relational backend: CSV tables, plan evaluation, SQL emission.

Set semantics throughout: results are deduplicated and ordered
lexicographically so goldens are reproducible. Empty CSV fields load as a
NULL token that never satisfies an equality atom and always satisfies a
negated one (a deliberate, documented divergence from ANSI three-valued
logic; the loader warns when a mapped column contains NULLs).

Emitted SQL uses only SELECT / FROM / WHERE / = / <> / AND / OR / NOT /
IN / NOT IN / INTERSECT / UNION and parentheses, and is byte-identical for
structurally equal plans.
"""

from __future__ import annotations

import csv
import io
import sqlite3
from dataclasses import dataclass, field
from pathlib import Path

from .engine import (
    And,
    AntiMembership,
    Eq,
    KeySetOp,
    Not,
    Or,
    Pred,
    ProjectKeys,
    RAExpr,
    Scan,
    Select,
    plan_relation,
)
from .errors import ArityError, HeaderMismatch, MissingColumn, MissingRelation
from .mappings import MappingRegistry
from .names import canon

Row = tuple  # of str | None


@dataclass(frozen=True)
class Table:
    header: tuple[str, ...]
    rows: tuple[Row, ...]


@dataclass(frozen=True)
class Database:
    tables: dict[str, Table] = field(default_factory=dict)  # qualified name -> table
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class RowSet:
    header: tuple[str, ...]
    rows: tuple[Row, ...]  # deduplicated, canonically ordered


def _row_sort_key(row: Row) -> tuple:
    return tuple((value is None, value if value is not None else "") for value in row)


def _rowset(header: tuple[str, ...], rows) -> RowSet:
    return RowSet(header, tuple(sorted(set(rows), key=_row_sort_key)))


# --------------------------------------------------------------------------
# CSV loading
# --------------------------------------------------------------------------

def load_csv(directory: str | Path, reg: MappingRegistry) -> Database:
    """Load one ``<db>.<relation>.csv`` per declared relation.

    Headers must match the declared columns exactly (order included); every
    value token is canonicalized on the way in, so emitted SQL and loaded
    data agree on spelling.
    """
    directory = Path(directory)
    texts: dict[str, str] = {}
    for meta in reg.relations:
        path = directory / f"{meta.qualified}.csv"
        if not path.is_file():
            raise MissingRelation(meta.qualified)
        texts[meta.qualified] = path.read_text(encoding="utf-8")
    return load_csv_data(texts, reg)


def load_csv_data(texts: dict[str, str], reg: MappingRegistry) -> Database:
    """Load relations from in-memory CSV text, one entry per declared relation."""
    tables: dict[str, Table] = {}
    warnings: list[str] = []
    mapped: dict[str, set[str]] = {}
    for binding in reg.bindings:
        mapped.setdefault(binding.relation, set()).add(binding.column)

    for meta in reg.relations:
        text = texts.get(meta.qualified)
        if text is None:
            raise MissingRelation(meta.qualified)
        reader = csv.reader(io.StringIO(text))
        try:
            header = tuple(cell.strip() for cell in next(reader))
        except StopIteration:
            raise HeaderMismatch(meta.qualified, meta.columns, ()) from None
        if header != meta.columns:
            raise HeaderMismatch(meta.qualified, meta.columns, header)
        rows: list[Row] = []
        null_columns: set[str] = set()
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise ArityError(meta.qualified, line_no, len(header), len(record))
            row = tuple(canon(cell) if cell.strip() else None for cell in record)
            for col, value in zip(header, row):
                if value is None and col in mapped.get(meta.qualified, ()):
                    null_columns.add(col)
            rows.append(row)
        for col in sorted(null_columns):
            warnings.append(f"{meta.qualified}.{col}: mapped column contains NULLs")
        tables[meta.qualified] = Table(header, tuple(rows))
    return Database(tables=tables, warnings=tuple(warnings))


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

def _column_index(header: tuple[str, ...], relation: str) -> dict[str, int]:
    return {col: i for i, col in enumerate(header)}


def _index_of(idx: dict[str, int], relation: str, column: str) -> int:
    if column not in idx:
        raise MissingColumn(relation, column)
    return idx[column]


def _eval_pred(pred: Pred, row: Row, idx: dict[str, int], relation: str) -> bool:
    if isinstance(pred, Eq):
        return row[_index_of(idx, relation, pred.column)] == pred.token
    if isinstance(pred, Not):
        return not _eval_pred(pred.child, row, idx, relation)
    if isinstance(pred, And):
        return all(_eval_pred(c, row, idx, relation) for c in pred.children)
    return any(_eval_pred(c, row, idx, relation) for c in pred.children)


def _table(db: Database, relation: str) -> Table:
    table = db.tables.get(relation)
    if table is None:
        raise MissingRelation(relation)
    return table


def eval_ra(plan: RAExpr, db: Database) -> RowSet:
    """Evaluate a plan over loaded tables, set semantics."""
    if isinstance(plan, Scan):
        table = _table(db, plan.relation)
        return _rowset(table.header, table.rows)

    if isinstance(plan, Select):
        source = eval_ra(plan.source, db)
        relation = plan_relation(plan)
        idx = _column_index(source.header, relation)
        kept = [r for r in source.rows if _eval_pred(plan.predicate, r, idx, relation)]
        return _rowset(source.header, kept)

    if isinstance(plan, AntiMembership):
        table = _table(db, plan.relation)
        idx = _column_index(table.header, plan.relation)
        key_at = [_index_of(idx, plan.relation, k) for k in plan.key]
        violating = {
            tuple(r[i] for i in key_at)
            for r in table.rows
            if _eval_pred(plan.violating, r, idx, plan.relation)
        }
        kept = [r for r in table.rows if tuple(r[i] for i in key_at) not in violating]
        return _rowset(table.header, kept)

    if isinstance(plan, KeySetOp):
        table = _table(db, plan.relation)
        idx = _column_index(table.header, plan.relation)
        key_at = [_index_of(idx, plan.relation, k) for k in plan.key]
        anchor_at = key_at[0]  # negated parts anchor NOT IN on the first key column
        part_keys: list[set] = []
        for part in plan.parts:
            if part.negated:
                offenders = {
                    r[anchor_at] for r in table.rows
                    if _eval_pred(part.predicate, r, idx, plan.relation)
                }
                keys = {
                    tuple(r[i] for i in key_at)
                    for r in table.rows if r[anchor_at] not in offenders
                }
            else:
                keys = {
                    tuple(r[i] for i in key_at)
                    for r in table.rows
                    if _eval_pred(part.predicate, r, idx, plan.relation)
                }
            part_keys.append(keys)
        combined = part_keys[0]
        for keys in part_keys[1:]:
            combined = combined & keys if plan.op == "intersect" else combined | keys
        return _rowset(plan.key, combined)

    if isinstance(plan, ProjectKeys):
        source = eval_ra(plan.source, db)
        relation = plan_relation(plan)
        idx = _column_index(source.header, relation)
        key_at = [_index_of(idx, relation, k) for k in plan.key]
        return _rowset(plan.key, (tuple(r[i] for i in key_at) for r in source.rows))

    raise TypeError(f"not a plan: {plan!r}")


# --------------------------------------------------------------------------
# SQL emission
# --------------------------------------------------------------------------

def _quote(token: str) -> str:
    return "'" + token.replace("'", "''") + "'"


def _sql_pred(pred: Pred) -> str:
    if isinstance(pred, Eq):
        return f"{pred.column} = {_quote(pred.token)}"
    if isinstance(pred, Not):
        if isinstance(pred.child, Eq):
            return f"{pred.child.column} <> {_quote(pred.child.token)}"
        return f"NOT ({_sql_pred(pred.child)})"
    joiner = " AND " if isinstance(pred, And) else " OR "
    rendered = [
        f"({_sql_pred(c)})" if isinstance(c, (And, Or)) else _sql_pred(c)
        for c in pred.children
    ]
    return joiner.join(rendered)


def _bare_relation(qualified: str) -> str:
    return qualified.split(".", 1)[1]


def _conjuncts(plan: RAExpr) -> tuple[str, list[str]]:
    """Relation name plus an ordered list of WHERE conjuncts."""
    if isinstance(plan, Scan):
        return _bare_relation(plan.relation), []
    if isinstance(plan, Select):
        relation, conj = _conjuncts(plan.source)
        return relation, conj + [_sql_pred(plan.predicate)]
    if isinstance(plan, AntiMembership):
        relation = _bare_relation(plan.relation)
        key = plan.key[0]
        inner = f"SELECT {key} FROM {relation} WHERE {_sql_pred(plan.violating)}"
        return relation, [f"{key} NOT IN ({inner})"]
    raise TypeError(f"cannot render {type(plan).__name__} as a selection")


def _where(conjuncts: list[str]) -> str:
    if not conjuncts:
        return ""
    if len(conjuncts) == 1:
        return f" WHERE {conjuncts[0]}"
    return " WHERE " + " AND ".join(f"({c})" for c in conjuncts)


def emit_sql(plan: RAExpr) -> str:
    """Deterministic ANSI-SQL text for a plan (structural equality => byte equality)."""
    if isinstance(plan, (Scan, Select, AntiMembership)):
        relation, conjuncts = _conjuncts(plan)
        return f"SELECT * FROM {relation}{_where(conjuncts)}"

    if isinstance(plan, KeySetOp):
        relation = _bare_relation(plan.relation)
        keys = ", ".join(plan.key)
        branches = []
        for part in plan.parts:
            if part.negated:
                anchor = plan.key[0]
                inner = f"SELECT {anchor} FROM {relation} WHERE {_sql_pred(part.predicate)}"
                branches.append(
                    f"SELECT {keys} FROM {relation} WHERE {anchor} NOT IN ({inner})"
                )
            else:
                branches.append(
                    f"SELECT {keys} FROM {relation} WHERE {_sql_pred(part.predicate)}"
                )
        joiner = " INTERSECT " if plan.op == "intersect" else " UNION "
        return joiner.join(branches)

    if isinstance(plan, ProjectKeys):
        if isinstance(plan.source, KeySetOp):
            return emit_sql(plan.source)
        relation, conjuncts = _conjuncts(plan.source)
        keys = ", ".join(plan.key)
        return f"SELECT {keys} FROM {relation}{_where(conjuncts)}"

    raise TypeError(f"not a plan: {plan!r}")


# --------------------------------------------------------------------------
# Cross-engine harness
# --------------------------------------------------------------------------

def load_sqlite(db: Database) -> sqlite3.Connection:
    """Materialize the canonicalized tables in an in-memory SQLite database.

    Used to execute emitted SQL on an independent engine; relations are
    created under their bare (unqualified) names, matching emission.
    """
    conn = sqlite3.connect(":memory:")
    for qualified, table in db.tables.items():
        name = _bare_relation(qualified)
        columns = ", ".join(f"{c} TEXT" for c in table.header)
        conn.execute(f"CREATE TABLE {name} ({columns})")
        placeholders = ", ".join("?" for _ in table.header)
        conn.executemany(f"INSERT INTO {name} VALUES ({placeholders})", table.rows)
    conn.commit()
    return conn


def run_sqlite(db: Database, sql: str) -> list[Row]:
    """Execute SQL on the SQLite twin; deduplicated, canonically ordered rows."""
    conn = load_sqlite(db)
    try:
        fetched = {tuple(row) for row in conn.execute(sql).fetchall()}
    finally:
        conn.close()
    return sorted(fetched, key=_row_sort_key)


def format_rowset(rs: RowSet) -> str:
    """Stable CSV-style text rendering (used by the CLI)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(rs.header)
    for row in rs.rows:
        writer.writerow(["" if v is None else v for v in row])
    return out.getvalue()
