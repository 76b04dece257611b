"""Brute-force ground truth for the translation rules.

Evaluates restriction expressions directly against loaded tables, reading
the constructs' meaning off their definitions: closed world, rows as facts.
Deliberately shares no predicate-evaluation or grouping code with the
relational backend, so engine/oracle agreement in the differential tests is
evidence rather than tautology. Quadratic loops are fine here.
"""

from __future__ import annotations

from . import dlq
from .backend import Database, RowSet, Table
from .errors import CrossRelationExpression, MissingColumn, MissingRelation, MixedOnlyAssertion, UnsupportedConstruct
from .mappings import MappingRegistry, relation_of, resolve_property
from .ontology import OntologySnapshot


def _sort_key(row: tuple) -> tuple:
    return tuple((v is None, v if v is not None else "") for v in row)


class _RowJudge:
    """Row-level truth of an expression, one table at a time."""

    def __init__(self, table: Table, relation: str, reg: MappingRegistry,
                 ont: OntologySnapshot):
        self.table = table
        self.relation = relation
        self.reg = reg
        self.ont = ont

    def token(self, row: tuple, prop: str):
        column = resolve_property(self.reg, self.ont, prop).column
        for position, name in enumerate(self.table.header):
            if name == column:
                return row[position]
        raise MissingColumn(self.relation, column)

    def allowed_tokens(self, operand) -> set[str]:
        if isinstance(operand, dlq.ClassOperand):
            return set(self.ont.extension_tokens(operand.name))
        return set(operand.names)

    def satisfied(self, expr: dlq.RestrictionExpr, row: tuple) -> bool:
        if isinstance(expr, dlq.Has):
            value = self.token(row, expr.prop)
            hit = value in expr.values
            return not hit if expr.negated else hit
        if isinstance(expr, dlq.Some):
            return self.token(row, expr.prop) in self.allowed_tokens(expr.operand)
        if isinstance(expr, dlq.Complement):
            return not self.satisfied(expr.child, row)
        if isinstance(expr, dlq.Union):
            return any(self.satisfied(c, row) for c in expr.children)
        if isinstance(expr, dlq.Intersection):
            return all(self.satisfied(c, row) for c in expr.children)
        raise UnsupportedConstruct("only/allValuesFrom is entity-level, not row-level")


def _table_for(expr_or_exprs, db: Database, reg: MappingRegistry,
               ont: OntologySnapshot):
    exprs = expr_or_exprs if isinstance(expr_or_exprs, list) else [expr_or_exprs]
    relations = {relation_of(reg, ont, e).qualified for e in exprs}
    if len(relations) != 1:
        raise CrossRelationExpression(tuple(relations))
    qualified = relations.pop()
    table = db.tables.get(qualified)
    if table is None:
        raise MissingRelation(qualified)
    return reg.relation_map[qualified], table


def _key_positions(table: Table, relation: str, key: tuple[str, ...]) -> list[int]:
    positions = []
    for column in key:
        for position, name in enumerate(table.header):
            if name == column:
                positions.append(position)
                break
        else:
            raise MissingColumn(relation, column)
    return positions


def oracle_rows(expr: dlq.RestrictionExpr, db: Database, reg: MappingRegistry,
                ont: OntologySnapshot) -> RowSet:
    """Rows selected by an assertion, straight from the definitions.

    ``only`` keeps the rows of entities all of whose values for the property
    lie in the allowed set; entities are grouped by the first primary-key
    column, the anchor the NOT-IN rewrite uses.
    """
    meta, table = _table_for(expr, db, reg, ont)
    judge = _RowJudge(table, meta.qualified, reg, ont)

    if isinstance(expr, dlq.Only):
        allowed = judge.allowed_tokens(expr.operand)
        anchor = _key_positions(table, meta.qualified, meta.primary_key[:1])[0]
        offenders = set()
        for row in table.rows:
            if judge.token(row, expr.prop) not in allowed:
                offenders.add(row[anchor])
        kept = [row for row in table.rows if row[anchor] not in offenders]
    else:
        kept = [row for row in table.rows if judge.satisfied(expr, row)]
    return RowSet(table.header, tuple(sorted(set(kept), key=_sort_key)))


def _assertion_columns(expr: dlq.RestrictionExpr, reg: MappingRegistry,
                       ont: OntologySnapshot) -> set[str]:
    if isinstance(expr, (dlq.Some, dlq.Only, dlq.Has)):
        return {resolve_property(reg, ont, expr.prop).column}
    if isinstance(expr, dlq.Complement):
        return _assertion_columns(expr.child, reg, ont)
    columns: set[str] = set()
    for child in expr.children:
        columns |= _assertion_columns(child, reg, ont)
    return columns


def oracle_keys(definition: dlq.ConceptDefinition, db: Database,
                reg: MappingRegistry, ont: OntologySnapshot) -> list[tuple]:
    """Entity keys satisfying every assertion of a concept.

    Pairwise-disjoint column sets mean one row must satisfy the conjunction
    of all assertions; any shared column means each assertion independently
    needs a witness row per entity (the division reading). An ``only``
    assertion requires the absence of violating rows.
    """
    assertions = list(definition.assertions)
    meta, table = _table_for(assertions, db, reg, ont)
    judge = _RowJudge(table, meta.qualified, reg, ont)
    key_at = _key_positions(table, meta.qualified, meta.primary_key)
    anchor = key_at[0]

    def key_of(row: tuple) -> tuple:
        return tuple(row[i] for i in key_at)

    if len(assertions) == 1:
        rows = oracle_rows(assertions[0], db, reg, ont)
        positions = _key_positions(Table(rows.header, rows.rows), meta.qualified,
                                   meta.primary_key)
        keys = {tuple(row[i] for i in positions) for row in rows.rows}
        return sorted(keys, key=_sort_key)

    columns = [_assertion_columns(a, reg, ont) for a in assertions]
    only_at = [i for i, a in enumerate(assertions) if isinstance(a, dlq.Only)]

    all_keys = {key_of(row) for row in table.rows}

    if only_at:
        for i in only_at:
            rest = set().union(*(columns[j] for j in range(len(assertions)) if j != i))
            if columns[i] & rest:
                raise MixedOnlyAssertion(
                    f"assertion {i + 1} (only) shares a column with another assertion"
                )
        surviving = set(all_keys)
        for a in assertions:
            if isinstance(a, dlq.Only):
                allowed = judge.allowed_tokens(a.operand)
                offenders = {
                    row[anchor] for row in table.rows
                    if judge.token(row, a.prop) not in allowed
                }
                # the key tuple starts with the first primary-key column
                surviving &= {k for k in all_keys if k[0] not in offenders}
            else:
                witnesses = {key_of(row) for row in table.rows if judge.satisfied(a, row)}
                surviving &= witnesses
        return sorted(surviving, key=_sort_key)

    disjoint = all(
        not (columns[i] & columns[j])
        for i in range(len(columns)) for j in range(i + 1, len(columns))
    )
    if disjoint:
        keys = {
            key_of(row) for row in table.rows
            if all(judge.satisfied(a, row) for a in assertions)
        }
        return sorted(keys, key=_sort_key)

    surviving = set(all_keys)
    for a in assertions:
        surviving &= {key_of(row) for row in table.rows if judge.satisfied(a, row)}
    return sorted(surviving, key=_sort_key)
