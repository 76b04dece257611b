"""Core translator: restriction expressions to a relational-algebra IR.

The IR mirrors the translation rules: a plain selection for row-level
predicates, an anti-membership subquery for ``only`` (all-values)
restrictions, and a key-set intersection for multi-assertion concepts. The
key-set intersection is the relational-division plan: each part holds the
predicate of one required tuple, and an entity qualifies when its key
survives every part.

Assertion-level plans return full rows of the relation; concept-level
division plans return entity keys. ``as_key_plan`` projects any plan down to
its entity keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import dlq
from .errors import CrossRelationExpression, MixedOnlyAssertion, UnsupportedConstruct
from .mappings import MappingRegistry, RelationMeta, relation_of, resolve_property
from .ontology import OntologySnapshot

if TYPE_CHECKING:
    from .store import ConceptStore


# --------------------------------------------------------------------------
# Predicate tree (boolean tree of column = token atoms)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Eq:
    column: str
    token: str


@dataclass(frozen=True)
class Not:
    child: "Pred"


@dataclass(frozen=True)
class And:
    children: tuple["Pred", ...]  # >= 2


@dataclass(frozen=True)
class Or:
    children: tuple["Pred", ...]  # >= 2


Pred = Eq | Not | And | Or


def _and(children: list[Pred]) -> Pred:
    return children[0] if len(children) == 1 else And(tuple(children))


def _or(children: list[Pred]) -> Pred:
    return children[0] if len(children) == 1 else Or(tuple(children))


# --------------------------------------------------------------------------
# Relational-algebra IR
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Scan:
    relation: str  # qualified db.relation


@dataclass(frozen=True)
class Select:
    source: "RAExpr"
    predicate: Pred


@dataclass(frozen=True)
class AntiMembership:
    """Rows of entities with no row satisfying the violating predicate."""

    relation: str
    key: tuple[str, ...]
    violating: Pred


@dataclass(frozen=True)
class KeySetPart:
    predicate: Pred
    negated: bool = False  # True: entity must have NO row satisfying predicate


@dataclass(frozen=True)
class KeySetOp:
    op: str  # 'intersect' | 'union'
    relation: str
    key: tuple[str, ...]
    parts: tuple[KeySetPart, ...]  # >= 2, all over the same relation and key


@dataclass(frozen=True)
class ProjectKeys:
    source: "RAExpr"
    key: tuple[str, ...]


RAExpr = Scan | Select | AntiMembership | KeySetOp | ProjectKeys


def plan_relation(plan: RAExpr) -> str:
    if isinstance(plan, (Scan, AntiMembership, KeySetOp)):
        return plan.relation
    return plan_relation(plan.source)


# --------------------------------------------------------------------------
# Normalization (negation-normal form)
# --------------------------------------------------------------------------

def normalize(expr: dlq.RestrictionExpr) -> dlq.RestrictionExpr:
    """Push complements to the atoms and expand value sets.

    De Morgan over union/intersection, double complements eliminated,
    complement absorbed into the negated flag of ``has`` atoms, multi-value
    sets expanded into unions (or intersections of negated atoms). The
    row-level truth table is preserved. A complement ending up on an
    ``only`` atom has no translation and is rejected.
    """
    return _normalize(expr, negate=False)


def _normalize(expr: dlq.RestrictionExpr, negate: bool) -> dlq.RestrictionExpr:
    if isinstance(expr, dlq.Complement):
        return _normalize(expr.child, not negate)

    if isinstance(expr, dlq.Union):
        children = [_normalize(c, negate) for c in expr.children]
        return dlq.make_intersection(children) if negate else dlq.make_union(children)

    if isinstance(expr, dlq.Intersection):
        children = [_normalize(c, negate) for c in expr.children]
        return dlq.make_union(children) if negate else dlq.make_intersection(children)

    if isinstance(expr, dlq.Has):
        effective = expr.negated != negate
        atoms: list[dlq.RestrictionExpr] = [
            dlq.Has(expr.prop, (v,), negated=effective) for v in expr.values
        ]
        # P has {a b}  =  P has a  OR  P has b; the negation is the conjunction
        return dlq.make_intersection(atoms) if effective else dlq.make_union(atoms)

    if isinstance(expr, dlq.Some):
        if isinstance(expr.operand, dlq.SetOperand) and len(expr.operand.names) > 1:
            atoms = [dlq.Some(expr.prop, dlq.SetOperand((n,))) for n in expr.operand.names]
            if negate:
                return dlq.make_intersection([dlq.Complement(a) for a in atoms])
            return dlq.make_union(atoms)
        return dlq.Complement(expr) if negate else expr

    if isinstance(expr, dlq.Only):
        if negate:
            raise UnsupportedConstruct("complementOf over an only/allValuesFrom restriction")
        return expr

    raise TypeError(f"not a restriction expression: {expr!r}")


# --------------------------------------------------------------------------
# Translation
# --------------------------------------------------------------------------

def _operand_tokens(operand: dlq.ClassOperand | dlq.SetOperand,
                    ont: OntologySnapshot) -> tuple[str, ...]:
    if isinstance(operand, dlq.ClassOperand):
        return tuple(ont.extension_tokens(operand.name))
    return operand.names


def _membership(column: str, tokens: tuple[str, ...]) -> Pred:
    return _or([Eq(column, t) for t in tokens])


def _predicate(expr: dlq.RestrictionExpr, reg: MappingRegistry,
               ont: OntologySnapshot) -> Pred:
    if isinstance(expr, dlq.Has):
        column = resolve_property(reg, ont, expr.prop).column
        if expr.negated:
            return _and([Not(Eq(column, v)) for v in expr.values])
        return _or([Eq(column, v) for v in expr.values])
    if isinstance(expr, dlq.Some):
        column = resolve_property(reg, ont, expr.prop).column
        return _membership(column, _operand_tokens(expr.operand, ont))
    if isinstance(expr, dlq.Complement):
        return Not(_predicate(expr.child, reg, ont))
    if isinstance(expr, dlq.Union):
        return _or([_predicate(c, reg, ont) for c in expr.children])
    if isinstance(expr, dlq.Intersection):
        return _and([_predicate(c, reg, ont) for c in expr.children])
    raise UnsupportedConstruct(
        "only/allValuesFrom cannot appear inside a row-level predicate"
    )


def _anti_key(meta: RelationMeta, warnings: list[str] | None) -> tuple[str, ...]:
    if len(meta.primary_key) > 1 and warnings is not None:
        warnings.append(
            f"{meta.qualified}: composite primary key; NOT IN rewrite uses "
            f"first key column {meta.primary_key[0]!r} only"
        )
    return (meta.primary_key[0],)


def _only_violation(expr: dlq.Only, reg: MappingRegistry,
                    ont: OntologySnapshot) -> Pred:
    column = resolve_property(reg, ont, expr.prop).column
    return Not(_membership(column, _operand_tokens(expr.operand, ont)))


def translate_assertion(expr: dlq.RestrictionExpr, reg: MappingRegistry,
                        ont: OntologySnapshot,
                        warnings: list[str] | None = None) -> RAExpr:
    """Translate one assertion into a plan over its single relation.

    ``only`` at the root becomes an anti-membership subquery (entities with a
    value outside the allowed set are excluded); everything else maps
    structurally onto a selection predicate.
    """
    expr = normalize(expr)
    meta = relation_of(reg, ont, expr)
    if isinstance(expr, dlq.Only):
        return AntiMembership(
            meta.qualified, _anti_key(meta, warnings), _only_violation(expr, reg, ont)
        )
    return Select(Scan(meta.qualified), _predicate(expr, reg, ont))


def _columns_of(expr: dlq.RestrictionExpr, reg: MappingRegistry,
                ont: OntologySnapshot) -> frozenset[str]:
    if isinstance(expr, (dlq.Some, dlq.Only, dlq.Has)):
        return frozenset((resolve_property(reg, ont, expr.prop).column,))
    if isinstance(expr, dlq.Complement):
        return _columns_of(expr.child, reg, ont)
    out: frozenset[str] = frozenset()
    for child in expr.children:
        out |= _columns_of(child, reg, ont)
    return out


def plan_concept(definition: dlq.ConceptDefinition, reg: MappingRegistry,
                 ont: OntologySnapshot,
                 warnings: list[str] | None = None) -> RAExpr:
    """Plan a whole concept (ordered list of assertions).

    Assertions over pairwise-disjoint column sets are satisfiable by a single
    row, so they conjoin into one selection. Any shared column forces the
    entity-level reading: the division plan, an intersection of per-assertion
    key selections. An ``only`` assertion joins the entity-level plan as a
    negated part; combining it with another assertion on its own column has
    no defined translation.
    """
    assertions = [normalize(a) for a in definition.assertions]
    if len(assertions) == 1:
        return translate_assertion(assertions[0], reg, ont, warnings)

    targets = {relation_of(reg, ont, a).qualified for a in assertions}
    if len(targets) != 1:
        raise CrossRelationExpression(tuple(targets))
    meta = reg.relation_map[targets.pop()]
    colsets = [_columns_of(a, reg, ont) for a in assertions]

    only_at = [i for i, a in enumerate(assertions) if isinstance(a, dlq.Only)]
    if only_at:
        for i in only_at:
            others = frozenset().union(*(colsets[j] for j in range(len(assertions)) if j != i))
            if colsets[i] & others:
                raise MixedOnlyAssertion(
                    f"assertion {i + 1} (only) shares column "
                    f"{sorted(colsets[i] & others)[0]!r} with another assertion"
                )
        parts = []
        for a in assertions:
            if isinstance(a, dlq.Only):
                parts.append(KeySetPart(_only_violation(a, reg, ont), negated=True))
            else:
                parts.append(KeySetPart(_predicate(a, reg, ont)))
        return KeySetOp("intersect", meta.qualified, meta.primary_key, tuple(parts))

    disjoint = all(
        not (colsets[i] & colsets[j])
        for i in range(len(colsets)) for j in range(i + 1, len(colsets))
    )
    if disjoint:
        return Select(
            Scan(meta.qualified),
            And(tuple(_predicate(a, reg, ont) for a in assertions)),
        )
    return KeySetOp(
        "intersect", meta.qualified, meta.primary_key,
        tuple(KeySetPart(_predicate(a, reg, ont)) for a in assertions),
    )


def translate_term(term: str, store: "ConceptStore", reg: MappingRegistry,
                   ont: OntologySnapshot,
                   warnings: list[str] | None = None) -> RAExpr:
    """Plan for an unresolved query term bound to a saved concept."""
    return plan_concept(store.lookup(term), reg, ont, warnings)


def as_key_plan(plan: RAExpr, reg: MappingRegistry) -> RAExpr:
    """Project a plan down to its entity keys (no-op for key-shaped plans)."""
    if isinstance(plan, (KeySetOp, ProjectKeys)):
        return plan
    meta = reg.relation_map[plan_relation(plan)]
    return ProjectKeys(plan, meta.primary_key)


# --------------------------------------------------------------------------
# Plan rendering (the human-readable side of a translation response)
# --------------------------------------------------------------------------

def _render_pred(pred: Pred) -> str:
    if isinstance(pred, Eq):
        return f"{pred.column}='{pred.token}'"
    if isinstance(pred, Not):
        if isinstance(pred.child, Eq):
            return f"{pred.child.column}<>'{pred.child.token}'"
        return f"NOT({_render_pred(pred.child)})"
    joiner = " AND " if isinstance(pred, And) else " OR "
    rendered = [
        f"({_render_pred(c)})" if isinstance(c, (And, Or)) else _render_pred(c)
        for c in pred.children
    ]
    return joiner.join(rendered)


def render_ra(plan: RAExpr) -> str:
    """Deterministic text rendering of a plan, selection-algebra style."""
    if isinstance(plan, Scan):
        return plan.relation
    if isinstance(plan, Select):
        return f"select[{_render_pred(plan.predicate)}]({render_ra(plan.source)})"
    if isinstance(plan, AntiMembership):
        key = ",".join(plan.key)
        return (
            f"select[{key} not-in project[{key}]("
            f"select[{_render_pred(plan.violating)}]({plan.relation}))]({plan.relation})"
        )
    if isinstance(plan, KeySetOp):
        key = ",".join(plan.key)
        rendered = []
        for part in plan.parts:
            body = f"project[{key}](select[{_render_pred(part.predicate)}]({plan.relation}))"
            if part.negated:
                body = f"project[{key}]({plan.relation}) minus {body}"
            rendered.append(body)
        joiner = " intersect " if plan.op == "intersect" else " union "
        return joiner.join(rendered)
    if isinstance(plan, ProjectKeys):
        return f"project[{','.join(plan.key)}]({render_ra(plan.source)})"
    raise TypeError(f"not a plan: {plan!r}")
