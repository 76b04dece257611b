"""Ontology-to-relational correspondences.

Loaded from an Ontology Mapping File (OMF), line-oriented (``#`` comments):

    relation <db>.<name> columns <c1> <c2> ... pk <k1> [<k2> ...]
    fk <db>.<name>.<col> references <db>.<name>.<col>
    map <Property> -> <db>.<name>.<col>

Property names are canonicalized like all ontology identifiers; database,
relation and column names keep their declared spelling (they belong to the
SQL schema). Mapping definitions are required only for parent properties:
an unbound property resolves through its sub-property ancestry. Foreign keys
are retained as inert metadata; translation operates on a single
relation/view.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import dlq
from .errors import (
    ConflictingDeclaration,
    CrossRelationExpression,
    DuplicateBinding,
    ParseError,
    UnknownReference,
    UnmappedProperty,
)
from .names import canon, is_ident
from .ontology import OntologySnapshot


@dataclass(frozen=True)
class RelationMeta:
    database: str
    name: str
    columns: tuple[str, ...]
    primary_key: tuple[str, ...]  # non-empty subset of columns

    @property
    def qualified(self) -> str:
        return f"{self.database}.{self.name}"


@dataclass(frozen=True)
class ColumnBinding:
    prop: str
    relation: str  # qualified
    column: str


@dataclass(frozen=True)
class ForeignKey:
    relation: str
    column: str
    target_relation: str
    target_column: str


@dataclass(frozen=True)
class MappingRegistry:
    relations: tuple[RelationMeta, ...]
    bindings: tuple[ColumnBinding, ...]
    foreign_keys: tuple[ForeignKey, ...] = ()

    @cached_property
    def relation_map(self) -> dict[str, RelationMeta]:
        return {r.qualified: r for r in self.relations}

    @cached_property
    def binding_map(self) -> dict[str, ColumnBinding]:
        return {b.prop: b for b in self.bindings}


def _qualified(token: str, parts: int, n: int) -> list[str]:
    pieces = token.split(".")
    if len(pieces) != parts or not all(is_ident(p) for p in pieces):
        shape = ".".join(["<name>"] * parts)
        raise ParseError(f"expected {shape}, found {token!r}", line=n)
    return pieces


def load_mappings(text: str, ont: OntologySnapshot) -> MappingRegistry:
    """Parse and validate OMF text against the ontology."""
    relations: dict[str, RelationMeta] = {}
    bindings: dict[str, ColumnBinding] = {}
    fks: list[ForeignKey] = []

    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0].lower()
        if keyword == "relation":
            rel = _parse_relation(tokens[1:], n)
            prev = relations.get(rel.qualified)
            if prev is not None and prev != rel:
                raise ConflictingDeclaration(rel.qualified, "relation redeclared", line=n)
            relations[rel.qualified] = rel
        elif keyword == "fk":
            fks.append(_parse_fk(tokens[1:], n))
        elif keyword == "map":
            binding = _parse_map(tokens[1:], n)
            prev = bindings.get(binding.prop)
            if prev is not None and prev != binding:
                raise DuplicateBinding(binding.prop)
            bindings[binding.prop] = binding
        else:
            raise ParseError(f"unknown declaration {tokens[0]!r}", line=n)

    registry = MappingRegistry(
        relations=tuple(sorted(relations.values(), key=lambda r: r.qualified)),
        bindings=tuple(sorted(bindings.values(), key=lambda b: b.prop)),
        foreign_keys=tuple(fks),
    )
    _validate(registry, ont)
    return registry


def _parse_relation(tokens: list[str], n: int) -> RelationMeta:
    if not tokens:
        raise ParseError("expected: relation <db>.<name> columns ... pk ...", line=n)
    db, name = _qualified(tokens[0], 2, n)
    rest = tokens[1:]
    if not rest or rest[0].lower() != "columns":
        raise ParseError("expected 'columns' after relation name", line=n)
    try:
        pk_at = [t.lower() for t in rest].index("pk")
    except ValueError:
        raise ParseError("expected 'pk' clause in relation declaration", line=n) from None
    columns = rest[1:pk_at]
    pk = rest[pk_at + 1:]
    if not columns or not pk:
        raise ParseError("relation needs at least one column and one pk column", line=n)
    for col in columns + pk:
        if not is_ident(col):
            raise ParseError(f"invalid column name {col!r}", line=n)
    if len(set(columns)) != len(columns):
        raise ParseError("duplicate column names", line=n)
    missing = [k for k in pk if k not in columns]
    if missing:
        raise UnknownReference(f"{db}.{name}.{missing[0]}", "column")
    return RelationMeta(db, name, tuple(columns), tuple(pk))


def _parse_fk(tokens: list[str], n: int) -> ForeignKey:
    if len(tokens) != 3 or tokens[1].lower() != "references":
        raise ParseError("expected: fk <db>.<name>.<col> references <db>.<name>.<col>", line=n)
    db, name, col = _qualified(tokens[0], 3, n)
    tdb, tname, tcol = _qualified(tokens[2], 3, n)
    return ForeignKey(f"{db}.{name}", col, f"{tdb}.{tname}", tcol)


def _parse_map(tokens: list[str], n: int) -> ColumnBinding:
    if len(tokens) != 3 or tokens[1] != "->":
        raise ParseError("expected: map <Property> -> <db>.<name>.<col>", line=n)
    if not is_ident(tokens[0]):
        raise ParseError(f"invalid property name {tokens[0]!r}", line=n)
    db, name, col = _qualified(tokens[2], 3, n)
    return ColumnBinding(canon(tokens[0]), f"{db}.{name}", col)


def _validate(registry: MappingRegistry, ont: OntologySnapshot) -> None:
    for fk in registry.foreign_keys:
        for rel, col in ((fk.relation, fk.column), (fk.target_relation, fk.target_column)):
            meta = registry.relation_map.get(rel)
            if meta is None:
                raise UnknownReference(rel, "relation")
            if col not in meta.columns:
                raise UnknownReference(f"{rel}.{col}", "column")
    for binding in registry.bindings:
        if binding.prop not in ont.property_map:
            raise UnknownReference(binding.prop, "property")
        meta = registry.relation_map.get(binding.relation)
        if meta is None:
            raise UnknownReference(binding.relation, "relation")
        if binding.column not in meta.columns:
            raise UnknownReference(f"{binding.relation}.{binding.column}", "column")


def resolve_property(registry: MappingRegistry, ont: OntologySnapshot, prop: str) -> ColumnBinding:
    """Binding of the property itself, else of the nearest bound ancestor."""
    p = canon(prop)
    if p not in ont.property_map:
        raise UnknownReference(p, "property")
    for ancestor in ont.property_ancestors(p):
        binding = registry.binding_map.get(ancestor)
        if binding is not None:
            return binding
    raise UnmappedProperty(p)


def _properties_in(expr: dlq.RestrictionExpr) -> list[str]:
    if isinstance(expr, (dlq.Some, dlq.Only, dlq.Has)):
        return [expr.prop]
    if isinstance(expr, dlq.Complement):
        return _properties_in(expr.child)
    props: list[str] = []
    for child in expr.children:
        props.extend(_properties_in(child))
    return props


def relation_of(registry: MappingRegistry, ont: OntologySnapshot,
                expr: dlq.RestrictionExpr) -> RelationMeta:
    """The unique relation all property bindings of the expression target."""
    targets = {resolve_property(registry, ont, p).relation for p in _properties_in(expr)}
    if len(targets) != 1:
        raise CrossRelationExpression(tuple(targets))
    return registry.relation_map[targets.pop()]
