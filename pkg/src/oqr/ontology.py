"""Domain ontology: classes, properties, individuals and property links.

The snapshot is loaded from an Ontology Definition File (ODF), a line-oriented
UTF-8 format (``#`` starts a comment):

    class <Name> [subclassof <Name>]
    disjoint <Name> <Name>
    property <Name> [subpropertyof <Name>] [domain <Name>] [range <Name>] [inverse <Name>]
    individual <Name> type <Name>
    link <Subject> <Property> <Object>

Identifiers are case-insensitive and canonicalized (upper case, hyphens to
underscores). Duplicate declarations of identical content are idempotent;
conflicting duplicates are errors. The loaded snapshot is immutable and safe
to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

from .errors import (
    ConflictingDeclaration,
    CycleDetected,
    DisjointnessViolation,
    DomainRangeViolation,
    InverseAsymmetry,
    ParseError,
    UnknownReference,
    UnsupportedConstruct,
)
from .names import canon, is_ident, is_literal_token


@dataclass(frozen=True)
class ClassDecl:
    name: str
    parent: str | None = None


@dataclass(frozen=True)
class PropertyDecl:
    name: str
    parent: str | None = None
    domain: str | None = None
    range: str | None = None
    inverse: str | None = None


@dataclass(frozen=True)
class IndividualDecl:
    name: str
    type: str


@dataclass(frozen=True)
class PropertyLink:
    subject: str
    property: str
    object: str
    literal_object: bool = False


@dataclass(frozen=True)
class OntologySnapshot:
    """Validated, immutable ontology fragment."""

    classes: tuple[ClassDecl, ...] = ()
    properties: tuple[PropertyDecl, ...] = ()
    individuals: tuple[IndividualDecl, ...] = ()
    links: tuple[PropertyLink, ...] = ()
    disjoint_pairs: frozenset[frozenset[str]] = field(default_factory=frozenset)
    warnings: tuple[str, ...] = ()

    # -- indexes ------------------------------------------------------------

    @cached_property
    def class_map(self) -> dict[str, ClassDecl]:
        return {c.name: c for c in self.classes}

    @cached_property
    def property_map(self) -> dict[str, PropertyDecl]:
        return {p.name: p for p in self.properties}

    @cached_property
    def individual_map(self) -> dict[str, IndividualDecl]:
        return {i.name: i for i in self.individuals}

    @cached_property
    def _class_children(self) -> dict[str, list[str]]:
        children: dict[str, list[str]] = {c.name: [] for c in self.classes}
        for c in self.classes:
            if c.parent is not None:
                children[c.parent].append(c.name)
        return children

    @cached_property
    def link_set(self) -> frozenset[tuple[str, str, str]]:
        return frozenset((l.subject, l.property, l.object) for l in self.links)

    # -- hierarchy walks ------------------------------------------------------

    def class_descendants(self, name: str) -> set[str]:
        """The class and everything below it in the subclass tree."""
        out = set()
        stack = [name]
        while stack:
            cur = stack.pop()
            out.add(cur)
            stack.extend(self._class_children[cur])
        return out

    def class_ancestors(self, name: str) -> list[str]:
        """The class and its parents up to the root, nearest first."""
        chain = []
        cur: str | None = name
        while cur is not None:
            chain.append(cur)
            cur = self.class_map[cur].parent
        return chain

    def property_ancestors(self, name: str) -> list[str]:
        chain = []
        cur: str | None = name
        while cur is not None:
            chain.append(cur)
            cur = self.property_map[cur].parent
        return chain

    def _require_class(self, name: str) -> str:
        k = canon(name)
        if k not in self.class_map:
            raise UnknownReference(k, "class")
        return k

    def _require_property(self, name: str) -> str:
        p = canon(name)
        if p not in self.property_map:
            raise UnknownReference(p, "property")
        return p

    # -- classification queries (drive guided formulation) -------------------

    def subclasses_of(self, klass: str | None) -> list[str]:
        """Direct children of a class; root classes when None. Sorted."""
        if klass is None:
            return sorted(c.name for c in self.classes if c.parent is None)
        return sorted(self._class_children[self._require_class(klass)])

    def instances_of(self, klass: str, transitive: bool = False) -> list[str]:
        """Individuals whose type is the class (or any descendant)."""
        k = self._require_class(klass)
        targets = self.class_descendants(k) if transitive else {k}
        return sorted(i.name for i in self.individuals if i.type in targets)

    def applicable_properties(self, klass: str) -> list[str]:
        """Properties usable from the class: domain subtree contains it, or no domain."""
        k = self._require_class(klass)
        out = []
        for p in self.properties:
            if p.domain is None or k in self.class_descendants(p.domain):
                out.append(p.name)
        return sorted(out)

    def range_values(self, prop: str) -> list[str]:
        """Value choices for a property: range-class instances plus observed link objects."""
        p = self._require_property(prop)
        decl = self.property_map[p]
        values: set[str] = set()
        if decl.range is not None:
            values.update(self.instances_of(decl.range, transitive=True))
        for link in self.links:
            if link.property == p:
                values.add(link.object)
        return sorted(values)

    def extension_tokens(self, klass: str) -> list[str]:
        """Tokens representing the class in column data.

        All instance names of the class and its descendants; a class with no
        instances is represented by its own name (the concept token itself is
        stored in the column).
        """
        k = self._require_class(klass)
        instances = self.instances_of(k, transitive=True)
        return instances if instances else [k]


# --------------------------------------------------------------------------
# ODF loading
# --------------------------------------------------------------------------

_PROPERTY_OPTIONS = ("subpropertyof", "domain", "range", "inverse")


def _ident(token: str, line_no: int) -> str:
    if not is_ident(token):
        raise ParseError(f"invalid identifier {token!r}", line=line_no)
    return canon(token)


class _OdfBuilder:
    """Accumulates declarations line by line, then validates the whole."""

    def __init__(self) -> None:
        self.classes: dict[str, ClassDecl] = {}
        self.properties: dict[str, PropertyDecl] = {}
        self.individuals: dict[str, IndividualDecl] = {}
        self.links: dict[tuple[str, str, str], PropertyLink] = {}
        self.disjoint: set[frozenset[str]] = set()
        self.warnings: list[str] = []

    # -- line handlers --------------------------------------------------------

    def add_class(self, tokens: list[str], n: int) -> None:
        if len(tokens) == 1:
            decl = ClassDecl(_ident(tokens[0], n))
        elif len(tokens) == 3 and tokens[1].lower() == "subclassof":
            decl = ClassDecl(_ident(tokens[0], n), parent=_ident(tokens[2], n))
        else:
            raise ParseError("expected: class <Name> [subclassof <Name>]", line=n)
        prev = self.classes.get(decl.name)
        if prev is not None and prev != decl:
            raise ConflictingDeclaration(decl.name, f"{prev} vs {decl}", line=n)
        self.classes[decl.name] = decl

    def add_disjoint(self, tokens: list[str], n: int) -> None:
        if len(tokens) != 2:
            raise ParseError("expected: disjoint <Name> <Name>", line=n)
        a, b = _ident(tokens[0], n), _ident(tokens[1], n)
        if a == b:
            raise ParseError("disjoint pair must name two distinct classes", line=n)
        self.disjoint.add(frozenset((a, b)))

    def add_property(self, tokens: list[str], n: int) -> None:
        if not tokens:
            raise ParseError("expected: property <Name> [options]", line=n)
        fields: dict[str, str] = {}
        rest = tokens[1:]
        if len(rest) % 2 != 0:
            raise ParseError("property options must be <keyword> <Name> pairs", line=n)
        for kw, val in zip(rest[::2], rest[1::2]):
            kw = kw.lower()
            if kw not in _PROPERTY_OPTIONS:
                raise ParseError(f"unknown property option {kw!r}", line=n)
            if kw in fields:
                raise ParseError(f"duplicate property option {kw!r}", line=n)
            fields[kw] = _ident(val, n)
        decl = PropertyDecl(
            _ident(tokens[0], n),
            parent=fields.get("subpropertyof"),
            domain=fields.get("domain"),
            range=fields.get("range"),
            inverse=fields.get("inverse"),
        )
        prev = self.properties.get(decl.name)
        if prev is not None and prev != decl:
            raise ConflictingDeclaration(decl.name, f"{prev} vs {decl}", line=n)
        self.properties[decl.name] = decl

    def add_individual(self, tokens: list[str], n: int) -> None:
        if len(tokens) != 3 or tokens[1].lower() != "type":
            raise ParseError("expected: individual <Name> type <Name>", line=n)
        decl = IndividualDecl(_ident(tokens[0], n), type=_ident(tokens[2], n))
        prev = self.individuals.get(decl.name)
        if prev is not None and prev != decl:
            # a re-typed individual is a disjointness problem when the two
            # type closures hit a declared disjoint pair, a conflict otherwise
            self._check_retyped(decl.name, prev.type, decl.type, n)
            raise ConflictingDeclaration(decl.name, f"type {prev.type} vs {decl.type}", line=n)
        self.individuals[decl.name] = decl

    def _check_retyped(self, individual: str, type_a: str, type_b: str, n: int) -> None:
        anc_a = set(self._safe_ancestors(type_a))
        anc_b = set(self._safe_ancestors(type_b))
        for pair in self.disjoint:
            a, b = sorted(pair)
            if (a in anc_a and b in anc_b) or (b in anc_a and a in anc_b):
                raise DisjointnessViolation(individual, a, b)

    def _safe_ancestors(self, name: str) -> list[str]:
        chain, seen = [], set()
        cur: str | None = name
        while cur is not None and cur not in seen:
            seen.add(cur)
            chain.append(cur)
            decl = self.classes.get(cur)
            cur = decl.parent if decl else None
        return chain

    def add_link(self, tokens: list[str], n: int) -> None:
        if len(tokens) != 3:
            raise ParseError("expected: link <Subject> <Property> <Object>", line=n)
        subject = _ident(tokens[0], n)
        prop = _ident(tokens[1], n)
        raw_object = tokens[2]
        if is_literal_token(raw_object):
            link = PropertyLink(subject, prop, canon(raw_object), literal_object=True)
        else:
            link = PropertyLink(subject, prop, _ident(raw_object, n))
        self.links[(link.subject, link.property, link.object)] = link

    # -- whole-file validation -------------------------------------------------

    def validate(self) -> OntologySnapshot:
        self._check_references()
        self._check_cycles("class", {c.name: c.parent for c in self.classes.values()})
        self._check_cycles("property", {p.name: p.parent for p in self.properties.values()})
        self._complete_inverse_declarations()
        self._check_disjointness()
        self._complete_inverse_links()
        self._check_link_typing()
        return OntologySnapshot(
            classes=tuple(sorted(self.classes.values(), key=lambda c: c.name)),
            properties=tuple(sorted(self.properties.values(), key=lambda p: p.name)),
            individuals=tuple(sorted(self.individuals.values(), key=lambda i: i.name)),
            links=tuple(sorted(self.links.values(), key=lambda l: (l.subject, l.property, l.object))),
            disjoint_pairs=frozenset(self.disjoint),
            warnings=tuple(self.warnings),
        )

    def _check_references(self) -> None:
        for c in self.classes.values():
            if c.parent is not None and c.parent not in self.classes:
                raise UnknownReference(c.parent, "class")
        for pair in self.disjoint:
            for name in pair:
                if name not in self.classes:
                    raise UnknownReference(name, "class")
        for p in self.properties.values():
            if p.parent is not None and p.parent not in self.properties:
                raise UnknownReference(p.parent, "property")
            for ref in (p.domain, p.range):
                if ref is not None and ref not in self.classes:
                    raise UnknownReference(ref, "class")
            if p.inverse is not None and p.inverse not in self.properties:
                raise UnknownReference(p.inverse, "property")
        for i in self.individuals.values():
            if i.type not in self.classes:
                raise UnknownReference(i.type, "class")
        for link in self.links.values():
            if link.subject not in self.individuals:
                raise UnknownReference(link.subject, "individual")
            if link.property not in self.properties:
                raise UnknownReference(link.property, "property")
            if not link.literal_object and link.object not in self.individuals:
                raise UnknownReference(link.object, "individual")

    @staticmethod
    def _check_cycles(kind: str, parents: dict[str, str | None]) -> None:
        state: dict[str, int] = {}  # 1 = on current path, 2 = done
        for start in parents:
            if state.get(start) == 2:
                continue
            path: list[str] = []
            cur: str | None = start
            while cur is not None:
                if state.get(cur) == 2:
                    break
                if state.get(cur) == 1:
                    cycle = path[path.index(cur):] + [cur]
                    raise CycleDetected(kind, tuple(cycle))
                state[cur] = 1
                path.append(cur)
                cur = parents[cur]
            for name in path:
                state[name] = 2

    def _complete_inverse_declarations(self) -> None:
        for p in list(self.properties.values()):
            if p.inverse is None:
                continue
            q = self.properties[p.inverse]
            if q.inverse is None:
                self.properties[q.name] = replace(q, inverse=p.name)
                self.warnings.append(
                    f"completed inverse declaration: {q.name} inverse {p.name}"
                )
            elif q.inverse != p.name:
                raise InverseAsymmetry(p.name, q.name)

    def _check_disjointness(self) -> None:
        for i in self.individuals.values():
            ancestors = set(self._safe_ancestors(i.type))
            for pair in self.disjoint:
                a, b = sorted(pair)
                if a in ancestors and b in ancestors:
                    raise DisjointnessViolation(i.name, a, b)

    def _complete_inverse_links(self) -> None:
        for link in list(self.links.values()):
            if link.literal_object:
                continue
            decl = self.properties.get(link.property)
            if decl is None or decl.inverse is None:
                continue
            mirror = (link.object, decl.inverse, link.subject)
            if mirror not in self.links:
                self.links[mirror] = PropertyLink(*mirror)
                self.warnings.append(
                    f"completed inverse link: link {mirror[0]} {mirror[1]} {mirror[2]}"
                )

    def _check_link_typing(self) -> None:
        for link in self.links.values():
            decl = self.properties[link.property]
            if decl.domain is not None:
                subject_type = self.individuals[link.subject].type
                if decl.domain not in self._safe_ancestors(subject_type):
                    raise DomainRangeViolation(
                        link.subject, link.property, link.object,
                        f"subject type {subject_type} outside domain {decl.domain}",
                    )
            if decl.range is not None and not link.literal_object:
                object_type = self.individuals[link.object].type
                if decl.range not in self._safe_ancestors(object_type):
                    raise DomainRangeViolation(
                        link.subject, link.property, link.object,
                        f"object type {object_type} outside range {decl.range}",
                    )


def load_ontology(text: str) -> OntologySnapshot:
    """Parse and validate ODF text into an immutable snapshot."""
    builder = _OdfBuilder()
    handlers = {
        "class": builder.add_class,
        "disjoint": builder.add_disjoint,
        "property": builder.add_property,
        "individual": builder.add_individual,
        "link": builder.add_link,
    }
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0].lower()
        if keyword in ("cardinality", "min", "max", "exactly"):
            raise UnsupportedConstruct(
                f"cardinality restrictions are not supported (line {n})"
            )
        handler = handlers.get(keyword)
        if handler is None:
            raise ParseError(f"unknown declaration {tokens[0]!r}", line=n)
        handler(tokens[1:], n)
    return builder.validate()
