"""Restriction-expression language: grammar, parser and canonical printer.

EBNF (keywords case-insensitive; ``#`` starts a comment):

    concept  := 'concept' IDENT '{' assert (';' assert)* [';'] '}'
    assert   := 'assert' expr
    expr     := conj ('union' conj)*
    conj     := unary ('intersection' unary)*
    unary    := 'complementOf' '(' expr ')' | '(' expr ')' | atom
    atom     := IDENT 'some' operand | IDENT 'only' operand
              | IDENT 'has' ['not'] voperand
    operand  := IDENT | '{' IDENT+ '}'
    voperand := token | '{' token+ '}'      token := IDENT | 'true' | 'false' | NUMBER

Intersection binds tighter than union. ``only`` may appear only as the root
of an assertion. Every name is resolved against a bound ontology snapshot at
parse time; `some`/`only` operands must be classes or individual sets, `has`
operands individuals or literals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    EmptyConcept,
    KindMismatch,
    ParseError,
    UnknownReference,
    UnsupportedConstruct,
)
from .names import canon, is_ident
from .ontology import OntologySnapshot


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassOperand:
    name: str


@dataclass(frozen=True)
class SetOperand:
    names: tuple[str, ...]  # non-empty, deduplicated, sorted


@dataclass(frozen=True)
class Some:
    prop: str
    operand: ClassOperand | SetOperand


@dataclass(frozen=True)
class Only:
    prop: str
    operand: ClassOperand | SetOperand


@dataclass(frozen=True)
class Has:
    prop: str
    values: tuple[str, ...]  # non-empty, deduplicated, sorted
    negated: bool = False


@dataclass(frozen=True)
class Complement:
    child: "RestrictionExpr"


@dataclass(frozen=True)
class Union:
    children: tuple["RestrictionExpr", ...]


@dataclass(frozen=True)
class Intersection:
    children: tuple["RestrictionExpr", ...]


RestrictionExpr = Some | Only | Has | Complement | Union | Intersection


@dataclass(frozen=True)
class ConceptDefinition:
    name: str
    assertions: tuple[RestrictionExpr, ...]  # length >= 1


def make_union(children: list[RestrictionExpr]) -> RestrictionExpr:
    """N-ary union; flattens directly nested unions, collapses singletons."""
    flat: list[RestrictionExpr] = []
    for child in children:
        if isinstance(child, Union):
            flat.extend(child.children)
        else:
            flat.append(child)
    return flat[0] if len(flat) == 1 else Union(tuple(flat))


def make_intersection(children: list[RestrictionExpr]) -> RestrictionExpr:
    flat: list[RestrictionExpr] = []
    for child in children:
        if isinstance(child, Intersection):
            flat.extend(child.children)
        else:
            flat.append(child)
    return flat[0] if len(flat) == 1 else Intersection(tuple(flat))


# --------------------------------------------------------------------------
# Tokenizer
# --------------------------------------------------------------------------

_KEYWORDS = {"concept", "assert", "union", "intersection", "complementof",
             "some", "only", "has", "not"}
_CARDINALITY = {"min", "max", "exactly", "cardinality"}

_TOKEN_RE = re.compile(
    r"""\s+
      | \#[^\n]*
      | (?P<number>[0-9]+(?:\.[0-9]+)?)
      | (?P<word>[A-Za-z_][A-Za-z0-9_-]*)
      | (?P<punct>[{}();])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # word | number | punct | eof
    text: str
    pos: int

    def lower(self) -> str:
        return self.text.lower()


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", position=pos)
        if m.lastgroup is not None:
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, ont: OntologySnapshot):
        self.tokens = _tokenize(text)
        self.ont = ont
        self.i = 0

    # -- token plumbing --------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_keyword(self, *names: str) -> bool:
        tok = self.peek()
        return tok.kind == "word" and tok.lower() in names

    def expect_keyword(self, name: str) -> None:
        tok = self.next()
        if tok.kind != "word" or tok.lower() != name:
            raise ParseError(f"expected {name!r}, found {tok.text!r}", position=tok.pos)

    def expect_punct(self, char: str) -> None:
        tok = self.next()
        if tok.kind != "punct" or tok.text != char:
            raise ParseError(f"expected {char!r}, found {tok.text!r}", position=tok.pos)

    def take_ident(self, role: str) -> tuple[str, int]:
        tok = self.next()
        if tok.kind != "word" or not is_ident(tok.text):
            raise ParseError(f"expected {role} name, found {tok.text!r}", position=tok.pos)
        if tok.lower() in _KEYWORDS:
            raise ParseError(f"keyword {tok.text!r} cannot be used as a {role} name",
                             position=tok.pos)
        return canon(tok.text), tok.pos

    # -- name resolution ---------------------------------------------------------

    def _resolve(self, name: str, expected: str) -> str:
        kinds = {
            "class": self.ont.class_map,
            "property": self.ont.property_map,
            "individual": self.ont.individual_map,
        }
        if name in kinds[expected]:
            return name
        for other, table in kinds.items():
            if other != expected and name in table:
                raise KindMismatch(name, expected, other)
        raise UnknownReference(name, expected)

    # -- grammar ----------------------------------------------------------------

    def parse_expression(self) -> RestrictionExpr:
        expr = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected trailing input {tok.text!r}", position=tok.pos)
        _reject_nested_only(expr, root=True)
        return expr

    def parse_concept(self) -> ConceptDefinition:
        self.expect_keyword("concept")
        name, _ = self.take_ident("concept")
        self.expect_punct("{")
        assertions: list[RestrictionExpr] = []
        while True:
            if self.peek().kind == "punct" and self.peek().text == "}":
                break
            self.expect_keyword("assert")
            expr = self.expr()
            _reject_nested_only(expr, root=True)
            assertions.append(expr)
            if self.peek().kind == "punct" and self.peek().text == ";":
                self.next()
            else:
                break
        self.expect_punct("}")
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected trailing input {tok.text!r}", position=tok.pos)
        if not assertions:
            raise EmptyConcept(f"concept {name} has no assertions")
        return ConceptDefinition(name, tuple(assertions))

    def expr(self) -> RestrictionExpr:
        parts = [self.conj()]
        while self.at_keyword("union"):
            self.next()
            parts.append(self.conj())
        return make_union(parts)

    def conj(self) -> RestrictionExpr:
        parts = [self.unary()]
        while self.at_keyword("intersection"):
            self.next()
            parts.append(self.unary())
        return make_intersection(parts)

    def unary(self) -> RestrictionExpr:
        if self.at_keyword("complementof"):
            self.next()
            self.expect_punct("(")
            inner = self.expr()
            self.expect_punct(")")
            return Complement(inner)
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "(":
            self.next()
            inner = self.expr()
            self.expect_punct(")")
            return inner
        return self.atom()

    def atom(self) -> RestrictionExpr:
        name, pos = self.take_ident("property")
        prop = self._resolve(name, "property")
        op = self.next()
        if op.kind == "word" and op.lower() in _CARDINALITY:
            raise UnsupportedConstruct(
                f"cardinality restriction {op.text!r} has no relational translation"
            )
        if op.kind != "word" or op.lower() not in ("some", "only", "has"):
            raise ParseError(
                f"expected some/only/has after property {prop}, found {op.text!r}",
                position=op.pos,
            )
        if op.lower() in ("some", "only"):
            operand = self.operand()
            return Some(prop, operand) if op.lower() == "some" else Only(prop, operand)
        negated = False
        if self.at_keyword("not"):
            self.next()
            negated = True
        values = self.voperand()
        return Has(prop, values, negated=negated)

    def operand(self) -> ClassOperand | SetOperand:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "{":
            self.next()
            names: list[str] = []
            while not (self.peek().kind == "punct" and self.peek().text == "}"):
                name, _ = self.take_ident("individual")
                names.append(self._resolve(name, "individual"))
            self.expect_punct("}")
            if not names:
                raise ParseError("individual set must not be empty", position=tok.pos)
            return SetOperand(tuple(sorted(set(names))))
        name, _ = self.take_ident("class")
        return ClassOperand(self._resolve(name, "class"))

    def voperand(self) -> tuple[str, ...]:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "{":
            self.next()
            values: list[str] = []
            while not (self.peek().kind == "punct" and self.peek().text == "}"):
                values.append(self.value_token())
            self.expect_punct("}")
            if not values:
                raise ParseError("value set must not be empty", position=tok.pos)
            return tuple(sorted(set(values)))
        return (self.value_token(),)

    def value_token(self) -> str:
        tok = self.next()
        if tok.kind == "number":
            return tok.text
        if tok.kind == "word" and tok.lower() in ("true", "false"):
            return tok.text.upper()
        if tok.kind == "word" and is_ident(tok.text) and tok.lower() not in _KEYWORDS:
            return self._resolve(canon(tok.text), "individual")
        raise ParseError(f"expected a value token, found {tok.text!r}", position=tok.pos)


def _reject_nested_only(expr: RestrictionExpr, root: bool) -> None:
    if isinstance(expr, Only):
        if not root:
            raise UnsupportedConstruct(
                "only/allValuesFrom may appear only as the root of an assertion"
            )
        return
    if isinstance(expr, Complement):
        _reject_nested_only(expr.child, root=False)
    elif isinstance(expr, (Union, Intersection)):
        for child in expr.children:
            _reject_nested_only(child, root=False)


# --------------------------------------------------------------------------
# Public API
# --------------------------------------------------------------------------

def parse_expression(text: str, ont: OntologySnapshot) -> RestrictionExpr:
    """Parse one restriction expression, resolved against the ontology."""
    return _Parser(text, ont).parse_expression()


def parse_concept(text: str, ont: OntologySnapshot) -> ConceptDefinition:
    """Parse one ``concept <Name> { assert <expr>; ... }`` block."""
    return _Parser(text, ont).parse_concept()


def _format_operand(operand: ClassOperand | SetOperand) -> str:
    if isinstance(operand, ClassOperand):
        return operand.name
    return "{" + " ".join(operand.names) + "}"


def _format_values(values: tuple[str, ...]) -> str:
    if len(values) == 1:
        return values[0]
    return "{" + " ".join(values) + "}"


def format_expression(expr: RestrictionExpr) -> str:
    """Canonical single-line form; parse(format(e)) is structurally e."""
    if isinstance(expr, Some):
        return f"{expr.prop} some {_format_operand(expr.operand)}"
    if isinstance(expr, Only):
        return f"{expr.prop} only {_format_operand(expr.operand)}"
    if isinstance(expr, Has):
        neg = "not " if expr.negated else ""
        return f"{expr.prop} has {neg}{_format_values(expr.values)}"
    if isinstance(expr, Complement):
        return f"complementOf({format_expression(expr.child)})"
    if isinstance(expr, Union):
        return " union ".join(format_expression(c) for c in expr.children)
    if isinstance(expr, Intersection):
        rendered = []
        for child in expr.children:
            text = format_expression(child)
            if isinstance(child, Union):
                text = f"({text})"
            rendered.append(text)
        return " intersection ".join(rendered)
    raise TypeError(f"not a restriction expression: {expr!r}")


def format_concept(definition: ConceptDefinition) -> str:
    """Canonical single-line concept block (also the store-file format)."""
    body = " ".join(f"assert {format_expression(a)};" for a in definition.assertions)
    return f"concept {definition.name} {{ {body} }}"
