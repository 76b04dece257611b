"""Error taxonomy for the reformulation pipeline.

Every error carries a machine-readable ``code`` so the service layer can
return structured diagnostics the wizard can act on.
"""

from __future__ import annotations


class OqrError(Exception):
    """Base class; ``code`` mirrors the module error taxonomies."""

    code = "error"


# --- parsing (ODF / OMF / DLQ) ---------------------------------------------

class ParseError(OqrError):
    """Malformed input text; carries a line (files) or position (expressions)."""

    code = "syntax_error"

    def __init__(self, message: str, line: int | None = None, position: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line})"
        elif position is not None:
            loc = f" (at position {position})"
        super().__init__(f"{message}{loc}")
        self.line = line
        self.position = position


class ConflictingDeclaration(OqrError):
    code = "conflicting_declaration"

    def __init__(self, name: str, detail: str, line: int | None = None):
        super().__init__(f"conflicting redeclaration of {name}: {detail}")
        self.name = name
        self.line = line


class UnknownReference(OqrError):
    code = "unknown_reference"

    def __init__(self, name: str, kind: str = "name"):
        super().__init__(f"unknown {kind}: {name}")
        self.name = name
        self.kind = kind


class KindMismatch(OqrError):
    code = "kind_mismatch"

    def __init__(self, name: str, expected: str, actual: str):
        super().__init__(f"{name} is a {actual}, expected a {expected}")
        self.name = name
        self.expected = expected
        self.actual = actual


class UnsupportedConstruct(OqrError):
    code = "unsupported_construct"


class EmptyConcept(OqrError):
    code = "empty_concept"


# --- ontology validation ----------------------------------------------------

class CycleDetected(OqrError):
    code = "cycle_detected"

    def __init__(self, kind: str, members: tuple[str, ...]):
        super().__init__(f"{kind} hierarchy cycle: {' -> '.join(members)}")
        self.hierarchy = kind
        self.members = members


class DisjointnessViolation(OqrError):
    code = "disjointness_violation"

    def __init__(self, individual: str, class_a: str, class_b: str):
        super().__init__(
            f"individual {individual} is an instance of disjoint classes {class_a} and {class_b}"
        )
        self.individual = individual
        self.class_a = class_a
        self.class_b = class_b


class InverseAsymmetry(OqrError):
    code = "inverse_asymmetry"

    def __init__(self, prop: str, inverse: str):
        super().__init__(f"property {prop} declares inverse {inverse} but {inverse} does not point back")
        self.prop = prop
        self.inverse = inverse


class DomainRangeViolation(OqrError):
    code = "domain_range_violation"

    def __init__(self, subject: str, prop: str, obj: str, detail: str):
        super().__init__(f"link ({subject}, {prop}, {obj}): {detail}")
        self.subject = subject
        self.prop = prop
        self.object = obj


# --- mappings ----------------------------------------------------------------

class DuplicateBinding(OqrError):
    code = "duplicate_binding"

    def __init__(self, prop: str):
        super().__init__(f"property {prop} is bound more than once")
        self.prop = prop


class UnmappedProperty(OqrError):
    code = "unmapped_property"

    def __init__(self, prop: str):
        super().__init__(f"no column binding for {prop} or any of its parent properties")
        self.prop = prop


class CrossRelationExpression(OqrError):
    code = "cross_relation_expression"

    def __init__(self, relations: tuple[str, ...]):
        super().__init__(
            "expression spans multiple relations: " + ", ".join(sorted(relations))
        )
        self.relations = relations


class MixedOnlyAssertion(OqrError):
    code = "mixed_only_assertion"


# --- data / evaluation --------------------------------------------------------

class MissingRelation(OqrError):
    code = "missing_relation"

    def __init__(self, relation: str):
        super().__init__(f"relation not loaded: {relation}")
        self.relation = relation


class MissingColumn(OqrError):
    code = "missing_column"

    def __init__(self, relation: str, column: str):
        super().__init__(f"relation {relation} has no column {column}")
        self.relation = relation
        self.column = column


class HeaderMismatch(OqrError):
    code = "header_mismatch"

    def __init__(self, relation: str, expected: tuple[str, ...], actual: tuple[str, ...]):
        super().__init__(
            f"{relation}: header {list(actual)} does not match declared columns {list(expected)}"
        )
        self.relation = relation
        self.expected = expected
        self.actual = actual


class ArityError(OqrError):
    code = "arity_error"

    def __init__(self, relation: str, line: int, expected: int, actual: int):
        super().__init__(f"{relation} line {line}: expected {expected} fields, got {actual}")
        self.relation = relation
        self.line = line


# --- concept store -------------------------------------------------------------

class UnknownConcept(OqrError):
    code = "unknown_concept"

    def __init__(self, term: str, suggestions: tuple[str, ...] = ()):
        hint = f" (did you mean: {', '.join(suggestions)}?)" if suggestions else ""
        super().__init__(f"unknown concept: {term}{hint}")
        self.term = term
        self.suggestions = suggestions


class ValidationFailed(OqrError):
    code = "validation_failed"


class StorageError(OqrError):
    code = "storage_error"
