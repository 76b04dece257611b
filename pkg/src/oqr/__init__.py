"""Ontology-assisted query reformulation.

Parses description-logic restriction expressions over a domain ontology,
translates them into a relational-algebra IR and SQL against a mapped
relational schema, and verifies the translations against a brute-force
semantics oracle.
"""

from .backend import Database, RowSet, emit_sql, eval_ra, load_csv
from .dlq import (
    ConceptDefinition,
    format_concept,
    format_expression,
    parse_concept,
    parse_expression,
)
from .engine import as_key_plan, normalize, plan_concept, translate_assertion, translate_term
from .mappings import MappingRegistry, load_mappings, relation_of, resolve_property
from .ontology import OntologySnapshot, load_ontology
from .oracle import oracle_keys, oracle_rows
from .store import ConceptStore

__all__ = [
    "ConceptDefinition",
    "ConceptStore",
    "Database",
    "MappingRegistry",
    "OntologySnapshot",
    "RowSet",
    "as_key_plan",
    "emit_sql",
    "eval_ra",
    "format_concept",
    "format_expression",
    "load_csv",
    "load_mappings",
    "load_ontology",
    "normalize",
    "oracle_keys",
    "oracle_rows",
    "parse_concept",
    "parse_expression",
    "plan_concept",
    "relation_of",
    "resolve_property",
    "translate_assertion",
    "translate_term",
]

__version__ = "0.1.0"
