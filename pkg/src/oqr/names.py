"""Identifier canonicalization shared by every layer.

Ontology names are case-insensitive; the canonical form is upper case with
internal hyphens (and, for free-text terms, whitespace runs) mapped to
underscores. Relation, database and column names are *not* canonicalized:
they belong to the SQL schema and keep their declared spelling.
"""

from __future__ import annotations

import re

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")
NUMBER_RE = re.compile(r"[0-9]+(\.[0-9]+)?\Z")

_WS = re.compile(r"\s+")


def canon(name: str) -> str:
    """Canonical form of an ontology identifier or free-text query term."""
    collapsed = _WS.sub("_", name.strip())
    return collapsed.upper().replace("-", "_")


def is_ident(token: str) -> bool:
    return bool(IDENT_RE.match(token))


def is_number(token: str) -> bool:
    return bool(NUMBER_RE.match(token))


def is_literal_token(token: str) -> bool:
    """Bare true/false and unquoted numerics are literals, not individuals."""
    return token.upper() in ("TRUE", "FALSE") or is_number(token)
