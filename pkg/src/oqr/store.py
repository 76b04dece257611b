"""Persistence for named concept definitions.

The store file (``concepts.dlq``) is plain text in the expression grammar
itself: one canonical single-line ``concept ... { ... }`` block per entry,
preceded by a ``# concept <NAME> created <iso> modified <iso>`` comment
carrying the timestamps. No second serialization of the ASTs exists; loading
re-parses the blocks. Writes go through a temp file and an atomic rename.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import dlq
from .errors import (
    ConflictingDeclaration,
    OqrError,
    ParseError,
    StorageError,
    UnknownConcept,
    ValidationFailed,
)
from .mappings import MappingRegistry, resolve_property
from .names import canon
from .ontology import OntologySnapshot

_META_RE = re.compile(
    r"#\s*concept\s+(?P<name>\S+)\s+created\s+(?P<created>\S+)\s+modified\s+(?P<modified>\S+)\s*$"
)

_HEADER = "# oqr concept store"


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class StoredConcept:
    name: str
    text: str  # canonical single-line block; re-parses to definition
    definition: dlq.ConceptDefinition
    created: str
    modified: str


def _edit_distance(a: str, b: str, cap: int = 3) -> int:
    """Levenshtein distance, clamped at cap (only <= 2 matters here)."""
    if abs(len(a) - len(b)) >= cap:
        return cap
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        if min(current) >= cap:
            return cap
        previous = current
    return min(previous[-1], cap)


class ConceptStore:
    """Named concept definitions backed by one DLQ text file.

    Mutations rewrite the whole file atomically; the service layer serializes
    writers. Readers always see a consistent snapshot.
    """

    def __init__(self, path: str | Path, ont: OntologySnapshot):
        self.path = Path(path)
        self.ont = ont
        self._entries: dict[str, StoredConcept] = {}
        if self.path.exists():
            self._load()

    # -- file round trip ---------------------------------------------------

    def _load(self) -> None:
        text = self.path.read_text(encoding="utf-8")
        pending: dict[str, tuple[str, str]] = {}
        buffer: list[str] = []
        depth = 0
        for raw in text.splitlines():
            stripped = raw.strip()
            if stripped.startswith("#"):
                meta = _META_RE.match(stripped)
                if meta:
                    pending[canon(meta.group("name"))] = (
                        meta.group("created"), meta.group("modified"),
                    )
                continue
            if not stripped:
                continue
            buffer.append(stripped)
            depth += stripped.count("{") - stripped.count("}")
            if depth < 0:
                raise ParseError("unbalanced braces in concept store")
            if depth == 0:
                self._add_block(" ".join(buffer), pending)
                buffer = []
        if buffer:
            raise ParseError("unterminated concept block in store")

    def _add_block(self, block: str, pending: dict[str, tuple[str, str]]) -> None:
        definition = dlq.parse_concept(block, self.ont)
        if definition.name in self._entries:
            raise ConflictingDeclaration(definition.name, "duplicate concept in store")
        created, modified = pending.get(definition.name, (_utc_now(), _utc_now()))
        self._entries[definition.name] = StoredConcept(
            definition.name, dlq.format_concept(definition), definition, created, modified,
        )

    def _write(self) -> None:
        lines = [_HEADER]
        for entry in sorted(self._entries.values(), key=lambda e: e.name):
            lines.append(f"# concept {entry.name} created {entry.created} modified {entry.modified}")
            lines.append(entry.text)
        payload = "\n".join(lines) + "\n"
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".concepts-", suffix=".dlq")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(payload)
                os.replace(tmp, self.path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        except OSError as exc:
            raise StorageError(f"cannot write store file {self.path}: {exc}") from exc

    # -- operations ------------------------------------------------------------

    def save(self, definition: dlq.ConceptDefinition, reg: MappingRegistry,
             now: str | None = None) -> StoredConcept:
        """Validate then persist; overwriting updates the modified stamp."""
        try:
            text = dlq.format_concept(definition)
            reparsed = dlq.parse_concept(text, self.ont)
            if reparsed != definition:
                raise ValidationFailed("definition does not round-trip canonically")
            for assertion in definition.assertions:
                for prop in _properties(assertion):
                    resolve_property(reg, self.ont, prop)
        except OqrError as exc:
            if isinstance(exc, ValidationFailed):
                raise
            raise ValidationFailed(str(exc)) from exc
        stamp = now if now is not None else _utc_now()
        previous = self._entries.get(definition.name)
        created = previous.created if previous is not None else stamp
        entry = StoredConcept(definition.name, text, definition, created, stamp)
        self._entries[definition.name] = entry
        self._write()
        return entry

    def lookup(self, term: str) -> dlq.ConceptDefinition:
        """Exact canonical-name match; a miss carries close-name suggestions."""
        name = canon(term)
        entry = self._entries.get(name)
        if entry is None:
            raise UnknownConcept(name, self.suggestions(name))
        return entry.definition

    def suggestions(self, term: str) -> tuple[str, ...]:
        name = canon(term)
        return tuple(sorted(
            candidate for candidate in self._entries
            if _edit_distance(name, candidate) <= 2
        ))

    def get(self, term: str) -> StoredConcept:
        name = canon(term)
        entry = self._entries.get(name)
        if entry is None:
            raise UnknownConcept(name, self.suggestions(name))
        return entry

    def list(self) -> list[str]:
        return sorted(self._entries)

    def delete(self, name: str) -> None:
        key = canon(name)
        if key not in self._entries:
            raise UnknownConcept(key, self.suggestions(key))
        del self._entries[key]
        self._write()

    def __contains__(self, name: str) -> bool:
        return canon(name) in self._entries

    def __len__(self) -> int:
        return len(self._entries)


def _properties(expr: dlq.RestrictionExpr) -> list[str]:
    if isinstance(expr, (dlq.Some, dlq.Only, dlq.Has)):
        return [expr.prop]
    if isinstance(expr, dlq.Complement):
        return _properties(expr.child)
    props: list[str] = []
    for child in expr.children:
        props.extend(_properties(child))
    return props
