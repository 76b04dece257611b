"""Shared workspace behind the CLI and the HTTP service.

Loads the ontology, mappings, optional CSV data and concept store once, and
exposes the translate/execute/oracle operations both frontends call, so the
two can never disagree on semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import dlq
from .backend import Database, RowSet, emit_sql, eval_ra, load_csv
from .engine import KeySetOp, RAExpr, as_key_plan, plan_concept, render_ra, translate_assertion
from .errors import OqrError
from .mappings import MappingRegistry, load_mappings, relation_of
from .ontology import OntologySnapshot, load_ontology
from .oracle import oracle_keys, oracle_rows
from .store import ConceptStore


@dataclass(frozen=True)
class TranslationResponse:
    dl_text: str
    ra_text: str
    sql: str
    warnings: tuple[str, ...]
    plan: RAExpr | None = field(repr=False, compare=False, default=None)
    keys_result: bool = field(compare=False, default=False)


class Workspace:
    """Immutable inputs plus the single mutable piece, the concept store."""

    def __init__(self, ont: OntologySnapshot, reg: MappingRegistry,
                 db: Database | None = None, store: ConceptStore | None = None):
        self.ont = ont
        self.reg = reg
        self.db = db
        self.store = store

    @classmethod
    def load(cls, ontology: str | Path, mappings: str | Path,
             data: str | Path | None = None,
             store: str | Path | None = None) -> "Workspace":
        ont = load_ontology(Path(ontology).read_text(encoding="utf-8"))
        reg = load_mappings(Path(mappings).read_text(encoding="utf-8"), ont)
        db = load_csv(data, reg) if data is not None else None
        concept_store = ConceptStore(store, ont) if store is not None else None
        return cls(ont, reg, db, concept_store)

    # -- core operations ---------------------------------------------------

    def _resolve_input(self, expr: str | None, concept: str | None,
                       concept_text: str | None, warnings: list[str]):
        """Returns (dl_text, plan_factory) for any of the three input forms."""
        given = [x for x in (expr, concept, concept_text) if x is not None]
        if len(given) != 1:
            raise OqrError(
                "exactly one of expression text, concept name or concept block is required"
            )
        if expr is not None:
            parsed = dlq.parse_expression(expr, self.ont)
            return (
                dlq.format_expression(parsed),
                lambda: translate_assertion(parsed, self.reg, self.ont, warnings),
            )
        if concept_text is not None:
            definition = dlq.parse_concept(concept_text, self.ont)
        else:
            if self.store is None:
                raise OqrError("no concept store configured (use --store or OQR_STORE)")
            definition = self.store.lookup(concept)
        return (
            dlq.format_concept(definition),
            lambda: plan_concept(definition, self.reg, self.ont, warnings),
        )

    def translate(self, expr: str | None = None, concept: str | None = None,
                  concept_text: str | None = None) -> TranslationResponse:
        warnings: list[str] = []
        dl_text, build = self._resolve_input(expr, concept, concept_text, warnings)
        plan = build()
        return TranslationResponse(
            dl_text=dl_text,
            ra_text=render_ra(plan),
            sql=emit_sql(plan),
            warnings=tuple(warnings),
            plan=plan,
            keys_result=isinstance(plan, KeySetOp),
        )

    def execute(self, expr: str | None = None, concept: str | None = None,
                concept_text: str | None = None,
                keys_only: bool = False) -> tuple[TranslationResponse, RowSet, str]:
        """Translate then evaluate; returns (translation, rows, kind)."""
        if self.db is None:
            raise OqrError("no data directory loaded (use --data)")
        response = self.translate(expr=expr, concept=concept, concept_text=concept_text)
        plan = response.plan
        if keys_only:
            plan = as_key_plan(plan, self.reg)
        rows = eval_ra(plan, self.db)
        kind = "keys" if keys_only or response.keys_result else "rows"
        return response, rows, kind

    def oracle(self, expr: str | None = None,
               concept: str | None = None) -> tuple[RowSet, str]:
        """Brute-force result for the same inputs, bypassing the engine."""
        if self.db is None:
            raise OqrError("no data directory loaded (use --data)")
        if (expr is None) == (concept is None):
            raise OqrError("exactly one of expression text or concept name is required")
        if expr is not None:
            parsed = dlq.parse_expression(expr, self.ont)
            return oracle_rows(parsed, self.db, self.reg, self.ont), "rows"
        if self.store is None:
            raise OqrError("no concept store configured (use --store or OQR_STORE)")
        definition = self.store.lookup(concept)
        keys = oracle_keys(definition, self.db, self.reg, self.ont)
        meta = relation_of(self.reg, self.ont, definition.assertions[0])
        return RowSet(meta.primary_key, tuple(keys)), "keys"

    # -- guidance queries (the wizard's choice lists) ---------------------------

    def class_level(self, parent: str | None = None) -> list[dict]:
        out = []
        for name in self.ont.subclasses_of(parent):
            out.append({
                "name": name,
                "parent": self.ont.class_map[name].parent,
                "has_children": bool(self.ont.subclasses_of(name)),
            })
        return out

    def class_properties(self, klass: str) -> list[dict]:
        names = self.ont.applicable_properties(klass)
        out = []
        for name in names:
            decl = self.ont.property_map[name]
            out.append({"name": name, "domain": decl.domain, "range": decl.range})
        return out

    def property_values(self, prop: str) -> list[str]:
        return self.ont.range_values(prop)
