"""Differential fuzzing: translated plans vs the brute-force oracle.

Each case generates a small random ontology, a one-relation mapping, a CSV
table and a random expression or concept, then checks that evaluating the
translated plan agrees with the oracle. Every artifact goes through the real
text loaders and the parser, so the whole pipeline is under test. On
divergence the case is greedily shrunk (rows first, then the expression) and
reported as a ready-to-replay repro.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from . import dlq
from .backend import eval_ra, load_csv_data
from .engine import as_key_plan, plan_concept, translate_assertion
from .errors import OqrError
from .mappings import load_mappings
from .ontology import load_ontology
from .oracle import oracle_keys, oracle_rows

RELATION = "fuzz.t"


@dataclass
class FuzzCase:
    odf: str
    omf: str
    query: dlq.RestrictionExpr | dlq.ConceptDefinition
    rows: list[tuple[str, ...]]  # raw CSV records (pre-canonicalization)
    header: tuple[str, ...]

    @property
    def is_concept(self) -> bool:
        return isinstance(self.query, dlq.ConceptDefinition)

    @property
    def query_text(self) -> str:
        if self.is_concept:
            return dlq.format_concept(self.query)
        return dlq.format_expression(self.query)

    def render_csv(self) -> str:
        lines = [",".join(self.header)]
        lines.extend(",".join(row) for row in self.rows)
        return "\n".join(lines) + "\n"


@dataclass
class Divergence:
    case: FuzzCase
    engine: tuple | str
    oracle: tuple | str

    def report(self) -> str:
        parts = [
            "=== divergence reproducer ===",
            "--- ontology (odf) ---", self.case.odf,
            "--- mappings (omf) ---", self.case.omf,
            f"--- data ({RELATION}.csv) ---", self.case.render_csv(),
            "--- query ---", self.case.query_text,
            f"--- engine result ---\n{self.engine!r}",
            f"--- oracle result ---\n{self.oracle!r}",
        ]
        return "\n".join(parts)


@dataclass
class CampaignResult:
    cases: int
    agreed: int
    divergence: Divergence | None = None

    @property
    def ok(self) -> bool:
        return self.divergence is None and self.agreed == self.cases


# --------------------------------------------------------------------------
# Generation
# --------------------------------------------------------------------------

class _Generator:
    def __init__(self, rng: random.Random):
        self.rng = rng

    def case(self) -> FuzzCase:
        rng = self.rng
        classes = self._classes()
        individuals = self._individuals(classes)
        properties = self._properties()
        odf = self._render_odf(classes, individuals, properties)

        bound = self._bindings(properties)
        header = ("eid",) + tuple(col for _, col in bound)
        omf = self._render_omf(header, bound)

        class_names = [name for name, _ in classes]
        individual_names = [name for name, _ in individuals]
        tokens = class_names + individual_names + ["TRUE", "FALSE", "7", "X1"]
        rows = self._rows(header, tokens)

        prop_column = dict(self._resolved_columns(properties, dict(bound)))
        query = self._query(class_names, individual_names,
                            [p for p, _, _ in properties], prop_column)
        return FuzzCase(odf, omf, query, rows, header)

    def _classes(self) -> list[tuple[str, str | None]]:
        rng = self.rng
        count = rng.randint(2, 6)
        roots = rng.randint(1, min(2, count))
        out: list[tuple[str, str | None]] = []
        for i in range(count):
            parent = None if i < roots else out[rng.randrange(i)][0]
            out.append((f"K{i}", parent))
        return out

    def _individuals(self, classes) -> list[tuple[str, str]]:
        rng = self.rng
        out = []
        n = 0
        for name, _ in classes:
            for _ in range(rng.randint(0, 2)):
                out.append((f"I{n}", name))
                n += 1
        return out

    def _properties(self) -> list[tuple[str, str | None, bool]]:
        """(name, parent, mapped) triples; roots are always mapped."""
        rng = self.rng
        count = rng.randint(1, 4)
        out: list[tuple[str, str | None, bool]] = []
        for i in range(count):
            if i == 0 or rng.random() < 0.5:
                out.append((f"P{i}", None, True))
            else:
                parent = out[rng.randrange(i)][0]
                out.append((f"P{i}", parent, rng.random() < 0.3))
        return out

    def _bindings(self, properties) -> list[tuple[str, str]]:
        bound = [(p, f"c{i}") for i, (p, _, mapped) in enumerate(properties) if mapped]
        return bound

    def _resolved_columns(self, properties, bindings: dict[str, str]):
        parents = {p: parent for p, parent, _ in properties}
        for p, _, _ in properties:
            cur = p
            while cur not in bindings:
                cur = parents[cur]
            yield p, bindings[cur]

    def _render_odf(self, classes, individuals, properties) -> str:
        lines = []
        for name, parent in classes:
            lines.append(f"class {name}" + (f" subclassof {parent}" if parent else ""))
        for name, parent, _ in properties:
            lines.append(f"property {name}" + (f" subpropertyof {parent}" if parent else ""))
        for name, klass in individuals:
            lines.append(f"individual {name} type {klass}")
        return "\n".join(lines) + "\n"

    def _render_omf(self, header, bound) -> str:
        lines = [f"relation {RELATION} columns {' '.join(header)} pk eid"]
        for prop, col in bound:
            lines.append(f"map {prop} -> {RELATION}.{col}")
        return "\n".join(lines) + "\n"

    def _rows(self, header, tokens) -> list[tuple[str, ...]]:
        rng = self.rng
        rows = []
        for eid in range(1, rng.randint(1, 8) + 1):
            for _ in range(rng.randint(1, 6)):
                record = [str(eid)]
                for _ in header[1:]:
                    record.append("" if rng.random() < 0.1 else rng.choice(tokens))
                rows.append(tuple(record))
        return rows

    # -- expressions ------------------------------------------------------------

    def _atom(self, classes, individuals, props) -> dlq.RestrictionExpr:
        rng = self.rng
        prop = rng.choice(props)
        kind = rng.random()
        if kind < 0.35:
            return dlq.Some(prop, dlq.ClassOperand(rng.choice(classes)))
        if kind < 0.5 and individuals:
            picked = rng.sample(individuals, k=min(len(individuals), rng.randint(1, 3)))
            return dlq.Some(prop, dlq.SetOperand(tuple(sorted(set(picked)))))
        values = individuals + ["TRUE", "FALSE", "7"]
        picked = rng.sample(values, k=min(len(values), rng.randint(1, 2)))
        return dlq.Has(prop, tuple(sorted(set(picked))), negated=rng.random() < 0.4)

    def _tree(self, depth, classes, individuals, props) -> dlq.RestrictionExpr:
        rng = self.rng
        if depth <= 0:
            return self._atom(classes, individuals, props)
        kind = rng.random()
        if kind < 0.35:
            return self._atom(classes, individuals, props)
        if kind < 0.55:
            return dlq.Complement(self._tree(depth - 1, classes, individuals, props))
        children = [self._tree(depth - 1, classes, individuals, props)
                    for _ in range(rng.randint(2, 3))]
        if kind < 0.8:
            return dlq.make_union(children)
        return dlq.make_intersection(children)

    def _only(self, classes, individuals, props) -> dlq.Only:
        rng = self.rng
        prop = rng.choice(props)
        if individuals and rng.random() < 0.5:
            picked = rng.sample(individuals, k=min(len(individuals), rng.randint(1, 3)))
            return dlq.Only(prop, dlq.SetOperand(tuple(sorted(set(picked)))))
        return dlq.Only(prop, dlq.ClassOperand(rng.choice(classes)))

    def _query(self, classes, individuals, props, prop_column):
        rng = self.rng
        roll = rng.random()
        if roll < 0.35:  # concept with several assertions
            assertions = []
            used_columns: set[str] = set()
            if rng.random() < 0.25:
                only = self._only(classes, individuals, props)
                remaining = [p for p in props
                             if prop_column[p] != prop_column[only.prop]]
                if remaining:
                    assertions.append(only)
                    used_columns.add(prop_column[only.prop])
                    props = remaining
            while len(assertions) < 2 or (len(assertions) < 3 and rng.random() < 0.4):
                assertions.append(self._tree(2, classes, individuals, props))
            name = f"FUZZ_{rng.randrange(10_000)}"
            return dlq.ConceptDefinition(name, tuple(assertions))
        if roll < 0.45:
            return self._only(classes, individuals, props)
        return self._tree(4, classes, individuals, props)


# --------------------------------------------------------------------------
# Checking and shrinking
# --------------------------------------------------------------------------

def check_case(case: FuzzCase) -> tuple[tuple | str, tuple | str] | None:
    """None when engine and oracle agree, else the two results."""
    try:
        ont = load_ontology(case.odf)
        reg = load_mappings(case.omf, ont)
        db = load_csv_data({RELATION: case.render_csv()}, reg)
        if case.is_concept:
            definition = dlq.parse_concept(case.query_text, ont)
            plan = plan_concept(definition, reg, ont)
            engine = tuple(eval_ra(as_key_plan(plan, reg), db).rows)
            expected = tuple(oracle_keys(definition, db, reg, ont))
        else:
            expr = dlq.parse_expression(case.query_text, ont)
            plan = translate_assertion(expr, reg, ont)
            engine = tuple(eval_ra(plan, db).rows)
            expected = tuple(oracle_rows(expr, db, reg, ont).rows)
    except OqrError as exc:
        return (f"error: {type(exc).__name__}: {exc}", "error during check")
    if engine != expected:
        return engine, expected
    return None


def _expr_shrinks(expr: dlq.RestrictionExpr):
    if isinstance(expr, dlq.Complement):
        yield expr.child
    if isinstance(expr, (dlq.Union, dlq.Intersection)):
        make = dlq.make_union if isinstance(expr, dlq.Union) else dlq.make_intersection
        for child in expr.children:
            yield child
        if len(expr.children) > 2:
            for skip in range(len(expr.children)):
                rest = [c for i, c in enumerate(expr.children) if i != skip]
                yield make(rest)
        for i, child in enumerate(expr.children):
            for smaller in _expr_shrinks(child):
                kids = list(expr.children)
                kids[i] = smaller
                yield make(kids)


def _query_shrinks(query):
    if isinstance(query, dlq.ConceptDefinition):
        if len(query.assertions) > 1:
            for skip in range(len(query.assertions)):
                rest = tuple(a for i, a in enumerate(query.assertions) if i != skip)
                yield dlq.ConceptDefinition(query.name, rest)
        for i, a in enumerate(query.assertions):
            for smaller in _expr_shrinks(a):
                assertions = list(query.assertions)
                assertions[i] = smaller
                yield dlq.ConceptDefinition(query.name, tuple(assertions))
    else:
        yield from _expr_shrinks(query)


def shrink_case(case: FuzzCase) -> FuzzCase:
    """Greedy minimization: drop rows, then reduce the query, repeat."""
    current = case
    changed = True
    while changed:
        changed = False
        for i in range(len(current.rows)):
            candidate = replace(current, rows=current.rows[:i] + current.rows[i + 1:])
            if check_case(candidate) is not None:
                current = candidate
                changed = True
                break
        if changed:
            continue
        for query in _query_shrinks(current.query):
            candidate = replace(current, query=query)
            if check_case(candidate) is not None:
                current = candidate
                changed = True
                break
    return current


def run_campaign(seed: int, cases: int, progress=None) -> CampaignResult:
    """Run the differential campaign; stops at the first divergence."""
    rng = random.Random(seed)
    generator = _Generator(rng)
    agreed = 0
    for n in range(1, cases + 1):
        case = generator.case()
        outcome = check_case(case)
        if outcome is not None:
            minimal = shrink_case(case)
            final = check_case(minimal) or outcome
            return CampaignResult(
                cases=cases, agreed=agreed,
                divergence=Divergence(minimal, final[0], final[1]),
            )
        agreed += 1
        if progress is not None and n % 100 == 0:
            progress(n)
    return CampaignResult(cases=cases, agreed=agreed)
