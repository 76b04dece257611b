"""Acceptance suite: one test per criterion, one pass line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (or plain ``pytest``). Each
test prints ``ACCEPTANCE <criterion>: PASS`` on success; pytest reports any
failure per test as usual.
"""

from __future__ import annotations

import random
import time

import pytest

from oqr.backend import eval_ra, emit_sql, run_sqlite
from oqr.dlq import (
    format_concept,
    format_expression,
    parse_concept,
    parse_expression,
)
from oqr.engine import KeySetOp, as_key_plan, plan_concept, translate_assertion
from oqr.errors import (
    CycleDetected,
    DisjointnessViolation,
    InverseAsymmetry,
    UnknownReference,
)
from oqr.fuzz import run_campaign
from oqr.ontology import load_ontology
from oqr.oracle import oracle_keys, oracle_rows

from conftest import FIXTURES
from test_dlq import _GEN_ODF, _random_expr

QUERY_1 = """hasClinicalTestName some DOUBLE_VISION union
hasClinicalTestName some HEADACHES union
hasClinicalTestName some ORTHOPAEDIC_SEQUELEA"""

QUERY_1_SQL = (
    "SELECT * FROM patient_information WHERE clinical_test_name = 'DOUBLE_VISION' "
    "OR clinical_test_name = 'HEADACHES' OR clinical_test_name = 'ORTHOPAEDIC_SEQUELEA'"
)

QUERY_2_SQL = (
    "SELECT patient_id FROM patient_information WHERE clinical_test_name = 'DOUBLE_VISION' "
    "AND clinical_test_value = 'TRUE' INTERSECT SELECT patient_id FROM patient_information "
    "WHERE clinical_test_name = 'HEADACHES' AND clinical_test_value = 'TRUE' INTERSECT "
    "SELECT patient_id FROM patient_information WHERE clinical_test_name = "
    "'ORTHOPAEDIC_SEQUELEA' AND clinical_test_value = 'SEVERE_SYMPTOMATIC'"
)

# one golden per translation rule/scenario: 2 allValuesFrom + 6 someValuesFrom
# + 3 complementOf + 2 hasValue + 3 combinations = 16
RULE_GOLDENS = [
    (
        "allvalues-class",
        "expr",
        "hasClinicalTestValue only ORTHOPAEDIC_SEQUELEA_VALUES",
        "SELECT * FROM patient_information WHERE patient_id NOT IN "
        "(SELECT patient_id FROM patient_information WHERE NOT "
        "(clinical_test_value = 'ASYMPTOMATIC' OR clinical_test_value = "
        "'MODERATE_SYMPTOMATIC' OR clinical_test_value = 'SEVERE_SYMPTOMATIC'))",
    ),
    (
        "allvalues-set",
        "expr",
        "hasClinicalTestValue only {severe_symptomatic moderate_symptomatic}",
        "SELECT * FROM patient_information WHERE patient_id NOT IN "
        "(SELECT patient_id FROM patient_information WHERE NOT "
        "(clinical_test_value = 'MODERATE_SYMPTOMATIC' OR clinical_test_value = "
        "'SEVERE_SYMPTOMATIC'))",
    ),
    (
        "some-union-shared-property",
        "expr",
        QUERY_1,
        QUERY_1_SQL,
    ),
    (
        "some-union-distinct-properties",
        "expr",
        "hasClinicalTestName some DOUBLE_VISION union "
        "hasClinicalTestValue some ORTHOPAEDIC_SEQUELEA_VALUES",
        "SELECT * FROM patient_information WHERE clinical_test_name = 'DOUBLE_VISION' "
        "OR (clinical_test_value = 'ASYMPTOMATIC' OR clinical_test_value = "
        "'MODERATE_SYMPTOMATIC' OR clinical_test_value = 'SEVERE_SYMPTOMATIC')",
    ),
    (
        "some-intersection-distinct-properties",
        "expr",
        "hasClinicalTestName some ORTHOPAEDIC_SEQUELEA intersection "
        "hasClinicalTestValue some ORTHOPAEDIC_SEQUELEA_VALUES",
        "SELECT * FROM patient_information WHERE clinical_test_name = "
        "'ORTHOPAEDIC_SEQUELEA' AND (clinical_test_value = 'ASYMPTOMATIC' OR "
        "clinical_test_value = 'MODERATE_SYMPTOMATIC' OR clinical_test_value = "
        "'SEVERE_SYMPTOMATIC')",
    ),
    (
        "some-mixed-union-intersection",
        "expr",
        "hasClinicalTestName some DOUBLE_VISION union "
        "(hasClinicalTestName some ORTHOPAEDIC_SEQUELEA intersection "
        "hasClinicalTestValue some ORTHOPAEDIC_SEQUELEA_VALUES)",
        "SELECT * FROM patient_information WHERE clinical_test_name = 'DOUBLE_VISION' "
        "OR (clinical_test_name = 'ORTHOPAEDIC_SEQUELEA' AND (clinical_test_value = "
        "'ASYMPTOMATIC' OR clinical_test_value = 'MODERATE_SYMPTOMATIC' OR "
        "clinical_test_value = 'SEVERE_SYMPTOMATIC'))",
    ),
    (
        "some-multiple-assertions",
        "concept",
        "concept SOME_ASSERTS { assert hasClinicalTestName some ORTHOPAEDIC_SEQUELEA; "
        "assert hasClinicalTestValue some ORTHOPAEDIC_SEQUELEA_VALUES; }",
        "SELECT * FROM patient_information WHERE clinical_test_name = "
        "'ORTHOPAEDIC_SEQUELEA' AND (clinical_test_value = 'ASYMPTOMATIC' OR "
        "clinical_test_value = 'MODERATE_SYMPTOMATIC' OR clinical_test_value = "
        "'SEVERE_SYMPTOMATIC')",
    ),
    (
        "some-multiple-instances",
        "expr",
        "hasClinicalTestValue some {severe_symptomatic moderate_symptomatic}",
        "SELECT * FROM patient_information WHERE clinical_test_value = "
        "'MODERATE_SYMPTOMATIC' OR clinical_test_value = 'SEVERE_SYMPTOMATIC'",
    ),
    (
        "complement-union-of-values",
        "expr",
        "complementOf(hasClinicalTestValue has TRUE union hasClinicalTestValue has FALSE)",
        "SELECT * FROM patient_information WHERE clinical_test_value <> 'TRUE' "
        "AND clinical_test_value <> 'FALSE'",
    ),
    (
        "complement-intersection",
        "expr",
        "complementOf(hasClinicalTestValue has TRUE) intersection "
        "complementOf(hasClinicalTestValue has severe_symptomatic)",
        "SELECT * FROM patient_information WHERE clinical_test_value <> 'TRUE' "
        "AND clinical_test_value <> 'SEVERE_SYMPTOMATIC'",
    ),
    (
        "complement-mixed",
        "expr",
        "complementOf(hasClinicalTestName has double_vision) intersection "
        "complementOf(hasClinicalTestValue has TRUE union hasClinicalTestValue has FALSE)",
        "SELECT * FROM patient_information WHERE clinical_test_name <> 'DOUBLE_VISION' "
        "AND clinical_test_value <> 'TRUE' AND clinical_test_value <> 'FALSE'",
    ),
    (
        "hasvalue-union-intersection",
        "expr",
        "hasClinicalTestValue has {TRUE FALSE} union "
        "(hasClinicalTestName has headaches intersection hasClinicalTestValue has TRUE)",
        "SELECT * FROM patient_information WHERE clinical_test_value = 'FALSE' OR "
        "clinical_test_value = 'TRUE' OR (clinical_test_name = 'HEADACHES' AND "
        "clinical_test_value = 'TRUE')",
    ),
    (
        "hasvalue-multiple-assertions",
        "concept",
        "concept HAS_ASSERTS { assert hasClinicalTestName has orthopaedic_sequelea; "
        "assert hasClinicalTestValue has severe_symptomatic; }",
        "SELECT * FROM patient_information WHERE clinical_test_name = "
        "'ORTHOPAEDIC_SEQUELEA' AND clinical_test_value = 'SEVERE_SYMPTOMATIC'",
    ),
    (
        "combination-some-has",
        "expr",
        "hasClinicalTestName some DOUBLE_VISION intersection "
        "hasClinicalTestBooleanValue has TRUE",
        "SELECT * FROM patient_information WHERE clinical_test_name = 'DOUBLE_VISION' "
        "AND clinical_test_value = 'TRUE'",
    ),
    (
        "combination-union-of-pairs",
        "expr",
        "(hasClinicalTestName some DOUBLE_VISION intersection "
        "hasClinicalTestBooleanValue has TRUE) union "
        "(hasClinicalTestName some HEADACHES intersection "
        "hasClinicalTestBooleanValue has TRUE)",
        "SELECT * FROM patient_information WHERE (clinical_test_name = 'DOUBLE_VISION' "
        "AND clinical_test_value = 'TRUE') OR (clinical_test_name = 'HEADACHES' AND "
        "clinical_test_value = 'TRUE')",
    ),
    (
        "combination-division",
        "stored-concept",
        "BRAIN_TUMOR_DISEASE_X_SUSPECTS",
        QUERY_2_SQL,
    ),
]


def _plan_for(kind: str, text: str, ont, reg, shipped_store):
    if kind == "expr":
        return translate_assertion(parse_expression(text, ont), reg, ont)
    if kind == "concept":
        return plan_concept(parse_concept(text, ont), reg, ont)
    return plan_concept(shipped_store.lookup(text), reg, ont)


def test_query1_golden(ont, reg, db):
    started = time.perf_counter()
    expr = parse_expression(QUERY_1, ont)
    plan = translate_assertion(expr, reg, ont)
    assert emit_sql(plan) == QUERY_1_SQL

    rows = eval_ra(plan, db)
    table = db.tables["patients.patient_information"]
    wanted = {"DOUBLE_VISION", "HEADACHES", "ORTHOPAEDIC_SEQUELEA"}
    expected = sorted({r for r in table.rows if r[1] in wanted})
    assert list(rows.rows) == expected
    assert len(rows.rows) == 10

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    print(f"\nACCEPTANCE query-1 golden: PASS ({elapsed * 1000:.0f} ms)")


def test_query2_golden(ont, reg, db, shipped_store):
    started = time.perf_counter()
    definition = shipped_store.lookup("BRAIN_TUMOR_DISEASE_X_SUSPECTS")
    plan = plan_concept(definition, reg, ont)
    assert isinstance(plan, KeySetOp) and plan.op == "intersect"
    assert emit_sql(plan) == QUERY_2_SQL

    keys = eval_ra(plan, db)
    assert keys.rows == (("1",),)

    # hand-enumerable brute force over the required (name, value) tuples
    required = [("DOUBLE_VISION", "TRUE"), ("HEADACHES", "TRUE"),
                ("ORTHOPAEDIC_SEQUELEA", "SEVERE_SYMPTOMATIC")]
    table = db.tables["patients.patient_information"]
    brute = set()
    for key in {r[0] for r in table.rows}:
        if all(any(r[0] == key and (r[1], r[2]) == pair for r in table.rows)
               for pair in required):
            brute.add((key,))
    assert set(keys.rows) == brute == {("1",)}
    # the fixture contains the 2-of-3 partial match (patient 2) it must reject
    partial = [r for r in table.rows if r[0] == "2" and (r[1], r[2]) in required]
    assert len(partial) == 2

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    print(f"\nACCEPTANCE query-2 golden: PASS ({elapsed * 1000:.0f} ms)")


@pytest.mark.parametrize("name,kind,text,expected_sql",
                         RULE_GOLDENS, ids=[g[0] for g in RULE_GOLDENS])
def test_rule_catalogue_golden(name, kind, text, expected_sql, ont, reg, db, shipped_store):
    plan = _plan_for(kind, text, ont, reg, shipped_store)
    assert emit_sql(plan) == expected_sql

    got = eval_ra(plan, db)
    if kind == "expr":
        expr = parse_expression(text, ont)
        assert got == oracle_rows(expr, db, reg, ont)
    else:
        definition = (parse_concept(text, ont) if kind == "concept"
                      else shipped_store.lookup(text))
        keyed = eval_ra(as_key_plan(plan, reg), db)
        assert list(keyed.rows) == oracle_keys(definition, db, reg, ont)
    print(f"\nACCEPTANCE rule golden {name}: PASS")


def test_rule_catalogue_is_complete():
    assert len(RULE_GOLDENS) == 16
    prefixes = [g[0].split("-")[0] for g in RULE_GOLDENS]
    assert prefixes.count("allvalues") == 2
    assert prefixes.count("some") == 6
    assert prefixes.count("complement") == 3
    assert prefixes.count("hasvalue") == 2
    assert prefixes.count("combination") == 3
    print("\nACCEPTANCE rule catalogue coverage (2+6+3+2+3 = 16): PASS")


def test_differential_fuzz_thousand_cases():
    started = time.perf_counter()
    result = run_campaign(seed=7, cases=1000)
    elapsed = time.perf_counter() - started
    if result.divergence is not None:
        pytest.fail("engine/oracle divergence:\n" + result.divergence.report())
    assert result.agreed == 1000
    assert elapsed < 60.0
    print(f"\nACCEPTANCE differential fuzz (seed 7): 1000/1000 agree "
          f"in {elapsed:.2f} s: PASS")


def test_cross_engine_sqlite(ont, reg, db, shipped_store):
    checked = 0
    for name, kind, text, expected_sql in RULE_GOLDENS:
        plan = _plan_for(kind, text, ont, reg, shipped_store)
        ours = set(eval_ra(plan, db).rows)
        theirs = set(run_sqlite(db, emit_sql(plan)))
        assert ours == theirs, f"sqlite disagrees on {name}"
        checked += 1
    assert checked == 16
    print(f"\nACCEPTANCE cross-engine (SQLite) on {checked} goldens: PASS")


def test_parser_round_trip():
    snapshot = load_ontology(_GEN_ODF)
    rng = random.Random(61)
    for _ in range(1000):
        expr = _random_expr(rng, depth=4, allow_only=True)
        assert parse_expression(format_expression(expr), snapshot) == expr
    print("\nACCEPTANCE parser round-trip (1000 random ASTs): PASS")


def test_worked_query_listings_canonicalize_to_fixed_points(ont):
    # first listing: the three-way union study definition
    once = format_expression(parse_expression(QUERY_1, ont))
    assert format_expression(parse_expression(once, ont)) == once

    # second listing: the suspects concept, one assert per row-condition pair
    suspects = """concept Brain_Tumor_Disease-X_Suspects {
      assert hasClinicalTestName some DOUBLE_VISION intersection hasClinicalTestBooleanValue has TRUE;
      assert hasClinicalTestName some HEADACHES intersection hasClinicalTestBooleanValue has TRUE;
      assert hasClinicalTestName some ORTHOPAEDIC_SEQUELEA intersection hasClinicalTestStringValue has severe_symptomatic
    }"""
    canonical = format_concept(parse_concept(suspects, ont))
    assert format_concept(parse_concept(canonical, ont)) == canonical
    print("\nACCEPTANCE worked query listings parse to fixed points: PASS")


def test_ontology_validation_mutants():
    valid = (FIXTURES / "hec.odf").read_text(encoding="utf-8")

    mutants = {
        "cycle": (
            valid.replace("class Clinical_Tests\n",
                          "class Clinical_Tests subclassof HEADACHES\n"),
            CycleDetected,
        ),
        "disjointness": (
            valid + "individual severe_symptomatic type ORTHOPAEDIC_SEQUELEA\n",
            DisjointnessViolation,
        ),
        "inverse-asymmetry": (
            valid.replace("range ORTHOPAEDIC_SEQUELEA inverse hasOrthopaedicSequeleaValue",
                          "range ORTHOPAEDIC_SEQUELEA inverse hasClinicalTestValue"),
            InverseAsymmetry,
        ),
        "unknown-reference": (
            valid.replace("link thrombosis_sequelea hasThrombosisSequeleaValue absent",
                          "link thrombosis_sequelea hasThrombosisSequeleaValue absentt"),
            UnknownReference,
        ),
    }
    for label, (text, expected) in mutants.items():
        assert text != valid, f"mutation {label} did not change the file"
        with pytest.raises(expected):
            load_ontology(text)
    print("\nACCEPTANCE ontology validation mutants (4/4 detected): PASS")
