"""Concept store: persistence, lookup with suggestions, durability."""

from __future__ import annotations

import random

import pytest

from oqr.dlq import ConceptDefinition, parse_concept
from oqr.errors import UnknownConcept, ValidationFailed
from oqr.store import ConceptStore, _edit_distance

from test_dlq import _GEN_ODF, _random_expr
from oqr.mappings import load_mappings
from oqr.ontology import load_ontology


def test_shipped_store_loads(shipped_store):
    assert shipped_store.list() == [
        "ASTROCYTOMA_TUMOR",
        "BRAIN_TUMOR_DISEASE_X_STUDY",
        "BRAIN_TUMOR_DISEASE_X_SUSPECTS",
        "BRAIN_TUMOR_DISEASE_X_SUSPECTS_COMPLEX",
    ]


def test_save_then_listed(ont, reg, store):
    definition = parse_concept(
        "concept NEW_STUDY { assert hasClinicalTestName some HEADACHES; }", ont
    )
    store.save(definition, reg)
    assert "NEW_STUDY" in store.list()


def test_save_with_unmapped_property_fails(ont, reg, store):
    definition = parse_concept(
        "concept BAD { assert isValueOf has severe_symptomatic; }", ont
    )
    with pytest.raises(ValidationFailed):
        store.save(definition, reg)


def test_stored_text_reparses_to_stored_ast(ont, store):
    for name in store.list():
        entry = store.get(name)
        assert parse_concept(entry.text, ont) == entry.definition


def test_lookup_canonicalizes_free_text(shipped_store):
    definition = shipped_store.lookup("astrocytoma tumor")
    assert definition.name == "ASTROCYTOMA_TUMOR"
    assert len(definition.assertions) == 3


def test_lookup_miss_on_empty_store(ont, tmp_path):
    empty = ConceptStore(tmp_path / "none.dlq", ont)
    with pytest.raises(UnknownConcept) as exc:
        empty.lookup("anything")
    assert exc.value.suggestions == ()


def test_suggestions_within_edit_distance_two(ont, reg, store):
    with pytest.raises(UnknownConcept) as exc:
        store.lookup("ASTROCYTOMA_TUMOR5")  # one edit away
    assert "ASTROCYTOMA_TUMOR" in exc.value.suggestions


def test_suggestions_match_reference_edit_distance(ont, reg, store):
    def reference_distance(a: str, b: str) -> int:
        # plain recursive Levenshtein with memo, independent of the store's DP
        from functools import lru_cache

        @lru_cache(maxsize=None)
        def d(i: int, j: int) -> int:
            if i == 0:
                return j
            if j == 0:
                return i
            return min(
                d(i - 1, j) + 1,
                d(i, j - 1) + 1,
                d(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
            )

        return d(len(a), len(b))

    probes = ["ASTROCYTOMA_TUMOR", "ASTROCYTOMA_TUMO", "BRAIN_TUMOR_DISEASE_X_STUD",
              "XX", "BRAIN_TUMOR_DISEASE_X_SUSPECT"]
    for probe in probes:
        expected = tuple(sorted(
            name for name in store.list() if reference_distance(probe, name) <= 2
        ))
        assert store.suggestions(probe) == expected


def test_delete_then_absent(store, reg):
    store.delete("ASTROCYTOMA_TUMOR")
    assert "ASTROCYTOMA_TUMOR" not in store.list()
    with pytest.raises(UnknownConcept):
        store.delete("ASTROCYTOMA_TUMOR")


def test_durability_fresh_process_view(ont, reg, tmp_path):
    path = tmp_path / "c.dlq"
    first = ConceptStore(path, ont)
    definition = parse_concept(
        "concept KEPT { assert hasClinicalTestName some HEADACHES; }", ont
    )
    first.save(definition, reg, now="2026-08-10T00:00:00Z")
    second = ConceptStore(path, ont)  # simulates a fresh process
    assert second.lookup("KEPT") == definition
    assert second.get("KEPT").created == "2026-08-10T00:00:00Z"


def test_store_round_trips_byte_stably(tmp_path):
    snapshot = load_ontology(_GEN_ODF)
    registry = load_mappings(
        "relation d.t columns eid c0 c2 pk eid\nmap P0 -> d.t.c0\nmap P2 -> d.t.c2\n",
        snapshot,
    )
    path = tmp_path / "c.dlq"
    store = ConceptStore(path, snapshot)
    rng = random.Random(51)
    for i in range(100):
        assertions = tuple(
            _random_expr(rng, depth=2, allow_only=False)
            for _ in range(rng.randint(1, 3))
        )
        store.save(ConceptDefinition(f"C_{i}", assertions), registry,
                   now="2026-08-10T00:00:00Z")
    payload = path.read_bytes()
    reloaded = ConceptStore(path, snapshot)
    assert reloaded.list() == store.list()
    # rewriting the reloaded store without changes reproduces the same bytes
    reloaded._write()
    assert path.read_bytes() == payload


def test_random_save_delete_sequences_follow_model(tmp_path, ont, reg):
    path = tmp_path / "c.dlq"
    store = ConceptStore(path, ont)
    model: dict[str, ConceptDefinition] = {}
    rng = random.Random(52)
    pool = [f"N{i}" for i in range(8)]
    for _ in range(120):
        name = rng.choice(pool)
        if rng.random() < 0.6:
            definition = parse_concept(
                f"concept {name} {{ assert hasClinicalTestName some HEADACHES; }}", ont
            )
            store.save(definition, reg)
            model[name] = definition
        else:
            if name in model:
                store.delete(name)
                del model[name]
            else:
                with pytest.raises(UnknownConcept):
                    store.delete(name)
        assert store.list() == sorted(model)


def test_multiline_blocks_accepted(ont, tmp_path):
    path = tmp_path / "c.dlq"
    path.write_text(
        "concept HAND_WRITTEN {\n"
        "  assert hasClinicalTestName some HEADACHES;\n"
        "  assert hasClinicalTestValue has TRUE\n"
        "}\n",
        encoding="utf-8",
    )
    store = ConceptStore(path, ont)
    assert store.list() == ["HAND_WRITTEN"]
    assert len(store.lookup("HAND_WRITTEN").assertions) == 2


def test_edit_distance_basics():
    assert _edit_distance("ABC", "ABC") == 0
    assert _edit_distance("ABC", "ABD") == 1
    assert _edit_distance("ABC", "AC") == 1
    assert _edit_distance("ABC", "XYZ12") == 3  # clamped at cap
