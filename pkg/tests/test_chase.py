import random

import pytest
from hypothesis import given, settings, strategies as st

from rwb import parse_formula, parse_sequent, parse_theory
from rwb.chase import (Disproved, Proved, Unknown, canonical_isolating_formula, chase, chase_structure,
                       check_isolation, default_budget, entails)
from rwb.enumerate import enumerate_models
from rwb.generate import TERMINATING, formulas, load_theory, random_context, random_formula
from rwb.query import evaluate, holds, satisfies, satisfies_theory
from rwb.structure import Structure
from rwb.syntax import Sequent, alpha_equal

from conftest import graph


def test_transitivity_chase(trans):
    f = parse_formula("[x:A, y:A, z:A] R(x, y) & R(y, z)", trans.signature)
    res = chase(f, trans)
    assert res.status == "Terminated" and res.steps == 1
    a, b, c = res.generic
    assert res.model.relations["R"] == {(a, b), (b, c), (a, c)}
    assert len(res.model.carriers["A"]) == 3
    assert res.trace[0].axiom == trans.axiom_id(0) and res.trace[0].kind == "facts-added"


def test_empty_chase():
    t = parse_theory("sort A;")
    res = chase(parse_formula("[] true", t.signature), t)
    assert res.terminated and res.model.size() == 0 and res.generic == ()


def test_successor_budget():
    t = load_theory("successor")
    res = chase(parse_formula("[x:A, y:A] R(x, y)", t.signature), t, 5)
    assert res.status == "BudgetExhausted" and res.steps == 5
    assert len(res.trace) == 5 and all(s.kind == "witness-added" for s in res.trace)
    assert len(res.model.relations["R"]) == 6
    assert res.to_dict()["status"] == "BudgetExhausted(5)"


def test_budget_zero_without_triggers(binary):
    res = chase(parse_formula("[x:A] true", binary.signature), binary, 0)
    assert res.terminated


def test_long_budget_is_fast():
    t = load_theory("successor")
    res = chase(parse_formula("[x:A, y:A] R(x, y)", t.signature), t, 5000)
    assert res.steps == 5000 and res.model.size() == 5002


def test_env_budget(monkeypatch):
    monkeypatch.setenv("RWB_BUDGET", "7")
    assert default_budget() == 7
    t = load_theory("successor")
    assert chase(parse_formula("[x:A, y:A] R(x, y)", t.signature), t).steps == 7


def test_merging_chase():
    t = load_theory("merging")
    res = chase(parse_formula("[x:A, y:A] P(x) & E(x, y)", t.signature), t)
    assert res.terminated
    assert res.generic[0] == res.generic[1] and res.model.size() == 1
    assert any(s.kind == "elements-merged" for s in res.trace)


def test_function_chase():
    t = load_theory("idempotent")
    res = chase(parse_formula("[x:A] P(x)", t.signature), t)
    assert res.terminated and satisfies_theory(res.model, t)
    assert "f" in res.model.functions


def test_entailment_examples(trans, binary):
    s = parse_sequent("[x:A, y:A, z:A, w:A] R(x, y) & R(y, z) & R(z, w) |- R(x, w)", trans.signature)
    assert entails(trans, s) == Proved()
    v = entails(binary, parse_sequent("[x:A, y:A] R(x, y) |- R(y, x)", binary.signature))
    assert isinstance(v, Disproved) and v.countermodel.size() == 2
    a, b = v.witness
    assert (b, a) not in v.countermodel.relations["R"]
    f = parse_formula("[x:A] exists y:A. R(x, y) & R(y, x)", trans.signature)
    assert entails(trans, Sequent(f.context, f.body, f.body)) == Proved()


def test_unknown_and_partial_proof():
    t = load_theory("successor")
    sig = t.signature
    assert isinstance(entails(t, parse_sequent("[x:A, y:A] R(x, y) |- R(y, x)", sig), 30), Unknown)
    s = parse_sequent("[x:A, y:A] R(x, y) |- exists z:A. exists w:A. R(y, z) & R(z, w)", sig)
    assert entails(t, s, 30) == Proved()


@pytest.mark.parametrize("name", TERMINATING)
def test_chase_models_satisfy_theory(name):
    t = load_theory(name)
    for f in formulas(name):
        res = chase(f, t)
        assert res.terminated
        assert satisfies_theory(res.model, t)
        assert holds(f, res.model, res.generic)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from(TERMINATING))
def test_chase_universal_on_small_corpus(seed, name):
    from rwb.query import find_homs, tuple_seed
    rng = random.Random(seed)
    t = load_theory(name)
    f = random_formula(rng, t.signature, random_context(rng, t.signature, 2), rng.randint(1, 4))
    res = chase(f, t)
    assert res.terminated and satisfies_theory(res.model, t)
    for m in enumerate_models(t, 2):
        for a in evaluate(f, m):
            seed_map = tuple_seed(f.sorts, res.generic, a)
            assert seed_map is not None
            assert next(find_homs(res.model, m, seed_map, limit=1), None) is not None


def test_chase_structure_keeps_names(trans):
    m = graph(trans.signature, "abc", {("a", "b"), ("b", "c")})
    res = chase_structure(m, trans)
    assert res.terminated and ("a", "c") in res.model.relations["R"]
    assert res.renaming[("A", "a")] == "a"


def test_isolating_formula_examples(binary, trans):
    sig = binary.signature
    m1 = graph(sig, "e", set())
    assert alpha_equal(canonical_isolating_formula(m1, ("e",)), parse_formula("[x:A] true", sig))
    m2 = graph(sig, "ab", {("a", "b")})
    assert alpha_equal(canonical_isolating_formula(m2, ("a",)), parse_formula("[x:A] exists y:A. R(x, y)", sig))
    res = chase(parse_formula("[x:A, y:A, z:A] R(x, y) & R(y, z)", trans.signature), trans)
    iso = canonical_isolating_formula(res.model, res.generic)
    assert alpha_equal(iso, parse_formula("[x:A, y:A, z:A] R(x, y) & R(x, z) & R(y, z)", sig))


def test_check_isolation(trans, binary):
    corpus = list(enumerate_models(trans, 4))
    f = parse_formula("[x:A, y:A, z:A] R(x, y) & R(y, z)", trans.signature)
    res = chase(f, trans)
    assert check_isolation(f, res.model, res.generic, corpus)
    sig = binary.signature
    rich = graph(sig, "a", {("a", "a")})
    top = parse_formula("[x:A] true", sig)
    assert not check_isolation(top, rich, ("a",), [graph(sig, "b", set())])
    assert check_isolation(top, rich, ("a",), [rich])
