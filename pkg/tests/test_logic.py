import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from rwb import ParseError, RegularityError, SortError, parse_formula, parse_sequent, parse_theory
from rwb.chase import relationalize, relationalize_formula, graph_names
from rwb.enumerate import enumerate_models
from rwb.generate import load_theory, random_context, random_formula, theory_names
from rwb.printer import format_fic, format_theory
from rwb.query import evaluate
from rwb.structure import Structure
from rwb.syntax import (Exists, FormulaInContext, Rel, Var, alpha_equal, free_vars, is_reduced,
                        reduce_presentation, substitute)
from rwb.topology import PresentedOpen, model_in_open


def test_parse_transitivity_theory(trans):
    assert trans.signature.sorts == ("A",)
    assert trans.signature.rel_sorts == {"R": ("A", "A")}
    assert len(trans.axioms) == 1
    ax = trans.axioms[0]
    assert ax.context == (("x", "A"), ("y", "A"), ("z", "A"))


def test_parse_trivial_sequent():
    t = parse_theory("sort A; axiom [] true |- true;")
    assert len(t.axioms) == 1 and t.axioms[0].context == ()


def test_forall_is_rejected():
    with pytest.raises(RegularityError):
        parse_theory("sort A; rel P(A); axiom [] true |- forall x:A. P(x);")


@pytest.mark.parametrize("text", [
    "sort A; rel R(A A);",
    "sort A; rel R(B);",
    "sort A; rel R(A); rel R(A);",
    "sort A; rel R(A); axiom [x:A] R(y) |- true;",
    "sort A, B; rel R(A); axiom [x:B] R(x) |- true;",
    "sort A; rel R(A); axiom [x:A] R(x) | R(x) |- true;",
    "sort A; rel R(A); axiom [x:A] ~R(x) |- true;",
])
def test_malformed_input_raises(text):
    with pytest.raises((ParseError, SortError)):
        parse_theory(text)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as e:
        parse_theory("sort A;\nrel R(A A);")
    assert "line 2" in str(e.value)


@pytest.mark.parametrize("name", theory_names())
def test_corpus_theories_round_trip(name):
    t = load_theory(name)
    assert parse_theory(format_theory(t)) == t


def test_substitute_renames(binary):
    f = parse_formula("[x:A, y:A] R(x, y)", binary.signature)
    g = substitute(f, {"x": "u", "y": "v"})
    assert g == parse_formula("[u:A, v:A] R(u, v)", binary.signature)


def test_substitute_avoids_capture(binary):
    f = parse_formula("[x:A] exists y:A. R(x, y)", binary.signature)
    g = substitute(f, {"x": "y"})
    assert g.names == ("y",)
    assert isinstance(g.body, Exists) and g.body.var != "y"
    assert g.body.body == Rel("R", (Var("y"), Var(g.body.var)))
    assert alpha_equal(g, parse_formula("[y:A] exists w:A. R(y, w)", binary.signature))


def _all_binary(sig, n):
    els = [f"e{i}" for i in range(n)]
    pairs = list(itertools.product(els, els))
    for bits in range(1 << len(pairs)):
        yield Structure(sig, {"A": els}, {"R": {p for i, p in enumerate(pairs) if bits >> i & 1}})


def test_collapsing_substitution_extension(binary):
    sig = binary.signature
    f = parse_formula("[x:A, y:A] R(x, y)", sig)
    g = substitute(f, {"x": "u", "y": "u"})
    assert g == parse_formula("[u:A] R(u, u)", sig)
    for n in range(4):
        for m in _all_binary(sig, n):
            assert evaluate(g, m) == {(a,) for a, b in evaluate(f, m) if a == b}


def test_substitution_sort_clash():
    t = parse_theory("sort A, B; rel E(A, B);")
    f = parse_formula("[x:A, y:B] E(x, y)", t.signature)
    with pytest.raises(SortError):
        substitute(f, {"x": "u", "y": "u"})


def test_reduce_presentation_examples(binary):
    sig = binary.signature
    f = parse_formula("[x:A, y:A] R(x, y)", sig)
    g, tup = reduce_presentation(f, ("a", "a"))
    assert tup == ("a",) and alpha_equal(g, parse_formula("[u:A] R(u, u)", sig))
    assert reduce_presentation(f, ("a", "b")) == (f, ("a", "b"))


def test_reduce_presentation_same_open(binary):
    sig = binary.signature
    f = parse_formula("[x:A, y:A, z:A] R(x, y) & R(y, z)", sig)
    g, tup = reduce_presentation(f, ("a", "b", "a"))
    assert tup == ("a", "b") and is_reduced(g, tup)
    assert alpha_equal(g, parse_formula("[u:A, v:A] R(u, v) & R(v, u)", sig))
    sig3 = binary.signature
    for n in range(4):
        for m in _all_binary(sig3, n):
            m = m.rename({"e0": "a", "e1": "b"}) if n >= 2 else m
            assert model_in_open(m, PresentedOpen(f, ("a", "b", "a"))) == model_in_open(m, PresentedOpen(g, tup))


def test_relationalize_relational_unchanged(trans):
    assert relationalize(trans) == trans


def test_relationalize_function():
    t = parse_theory("sort A; fun f(A): A; rel R(A);")
    rt = relationalize(t)
    g = graph_names(t.signature)["f"]
    assert rt.signature.rel_sorts[g] == ("A", "A")
    assert not rt.signature.functions
    assert len(rt.axioms) == 2
    f = parse_formula("[x:A] R(f(x))", t.signature)
    rf = relationalize_formula(f, t.signature)
    assert alpha_equal(rf, parse_formula(f"[x:A] exists y:A. {g}(x, y) & R(y)", rt.signature))
    for m in enumerate_models(t, 3):
        assert evaluate(f, m) == evaluate(rf, m.relationalized({"f": g}))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from(theory_names()), st.integers(0, 3), st.integers(1, 6))
def test_print_parse_round_trip(seed, name, n, size):
    rng = random.Random(seed)
    sig = load_theory(name).signature
    f = random_formula(rng, sig, random_context(rng, sig, n), size)
    g = parse_formula(format_fic(f), sig)
    assert g == f
    assert free_vars(g.body) <= set(g.names)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 4))
def test_reduction_preserves_open(seed, size):
    rng = random.Random(seed)
    t = load_theory("transitivity")
    sig = t.signature
    f = random_formula(rng, sig, random_context(rng, sig, 3), size)
    tup = tuple(rng.choice("ab") for _ in range(3))
    g, red = reduce_presentation(f, tup)
    assert is_reduced(g, red)
    for m in enumerate_models(t, 2):
        m = m.rename({"A0": "a", "A1": "b"})
        assert model_in_open(m, PresentedOpen(f, tup)) == model_in_open(m, PresentedOpen(g, red))
