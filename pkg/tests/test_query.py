import random

from hypothesis import given, settings, strategies as st

from rwb import kernel, parse_formula, parse_sequent
from rwb._search import search as python_search
from rwb.enumerate import enumerate_models
from rwb.generate import load_theory, random_context, random_formula
from rwb.query import evaluate, find_homs, holds, satisfies
from rwb.structure import Homomorphism

from conftest import graph


def test_evaluate_examples(binary):
    sig = binary.signature
    assert evaluate(parse_formula("[x:A] true", sig), graph(sig, "ab", set())) == {("a",), ("b",)}
    m = graph(sig, "ab", {("a", "b")})
    assert evaluate(parse_formula("[x:A] exists y:A. R(x, y)", sig), m) == {("a",)}
    m = graph(sig, "abcd", {("a", "b"), ("b", "c"), ("b", "d")})
    f = parse_formula("[x:A, z:A] exists y:A. R(x, y) & R(y, z)", sig)
    assert evaluate(f, m) == {("a", "c"), ("a", "d")}


def test_satisfies_examples(binary, trans):
    sig = binary.signature
    m = graph(sig, "ab", {("a", "b")})
    assert satisfies(m, parse_sequent("[x:A, y:A] R(x, y) |- R(x, y)", sig))
    assert not satisfies(m, parse_sequent("[x:A, y:A] R(x, y) |- R(y, x)", sig))
    m = graph(sig, "abc", {("a", "b"), ("b", "c"), ("a", "c")})
    assert satisfies(m, trans.axioms[0])


def test_find_homs_examples(binary):
    sig = binary.signature
    one = graph(sig, "a", set())
    assert list(find_homs(one, one)) == [Homomorphism.identity(one)]
    edge, loop = graph(sig, "ab", {("a", "b")}), graph(sig, "c", {("c", "c")})
    homs = list(find_homs(edge, loop))
    assert len(homs) == 1 and dict(homs[0].maps["A"]) == {"a": "c", "b": "c"}
    assert len(list(find_homs(graph(sig, "ab", set()), graph(sig, "cde", set())))) == 9


def test_find_homs_seed(binary):
    sig = binary.signature
    m = graph(sig, "ab", set())
    n = graph(sig, "cde", set())
    homs = list(find_homs(m, n, {("A", "a"): "d"}))
    assert len(homs) == 3 and all(h("A", "a") == "d" for h in homs)


def _brute_homs(m, n):
    from itertools import product
    sig = m.signature
    src, tgt = m.elements("A"), n.elements("A")
    out = set()
    for vals in product(tgt, repeat=len(src)):
        h = Homomorphism(m, n, {"A": dict(zip(src, vals))}, check=False)
        if h.is_valid():
            out.add(h)
    return out


def test_find_homs_matches_brute_force():
    t = load_theory("transitivity")
    models = list(enumerate_models(t, 3))[::3]
    for m in models:
        for n in models:
            assert set(find_homs(m, n)) == _brute_homs(m, n)


def _brute_eval(f, m):
    from itertools import product
    return {a for a in product(*(m.elements(s) for s in f.sorts)) if holds(f, m, a)}


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 5))
def test_evaluate_agrees_with_holds(seed, size):
    rng = random.Random(seed)
    t = load_theory("fundep")
    f = random_formula(rng, t.signature, random_context(rng, t.signature, 2), size)
    for m in list(enumerate_models(t, 2))[:20]:
        assert evaluate(f, m) == _brute_eval(f, m)


@st.composite
def kernel_problems(draw):
    n = draw(st.integers(0, 5))
    k = draw(st.integers(1, 4))
    domains = [tuple(draw(st.lists(st.integers(0, k), max_size=k + 1, unique=True))) for _ in range(n)]
    table = set(draw(st.lists(st.tuples(st.integers(0, k), st.integers(0, k)), max_size=12)))
    checks = [[] for _ in range(n)]
    for _ in range(draw(st.integers(0, 6)) if n else 0):
        a, b = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        checks[max(a, b)].append((0, (a, b)))
    n_out = draw(st.integers(0, n))
    limit = draw(st.integers(0, 3))
    return domains, checks, [table], n_out, limit


@settings(max_examples=300, deadline=None)
@given(kernel_problems())
def test_kernels_agree(problem):
    assert kernel.search(*problem) == python_search(*problem)
