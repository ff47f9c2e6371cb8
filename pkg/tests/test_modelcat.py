import pytest

from rwb import DiagramError, NotInjective, PreconditionError, parse_formula
from rwb.generate import load_theory
from rwb.modelcat import (DirectedDiagram, check_colimit_preservation, definable_action, directed_colimit,
                          factor_hom, isomorphism, product)
from rwb.query import find_homs
from rwb.structure import Homomorphism, Structure

from conftest import graph


def incl(m, n):
    return Homomorphism(m, n, {s: {a: a for a in c} for s, c in m.carriers.items()})


def chain(models):
    idx = tuple(range(len(models)))
    leq = {(i, j) for i in idx for j in idx if i <= j}
    arrows = {(i, j): incl(models[i], models[j]) for i, j in leq}
    return DirectedDiagram(idx, leq, dict(enumerate(models)), arrows)


def test_product_two_by_two(binary):
    sig = binary.signature
    m = graph(sig, "ab", {("a", "b")})
    n = graph(sig, "cd", {("c", "c"), ("c", "d")})
    p, (p1, p2) = product([m, n])
    assert len(p.carriers["A"]) == 4
    assert len(p.relations["R"]) == 2
    assert p1.is_valid() and p2.is_valid()


def test_empty_product_is_terminal(binary):
    p, projs = product([], binary.signature)
    assert projs == [] and len(p.carriers["A"]) == 1 and len(p.relations["R"]) == 1


def test_product_with_terminal_is_iso(binary):
    sig = binary.signature
    m = graph(sig, "abc", {("a", "b"), ("b", "b")})
    term, _ = product([], sig)
    p, _ = product([m, term])
    assert isomorphism(p, m) is not None


def test_chain_colimit_is_last_stage(binary):
    sig = binary.signature
    ms = [graph(sig, "a", set()), graph(sig, "ab", {("a", "b")}), graph(sig, "abc", {("a", "b"), ("b", "c")})]
    colim, cocone = directed_colimit(chain(ms))
    assert colim == ms[2]
    assert cocone[0] == incl(ms[0], ms[2])


def test_single_object_colimit(binary):
    m = graph(binary.signature, "ab", {("a", "b")})
    d = DirectedDiagram((0,), set(), {0: m})
    colim, cocone = directed_colimit(d)
    assert colim == m and cocone[0] == Homomorphism.identity(m)


def test_merging_chain_names_class(binary):
    sig = binary.signature
    m0, m1 = graph(sig, "ab", set()), graph(sig, "a", set())
    g = Homomorphism(m0, m1, {"A": {"a": "a", "b": "a"}})
    d = DirectedDiagram((0, 1), {(0, 1)}, {0: m0, 1: m1}, {(0, 1): g})
    colim, cocone = directed_colimit(d)
    assert colim.carriers["A"] == {"a"}
    assert cocone[0]("A", "b") == "a"


def test_pushout_shape_rejected(binary):
    sig = binary.signature
    m = graph(sig, "a", set())
    models = {0: m, 1: m, 2: m}
    idm = Homomorphism.identity(m)
    with pytest.raises(DiagramError):
        DirectedDiagram((0, 1, 2), {(0, 1), (0, 2)}, models, {(0, 1): idm, (0, 2): idm})


def test_functoriality_enforced(binary):
    sig = binary.signature
    m0, m1 = graph(sig, "ab", set()), graph(sig, "ab", set())
    swap = Homomorphism(m0, m1, {"A": {"a": "b", "b": "a"}})
    with pytest.raises(DiagramError):
        DirectedDiagram((0, 1, 2), {(0, 1), (1, 2), (0, 2)}, {0: m0, 1: m1, 2: m1},
                        {(0, 1): swap, (1, 2): Homomorphism.identity(m1), (0, 2): incl(m0, m1)})


def test_definable_action(binary):
    sig = binary.signature
    f = parse_formula("[x:A] exists y:A. R(x, y)", sig)
    edge, loop = graph(sig, "ab", {("a", "b")}), graph(sig, "c", {("c", "c")})
    h = next(find_homs(edge, loop))
    assert definable_action(f, h, ("a",)) == ("c",)
    assert definable_action(f, Homomorphism.identity(edge), ("a",)) == ("a",)
    k = Homomorphism.identity(loop)
    assert definable_action(f, h.compose(k), ("a",)) == definable_action(f, k, definable_action(f, h, ("a",)))
    with pytest.raises(PreconditionError):
        definable_action(f, h, ("b",))


def test_colimit_preservation_growing_witness(binary):
    sig = binary.signature
    f = parse_formula("[x:A] exists y:A. R(x, y)", sig)
    ms = [graph(sig, "a", set()), graph(sig, "ab", set()), graph(sig, "ab", {("a", "b")})]
    rep = check_colimit_preservation(f, chain(ms))
    assert rep.bijection
    assert [rep.stage_sizes[i] for i in range(3)] == [0, 0, 1]
    const = chain([ms[2], ms[2]])
    assert check_colimit_preservation(f, const).bijection


def test_factor_hom_cases(binary):
    sig = binary.signature
    small = graph(sig, "ab", {("a", "b")})
    big = graph(sig, "abc", {("a", "b"), ("b", "c")})
    h = incl(small, big)
    iso, inc = factor_hom(h)
    assert inc == h or iso.compose(inc) == h
    assert all(a == b for a, b in iso.maps["A"].items())
    ren = graph(sig, "xy", {("x", "y")})
    r = Homomorphism(small, ren, {"A": {"a": "x", "b": "y"}})
    iso, inc = factor_hom(r)
    assert iso.compose(inc) == r and inc == Homomorphism.identity(ren)
    into = Homomorphism(small, big, {"A": {"a": "b", "b": "c"}})
    iso, inc = factor_hom(into)
    assert iso.compose(inc) == into and iso.target.carriers["A"] == {"b", "c"}
    with pytest.raises(NotInjective):
        factor_hom(Homomorphism(small, graph(sig, "c", {("c", "c")}), {"A": {"a": "c", "b": "c"}}))
