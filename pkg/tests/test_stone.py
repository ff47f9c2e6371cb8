import pytest

from rwb import PreconditionError
from rwb.stone import (MeetSemilattice, all_downsets, all_filters, all_ideals, all_lattices,
                       all_meet_semilattices_bruteforce, check_equivalence, continuous_maps,
                       dj_preserving_maps, open_sets, subbasis)


def chain(n):
    return MeetSemilattice.from_matrix([[int(i <= j) for j in range(n)] for i in range(n)])


DIAMOND = MeetSemilattice.from_matrix([[1, 1, 1, 1], [0, 1, 0, 1], [0, 0, 1, 1], [0, 0, 0, 1]])


def test_one_element():
    s = chain(1)
    assert all_filters(s) == [frozenset({0})]
    assert set(all_ideals(s)) == {frozenset(), frozenset({0})}
    assert check_equivalence(s).equal


def test_two_chain():
    s = chain(2)
    assert set(all_filters(s)) == {frozenset({1}), frozenset({0, 1})}
    assert set(all_ideals(s)) == {frozenset(), frozenset({0}), frozenset({0, 1})}
    filters = all_filters(s)
    full = (1 << len(filters)) - 1
    only_top = 1 << filters.index(frozenset({1}))
    assert open_sets(s) == {0, full ^ only_top, full}
    improper = 1 << filters.index(frozenset({0, 1}))
    assert improper in dj_preserving_maps(s)
    assert check_equivalence(s).equal


def test_diamond_filters_match_brute_force():
    from itertools import combinations
    s = DIAMOND
    brute = []
    for r in range(1, 5):
        for c in combinations(s.elements, r):
            f = frozenset(c)
            up = all(b in f for a in f for b in s.up(a))
            meets = all(s.meet(a, b) in f for a in f for b in f)
            if up and meets:
                brute.append(f)
    assert set(all_filters(s)) == set(brute)


def test_constant_and_subbasic_maps():
    for s in all_lattices(4):
        n = len(all_filters(s))
        full = (1 << n) - 1
        dj, cont = dj_preserving_maps(s), continuous_maps(s)
        assert {0, full} <= dj and {0, full} <= cont
        assert set(subbasis(s, all_filters(s)).values()) <= cont


def test_non_monotone_excluded():
    s = chain(2)
    filters = all_filters(s)
    only_small = 1 << filters.index(frozenset({1}))
    assert only_small not in dj_preserving_maps(s)


def test_principal_ideals_present():
    for s in all_lattices(5):
        ideals = set(all_ideals(s))
        assert all(s.down(a) in ideals for a in s.elements)


def test_lattice_count_matches_brute_force():
    assert len(list(all_lattices(4))) == len(all_meet_semilattices_bruteforce(4)) == 5
    assert len(list(all_lattices(5))) == 10


def test_equivalence_up_to_five():
    for s in all_lattices(5):
        r = check_equivalence(s)
        assert r.equal and r.principal_ok and r.opens == r.downsets


def test_ideals_match_opens_on_chains_only():
    for s in all_lattices(5):
        r = check_equivalence(s)
        is_chain = all(s.le(a, b) or s.le(b, a) for a in s.elements for b in s.elements)
        assert (r.ideals == r.opens) == is_chain


@pytest.mark.parametrize("text", ["[[1,0],[0,1]]", "[[1,1],[1,1]]", '{"leq": [[1]], "elements": ["a", "a"]}'])
def test_invalid_semilattices(text):
    with pytest.raises(PreconditionError):
        MeetSemilattice.from_json(text)


def test_json_round_trip():
    s = MeetSemilattice.from_json('{"elements": ["bot", "top"], "leq": [[1, 1], [0, 1]]}')
    assert s.top == "top" and s.to_matrix() == [[1, 1], [0, 1]]
