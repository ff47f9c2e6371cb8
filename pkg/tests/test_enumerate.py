import pytest

from rwb import parse_theory
from rwb.enumerate import enumerate_labeled, enumerate_models
from rwb.generate import load_theory
from rwb.modelcat import isomorphism
from rwb.query import satisfies_theory


def _iso_classes(models):
    reps = []
    for m in models:
        if not any(isomorphism(m, r) for r in reps):
            reps.append(m)
    return reps


def test_empty_theory_bound_one():
    assert len(list(enumerate_models(parse_theory("sort A;"), 1))) == 2


def test_unary_predicate_bound_one():
    assert len(list(enumerate_models(parse_theory("sort A; rel P(A);"), 1))) == 3


def test_transitivity_matches_oracle(trans):
    models = list(enumerate_models(trans, 2))
    labeled = list(enumerate_labeled(trans, {"A": ["a", "b"]}))
    assert len(models) == len(_iso_classes(labeled)) == 11


@pytest.mark.parametrize("name,bound", [("preorder", 3), ("merging", 3), ("idempotent", 3),
                                        ("typed_edge", 2), ("fundep", 2)])
def test_corpus_counts_match_oracle(name, bound):
    t = load_theory(name)
    models = list(enumerate_models(t, bound))
    assert all(satisfies_theory(m, t) for m in models)
    pool = {s: [f"{s.lower()}{i}" for i in range(bound)] for s in t.signature.sorts}
    labeled = list(enumerate_labeled(t, pool))
    assert len(models) == len(_iso_classes(labeled))


def test_models_pairwise_non_isomorphic():
    models = list(enumerate_models(load_theory("transitivity"), 3))
    assert len(models) == 50
    for i, m in enumerate(models):
        for n in models[i + 1:]:
            assert isomorphism(m, n) is None
