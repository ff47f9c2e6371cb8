import json
import random

import pytest

from rwb.generate import TERMINATING, load_theory, random_diagram
from rwb.modelcat import check_colimit_preservation
from rwb.query import satisfies_theory
from rwb.suites import SUITES, Config, SuiteReport, run_suite, run_suites
from rwb.generate import formulas

INVARIANT_SUITES = ["syntax", "relationalize", "enumeration", "products", "functoriality", "basis", "isolation"]


@pytest.mark.parametrize("suite", INVARIANT_SUITES)
def test_invariant_suite_passes(suite):
    r = run_suite(suite, Config())
    assert r.passed, r.to_dict()
    assert r.instances > 0


def test_report_failure_semantics():
    r = SuiteReport("x")
    r.check("p", True)
    assert r.passed
    r.check("p", False, {"why": 1})
    assert not r.passed and r.failures == {"p": 1} and r.witnesses[0]["witness"] == {"why": 1}
    assert "seconds" not in r.to_dict()


def test_reports_are_reproducible():
    a = run_suite("colimit", Config(seed=7, diagrams=30))
    b = run_suite("colimit", Config(seed=7, diagrams=30))
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)


def test_run_suites_keeps_order():
    ids = ["products", "stone", "syntax"]
    assert [r.suite for r in run_suites(ids, Config(), workers=2)] == ids


@pytest.mark.parametrize("name", ["transitivity", "preorder", "typed_edge", "fundep", "merging"])
def test_random_diagrams_are_valid(name):
    t = load_theory(name)
    rng = random.Random(name)
    for _ in range(10):
        d = random_diagram(rng, t, 4, 4)
        assert d is not None
        assert all(satisfies_theory(m, t) for m in d.models.values())
        for f in formulas(name):
            assert check_colimit_preservation(f, d).bijection


def test_all_suites_registered():
    for sid in ["stone", "universal", "genericity", "colimit", "continuity", "action-image", "sections",
                "convergence", "support", "factorization"]:
        assert sid in SUITES
