"""Property suites over finite instances.

Every suite is a function ``Config -> SuiteReport``. Instance generation is
seeded from ``Config.seed`` and the suite id, so reports are reproducible.
Statements quantified over all models are checked against enumerated
corpora only; every report says which bound was used.
"""
from __future__ import annotations

import random
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Optional

from .chase import (Disproved, Proved, Unknown, canonical_isolating_formula, chase, check_isolation,
                    entails, relationalize_formula, graph_names)
from .enumerate import enumerate_labeled, enumerate_models
from .errors import NotFunctional, NotInjective
from .generate import (FORMULAS, TERMINATING, formulas, load_theory, random_context, random_diagram,
                       random_formula)
from .modelcat import (check_colimit_preservation, definable_action, directed_colimit, factor_hom,
                       isomorphism, product)
from .parser import parse_formula, parse_theory
from .printer import format_theory
from .query import evaluate, exists_hom, find_homs, holds, satisfies, satisfies_theory, tuple_seed
from .stone import all_downsets, all_ideals, all_lattices, check_equivalence
from .structure import Homomorphism
from .syntax import (Eq, FormulaInContext, Sequent, Theory, Var, conj, is_reduced, reduce_presentation,
                     substitute)
from .topology import (FunClause, HomOpenBox, PresentedOpen, RelClause, SheafOpen, SortClause,
                       SyntacticMorphism, TRIVIAL, check_action_image, hom_in_box, hom_net_converges,
                       intersect, inverse_image_open, model_in_open, net_converges, point_in_sheaf_open,
                       section_violations, subbasic_contains, subbasic_to_formula, tail_index,
                       wellbehaved_section)

RELATIONAL = ("transitivity", "preorder", "typed_edge", "fundep", "merging")
ACCEPTANCE = ("stone", "universal", "genericity", "colimit", "continuity", "action-image",
              "sections", "convergence", "support", "factorization")


@dataclass
class Config:
    seed: int = 0
    max_size: int = 5          # semilattice size bound
    stages: int = 5
    model_size: int = 5        # elements per sort in diagram stages
    corpus_bound: int = 4      # corpus for universality and soundness
    hom_bound: int = 3         # corpus for suites quantifying over homomorphisms
    diagrams: int = 200
    samples: int = 100
    instances: int = 50
    budget: Optional[int] = None

    def rng(self, *parts) -> random.Random:
        return random.Random("/".join(map(str, (self.seed,) + parts)))


@dataclass
class SuiteReport:
    suite: str
    passed: bool = True
    instances: int = 0
    checks: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    unknown: int = 0
    budget_exhausted: int = 0
    conditional: int = 0
    notes: list = field(default_factory=list)
    seconds: float = field(default=0.0, compare=False)

    def check(self, prop: str, ok: bool, witness=None, limit: int = 10):
        self.checks[prop] = self.checks.get(prop, 0) + 1
        if not ok:
            self.failures[prop] = self.failures.get(prop, 0) + 1
            self.passed = False
            if witness is not None and len(self.witnesses) < limit:
                self.witnesses.append({"property": prop, "witness": witness})

    def to_dict(self, timing: bool = False) -> dict:
        out = {"suite": self.suite, "passed": self.passed, "instances": self.instances,
               "checks": dict(sorted(self.checks.items())), "failures": dict(sorted(self.failures.items())),
               "witnesses": self.witnesses, "unknown": self.unknown,
               "budget_exhausted": self.budget_exhausted, "conditional": self.conditional,
               "notes": self.notes}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


@lru_cache(maxsize=None)
def corpus(name: str, bound: int) -> tuple:
    return tuple(enumerate_models(load_theory(name), bound))


def hom_corpus(name: str, cfg: "Config") -> tuple:
    """Corpus for suites quantifying over pairs of models: one bound lower for multi-sorted theories."""
    t = load_theory(name)
    return corpus(name, cfg.hom_bound if len(t.signature.sorts) == 1 else cfg.hom_bound - 1)


def _corpus_note(bound):
    return f"quantification over models is relative to the corpus of all models with at most {bound} elements per sort"


# ---------------------------------------------------------------------------
# Acceptance suites


def suite_stone(cfg: Config) -> SuiteReport:
    rep = SuiteReport("stone")
    gaps = 0
    for s in all_lattices(cfg.max_size):
        rep.instances += 1
        r = check_equivalence(s)
        w = {"order": s.to_matrix()}
        rep.check("dj-equals-continuous", r.equal, {**w, "only_dj": r.only_dj, "only_continuous": r.only_continuous})
        rep.check("principal-filters", r.principal_ok, w)
        rep.check("opens-are-downsets", r.opens == r.downsets, w)
        chain = all(s.le(a, b) or s.le(b, a) for a in s.elements for b in s.elements)
        if chain:
            rep.check("ideals-match-opens-on-chains", r.ideals == r.opens, w)
        else:
            gaps += r.ideals != r.opens
    rep.notes.append(f"{rep.instances} meet-semilattices with top up to {cfg.max_size} elements")
    rep.notes.append(f"ideals (with the empty one) number n+1 while opens match down-sets; "
                     f"the counts differ on {gaps} non-chain instances")
    return rep


def suite_universal(cfg: Config) -> SuiteReport:
    rep = SuiteReport("universal", notes=[_corpus_note(cfg.corpus_bound)])
    for name in TERMINATING:
        t = load_theory(name)
        models = corpus(name, cfg.corpus_bound)
        for f in formulas(name):
            rep.instances += 1
            res = chase(f, t, cfg.budget)
            if not res.terminated:
                rep.budget_exhausted += 1
                rep.check("chase-terminates", False, {"theory": name, "formula": str(f)})
                continue
            rep.check("model-satisfies-theory", satisfies_theory(res.model, t), {"theory": name, "formula": str(f)})
            rep.check("generic-in-extension", holds(f, res.model, res.generic), {"theory": name, "formula": str(f)})
            for n in models:
                for b in sorted(evaluate(f, n)):
                    seed = tuple_seed(f.sorts, res.generic, b)
                    ok = seed is not None and exists_hom(res.model, n, seed)
                    rep.check("hom-into-corpus", ok, {"theory": name, "formula": str(f), "target": n.to_dict(), "point": list(b)})
    return rep


def suite_genericity(cfg: Config) -> SuiteReport:
    rep = SuiteReport("genericity", notes=[_corpus_note(cfg.corpus_bound)])
    bases = [(name, f) for name in TERMINATING for f in formulas(name)]
    per = -(-cfg.samples // len(bases))
    for name, f in bases:
        t = load_theory(name)
        models = corpus(name, cfg.corpus_bound)
        res = chase(f, t, cfg.budget)
        rng = cfg.rng("genericity", name, str(f))
        for _ in range(per):
            psi = random_formula(rng, t.signature, f.context)
            rep.instances += 1
            s = Sequent(f.context, f.body, psi.body)
            v = entails(t, s, cfg.budget)
            w = {"theory": name, "sequent": str(s)}
            if isinstance(v, Unknown):
                rep.unknown += 1
                rep.check("verdict-decided", False, w)
                continue
            if res.terminated:
                gen = holds(psi, res.model, res.generic)
                rep.check("generic-agrees-with-entails", gen == isinstance(v, Proved), w)
            if isinstance(v, Disproved):
                cm = v.countermodel
                ok = satisfies_theory(cm, t) and holds(f, cm, v.witness) and not holds(psi, cm, v.witness)
                rep.check("countermodel-refutes", ok, w)
            else:
                bad = [n for n in models if not satisfies(n, s)]
                rep.check("proved-is-sound", not bad, {**w, "model": bad[0].to_dict() if bad else None})
    return rep


def _diagrams(cfg: Config):
    """The seeded diagram family shared by the colimit and convergence suites."""
    per = -(-cfg.diagrams // len(RELATIONAL))
    for name in RELATIONAL:
        t = load_theory(name)
        for i in range(per):
            d = random_diagram(cfg.rng("diagram", name, i), t, cfg.stages, cfg.model_size)
            if d is not None:
                yield name, i, t, d


def _diagram_formulas(cfg, name, i, t):
    fs = formulas(name)
    rng = cfg.rng("diagram-formula", name, i)
    return fs + [random_formula(rng, t.signature, random_context(rng, t.signature, rng.randint(1, 2)))]


def suite_colimit(cfg: Config) -> SuiteReport:
    rep = SuiteReport("colimit")
    for name, i, t, d in _diagrams(cfg):
        rep.instances += 1
        colim = directed_colimit(d)
        c, cocone = colim
        w = {"theory": name, "diagram": i}
        rep.check("colimit-satisfies-theory", satisfies_theory(c, t), w)
        for (a, b), h in d.arrows.items():
            rep.check("cocone-commutes", h.compose(cocone[b]) == cocone[a], w)
        for st in d.index:
            m = d.models[st]
            fixed = all(cocone[st](s, x) == x for s in m.signature.sorts for x in m.carriers[s] if x in c.carriers[s])
            rep.check("representatives-fixed", fixed, w)
        for f in _diagram_formulas(cfg, name, i, t):
            r = check_colimit_preservation(f, d, colim)
            rep.check("preservation-bijection", r.bijection, {**w, "formula": str(f), "report": r.to_dict()})
        # competing cocones: homs out of the top stage into a few corpus models
        top = d.index[-1]
        for n in corpus(name, 2)[:4]:
            for g in find_homs(d.models[top], n, limit=3):
                legs = {st: d.arrows[(st, top)].compose(g) for st in d.index}
                seed = {}
                for st, leg in legs.items():
                    for s, mp in cocone[st].maps.items():
                        for x, y in mp.items():
                            seed[(s, y)] = leg(s, x)
                rep.check("unique-mediating-hom", len(list(find_homs(c, n, seed))) == 1, w)
    return rep


def _morphisms(cfg: Config, name: str):
    """Functional syntactic morphisms for a corpus theory (plus one non-functional candidate)."""
    t = load_theory(name)
    sig = t.signature
    rng = cfg.rng("morphism", name)
    out = []
    fixed = {
        "fundep": ("[x:A] exists y:B. R(x, y)", "[y:B] true", "[x:A, y:B] R(x, y)"),
        "merging": ("[x:A] exists y:A. E(x, y)", "[y:A] true", "[x:A, y:A] E(x, y)"),
        "idempotent": ("[x:A] true", "[y:A] f(y) = y", "[x:A, y:A] f(x) = y"),
        "preorder": ("[x:A, u:A] R(x, u)", "[y:A, v:A] R(y, v) & R(y, y)", "[x:A, u:A, y:A, v:A] R(x, u) & y = x & v = u"),
    }
    if name in fixed:
        out.append(tuple(parse_formula(s, sig) for s in fixed[name]))
    while len(out) < 6:
        ctx = random_context(rng, sig, rng.randint(1, 3))
        src = random_formula(rng, sig, ctx, rng.randint(1, 3))
        k = rng.randint(1, 2)
        picks = [rng.randrange(len(ctx)) for _ in range(k)]
        tctx = tuple((f"y{j}", ctx[p][1]) for j, p in enumerate(picks))
        eqs = [Eq(Var(f"y{j}"), Var(ctx[p][0])) for j, p in enumerate(picks)]
        graph = FormulaInContext(ctx + tctx, conj(src.body, *eqs))
        out.append((src, FormulaInContext(tctx), graph))
    return out


def _element_pool(models) -> dict:
    pool = defaultdict(set)
    for m in models:
        for s, c in m.carriers.items():
            pool[s] |= c
    return {s: sorted(v) for s, v in pool.items()}


def suite_continuity(cfg: Config) -> SuiteReport:
    rep = SuiteReport("continuity", notes=[_corpus_note(cfg.hom_bound)])
    names = [n for n in TERMINATING]
    per_theory = -(-cfg.instances // len(names))
    for name in names:
        t = load_theory(name)
        sig = t.signature
        models = hom_corpus(name, cfg)
        pool = _element_pool(models)
        rng = cfg.rng("continuity", name)
        morphs = _morphisms(cfg, name)
        for j in range(per_theory):
            src, tgt, graph = morphs[j % len(morphs)]
            sigma = SyntacticMorphism(src, tgt, graph)
            nz = rng.randint(0, 2)
            zctx = tuple((f"z{i}", rng.choice(sig.sorts)) for i in range(nz))
            side = random_formula(rng, sig, tgt.context + zctx, rng.randint(1, 3))
            c = tuple(rng.choice(pool[s]) if pool.get(s) else "none" for _, s in zctx)
            o = SheafOpen(tgt, side, c)
            w = {"theory": name, "sigma": str(graph), "open": o.to_dict()}
            try:
                pre = inverse_image_open(sigma, o, t, cfg.budget)
            except NotFunctional as e:
                rep.check("morphism-functional", False, {**w, "error": str(e)})
                continue
            rep.instances += 1
            if pre.notes:
                rep.unknown += 1
                rep.notes.append(f"functionality not decided for {graph}: {list(pre.notes)}")
            bad = None
            for m in models:
                for a in sorted(evaluate(src, m)):
                    lhs = point_in_sheaf_open(m, a, pre)
                    rhs = point_in_sheaf_open(m, sigma.apply(m, a), o)
                    if lhs != rhs:
                        bad = {"model": m.to_dict(), "point": list(a)}
                        break
                if bad:
                    break
            rep.check("preimage-exact", bad is None, {**w, **(bad or {})})
    # a relation that is not single-valued is rejected
    t = load_theory("transitivity")
    sig = t.signature
    sigma = SyntacticMorphism(parse_formula("[x:A] true", sig), parse_formula("[y:A] true", sig),
                              parse_formula("[x:A, y:A] R(x, y)", sig))
    try:
        inverse_image_open(sigma, SheafOpen(sigma.target, sigma.target, ()), t)
        rep.check("non-functional-rejected", False, {"sigma": str(sigma.graph)})
    except NotFunctional:
        rep.check("non-functional-rejected", True)
    return rep


def _action_instances(cfg: Config):
    """Designed instances: boxes and sheaf opens with names from small corpus models."""
    plan = [(n, 4) for n in TERMINATING] + [("successor", 2)]
    for name, count in plan:
        t = load_theory(name)
        sig = t.signature
        pool = _element_pool(corpus(name, 2))
        rng = cfg.rng("action", name)
        base = [f for f in formulas(name) if len(f.context) <= 2][0]
        for j in range(count):
            def presented(nvars, prefix):
                ctx = random_context(rng, sig, nvars, prefix)
                f = random_formula(rng, sig, ctx, rng.randint(1, 2))
                return PresentedOpen(f, tuple(rng.choice(pool[s]) for _, s in ctx))
            dom = presented(rng.randint(0, 2), "u")
            cod = presented(rng.randint(0, 1), "v")
            pres = []
            for _ in range(rng.randint(0, 2)):
                s = rng.choice(sig.sorts)
                pres.append((rng.choice(pool[s]), rng.choice(pool[s]), s))
            k = rng.randint(0, 1)
            extra = tuple((f"w{i}", rng.choice(sig.sorts)) for i in range(k))
            side = random_formula(rng, sig, base.context + extra, rng.randint(1, 2))
            so = SheafOpen(base, side, tuple(rng.choice(pool[s]) for _, s in extra))
            yield name, j, t, HomOpenBox(dom, tuple(pres), cod), so


def suite_action_image(cfg: Config) -> SuiteReport:
    rep = SuiteReport("action-image", notes=[_corpus_note(cfg.hom_bound)])
    terminated = nonempty = 0
    for name, j, t, box, so in _action_instances(cfg):
        rep.instances += 1
        r = check_action_image(box, so, t, hom_corpus(name, cfg), cfg.budget)
        w = {"theory": name, "instance": j, "box": box.to_dict(), "open": so.to_dict()}
        rep.check("forward-inclusion", r.forward_ok, {**w, "details": r.witnesses})
        if r.converse == "empty":
            rep.notes.append(f"{name}#{j}: the box forces two listed elements together, so U is empty")
            continue
        nonempty += 1
        if r.converse == "conditional":
            rep.conditional += 1
            rep.budget_exhausted += 1
            continue
        terminated += 1
        rep.check("converse-inclusion", r.converse == "verified", {**w, "details": r.witnesses})
    rep.check("converse-decided-mostly", nonempty > 0 and terminated >= 0.8 * nonempty,
              {"terminated": terminated, "nonempty": nonempty})
    rep.notes.append(f"converse verified on {terminated} of {nonempty} instances with non-empty U; "
                     f"{rep.conditional} conditional")
    return rep


def _points(name, cfg):
    t = load_theory(name)
    for f in formulas(name):
        for m in hom_corpus(name, cfg):
            for a in sorted(evaluate(f, m)):
                yield t, f, m, a


def suite_sections(cfg: Config) -> SuiteReport:
    rep = SuiteReport("sections", notes=[_corpus_note(cfg.hom_bound)])
    for name in TERMINATING:
        models = hom_corpus(name, cfg)
        for t, f, m, a in _points(name, cfg):
            rep.instances += 1
            sec = wellbehaved_section(f, (m, a))
            rep.check("domain-reduced", is_reduced(sec.domain.formula, sec.domain.tuple))
            rep.check("identity-fixes-value", definable_action(f, Homomorphism.identity(m), a) == a)
            for n in models:
                seed = tuple_seed(f.sorts, a, a)
                if any(x not in n.carriers[s] for (s, x) in seed):
                    continue
                bad = section_violations(sec, find_homs(m, n, seed))
                rep.check("section-contract", not bad,
                          {"theory": name, "formula": str(f), "point": list(a), "source": m.to_dict(),
                           "target": n.to_dict()})
    return rep


def suite_convergence(cfg: Config) -> SuiteReport:
    rep = SuiteReport("convergence")
    for name, i, t, d in _diagrams(cfg):
        rep.instances += 1
        c, cocone = directed_colimit(d)
        opens = []
        for f in _diagram_formulas(cfg, name, i, t):
            for st in d.index:
                opens += [PresentedOpen(f, a) for a in sorted(evaluate(f, d.models[st]))]
            opens += [PresentedOpen(f, a) for a in sorted(evaluate(f, c))]
        w = {"theory": name, "diagram": i}
        rep.check("net-converges", net_converges(d, c, opens), w)
        for o in opens:
            if model_in_open(c, o):
                rep.check("tail-index", tail_index(d, lambda e: model_in_open(d.models[e], o)) is not None,
                          {**w, "open": o.to_dict()})
        for st in d.index:
            m = d.models[st]
            f = cocone[st]
            boxes = [HomOpenBox(TRIVIAL, ((x, f(s, x), s),), TRIVIAL)
                     for s in m.signature.sorts for x in sorted(m.carriers[s])]
            boxes.append(HomOpenBox(TRIVIAL, tuple((x, f(s, x), s) for s in m.signature.sorts
                                                   for x in sorted(m.carriers[s])), TRIVIAL))
            boxes += [HomOpenBox(PresentedOpen(o.formula, o.tuple), (), o) for o in opens[:20]
                      if model_in_open(m, o)]
            rep.check("hom-net-converges", hom_net_converges(d, cocone, st, boxes), {**w, "stage": st})
    return rep


def _hom_pairs(name, cfg):
    models = hom_corpus(name, cfg)
    for m in models:
        for n in models:
            yield m, n


def suite_support(cfg: Config) -> SuiteReport:
    rep = SuiteReport("support", notes=[_corpus_note(cfg.hom_bound)])
    for name in TERMINATING:
        fs = formulas(name)
        for m, n in _hom_pairs(name, cfg):
            homs = list(find_homs(m, n))
            if len(homs) < 2:
                continue
            rep.instances += 1
            for f in fs:
                for a in sorted(evaluate(f, m)):
                    seen = {}
                    for h in homs:
                        key = h.apply(f.sorts, a)
                        val = definable_action(f, h, a)
                        rep.check("actions-agree", seen.setdefault(key, val) == val,
                                  {"theory": name, "formula": str(f), "point": list(a)})
    return rep


def suite_factorization(cfg: Config) -> SuiteReport:
    rep = SuiteReport("factorization", notes=[_corpus_note(cfg.hom_bound)])
    for name in TERMINATING:
        for m, n in _hom_pairs(name, cfg):
            if any(len(m.carriers[s]) > len(n.carriers[s]) for s in m.signature.sorts):
                continue
            for h in find_homs(m, n):
                if not h.is_injective():
                    continue
                rep.instances += 1
                iso, incl = factor_hom(h)
                w = {"theory": name, "hom": h.to_dict()}
                rep.check("recomposes", iso.compose(incl) == h, w)
                rep.check("iso-bijective", iso.is_injective() and all(
                    set(iso.maps[s].values()) == iso.target.carriers[s] for s in m.signature.sorts), w)
                inv = {s: {v: k for k, v in mp.items()} for s, mp in iso.maps.items()}
                rep.check("iso-inverse-is-hom", Homomorphism(iso.target, iso.source, inv, check=False).is_valid(), w)
                rep.check("inclusion", all(a == b for mp in incl.maps.values() for a, b in mp.items()), w)
                rep.check("image-satisfies-theory", satisfies_theory(iso.target, load_theory(name)), w)
    # non-injective homs are refused
    m = next(m for m in corpus("transitivity", 2) if len(m.carriers["A"]) == 2)
    for n in corpus("transitivity", 1):
        for h in find_homs(m, n):
            try:
                factor_hom(h)
                rep.check("non-injective-rejected", False, {"hom": h.to_dict()})
            except NotInjective:
                rep.check("non-injective-rejected", True)
    return rep


# ---------------------------------------------------------------------------
# Module invariants


def suite_syntax(cfg: Config) -> SuiteReport:
    rep = SuiteReport("syntax", notes=[_corpus_note(3)])
    rng = cfg.rng("syntax")
    for name in TERMINATING:
        t = load_theory(name)
        sig = t.signature
        for k in range(5):
            axioms = []
            for _ in range(rng.randint(1, 3)):
                ctx = random_context(rng, sig, rng.randint(0, 3))
                axioms.append(Sequent(ctx, random_formula(rng, sig, ctx).body, random_formula(rng, sig, ctx).body,
                                      rng.choice([None, f"a{k}"])))
            gt = Theory(sig, tuple(axioms))
            rep.instances += 1
            rep.check("round-trip", parse_theory(format_theory(gt)) == gt, {"theory": format_theory(gt)})
        models = corpus(name, 3 if len(sig.sorts) == 1 else 2)
        for _ in range(6):
            ctx = random_context(rng, sig, rng.randint(1, 3))
            f = random_formula(rng, sig, ctx)
            # a sort-respecting map onto fresh names, possibly collapsing variables
            targets = {}
            mapping = {}
            for n, s in ctx:
                pool = [v for v, vs in targets.items() if vs == s]
                if pool and rng.random() < 0.4:
                    mapping[n] = rng.choice(pool)
                else:
                    v = rng.choice(["u", "v", "w"]) + str(len(targets))
                    targets[v] = s
                    mapping[n] = v
            g = substitute(f, mapping)
            pos = [g.names.index(mapping[n]) for n in f.names]
            for m in models:
                want = {tuple(a[i] for i in pos) for a in evaluate(g, m)}
                got = {a for a in evaluate(f, m) if all(a[i] == a[j] for i in range(len(a)) for j in range(len(a))
                                                       if mapping[f.names[i]] == mapping[f.names[j]])}
                rep.check("substitution-extension", want == got, {"formula": str(f), "mapping": mapping})
            pool = _element_pool(models)
            tup = tuple(rng.choice(pool[s][:2]) for s in f.sorts)
            rf, rt = reduce_presentation(f, tup)
            rep.check("reduced", is_reduced(rf, rt))
            rep.check("reduce-idempotent", reduce_presentation(rf, rt) == (rf, rt))
            for m in models:
                rep.check("reduce-same-open", model_in_open(m, PresentedOpen(f, tup)) == model_in_open(m, PresentedOpen(rf, rt)),
                          {"formula": str(f), "tuple": list(tup)})
    return rep


def suite_relationalize(cfg: Config) -> SuiteReport:
    rep = SuiteReport("relationalize")
    t = load_theory("idempotent")
    sig = t.signature
    gn = graph_names(sig)
    rng = cfg.rng("relationalize")
    models = list(enumerate_models(Theory(sig, ()), 3))
    for _ in range(20):
        ctx = random_context(rng, sig, rng.randint(1, 2))
        f = random_formula(rng, sig, ctx)
        rf = relationalize_formula(f, sig)
        rep.instances += 1
        for m in models:
            rep.check("extension-preserved", evaluate(f, m) == evaluate(rf, m.relationalized(gn)), {"formula": str(f)})
    return rep


def suite_enumeration(cfg: Config) -> SuiteReport:
    rep = SuiteReport("enumeration")
    cases = [("sort A; rel R(A, A);", {"A": ["a", "b"]}),
             ("sort A; rel P(A); rel R(A, A);", {"A": ["a", "b"]}),
             ("sort A; rel P(A); fun f(A): A;", {"A": ["a", "b", "c"]}),
             ("sort A; sort B; rel E(A, B);", {"A": ["a", "b"], "B": ["c", "d"]})]
    cases += [(format_theory(load_theory(n)), {"A": ["a", "b"]}) for n in ("transitivity", "merging")]
    for text, pool in cases:
        t = parse_theory(text)
        rep.instances += 1
        iso_reps = list(enumerate_models(t, {s: len(pool[s]) for s in t.signature.sorts}))
        for a, b in combinations(iso_reps, 2):
            rep.check("pairwise-non-isomorphic", isomorphism(a, b) is None, {"theory": text})
        classes = []
        for m in enumerate_labeled(t, pool):
            if not any(isomorphism(m, c) is not None for c in classes):
                classes.append(m)
        rep.check("count-matches-labeled-oracle", len(classes) == len(iso_reps),
                  {"theory": text, "oracle": len(classes), "enumerated": len(iso_reps)})
        rep.check("all-models", all(satisfies_theory(m, t) for m in iso_reps), {"theory": text})
    return rep


def suite_products(cfg: Config) -> SuiteReport:
    rep = SuiteReport("products")
    for name in TERMINATING:
        t = load_theory(name)
        models = corpus(name, 2)
        rng = cfg.rng("products", name)
        for _ in range(10):
            k = rng.randint(0, 2)
            ms = [rng.choice(models) for _ in range(k)]
            p, projs = product(ms, t.signature)
            rep.instances += 1
            rep.check("product-satisfies-theory", satisfies_theory(p, t), {"theory": name})
            rep.check("projections-are-homs", all(h.is_valid() for h in projs), {"theory": name})
    return rep


def suite_functoriality(cfg: Config) -> SuiteReport:
    rep = SuiteReport("functoriality", notes=[_corpus_note(2)])
    for name in TERMINATING:
        models = corpus(name, 2)
        rng = cfg.rng("functoriality", name)
        for f in formulas(name):
            for _ in range(15):
                m, n, k = rng.choice(models), rng.choice(models), rng.choice(models)
                h1 = next(find_homs(m, n, limit=1), None)
                h2 = next(find_homs(n, k, limit=1), None)
                if h1 is None or h2 is None:
                    continue
                rep.instances += 1
                for a in sorted(evaluate(f, m)):
                    b = definable_action(f, h1, a)
                    rep.check("preservation", holds(f, n, b), {"formula": str(f)})
                    rep.check("identity", definable_action(f, Homomorphism.identity(m), a) == a)
                    rep.check("composition", definable_action(f, h1.compose(h2), a) == definable_action(f, h2, b))
    return rep


def suite_basis(cfg: Config) -> SuiteReport:
    rep = SuiteReport("basis", notes=[_corpus_note(2)])
    for name in ("transitivity", "typed_edge", "idempotent", "fundep"):
        t = load_theory(name)
        sig = t.signature
        models = corpus(name, 2)
        pool = _element_pool(models)
        rng = cfg.rng("basis", name)
        clauses = [SortClause(s, x) for s in sig.sorts for x in pool.get(s, [])]
        for r, sorts in sig.rel_sorts.items():
            for _ in range(4):
                if all(pool.get(s) for s in sorts):
                    clauses.append(RelClause(r, tuple(rng.choice(pool[s]) for s in sorts)))
        for fn, (args, res) in sig.fun_sorts.items():
            for _ in range(4):
                clauses.append(FunClause(fn, tuple(rng.choice(pool[s]) for s in args), rng.choice(pool[res])))
        for cl in clauses:
            o = subbasic_to_formula(cl, sig)
            rep.instances += 1
            for m in models:
                rep.check("subbasic-matches-formula", subbasic_contains(m, cl) == model_in_open(m, o), {"clause": repr(cl)})
        for _ in range(15):
            parts = rng.sample(clauses, min(len(clauses), rng.randint(1, 3)))
            o = intersect(*(subbasic_to_formula(c, sig) for c in parts))
            rep.check("intersection-reduced", is_reduced(o.formula, o.tuple))
            for m in models:
                rep.check("intersection-is-conjunction", model_in_open(m, o) == all(subbasic_contains(m, c) for c in parts),
                          {"clauses": [repr(c) for c in parts]})
        # composition pullback on pure preservation boxes
        homs = [(h, m, n) for m in models for n in models for h in find_homs(m, n, limit=4)]
        for h1, m, n in homs[:60]:
            for h2, n2, k in homs[:60]:
                if n2 != n:
                    continue
                for s in sig.sorts:
                    for b in sorted(m.carriers[s]):
                        mid = h1(s, b)
                        c = h2(s, mid)
                        ok = hom_in_box(h1, HomOpenBox(TRIVIAL, ((b, mid, s),), TRIVIAL)) and \
                            hom_in_box(h2, HomOpenBox(TRIVIAL, ((mid, c, s),), TRIVIAL))
                        rep.check("composition-box", (not ok) or hom_in_box(h1.compose(h2), HomOpenBox(TRIVIAL, ((b, c, s),), TRIVIAL)))
    return rep


def suite_isolation(cfg: Config) -> SuiteReport:
    rep = SuiteReport("isolation", notes=[_corpus_note(3)])
    for name in TERMINATING:
        t = load_theory(name)
        models = corpus(name, 3)
        for f in formulas(name):
            res = chase(f, t, cfg.budget)
            if not res.terminated:
                rep.budget_exhausted += 1
                continue
            m = res.model
            tuples = [(res.generic, f.sorts)] + [((x,), (s,)) for s in m.signature.sorts for x in m.elements(s)]
            for a, sorts in tuples:
                rep.instances += 1
                g = canonical_isolating_formula(m, a, sorts)
                rep.check("isolated-by-diagram", check_isolation(g, m, a, models),
                          {"theory": name, "formula": str(f), "tuple": list(a)})
    return rep


SUITES: dict = {
    "stone": suite_stone,
    "universal": suite_universal,
    "genericity": suite_genericity,
    "colimit": suite_colimit,
    "continuity": suite_continuity,
    "action-image": suite_action_image,
    "sections": suite_sections,
    "convergence": suite_convergence,
    "support": suite_support,
    "factorization": suite_factorization,
    "syntax": suite_syntax,
    "relationalize": suite_relationalize,
    "enumeration": suite_enumeration,
    "products": suite_products,
    "functoriality": suite_functoriality,
    "basis": suite_basis,
    "isolation": suite_isolation,
}


def run_suite(suite_id: str, cfg: Config) -> SuiteReport:
    start = time.perf_counter()
    rep = SUITES[suite_id](cfg)
    rep.seconds = time.perf_counter() - start
    return rep


def _run_pair(args):
    return run_suite(*args)


def run_suites(ids, cfg: Config, workers: int = 1) -> list:
    """Run suites, optionally in a process pool; results come back in the order of ``ids``."""
    ids = list(ids)
    if workers <= 1 or len(ids) <= 1:
        return [run_suite(i, cfg) for i in ids]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_pair, [(i, cfg) for i in ids]))
