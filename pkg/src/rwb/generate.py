"""Seeded instance generation: corpus theories, random regular formulas, morphisms, directed diagrams."""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional, Sequence

from .chase import chase_structure
from .errors import NotFunctional
from .modelcat import DirectedDiagram
from .parser import parse_formula, parse_theory
from .structure import Homomorphism, Structure
from .syntax import (App, Eq, Exists, FormulaInContext, Rel, Signature, Theory, Var, conj, dkey)

TERMINATING = ("transitivity", "preorder", "typed_edge", "fundep", "merging", "idempotent")


@lru_cache(maxsize=None)
def load_theory(name: str) -> Theory:
    text = resources.files("rwb.theories").joinpath(f"{name}.rth").read_text()
    return parse_theory(text)


def theory_names() -> list:
    return sorted(p.name[:-4] for p in resources.files("rwb.theories").iterdir() if p.name.endswith(".rth"))


# fixed formulas per corpus theory, used by several suites
FORMULAS = {
    "transitivity": ["[x:A, y:A, z:A] R(x, y) & R(y, z)", "[x:A] exists y:A. R(x, y)",
                     "[x:A, y:A] R(x, y) & R(y, x)", "[x:A, z:A] exists y:A. R(x, y) & R(y, z)"],
    "preorder": ["[x:A] true", "[x:A, y:A] R(x, y)", "[x:A, y:A, z:A] R(x, y) & R(y, z)"],
    "typed_edge": ["[x:A] P(x)", "[x:A, y:B] E(x, y)", "[y:B] exists x:A. P(x) & E(x, y)"],
    "fundep": ["[x:A] P(x)", "[x:A, y:B] R(x, y)", "[x:A, u:A] exists y:B. R(x, y) & R(u, y)"],
    "merging": ["[x:A] P(x)", "[x:A, y:A] E(x, y)", "[x:A, y:A] P(x) & E(y, y)"],
    "idempotent": ["[x:A] true", "[x:A] P(x)", "[x:A, y:A] f(x) = y"],
    "successor": ["[x:A, y:A] R(x, y)", "[x:A] true"],
}


def formulas(name: str) -> list:
    sig = load_theory(name).signature
    return [parse_formula(s, sig) for s in FORMULAS[name]]


# ---------------------------------------------------------------------------
# Random formulas


def random_term(rng: random.Random, sig: Signature, env: dict, sort: str, depth: int = 1):
    """A term of ``sort`` over the variables in ``env``, or None if there is none."""
    choices = [Var(n) for n, s in env.items() if s == sort]
    if depth > 0:
        for f, (args, res) in sig.fun_sorts.items():
            if res == sort and rng.random() < 0.3:
                sub = [random_term(rng, sig, env, a, depth - 1) for a in args]
                if all(t is not None for t in sub):
                    choices.append(App(f, tuple(sub)))
    return rng.choice(choices) if choices else None


def random_atom(rng, sig: Signature, env: dict):
    options = list(sig.rel_sorts) + ["="]
    for _ in range(8):
        pick = rng.choice(options)
        if pick == "=":
            sorts = sorted({s for s in env.values()})
            if not sorts:
                continue
            s = rng.choice(sorts)
            a, b = random_term(rng, sig, env, s), random_term(rng, sig, env, s)
            return Eq(a, b)
        args = [random_term(rng, sig, env, s) for s in sig.rel_sorts[pick]]
        if all(a is not None for a in args):
            return Rel(pick, tuple(args))
    return None


def random_body(rng, sig: Signature, env: dict, size: int, counter: list):
    if size <= 1:
        atom = random_atom(rng, sig, env)
        return atom if atom is not None else conj()
    r = rng.random()
    if r < 0.3 and sig.sorts:
        s = rng.choice(sig.sorts)
        v = f"e{counter[0]}"
        counter[0] += 1
        return Exists(v, s, random_body(rng, sig, {**env, v: s}, size - 1, counter))
    k = rng.randint(1, size - 1)
    return conj(random_body(rng, sig, env, k, counter), random_body(rng, sig, env, size - k, counter))


def random_formula(rng, sig: Signature, context: Sequence, size: Optional[int] = None) -> FormulaInContext:
    size = size if size is not None else rng.randint(1, 4)
    body = random_body(rng, sig, dict(context), size, [0])
    return FormulaInContext(tuple(context), body)


def random_context(rng, sig: Signature, n: int, prefix: str = "x") -> tuple:
    return tuple((f"{prefix}{i}", rng.choice(sig.sorts)) for i in range(n))


# ---------------------------------------------------------------------------
# Directed diagrams


def random_directed_order(rng, k: int, p: float = 0.4):
    """Stages ``0..k-1`` in a linear-extension order with ``k-1`` on top."""
    leq = {(i, i) for i in range(k)} | {(i, k - 1) for i in range(k)}
    for i in range(k):
        for j in range(i + 1, k - 1):
            if rng.random() < p:
                leq.add((i, j))
    changed = True
    while changed:
        changed = False
        for a, b in list(leq):
            for b2, c in list(leq):
                if b == b2 and (a, c) not in leq:
                    leq.add((a, c))
                    changed = True
    return tuple(range(k)), frozenset(leq)


class _Names:
    def __init__(self, prefix="e"):
        self.prefix, self.n = prefix, 0

    def __call__(self, _=None):
        self.n += 1
        return f"{self.prefix}{self.n - 1}"


def _uf_find(parent, x):
    while parent.setdefault(x, x) != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def random_diagram(rng, t: Theory, stages: int = 4, max_size: int = 5, new_elements: int = 2,
                   new_facts: int = 3, merge_p: float = 0.3, budget: int = 200,
                   tries: int = 50) -> Optional[DirectedDiagram]:
    """A directed diagram of models of a relational theory ``t``.

    Each stage glues the stages below it, adds fresh elements, facts and
    occasional merges, then repairs with the chase. Element names increase
    with birth, so the colimit naming rule picks the oldest name.
    """
    sig = t.signature
    if sig.functions:
        raise ValueError("diagram generation expects a relational theory")
    for _ in range(tries):
        d = _try_diagram(rng, t, stages, max_size, new_elements, new_facts, merge_p, budget)
        if d is not None:
            return d
    return None


def _try_diagram(rng, t, k, max_size, new_elements, new_facts, merge_p, budget):
    sig = t.signature
    index, leq = random_directed_order(rng, rng.randint(1, k))
    names = _Names()
    models, arrows = {}, {}
    for d in index:
        below = [c for c in index if (c, d) in leq and c != d]
        # glue the stages below d along their arrows
        parent = {}
        for c in below:
            for s in sig.sorts:
                for x in models[c].carriers[s]:
                    _uf_find(parent, (c, s, x))
        for (a, b), h in arrows.items():
            if a in below and b in below:
                for s, m in h.maps.items():
                    for x, y in m.items():
                        ra, rb = _uf_find(parent, (a, s, x)), _uf_find(parent, (b, s, y))
                        if ra != rb:
                            parent[ra] = rb
        members = {}
        for node in list(parent):
            members.setdefault(_uf_find(parent, node), []).append(node)
        cls_name = {r: min((n[2] for n in ms), key=dkey) for r, ms in members.items()}
        carriers = {s: set() for s in sig.sorts}
        for r, nm in cls_name.items():
            carriers[r[1]].add(nm)
        rels = {r: set() for r in sig.rel_sorts}
        for c in below:
            for r, sorts in sig.rel_sorts.items():
                for tup in models[c].relations[r]:
                    rels[r].add(tuple(cls_name[_uf_find(parent, (c, s, x))] for s, x in zip(sorts, tup)))
        for _ in range(rng.randint(0 if below else 1, new_elements)):
            carriers[rng.choice(sig.sorts)].add(names())
        for _ in range(rng.randint(0, new_facts)):
            r = rng.choice(sorted(sig.rel_sorts))
            sorts = sig.rel_sorts[r]
            if all(carriers[s] for s in sorts):
                rels[r].add(tuple(rng.choice(sorted(carriers[s], key=dkey)) for s in sorts))
        pre = Structure(sig, carriers, rels)
        # merges: equate two same-sort elements, keeping the older name
        merge = {}
        if rng.random() < merge_p:
            s = rng.choice(sig.sorts)
            pool = sorted(carriers[s], key=dkey)
            if len(pool) >= 2:
                a, b = sorted(rng.sample(pool, 2), key=dkey)
                merge = {b: a}
        if merge:
            pre = _merge(pre, merge)
        res = chase_structure(pre, t, budget, namer=names)
        if not res.terminated or any(len(res.model.carriers[s]) > max_size for s in sig.sorts):
            return None
        models[d] = res.model
        where = lambda s, x: res.renaming[(s, merge.get(x, x))]
        for c in below:
            maps = {s: {x: where(s, cls_name[_uf_find(parent, (c, s, x))]) for x in models[c].carriers[s]}
                    for s in sig.sorts}
            arrows[(c, d)] = Homomorphism(models[c], models[d], maps, check=False)
    return DirectedDiagram(index, leq, models, arrows)


def _merge(m: Structure, merge: dict) -> Structure:
    r = lambda a: merge.get(a, a)
    return Structure(m.signature, {s: {r(a) for a in c} for s, c in m.carriers.items()},
                     {n: {tuple(map(r, t)) for t in ts} for n, ts in m.relations.items()})
