"""Evaluation of regular formulas and homomorphism search.

A formula-in-context is compiled once into a conjunctive query: function
terms are flattened into graph atoms, equalities are solved by merging
variables, and existential variables follow the output variables in the
search order. Both evaluation and homomorphism search then run on the
backtracking kernel from :mod:`rwb.kernel`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Optional, Sequence

from . import kernel
from .errors import SortError
from .structure import Homomorphism, Structure
from .syntax import And, App, Eq, Exists, FormulaInContext, Rel, Sequent, Signature, Top, Var


@dataclass(frozen=True)
class Plan:
    sorts: tuple        # sort of each search variable
    out_index: tuple    # search variable carrying each context position
    n_out: int
    atoms: tuple        # (kind, symbol, variable tuple); kind in {"rel", "fun"}
    ground: tuple       # zero-variable atoms, checked before search

    @property
    def n_vars(self):
        return len(self.sorts)


class _UF:
    def __init__(self):
        self.parent = []

    def add(self):
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            if b < a:
                a, b = b, a
            self.parent[b] = a


@lru_cache(maxsize=4096)
def compile_formula(f: FormulaInContext, sig: Signature) -> Plan:
    f.check(sig)
    uf = _UF()
    sort_of = []
    atoms = []

    def new(sort):
        sort_of.append(sort)
        return uf.add()

    def term(t, env):
        if isinstance(t, Var):
            return env[t.name]
        args, res = sig.fun_sorts[t.fn]
        ids = tuple(term(a, env) for a in t.args)
        r = new(res)
        atoms.append(("fun", t.fn, ids + (r,)))
        return r

    def walk(g, env):
        if isinstance(g, Top):
            return
        if isinstance(g, Rel):
            atoms.append(("rel", g.name, tuple(term(a, env) for a in g.args)))
        elif isinstance(g, Eq):
            uf.union(term(g.left, env), term(g.right, env))
        elif isinstance(g, And):
            walk(g.left, env)
            walk(g.right, env)
        elif isinstance(g, Exists):
            walk(g.body, {**env, g.var: new(g.sort)})
        else:
            raise TypeError(f"not a regular formula: {g!r}")

    env = {n: new(s) for n, s in f.context}
    walk(f.body, env)

    # number equivalence classes: context classes first, then the rest greedily
    order = {}
    for n, _ in f.context:
        order.setdefault(uf.find(env[n]), len(order))
    n_out = len(order)
    classes = {uf.find(i) for i in range(len(sort_of))}
    class_atoms = [(k, s, tuple(uf.find(v) for v in vs)) for k, s, vs in atoms]
    rest = sorted(classes - set(order))
    while rest:
        # prefer a class sharing an atom with already ordered classes
        best = None
        for c in rest:
            if any(c in vs and any(v in order for v in vs) for _, _, vs in class_atoms):
                best = c
                break
        if best is None:
            best = rest[0]
        order[best] = len(order)
        rest.remove(best)
    sorts = [None] * len(order)
    for i, s in enumerate(sort_of):
        sorts[order[uf.find(i)]] = s
    out_index = tuple(order[uf.find(env[n])] for n, _ in f.context)
    placed, ground = [], []
    seen = set()
    for k, s, vs in class_atoms:
        key = (k, s, tuple(order[v] for v in vs))
        if key in seen:
            continue
        seen.add(key)
        (placed if vs else ground).append(key)
    return Plan(tuple(sorts), out_index, n_out, tuple(placed), tuple(ground))


def _run(plan: Plan, m: Structure, seed: Optional[Mapping] = None, limit: int = 0):
    """Run ``plan`` on ``m``. ``seed`` maps search variables to element ids."""
    ix = m.indexed
    for kind, name, _ in plan.ground:
        if () not in ix.table(kind, name):
            return []
    domains = []
    for i, s in enumerate(plan.sorts):
        if seed is not None and i in seed:
            v = seed[i]
            domains.append((v,) if v in ix.carriers[s] else ())
        else:
            domains.append(ix.carriers[s])
    if any(not d for d in domains):
        return []
    checks = [[] for _ in plan.sorts]
    tables = []
    for kind, name, vs in plan.atoms:
        tables.append(ix.table(kind, name))
        checks[max(vs)].append((len(tables) - 1, vs))
    return kernel.search(domains, checks, tables, plan.n_out, limit)


def evaluate(f: FormulaInContext, m: Structure) -> frozenset:
    """The definable set of ``f`` in ``m``, as a set of element tuples."""
    plan = compile_formula(f, m.signature)
    names = m.indexed.names
    rows = _run(plan, m)
    return frozenset(tuple(names[r[i]] for i in plan.out_index) for r in rows)


def holds(f: FormulaInContext, m: Structure, elements: Sequence) -> bool:
    """Whether ``elements`` lies in the definable set of ``f`` in ``m``."""
    if len(elements) != len(f.context):
        return False
    plan = compile_formula(f, m.signature)
    ids = m.indexed.ids
    seed = {}
    for pos, a in zip(plan.out_index, elements):
        if a not in ids:
            return False
        if seed.setdefault(pos, ids[a]) != ids[a]:
            return False
    for (_, s), a in zip(f.context, elements):
        if a not in m.carriers[s]:
            return False
    return bool(_run(plan, m, seed, limit=1))


def satisfies(m: Structure, s: Sequent) -> bool:
    return all(holds(s.right, m, t) for t in evaluate(s.left, m))


def satisfies_theory(m: Structure, theory) -> bool:
    return all(satisfies(m, ax) for ax in theory.axioms)


def find_homs(m: Structure, n: Structure, seed: Optional[Mapping] = None,
              limit: int = 0) -> Iterator[Homomorphism]:
    """Homomorphisms ``m -> n`` extending ``seed`` ({(sort, element): element}).

    Source elements are searched in canonical order, target values likewise.
    """
    if m.signature != n.signature:
        raise SortError("structures over different signatures")
    sig = m.signature
    seed = dict(seed or {})
    nodes = sorted(((s, a) for s in sig.sorts for a in m.carriers[s]),
                   key=lambda sa: (m.indexed.ids[sa[1]], sig.sorts.index(sa[0])))
    pos = {sa: i for i, sa in enumerate(nodes)}
    nix = n.indexed
    domains = []
    for s, a in nodes:
        if (s, a) in seed:
            b = seed[(s, a)]
            domains.append((nix.ids[b],) if b in n.carriers[s] else ())
        else:
            domains.append(nix.carriers[s])
    for key in seed:
        if key not in pos:
            raise SortError(f"seed element {key} not in source carrier")
    checks = [[] for _ in nodes]
    tables = []
    table_ix = {}

    def add(kind, name, vs):
        if not vs:
            if () not in nix.table(kind, name):
                return False
            return True
        if (kind, name) not in table_ix:
            table_ix[(kind, name)] = len(tables)
            tables.append(nix.table(kind, name))
        checks[max(vs)].append((table_ix[(kind, name)], vs))
        return True

    ok = True
    for r, sorts in sig.rel_sorts.items():
        for t in m.relations[r]:
            ok &= add("rel", r, tuple(pos[(s, a)] for s, a in zip(sorts, t)))
    for f, (args, res) in sig.fun_sorts.items():
        for k, v in m.functions[f].items():
            ok &= add("fun", f, tuple(pos[(s, a)] for s, a in zip(args, k)) + (pos[(res, v)],))
    if not ok or any(not d for d in domains):
        return iter(())
    rows = kernel.search(domains, checks, tables, len(nodes), limit)
    names = nix.names

    def gen():
        for row in rows:
            maps = {s: {} for s in sig.sorts}
            for (s, a), v in zip(nodes, row):
                maps[s][a] = names[v]
            yield Homomorphism(m, n, maps, check=False)

    return gen()


def exists_hom(m: Structure, n: Structure, seed: Optional[Mapping] = None) -> bool:
    return next(find_homs(m, n, seed, limit=1), None) is not None


def tuple_seed(sorts: Sequence, source: Sequence, target: Sequence) -> Optional[dict]:
    """Seed sending ``source[i] -> target[i]`` at ``sorts[i]``; None if inconsistent."""
    seed = {}
    for s, a, b in zip(sorts, source, target):
        if seed.setdefault((s, a), b) != b:
            return None
    return seed
