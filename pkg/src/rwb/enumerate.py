"""Enumeration of finite models up to isomorphism.

Symbols are assigned one at a time. Each symbol's table is an integer in
mixed radix (2 for relations, the result carrier size for functions); the
tables for one symbol are split into orbits under the stabilizer of the
earlier choices, and the least table of each orbit is kept. Axioms are
checked as soon as every symbol they mention is assigned.
"""
from __future__ import annotations

from itertools import permutations, product as cartesian
from typing import Iterator, Mapping, Union

import numpy as np

from .query import satisfies
from .structure import Structure
from .syntax import Theory, symbols

MAX_STATES = 1 << 24


def element_names(sig, sizes: Mapping) -> dict:
    out = {}
    taken = set()
    for s in sig.sorts:
        names = [f"{s}{i}" for i in range(sizes[s])]
        if taken & set(names):
            names = [f"{s}_{i}" for i in range(sizes[s])]
        taken |= set(names)
        out[s] = names
    return out


class _Level:
    def __init__(self, kind, name, arg_sorts, res_sort, sizes, group, sort_index):
        self.kind, self.name = kind, name
        self.cells = list(cartesian(*(range(sizes[s]) for s in arg_sorts)))
        cell_ix = {c: i for i, c in enumerate(self.cells)}
        self.radix = 2 if kind == "rel" else sizes[res_sort]
        n = len(self.cells)
        if self.radix ** n > MAX_STATES:
            raise ValueError(f"{name}: {self.radix}^{n} tables exceed the enumeration limit")
        # cellperm[g, i]: where perm g sends cell i; valperm[g, v]: image of value v
        self.cellperm = np.zeros((len(group), n), dtype=np.int64)
        self.valperm = np.zeros((len(group), max(self.radix, 1)), dtype=np.int64)
        for gi, g in enumerate(group):
            for i, c in enumerate(self.cells):
                self.cellperm[gi, i] = cell_ix[tuple(g[sort_index[s]][x] for s, x in zip(arg_sorts, c))]
            if kind == "rel":
                self.valperm[gi] = np.arange(self.radix)
            else:
                self.valperm[gi, :self.radix] = g[sort_index[res_sort]]
        self.powers = self.radix ** np.arange(n, dtype=np.int64) if self.radix > 1 else np.zeros(n, dtype=np.int64)
        self.total = self.radix ** n if self.radix > 0 or n == 0 else 0

    def digits(self, state: int) -> np.ndarray:
        if self.radix <= 1:
            return np.zeros(len(self.cells), dtype=np.int64)
        return (state // self.powers) % self.radix

    def images(self, state: int, members: np.ndarray) -> np.ndarray:
        """Images of ``state`` under the group elements indexed by ``members``."""
        if not len(self.cells):
            return np.zeros(len(members), dtype=np.int64)
        d = self.digits(state)
        vals = np.take_along_axis(self.valperm[members], np.broadcast_to(d, (len(members), len(d))), axis=1)
        return (vals * self.powers[self.cellperm[members]]).sum(axis=1)

    def orbit_reps(self, members: np.ndarray):
        """Yield ``(state, stabilizer members)`` for the least state of each orbit."""
        if self.total == 0:
            return
        seen = np.zeros(self.total, dtype=bool)
        s = 0
        while s < self.total:
            if seen[s]:
                chunk = seen[s:s + 65536]
                free = np.flatnonzero(~chunk)
                s = s + (int(free[0]) if len(free) else len(chunk))
                continue
            imgs = self.images(s, members)
            seen[imgs] = True
            yield s, members[imgs == s]
            s += 1


def _structure(sig, names, levels, states):
    rels, funs = {}, {}
    for lvl, st in zip(levels, states):
        d = lvl.digits(st)
        arg_sorts = sig.rel_sorts[lvl.name] if lvl.kind == "rel" else sig.fun_sorts[lvl.name][0]
        tuples = [tuple(names[s][x] for s, x in zip(arg_sorts, c)) for c in lvl.cells]
        if lvl.kind == "rel":
            rels[lvl.name] = [t for t, v in zip(tuples, d) if v]
        else:
            res = sig.fun_sorts[lvl.name][1]
            funs[lvl.name] = {t: names[res][int(v)] for t, v in zip(tuples, d)}
    return Structure(sig, names, rels, funs, check=False)


def enumerate_models(t: Theory, bound: Union[int, Mapping]) -> Iterator[Structure]:
    """All models of ``t`` with at most ``bound`` elements per sort, one per isomorphism class.

    Order: carrier sizes lexicographically (sorts in declaration order), then
    symbol tables in increasing encoded order.
    """
    sig = t.signature
    bounds = {s: bound for s in sig.sorts} if isinstance(bound, int) else dict(bound)
    sort_index = {s: i for i, s in enumerate(sig.sorts)}
    syms = [("rel", r, a, None) for r, a in sig.relations] + [("fun", f, a, r) for f, a, r in sig.functions]
    # an axiom is checked at the first level where all its symbols are assigned
    level_of = {name: i for i, (_, name, _, _) in enumerate(syms)}
    checks = [[] for _ in range(len(syms) + 1)]
    for ax in t.axioms:
        used = symbols(ax.lhs) | symbols(ax.rhs)
        checks[max((level_of[u] + 1 for u in used), default=0)].append(ax)

    for sizes in cartesian(*(range(bounds[s] + 1) for s in sig.sorts)):
        sizes = dict(zip(sig.sorts, sizes))
        names = element_names(sig, sizes)
        group = list(cartesian(*(list(permutations(range(sizes[s]))) for s in sig.sorts)))
        levels = [_Level(k, n, a, r, sizes, group, sort_index) for k, n, a, r in syms]
        if any(lvl.total == 0 for lvl in levels):
            continue
        yield from _search(sig, names, levels, checks, [], np.arange(len(group)))


def _ok(sig, names, levels, states, axioms):
    if not axioms:
        return True
    m = _structure(sig, names, levels[:len(states)], states)
    return all(satisfies(m, ax) for ax in axioms)


def _search(sig, names, levels, checks, states, members):
    k = len(states)
    if not _ok(sig, names, levels, states, checks[k]):
        return
    if k == len(levels):
        yield _structure(sig, names, levels, states)
        return
    for st, stab in levels[k].orbit_reps(members):
        yield from _search(sig, names, levels, checks, states + [st], stab)


def enumerate_labeled(t: Theory, pool: Mapping) -> Iterator[Structure]:
    """Every model whose carriers are subsets of the given name pools (no isomorphism reduction)."""
    sig = t.signature
    subsets = []
    for s in sig.sorts:
        names = list(pool[s])
        subsets.append([tuple(n for i, n in enumerate(names) if mask >> i & 1) for mask in range(1 << len(names))])
    for choice in cartesian(*subsets):
        carriers = dict(zip(sig.sorts, choice))
        cells = []
        for r, sorts in sig.rel_sorts.items():
            cells.append([("rel", r, tup) for tup in cartesian(*(carriers[s] for s in sorts))])
        fcells = []
        for f, (args, res) in sig.fun_sorts.items():
            for tup in cartesian(*(carriers[s] for s in args)):
                fcells.append((f, tup, carriers[res]))
        flat = [c for group in cells for c in group]
        if len(flat) > 24:
            raise ValueError("labeled enumeration limited to 24 relation cells")
        for mask in range(1 << len(flat)):
            rels = {r: [] for r in sig.rel_sorts}
            for i, (_, r, tup) in enumerate(flat):
                if mask >> i & 1:
                    rels[r].append(tup)
            for values in cartesian(*(vals for _, _, vals in fcells)):
                funs = {f: {} for f in sig.fun_sorts}
                for (f, tup, _), v in zip(fcells, values):
                    funs[f][tup] = v
                m = Structure(sig, carriers, rels, funs, check=False)
                if all(satisfies(m, ax) for ax in t.axioms):
                    yield m
