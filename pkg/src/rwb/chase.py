"""Chase saturation: universal models, entailment, isolating formulas."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from . import kernel
from .errors import PreconditionError
from .query import compile_formula, evaluate, exists_hom, holds, tuple_seed
from .structure import Structure
from .syntax import (TOP, And, App, Eq, Exists, FormulaInContext, Rel, Sequent, Signature,
                     Theory, Top, Var, all_var_names, conj, exists_all)

DEFAULT_BUDGET = 10_000


def default_budget() -> int:
    value = os.environ.get("RWB_BUDGET")
    return int(value) if value else DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# Relationalization


def graph_names(sig: Signature) -> dict:
    """Deterministic graph-relation name ``G_f`` for each function symbol."""
    taken = set(sig.rel_sorts) | set(sig.fun_sorts)
    out = {}
    for f in sig.fun_sorts:
        name = f"G_{f}"
        while name in taken:
            name += "_"
        taken.add(name)
        out[f] = name
    return out


def _flatten(f, sig, gnames, taken):
    """Replace function terms by graph atoms under fresh existentials."""

    def fresh():
        i = 0
        while f"v{i}" in taken:
            i += 1
        taken.add(f"v{i}")
        return f"v{i}"

    def term(t, binders, atoms):
        if isinstance(t, Var):
            return t
        args = tuple(term(a, binders, atoms) for a in t.args)
        v = fresh()
        binders.append((v, sig.fun_sorts[t.fn][1]))
        atoms.append(Rel(gnames[t.fn], args + (Var(v),)))
        return Var(v)

    if isinstance(f, Top):
        return f
    if isinstance(f, (Rel, Eq)):
        binders, atoms = [], []
        if isinstance(f, Rel):
            core = Rel(f.name, tuple(term(a, binders, atoms) for a in f.args))
        else:
            core = Eq(term(f.left, binders, atoms), term(f.right, binders, atoms))
        return exists_all(binders, conj(*atoms, core))
    if isinstance(f, And):
        return And(_flatten(f.left, sig, gnames, taken), _flatten(f.right, sig, gnames, taken))
    if isinstance(f, Exists):
        return Exists(f.var, f.sort, _flatten(f.body, sig, gnames, taken))
    raise TypeError(f"not a regular formula: {f!r}")


def relational_signature(sig: Signature) -> Signature:
    if not sig.functions:
        return sig
    g = graph_names(sig)
    extra = tuple((g[f], args + (res,)) for f, args, res in sig.functions)
    return Signature(sig.sorts, sig.relations + extra, ())


def relationalize_formula(f: FormulaInContext, sig: Signature) -> FormulaInContext:
    if not sig.functions:
        return f
    taken = set(f.names) | all_var_names(f.body)
    return FormulaInContext(f.context, _flatten(f.body, sig, graph_names(sig), taken))


def relationalize_sequent(s: Sequent, sig: Signature) -> Sequent:
    if not sig.functions:
        return s
    g = graph_names(sig)
    taken = set(n for n, _ in s.context) | all_var_names(s.lhs) | all_var_names(s.rhs)
    return Sequent(s.context, _flatten(s.lhs, sig, g, taken), _flatten(s.rhs, sig, g, taken), s.name)


def relationalize(t: Theory) -> Theory:
    """Replace each function symbol by its graph relation plus functionality and totality axioms."""
    sig = t.signature
    if not sig.functions:
        return t
    g = graph_names(sig)
    axioms = [relationalize_sequent(ax, sig) for ax in t.axioms]
    for f, args, res in sig.functions:
        xs = [(f"x{i}", s) for i, s in enumerate(args)]
        xv = tuple(Var(n) for n, _ in xs)
        ctx = tuple(xs) + (("y", res), ("y'", res))
        axioms.append(Sequent(ctx, And(Rel(g[f], xv + (Var("y"),)), Rel(g[f], xv + (Var("y'"),))),
                              Eq(Var("y"), Var("y'")), f"{f}_functional"))
        axioms.append(Sequent(tuple(xs), TOP, Exists("y", res, Rel(g[f], xv + (Var("y"),))), f"{f}_total"))
    return Theory(relational_signature(sig), tuple(axioms))


def functionalize(m: Structure, sig: Signature) -> Structure:
    """Inverse of :meth:`Structure.relationalized` for a structure whose graphs are total and functional."""
    g = graph_names(sig)
    funs = {}
    for f, (args, res) in sig.fun_sorts.items():
        funs[f] = {t[:-1]: t[-1] for t in m.relations[g[f]]}
    rels = {r: m.relations[r] for r in sig.rel_sorts}
    return Structure(sig, dict(m.carriers), rels, funs)


# ---------------------------------------------------------------------------
# Chase


@dataclass(frozen=True)
class ChaseStep:
    axiom: str
    trigger: tuple
    kind: str  # "witness-added" | "facts-added" | "elements-merged"
    added: tuple = ()
    merged: tuple = ()
    facts: tuple = ()

    def to_dict(self):
        return {"axiom": self.axiom, "trigger": list(self.trigger), "kind": self.kind,
                "added": list(self.added), "merged": [list(p) for p in self.merged],
                "facts": [[r, list(t)] for r, t in self.facts]}


@dataclass(frozen=True)
class ChaseResult:
    model: Structure
    generic: tuple
    status: str  # "Terminated" | "BudgetExhausted"
    steps: int
    trace: tuple = ()
    renaming: dict = field(default_factory=dict, compare=False)

    @property
    def terminated(self) -> bool:
        return self.status == "Terminated"

    def to_dict(self) -> dict:
        status = self.status if self.terminated else f"BudgetExhausted({self.steps})"
        return {"status": status, "steps": self.steps, "generic": list(self.generic),
                "model": self.model.to_dict(), "trace": [s.to_dict() for s in self.trace]}


class _Workspace:
    """Mutable chase state over a relational signature; element ids are creation indices.

    ``log`` and ``created`` record facts and elements in insertion order and
    ``epoch`` counts merges, so the saturation loop can look only at what is
    new since an axiom was last scanned.
    """

    def __init__(self, sig: Signature, graphs: dict, namer: Callable[[int], str]):
        self.sig = sig
        self.graphs = graphs  # graph relation name -> arity of argument part
        self.namer = namer
        self.sort = []
        self.parent = []
        self.names = []
        self.alive = {s: [] for s in sig.sorts}
        self.facts = {r: set() for r in sig.rel_sorts}
        self.log = []
        self.created = []
        self.epoch = 0
        self.conflicts = []
        self._index = {}  # (relation, bound positions) -> key -> set of facts
        self._gindex = {r: {} for r in graphs}

    def new(self, sort, name=None):
        i = len(self.parent)
        self.parent.append(i)
        self.sort.append(sort)
        self.names.append(name if name is not None else self.namer(i))
        self.alive[sort].append(i)
        self.created.append(i)
        return i

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def add(self, r, t) -> bool:
        if t in self.facts[r]:
            return False
        self.facts[r].add(t)
        self.log.append((r, t))
        for (name, bound), idx in self._index.items():
            if name == r:
                idx.setdefault(tuple(t[p] for p in bound), set()).add(t)
        if r in self._gindex:
            k = self.graphs[r]
            prev = self._gindex[r].setdefault(t[:k], t[k])
            if prev != t[k]:
                self.conflicts.append((prev, t[k]))
        return True

    def lookup(self, r, bound, key) -> set:
        idx = self._index.get((r, bound))
        if idx is None:
            idx = {}
            for t in self.facts[r]:
                idx.setdefault(tuple(t[p] for p in bound), set()).add(t)
            self._index[(r, bound)] = idx
        return idx.get(key, ())

    def merge(self, a, b) -> list:
        """Identify ``a`` and ``b`` and close under functionality of graph relations."""
        merged = []
        queue = [(a, b)]
        while queue:
            x, y = queue.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            keep, drop = min(x, y), max(x, y)
            self.parent[drop] = keep
            self.alive[self.sort[drop]].remove(drop)
            merged.append((self.names[keep], self.names[drop]))
            for r, ts in self.facts.items():
                if any(drop in t for t in ts):
                    self.facts[r] = {tuple(self.find(v) for v in t) for t in ts}
            for r, k in self.graphs.items():
                seen = {}
                for t in self.facts[r]:
                    prev = seen.setdefault(t[:k], t[k])
                    if prev != t[k]:
                        queue.append((prev, t[k]))
                self._gindex[r] = seen
        if merged:
            self.epoch += 1
            self._index = {}
        return merged

    def settle(self) -> list:
        """Merge values of graph relations that clash on their arguments."""
        merged = []
        while self.conflicts:
            a, b = self.conflicts.pop(0)
            merged += self.merge(a, b)
        return merged

    def run(self, plan, seed=None, limit=0):
        for _, name, _ in plan.ground:
            if () not in self.facts[name]:
                return []
        seed = seed or {}
        domains = []
        for i, s in enumerate(plan.sorts):
            if i in seed:
                domains.append((seed[i],))
                continue
            cands = None
            # narrow through any atom in which i is the only unseeded variable
            for _, name, vs in plan.atoms:
                if i not in vs or any(v != i and v not in seed for v in vs):
                    continue
                bound = tuple(p for p, v in enumerate(vs) if v != i)
                if not bound:
                    continue
                free = [p for p, v in enumerate(vs) if v == i]
                hits = {t[free[0]] for t in self.lookup(name, bound, tuple(seed[vs[p]] for p in bound))
                        if all(t[p] == t[free[0]] for p in free)}
                cands = hits if cands is None else cands & hits
            domains.append(tuple(self.alive[s]) if cands is None else tuple(sorted(cands)))
        if any(not d for d in domains):
            return []
        checks = [[] for _ in plan.sorts]
        tables = []
        for _, name, vs in plan.atoms:
            tables.append(self.facts[name])
            checks[max(vs)].append((len(tables) - 1, vs))
        return kernel.search(domains, checks, tables, plan.n_out, limit)

    def structure(self) -> Structure:
        carriers = {s: [self.names[i] for i in ids] for s, ids in self.alive.items()}
        rels = {r: {tuple(self.names[v] for v in t) for t in ts} for r, ts in self.facts.items()}
        return Structure(self.sig, carriers, rels)


class _Axiom:
    def __init__(self, ax: Sequent, ident: str, sig: Signature):
        self.ident = ident
        self.body = compile_formula(ax.left, sig)
        self.head = compile_formula(ax.right, sig)
        self.context = ax.context
        used = {v for _, _, vs in self.body.atoms for v in vs}
        self.loose = [i for i in range(self.body.n_vars) if i not in used]
        self.ground = {name for _, name, _ in self.body.ground}

    def _project(self, rows):
        return [tuple(row[i] for i in self.body.out_index) for row in rows]

    def triggers(self, ws: _Workspace):
        return self._project(ws.run(self.body))

    def new_triggers(self, ws: _Workspace, facts, elements):
        """Triggers using at least one of the given facts or elements, in scan order."""
        if any(r in self.ground for r, _ in facts):
            return self.triggers(ws)
        rows = set()
        for r, t in facts:
            for _, name, vs in self.body.atoms:
                if name != r:
                    continue
                seed = {}
                if all(seed.setdefault(v, x) == x for v, x in zip(vs, t)):
                    rows.update(ws.run(self.body, seed))
        for i in self.loose:
            for e in elements:
                if ws.find(e) == e and ws.sort[e] == self.body.sorts[i]:
                    rows.update(ws.run(self.body, {i: e}))
        return self._project(sorted(rows))

    def seed(self, ws, trigger):
        seed = {}
        for pos, v in zip(self.head.out_index, trigger):
            v = ws.find(v)
            if seed.setdefault(pos, v) != v:
                return None
        return seed

    def active(self, ws, trigger) -> bool:
        seed = self.seed(ws, trigger)
        if seed is None:  # the head identifies two distinct trigger values
            return True
        return not ws.run(self.head, seed, limit=1)

    def fire(self, ws, trigger) -> ChaseStep:
        trigger = tuple(ws.find(v) for v in trigger)
        values = {}
        merges = []
        for pos, v in zip(self.head.out_index, trigger):
            if pos in values and ws.find(values[pos]) != ws.find(v):
                merges.append((values[pos], v))
            values.setdefault(pos, v)
        merged = []
        for a, b in merges:
            merged += ws.merge(a, b)
        added = []
        for i in range(self.head.n_out, self.head.n_vars):
            values[i] = ws.new(self.head.sorts[i])
            added.append(ws.names[values[i]])
        facts = []
        for _, name, vs in self.head.atoms:
            t = tuple(ws.find(values[v]) for v in vs)
            if ws.add(name, t):
                facts.append((name, tuple(ws.names[v] for v in t)))
        for _, name, _ in self.head.ground:
            if ws.add(name, ()):
                facts.append((name, ()))
        merged += ws.settle()
        kind = "elements-merged" if merged else "witness-added" if added else "facts-added"
        return ChaseStep(self.ident, tuple(ws.names[v] for v in trigger), kind,
                         tuple(added), tuple(merged), tuple(facts))


def _saturate(ws: _Workspace, axioms: list, budget: int, trace: list) -> tuple:
    # Rounds visit axioms in order. Every trigger seen at a scan is fired or
    # already satisfied, and stays satisfied while nothing merges, so a
    # rescan only needs the facts and elements added since then.
    steps = 0
    marks = [None] * len(axioms)
    while True:
        fired = False
        for k, ax in enumerate(axioms):
            mark = marks[k]
            marks[k] = (ws.epoch, len(ws.log), len(ws.created))
            if mark is None or mark[0] != ws.epoch:
                found = ax.triggers(ws)
            else:
                found = ax.new_triggers(ws, ws.log[mark[1]:], ws.created[mark[2]:])
            pending = [t for t in found if ax.active(ws, t)]
            for t in pending:
                if not ax.active(ws, t):
                    continue
                if steps >= budget:
                    return "BudgetExhausted", steps
                trace.append(ax.fire(ws, t))
                steps += 1
                fired = True
        if not fired:
            return "Terminated", steps


def _prepare(t: Theory):
    sig = t.signature
    rt = relationalize(t)
    graphs = {}
    if sig.functions:
        g = graph_names(sig)
        graphs = {g[f]: len(args) for f, (args, _) in sig.fun_sorts.items()}
    axioms = [_Axiom(ax, rt.axiom_id(i), rt.signature) for i, ax in enumerate(rt.axioms)]
    return rt, graphs, axioms


def _finish(ws, t, status):
    m = ws.structure()
    if t.signature.functions and status == "Terminated":
        m = functionalize(m, t.signature)
    return m


def chase(f: FormulaInContext, t: Theory, budget: Optional[int] = None) -> ChaseResult:
    """Chase the canonical structure of ``f`` with the axioms of ``t``.

    Function symbols are handled through :func:`relationalize`. A terminated
    result is returned over ``t``'s signature; an exhausted one keeps the
    graph relations.
    """
    budget = default_budget() if budget is None else budget
    f.check(t.signature)
    rt, graphs, axioms = _prepare(t)
    rf = relationalize_formula(f, t.signature)
    plan = compile_formula(rf, rt.signature)
    ws = _Workspace(rt.signature, graphs, lambda i: f"d{i}")
    ids = [ws.new(s) for s in plan.sorts]
    for _, name, vs in plan.atoms:
        ws.add(name, tuple(ids[v] for v in vs))
    for _, name, _ in plan.ground:
        ws.add(name, ())
    trace = []
    ws.settle()
    status, steps = _saturate(ws, axioms, budget, trace)
    generic = tuple(ws.names[ws.find(ids[i])] for i in plan.out_index)
    return ChaseResult(_finish(ws, t, status), generic, status, steps, tuple(trace))


def chase_structure(m: Structure, t: Theory, budget: Optional[int] = None,
                    namer: Optional[Callable[[int], str]] = None) -> ChaseResult:
    """Chase an existing structure, keeping its element names.

    Fresh elements are named by ``namer`` (default ``d<i>`` avoiding existing
    names); ``renaming`` records where every original element ended up.
    """
    budget = default_budget() if budget is None else budget
    rt, graphs, axioms = _prepare(t)
    if t.signature.functions:
        m = m.relationalized(graph_names(t.signature))
    taken = set(m.universe)
    if namer is None:
        counter = [0]

        def namer(_):
            while f"d{counter[0]}" in taken:
                counter[0] += 1
            taken.add(f"d{counter[0]}")
            return f"d{counter[0]}"

    ws = _Workspace(rt.signature, graphs, namer)
    ids = {}
    for a in m.universe:
        for s in rt.signature.sorts:
            if a in m.carriers[s]:
                ids[(s, a)] = ws.new(s, a)
    for r, sorts in rt.signature.rel_sorts.items():
        for tup in m.relations[r]:
            ws.add(r, tuple(ids[(s, a)] for s, a in zip(sorts, tup)))
    trace = []
    ws.settle()
    status, steps = _saturate(ws, axioms, budget, trace)
    renaming = {key: ws.names[ws.find(i)] for key, i in ids.items()}
    return ChaseResult(_finish(ws, t, status), (), status, steps, tuple(trace), renaming)


# ---------------------------------------------------------------------------
# Entailment


@dataclass(frozen=True)
class Proved:
    def to_dict(self):
        return {"verdict": "Proved"}


@dataclass(frozen=True)
class Disproved:
    countermodel: Structure
    witness: tuple

    def to_dict(self):
        return {"verdict": "Disproved", "witness": list(self.witness),
                "countermodel": self.countermodel.to_dict()}


@dataclass(frozen=True)
class Unknown:
    budget: int

    def to_dict(self):
        return {"verdict": "Unknown", "budget": self.budget}


def entails(t: Theory, s: Sequent, budget: Optional[int] = None):
    """Decide ``lhs |- rhs`` in ``t`` through the chase of ``lhs``.

    Proved is reported whenever the generic tuple of the (possibly partial)
    chase satisfies ``rhs``: every chase fact is a consequence of ``lhs``.
    """
    budget = default_budget() if budget is None else budget
    s.check(t.signature)
    res = chase(s.left, t, budget)
    rhs = s.right
    if not res.terminated and t.signature.functions:
        rhs = relationalize_formula(rhs, t.signature)
    if holds(rhs, res.model, res.generic):
        return Proved()
    if res.terminated:
        return Disproved(res.model, res.generic)
    return Unknown(budget)


# ---------------------------------------------------------------------------
# Isolation


def _infer_sorts(m: Structure, elements: Sequence) -> tuple:
    out = []
    for a in elements:
        sorts = [s for s in m.signature.sorts if a in m.carriers[s]]
        if len(sorts) != 1:
            raise PreconditionError(f"cannot infer the sort of {a!r}; pass sorts explicitly")
        out.append(sorts[0])
    return tuple(out)


def canonical_isolating_formula(m: Structure, elements: Sequence,
                                sorts: Optional[Sequence] = None) -> FormulaInContext:
    """Positive diagram of ``m`` with ``elements`` free and everything else existential."""
    elements = tuple(elements)
    sorts = tuple(sorts) if sorts is not None else _infer_sorts(m, elements)
    sig = m.signature
    var = {}
    ctx, eqs = [], []
    for i, (s, a) in enumerate(zip(sorts, elements)):
        if a not in m.carriers[s]:
            raise PreconditionError(f"{a} is not an element of sort {s}")
        name = f"x{i}"
        ctx.append((name, s))
        if (s, a) in var:
            eqs.append(Eq(Var(var[(s, a)]), Var(name)))
        else:
            var[(s, a)] = name
    binders = []
    for s in sig.sorts:
        for a in m.elements(s):
            if (s, a) not in var:
                var[(s, a)] = f"y{len(binders)}"
                binders.append((var[(s, a)], s))
    atoms = []
    for r, rs in sig.rel_sorts.items():
        for t in sorted(m.relations[r], key=lambda tup: tuple(var[(s, a)] for s, a in zip(rs, tup))):
            atoms.append(Rel(r, tuple(Var(var[(s, a)]) for s, a in zip(rs, t))))
    for f, (args, res) in sig.fun_sorts.items():
        for k, v in m.functions[f].items():
            atoms.append(Eq(App(f, tuple(Var(var[(s, a)]) for s, a in zip(args, k))), Var(var[(res, v)])))
    return FormulaInContext(tuple(ctx), exists_all(binders, conj(*eqs, *atoms)))


def check_isolation(f: FormulaInContext, m: Structure, elements: Sequence,
                    corpus: Iterable[Structure]) -> bool:
    """Whether ``f`` isolates ``elements`` in ``m`` relative to a finite corpus."""
    elements = tuple(elements)
    if not holds(f, m, elements):
        raise PreconditionError("tuple is not in the extension of the formula")
    for n in corpus:
        for b in evaluate(f, n):
            seed = tuple_seed(f.sorts, elements, b)
            if seed is None or not exists_hom(m, n, seed):
                return False
    return True
