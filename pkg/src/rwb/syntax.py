"""Many-sorted signatures, regular formulas-in-context, sequents and theories.

Every value here is immutable and hashable so formulas can be used as cache
keys by the query compiler.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import ArityError, SortError


_NUM_SPLIT = re.compile(r"(\d+)")


def dkey(name: str):
    """Canonical total order on elements of the universe: natural string order."""
    parts = _NUM_SPLIT.split(name)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p != "")


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class Signature:
    sorts: tuple
    relations: tuple = ()  # ((name, (sort, ...)), ...)
    functions: tuple = ()  # ((name, (arg sort, ...), result sort), ...)

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "relations", tuple((n, tuple(s)) for n, s in self.relations))
        object.__setattr__(self, "functions", tuple((n, tuple(a), r) for n, a, r in self.functions))
        if len(set(self.sorts)) != len(self.sorts):
            raise SortError("duplicate sort declaration")
        names = [n for n, _ in self.relations] + [n for n, _, _ in self.functions]
        if len(set(names)) != len(names):
            raise SortError("relation and function names must be unique and disjoint")
        known = set(self.sorts)
        for name, sorts in self.relations:
            for s in sorts:
                if s not in known:
                    raise SortError(f"relation {name} uses undeclared sort {s}")
        for name, args, res in self.functions:
            for s in (*args, res):
                if s not in known:
                    raise SortError(f"function {name} uses undeclared sort {s}")

    @classmethod
    def build(cls, sorts: Iterable[str], relations: Optional[Mapping] = None,
              functions: Optional[Mapping] = None) -> "Signature":
        relations = relations or {}
        functions = functions or {}
        return cls(tuple(sorts), tuple(relations.items()),
                   tuple((n, a, r) for n, (a, r) in functions.items()))

    @cached_property
    def rel_sorts(self) -> dict:
        return dict(self.relations)

    @cached_property
    def fun_sorts(self) -> dict:
        return {n: (a, r) for n, a, r in self.functions}

    def with_relations(self, extra: Iterable) -> "Signature":
        return Signature(self.sorts, self.relations + tuple(extra), self.functions)


# ---------------------------------------------------------------------------
# Terms and formulas


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Var, App]


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    sort: str
    body: Formula


TOP = Top()


def conj(*parts: Formula) -> Formula:
    """Left-associated conjunction, dropping redundant ``true`` conjuncts."""
    parts = [p for p in parts if not isinstance(p, Top)]
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def exists_all(binders: Sequence, body: Formula) -> Formula:
    for name, sort in reversed(list(binders)):
        body = Exists(name, sort, body)
    return body


def conjuncts(f: Formula) -> list:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    if isinstance(f, Top):
        return []
    return [f]


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(f: Formula) -> set:
    if isinstance(f, Top):
        return set()
    if isinstance(f, Rel):
        out = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, And):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Exists):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a regular formula: {f!r}")


def all_var_names(f: Formula) -> set:
    """Free and bound variable names occurring anywhere in ``f``."""
    if isinstance(f, Exists):
        return {f.var} | all_var_names(f.body)
    if isinstance(f, And):
        return all_var_names(f.left) | all_var_names(f.right)
    return free_vars(f)


def symbols(f: Formula) -> set:
    """Relation and function symbols used in ``f``."""
    def term_syms(t):
        if isinstance(t, Var):
            return set()
        out = {t.fn}
        for a in t.args:
            out |= term_syms(a)
        return out

    if isinstance(f, Rel):
        out = {f.name}
        for a in f.args:
            out |= term_syms(a)
        return out
    if isinstance(f, Eq):
        return term_syms(f.left) | term_syms(f.right)
    if isinstance(f, And):
        return symbols(f.left) | symbols(f.right)
    if isinstance(f, Exists):
        return symbols(f.body)
    return set()


# ---------------------------------------------------------------------------
# Sort checking


def term_sort(t: Term, env: Mapping, sig: Signature) -> str:
    if isinstance(t, Var):
        if t.name not in env:
            raise SortError(f"unbound variable {t.name}")
        return env[t.name]
    if t.fn not in sig.fun_sorts:
        raise SortError(f"unknown function symbol {t.fn}")
    args, res = sig.fun_sorts[t.fn]
    if len(args) != len(t.args):
        raise SortError(f"{t.fn} expects {len(args)} arguments, got {len(t.args)}")
    for want, a in zip(args, t.args):
        got = term_sort(a, env, sig)
        if got != want:
            raise SortError(f"argument of {t.fn} has sort {got}, expected {want}")
    return res


def check_formula(f: Formula, env: Mapping, sig: Signature) -> None:
    if isinstance(f, Top):
        return
    if isinstance(f, Rel):
        if f.name not in sig.rel_sorts:
            raise SortError(f"unknown relation symbol {f.name}")
        want = sig.rel_sorts[f.name]
        if len(want) != len(f.args):
            raise SortError(f"{f.name} expects {len(want)} arguments, got {len(f.args)}")
        for w, a in zip(want, f.args):
            got = term_sort(a, env, sig)
            if got != w:
                raise SortError(f"argument of {f.name} has sort {got}, expected {w}")
        return
    if isinstance(f, Eq):
        ls, rs = term_sort(f.left, env, sig), term_sort(f.right, env, sig)
        if ls != rs:
            raise SortError(f"equation between sorts {ls} and {rs}")
        return
    if isinstance(f, And):
        check_formula(f.left, env, sig)
        check_formula(f.right, env, sig)
        return
    if isinstance(f, Exists):
        if f.sort not in sig.sorts:
            raise SortError(f"undeclared sort {f.sort}")
        check_formula(f.body, {**env, f.var: f.sort}, sig)
        return
    raise TypeError(f"not a regular formula: {f!r}")


# ---------------------------------------------------------------------------
# Formulas in context, sequents, theories


def _context(ctx) -> tuple:
    ctx = tuple((str(n), str(s)) for n, s in ctx)
    names = [n for n, _ in ctx]
    if len(set(names)) != len(names):
        raise SortError(f"context variables must be distinct: {names}")
    return ctx


@dataclass(frozen=True)
class FormulaInContext:
    context: tuple
    body: Formula = TOP

    def __post_init__(self):
        object.__setattr__(self, "context", _context(self.context))
        missing = free_vars(self.body) - set(self.names)
        if missing:
            raise SortError(f"free variables {sorted(missing)} not in context")

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.context)

    @property
    def sorts(self) -> tuple:
        return tuple(s for _, s in self.context)

    def check(self, sig: Signature) -> "FormulaInContext":
        for _, s in self.context:
            if s not in sig.sorts:
                raise SortError(f"undeclared sort {s}")
        check_formula(self.body, dict(self.context), sig)
        return self

    def __str__(self):
        from .printer import format_fic
        return format_fic(self)


@dataclass(frozen=True)
class Sequent:
    context: tuple
    lhs: Formula
    rhs: Formula
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "context", _context(self.context))
        names = {n for n, _ in self.context}
        missing = (free_vars(self.lhs) | free_vars(self.rhs)) - names
        if missing:
            raise SortError(f"free variables {sorted(missing)} not in context")

    @property
    def left(self) -> FormulaInContext:
        return FormulaInContext(self.context, self.lhs)

    @property
    def right(self) -> FormulaInContext:
        return FormulaInContext(self.context, self.rhs)

    def check(self, sig: Signature) -> "Sequent":
        self.left.check(sig)
        self.right.check(sig)
        return self

    def __str__(self):
        from .printer import format_sequent
        return format_sequent(self)


@dataclass(frozen=True)
class Theory:
    signature: Signature
    axioms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        for ax in self.axioms:
            ax.check(self.signature)

    def axiom_id(self, i: int) -> str:
        return self.axioms[i].name or f"ax{i}"

    def __str__(self):
        from .printer import format_theory
        return format_theory(self)


# ---------------------------------------------------------------------------
# Substitution, alpha-equivalence, reduced forms


def fresh_name(base: str, taken) -> str:
    name = base + "'"
    while name in taken:
        name += "'"
    return name


def rename_term(t: Term, m: Mapping) -> Term:
    if isinstance(t, Var):
        return Var(m.get(t.name, t.name))
    return App(t.fn, tuple(rename_term(a, m) for a in t.args))


def rename_formula(f: Formula, m: Mapping, avoid=frozenset()) -> Formula:
    """Capture-avoiding renaming of free variables of ``f`` by ``m``.

    Bound variables that would capture an image of ``m`` (or a name in
    ``avoid``) are freshened with primes.
    """
    if isinstance(f, Top):
        return f
    if isinstance(f, Rel):
        return Rel(f.name, tuple(rename_term(a, m) for a in f.args))
    if isinstance(f, Eq):
        return Eq(rename_term(f.left, m), rename_term(f.right, m))
    if isinstance(f, And):
        return And(rename_formula(f.left, m, avoid), rename_formula(f.right, m, avoid))
    if isinstance(f, Exists):
        inner = {k: v for k, v in m.items() if k != f.var}
        live = free_vars(f.body) - {f.var}
        targets = {inner.get(v, v) for v in live} | set(avoid)
        var = f.var
        if var in targets:
            var = fresh_name(f.var, targets | all_var_names(f.body) | set(inner))
            inner[f.var] = var
        return Exists(var, f.sort, rename_formula(f.body, inner, avoid))
    raise TypeError(f"not a regular formula: {f!r}")


def substitute(f: FormulaInContext, mapping: Mapping) -> FormulaInContext:
    """Rename context variables of ``f``; identifying two variables collapses them."""
    m = {n: mapping.get(n, n) for n in f.names}
    sort_of = {}
    for (n, s) in f.context:
        t = m[n]
        if sort_of.setdefault(t, s) != s:
            raise SortError(f"substitution identifies variables of sorts {sort_of[t]} and {s}")
    ctx, seen = [], set()
    for n, s in f.context:
        if m[n] not in seen:
            seen.add(m[n])
            ctx.append((m[n], s))
    return FormulaInContext(tuple(ctx), rename_formula(f.body, m))


def alpha_key(f: FormulaInContext):
    """Structural key identifying alpha-equivalent formulas-in-context."""
    m = {n: f"_{i}" for i, n in enumerate(f.names)}
    counter = [0]

    def walk(g, env):
        if isinstance(g, Exists):
            new = f"_b{counter[0]}"
            counter[0] += 1
            return Exists(new, g.sort, walk(g.body, {**env, g.var: new}))
        if isinstance(g, And):
            return And(walk(g.left, env), walk(g.right, env))
        if isinstance(g, Rel):
            return Rel(g.name, tuple(rename_term(a, env) for a in g.args))
        if isinstance(g, Eq):
            return Eq(rename_term(g.left, env), rename_term(g.right, env))
        return g

    return f.sorts, walk(f.body, m)


def alpha_equal(f: FormulaInContext, g: FormulaInContext) -> bool:
    return alpha_key(f) == alpha_key(g)


def is_reduced(f: FormulaInContext, elements: Sequence) -> bool:
    seen = set()
    for (_, s), a in zip(f.context, elements):
        if (a, s) in seen:
            return False
        seen.add((a, s))
    return True


def reduce_presentation(f: FormulaInContext, elements: Sequence):
    """Identify context variables that carry the same element at the same sort.

    Returns ``(formula, tuple)`` in reduced form denoting the same set of
    models as ``(f, elements)``.
    """
    elements = tuple(elements)
    if len(elements) != len(f.context):
        raise ArityError(f"tuple of length {len(elements)} for context of length {len(f.context)}")
    first = {}
    mapping = {}
    keep = []
    for (n, s), a in zip(f.context, elements):
        if (a, s) in first:
            mapping[n] = first[(a, s)]
        else:
            first[(a, s)] = n
            keep.append(a)
    if not mapping:
        return f, elements
    return substitute(f, mapping), tuple(keep)


def concat_contexts(f: FormulaInContext, g: FormulaInContext, avoid=frozenset()):
    """Rename ``g`` apart from ``f`` (and ``avoid``); return the renamed ``g``."""
    taken = set(f.names) | all_var_names(f.body) | set(avoid)
    mapping = {}
    for n in g.names:
        new = n
        while new in taken:
            new = fresh_name(new, taken)
        taken.add(new)
        mapping[n] = new
    return substitute(g, mapping)


def iter_subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, And):
        yield from iter_subformulas(f.left)
        yield from iter_subformulas(f.right)
    elif isinstance(f, Exists):
        yield from iter_subformulas(f.body)
