"""Symbolically presented opens on model, homomorphism and sheaf spaces.

Opens are never turned into point sets. A basic open of the model space is a
formula-in-context with an element tuple, ``M`` lies in it when the tuple
satisfies the formula in ``M``. Boxes on the homomorphism space add a
domain and a codomain condition and a list of preserved pairs. Basic opens
of the definable sheaf of ``⌜x.φ⌝`` carry a side formula over ``x`` plus
extra variables.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .chase import Disproved, Unknown, chase, default_budget, entails
from .errors import ArityError, BudgetExhausted, NotFunctional, PreconditionError, SortError
from .modelcat import DirectedDiagram, definable_action
from .query import evaluate, find_homs, holds, tuple_seed
from .structure import Homomorphism, Structure
from .syntax import (Eq, FormulaInContext, Rel, Sequent, Signature, TOP, Theory, App, Var,
                     all_var_names, conj, exists_all, reduce_presentation, substitute)


def _fresh(prefix: str, count: int, taken: set) -> list:
    out, i = [], 0
    while len(out) < count:
        name = f"{prefix}{i}"
        if name not in taken:
            out.append(name)
            taken.add(name)
        i += 1
    return out


def _taken(*fics: FormulaInContext) -> set:
    names = set()
    for f in fics:
        names |= set(f.names) | all_var_names(f.body)
    return names


def _rename_to(f: FormulaInContext, names: Sequence) -> FormulaInContext:
    """Rename the context of ``f`` positionally to ``names`` (which must be distinct)."""
    if len(names) != len(f.context):
        raise ArityError("renaming of the wrong length")
    return substitute(f, dict(zip(f.names, names)))


# ---------------------------------------------------------------------------
# Model space


@dataclass(frozen=True)
class PresentedOpen:
    formula: FormulaInContext
    tuple: tuple

    def __post_init__(self):
        object.__setattr__(self, "tuple", tuple(self.tuple))
        if len(self.tuple) != len(self.formula.context):
            raise ArityError(f"tuple {self.tuple} does not match context of length {len(self.formula.context)}")

    def reduced(self) -> "PresentedOpen":
        return PresentedOpen(*reduce_presentation(self.formula, self.tuple))

    def to_dict(self) -> dict:
        return {"formula": str(self.formula), "tuple": list(self.tuple)}

    def __str__(self):
        return f"<{self.formula}, ({', '.join(self.tuple)})>"


def model_in_open(m: Structure, o: PresentedOpen) -> bool:
    o.formula.check(m.signature)
    return holds(o.formula, m, o.tuple)


@dataclass(frozen=True)
class SortClause:
    sort: str
    element: str


@dataclass(frozen=True)
class RelClause:
    relation: str
    elements: tuple = ()


@dataclass(frozen=True)
class FunClause:
    function: str
    args: tuple
    value: str


def subbasic_to_formula(item, sig: Signature) -> PresentedOpen:
    """Atomic presented open with the same extension as a subbasic clause."""
    if isinstance(item, SortClause):
        if item.sort not in sig.sorts:
            raise SortError(f"unknown sort {item.sort}")
        return PresentedOpen(FormulaInContext((("x", item.sort),), TOP), (item.element,))
    if isinstance(item, RelClause):
        sorts = sig.rel_sorts[item.relation]
        names = [f"x{i}" for i in range(len(sorts))]
        f = FormulaInContext(tuple(zip(names, sorts)), Rel(item.relation, tuple(map(Var, names))))
        return PresentedOpen(f, tuple(item.elements))
    if isinstance(item, FunClause):
        args, res = sig.fun_sorts[item.function]
        names = [f"x{i}" for i in range(len(args))]
        ctx = tuple(zip(names, args)) + (("y", res),)
        f = FormulaInContext(ctx, Eq(App(item.function, tuple(map(Var, names))), Var("y")))
        return PresentedOpen(f, tuple(item.args) + (item.value,))
    raise TypeError(f"not a subbasic clause: {item!r}")


def subbasic_contains(m: Structure, item) -> bool:
    """Direct reading of a subbasic clause, independent of formula evaluation."""
    sig = m.signature
    if isinstance(item, SortClause):
        return item.element in m.carriers[item.sort]
    if isinstance(item, RelClause):
        return tuple(item.elements) in m.relations[item.relation]
    if isinstance(item, FunClause):
        args, _ = sig.fun_sorts[item.function]
        if any(a not in m.carriers[s] for s, a in zip(args, item.args)):
            return False
        return m.functions[item.function].get(tuple(item.args)) == item.value
    raise TypeError(f"not a subbasic clause: {item!r}")


def intersect(*opens: PresentedOpen) -> PresentedOpen:
    """Finite intersection as one presentation: contexts renamed apart, bodies conjoined, then reduced."""
    if not opens:
        return PresentedOpen(FormulaInContext((), TOP), ())
    taken = _taken(*(o.formula for o in opens))
    ctx, bodies, tup = [], [], []
    for k, o in enumerate(opens):
        names = _fresh(f"u{k}_", len(o.formula.context), taken)
        g = _rename_to(o.formula, names)
        ctx += list(g.context)
        bodies.append(g.body)
        tup += list(o.tuple)
    return PresentedOpen(*reduce_presentation(FormulaInContext(tuple(ctx), conj(*bodies)), tup))


@dataclass(frozen=True)
class OpenUnion:
    """Finite union of presented opens (no complements: the topology is not Boolean)."""
    parts: tuple = ()

    def contains(self, m: Structure) -> bool:
        return any(model_in_open(m, o) for o in self.parts)


# ---------------------------------------------------------------------------
# Homomorphism space


TRIVIAL = PresentedOpen(FormulaInContext((), TOP), ())


@dataclass(frozen=True)
class HomOpenBox:
    domain: PresentedOpen = TRIVIAL
    preservation: tuple = ()   # (b, c, sort) triples
    codomain: PresentedOpen = TRIVIAL

    def __post_init__(self):
        object.__setattr__(self, "preservation", tuple(tuple(p) for p in self.preservation))
        for p in self.preservation:
            if len(p) != 3:
                raise ArityError(f"preservation entry {p} is not (element, image, sort)")

    def to_dict(self) -> dict:
        return {"domain": self.domain.to_dict(), "codomain": self.codomain.to_dict(),
                "preservation": [list(p) for p in self.preservation]}


def hom_in_box(h: Homomorphism, box: HomOpenBox) -> bool:
    if not model_in_open(h.source, box.domain) or not model_in_open(h.target, box.codomain):
        return False
    for b, c, s in box.preservation:
        if b not in h.source.carriers[s] or h.maps[s][b] != c:
            return False
    return True


# ---------------------------------------------------------------------------
# Definable sheaves


@dataclass(frozen=True)
class SheafOpen:
    """``{(M, a) : (a, b) in [[x,y. φ ∧ ψ]]^M}`` for base ``φ`` and side ``ψ``."""
    base: FormulaInContext
    side: FormulaInContext
    tuple: tuple
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tuple", tuple(self.tuple))
        k = len(self.base.context)
        if self.side.context[:k] != self.base.context:
            raise SortError("side formula must extend the base context")
        if len(self.side.context) - k != len(self.tuple):
            raise ArityError("tuple does not match the extra side variables")

    @property
    def combined(self) -> FormulaInContext:
        return FormulaInContext(self.side.context, conj(self.base.body, self.side.body))

    def to_dict(self) -> dict:
        return {"base": str(self.base), "side": str(self.side), "tuple": list(self.tuple)}


def point_in_sheaf_open(m: Structure, a: Sequence, o: SheafOpen) -> bool:
    return holds(o.combined, m, tuple(a) + o.tuple)


def sheaf_points(f: FormulaInContext, models: Iterable[Structure]):
    """All points ``(M, a)`` of the definable sheaf of ``f`` over the given models."""
    for m in models:
        for a in sorted(evaluate(f, m)):
            yield m, a


@dataclass(frozen=True)
class SyntacticMorphism:
    """``⌜x,y.σ⌝ : ⌜x.φ⌝ -> ⌜y.ψ⌝``; the graph context lists x then y."""
    source: FormulaInContext
    target: FormulaInContext
    graph: FormulaInContext

    def __post_init__(self):
        k = len(self.source.context)
        sorts = self.graph.sorts
        if sorts[:k] != self.source.sorts or sorts[k:] != self.target.sorts:
            raise SortError("graph context must be the source sorts followed by the target sorts")

    @property
    def xs(self):
        return self.graph.names[:len(self.source.context)]

    @property
    def ys(self):
        return self.graph.names[len(self.source.context):]

    def apply(self, m: Structure, a: Sequence) -> tuple:
        a = tuple(a)
        images = sorted(t[len(a):] for t in evaluate(self.graph, m) if t[:len(a)] == a)
        if len(images) != 1:
            raise NotFunctional(f"{len(images)} images for {a}")
        return images[0]


def functionality_sequents(sigma: SyntacticMorphism) -> list:
    """The three sequents making ``sigma`` a morphism: typing, totality, single-valuedness."""
    g = sigma.graph
    xs, ys = sigma.xs, sigma.ys
    sx = _rename_to(sigma.source, xs)
    taken = _taken(g, sigma.source, sigma.target)
    ty = _rename_to(sigma.target, ys)
    typing = Sequent(g.context, g.body, conj(sx.body, ty.body), "typing")
    total = Sequent(sx.context, sx.body, exists_all(g.context[len(xs):], g.body), "total")
    ys2 = _fresh("w", len(ys), taken)
    g2 = substitute(g, dict(zip(ys, ys2)))
    ctx = g.context + tuple(zip(ys2, sigma.target.sorts))
    single = Sequent(ctx, conj(g.body, g2.body), conj(*(Eq(Var(a), Var(b)) for a, b in zip(ys, ys2))), "single-valued")
    return [typing, total, single]


def check_functional(sigma: SyntacticMorphism, t: Theory, budget: Optional[int] = None) -> dict:
    """Entailment verdict for each functionality sequent; raises NotFunctional on a disproof."""
    out = {}
    for s in functionality_sequents(sigma):
        v = entails(t, s, budget)
        if isinstance(v, Disproved):
            raise NotFunctional(f"{s.name} fails: {s} (witness {v.witness})")
        out[s.name] = v
    return out


def inverse_image_open(sigma: SyntacticMorphism, o: SheafOpen, t: Optional[Theory] = None,
                       budget: Optional[int] = None) -> SheafOpen:
    """Preimage of ``⟨⌜y,z.ξ⌝, c⟩`` under ``sigma``: ``⟨⌜x,z. ∃y σ ∧ ξ⌝, c⟩``.

    With a theory, functionality is checked first; Unknown verdicts are kept
    in ``notes`` of the result.
    """
    notes = ()
    if t is not None:
        verdicts = check_functional(sigma, t, budget)
        notes = tuple(f"{k}: Unknown" for k, v in verdicts.items() if isinstance(v, Unknown))
    if o.base.sorts != sigma.target.sorts:
        raise SortError("open is not over the target of the morphism")
    xs = sigma.source.names
    taken = _taken(sigma.graph, o.side, sigma.source) | set(xs)
    ys = _fresh("y", len(sigma.ys), taken)
    zs = _fresh("z", len(o.tuple), taken)
    g = _rename_to(sigma.graph, list(xs) + ys)
    xi = _rename_to(o.side, ys + zs)
    zctx = xi.context[len(ys):]
    body = exists_all(tuple(zip(ys, sigma.target.sorts)), conj(g.body, xi.body))
    side = FormulaInContext(sigma.source.context + zctx, body)
    return SheafOpen(sigma.source, side, o.tuple, notes)


# ---------------------------------------------------------------------------
# Action images


@dataclass(frozen=True)
class _ImageParts:
    v: SheafOpen
    witness_formula: FormulaInContext  # ⌜x,y1,y2,y4. χ ∧ ψ ∧ φ ∧ ξ⌝
    witness_names: tuple               # b1 * b2 * b4
    n_x: int
    n_y1: int
    n_y2: int


def _action_parts(box: HomOpenBox, o: SheafOpen) -> _ImageParts:
    phi = o.base
    psi, theta = box.domain.formula, box.codomain.formula
    b1, b3, b4 = box.domain.tuple, box.codomain.tuple, o.tuple
    b2 = tuple(p[0] for p in box.preservation)
    c = tuple(p[1] for p in box.preservation)
    s2 = tuple(p[2] for p in box.preservation)
    xs = phi.names
    taken = _taken(phi, psi, theta, o.side) | set(xs)
    y1 = _fresh("p", len(b1), taken)
    y2 = _fresh("q", len(b2), taken)
    y3 = _fresh("r", len(b3), taken)
    y4 = _fresh("s", len(b4), taken)
    psi_r = _rename_to(psi, y1)
    theta_r = _rename_to(theta, y3)
    xi_r = _rename_to(o.side, list(xs) + y4)
    s4 = o.side.sorts[len(xs):]
    # χ: identities among b1 * b2 * b4 at matching sorts
    listed = list(zip(y1 + y2 + y4, psi.sorts + s2 + s4, b1 + b2 + b4))
    first, chi = {}, []
    for v, s, b in listed:
        if (b, s) in first:
            chi.append(Eq(Var(first[(b, s)]), Var(v)))
        else:
            first[(b, s)] = v
    chi_body = conj(*chi)
    c1 = tuple(zip(y1, psi.sorts))
    c2 = tuple(zip(y2, s2))
    c3 = tuple(zip(y3, theta.sorts))
    c4 = tuple(zip(y4, s4))
    body = exists_all(c1 + c4, conj(chi_body, psi_r.body, theta_r.body, xi_r.body))
    v = SheafOpen(phi, FormulaInContext(phi.context + c2 + c3, body), c + b3)
    wf = FormulaInContext(phi.context + c1 + c2 + c4, conj(chi_body, psi_r.body, phi.body, xi_r.body))
    return _ImageParts(v, wf, b1 + b2 + b4, len(xs), len(b1), len(b2))


def action_image_open(box: HomOpenBox, o: SheafOpen) -> SheafOpen:
    """``V = ⟨⌜x,y2,y3. ∃y1,y4. χ∧ψ∧ϑ∧ξ⌝, c*b3⟩``, containing the action image of ``box × o``."""
    return _action_parts(box, o).v


@dataclass
class ActionImageReport:
    forward_ok: bool
    forward_checked: int
    converse: str          # "verified" | "conditional" | "failed" | "empty"
    converse_checked: int = 0
    witnesses: list = field(default_factory=list)

    def to_dict(self):
        return {"forward_ok": self.forward_ok, "forward_checked": self.forward_checked,
                "converse": self.converse, "converse_checked": self.converse_checked,
                "witnesses": self.witnesses}


def universal_preimage_model(box: HomOpenBox, o: SheafOpen, t: Theory, budget: Optional[int] = None):
    """A model ``M`` with tuple ``a`` such that ``(h, (M, a))`` is in ``box × o`` for suitable ``h``.

    Built by chasing ``⌜x,y1,y2,y4. χ∧ψ∧φ∧ξ⌝`` and naming the generic
    elements of ``y1, y2, y4`` by the box elements. Returns ``(M, a)`` or
    None when the box is empty; raises BudgetExhausted when the chase does
    not terminate.
    """
    parts = _action_parts(box, o)
    res = chase(parts.witness_formula, t, budget)
    if not res.terminated:
        raise BudgetExhausted(res.steps)
    gen = res.generic
    k = parts.n_x
    sorts = parts.witness_formula.sorts
    mapping = {}
    for (s, g), b in zip(zip(sorts[k:], gen[k:]), parts.witness_names):
        if mapping.setdefault(g, b) != b:
            return None   # the theory forces two listed elements together: U is empty
    if len(set(mapping.values())) != len(mapping):
        return None
    taken = set(mapping.values())
    for g in res.model.universe:
        if g not in mapping:
            new = g
            while new in taken:
                new = new + "'"
            mapping[g] = new
            taken.add(new)
    m = res.model.rename(mapping)
    return m, tuple(mapping[g] for g in gen[:k]), tuple(mapping[g] for g in gen[k:])


def check_action_image(box: HomOpenBox, o: SheafOpen, t: Theory, corpus: Sequence[Structure],
                       budget: Optional[int] = None, witness_limit: int = 5) -> ActionImageReport:
    """Forward inclusion over all corpus homs; converse through the universal preimage model."""
    parts = _action_parts(box, o)
    v = parts.v
    report = ActionImageReport(True, 0, "verified")
    for m in corpus:
        pts = [a for a in sorted(evaluate(o.combined, m))]
        pts = sorted({a[:len(o.base.context)] for a in pts if a[len(o.base.context):] == o.tuple})
        if not pts or not model_in_open(m, box.domain):
            continue
        for n in corpus:
            if not model_in_open(n, box.codomain):
                continue
            seed = {}
            ok = True
            for b, c, s in box.preservation:
                if b not in m.carriers[s] or seed.setdefault((s, b), c) != c:
                    ok = False
            if not ok:
                continue
            for h in find_homs(m, n, seed):
                for a in pts:
                    report.forward_checked += 1
                    img = definable_action(o.base, h, a)
                    if not point_in_sheaf_open(n, img, v):
                        report.forward_ok = False
                        if len(report.witnesses) < witness_limit:
                            report.witnesses.append({"kind": "forward", "point": list(a), "image": list(img)})
    try:
        built = universal_preimage_model(box, o, t, budget)
    except BudgetExhausted:
        report.converse = "conditional"
        return report
    if built is None:
        report.converse = "empty"
        return report
    um, ua, ub = built
    k1, k2 = parts.n_y1, parts.n_y2
    b2_names = ub[k1:k1 + k2]
    b2_sorts = parts.witness_formula.sorts[parts.n_x + k1: parts.n_x + k1 + k2]
    c = tuple(p[1] for p in box.preservation)
    for n in corpus:
        for pt in sorted(evaluate(v.combined, n)):
            if pt[len(o.base.context):] != v.tuple:
                continue
            mpt = pt[:len(o.base.context)]
            report.converse_checked += 1
            seed = tuple_seed(o.base.sorts + b2_sorts, ua + b2_names, mpt + c)
            if seed is None or next(find_homs(um, n, seed, limit=1), None) is None:
                report.converse = "failed"
                if len(report.witnesses) < witness_limit:
                    report.witnesses.append({"kind": "converse", "point": list(mpt), "model": n.to_dict()})
    return report


# ---------------------------------------------------------------------------
# Sections


@dataclass(frozen=True)
class Section:
    """``N ↦ (N, a)`` on the open ``⟨f, a⟩`` (in reduced form)."""
    formula: FormulaInContext
    domain: PresentedOpen
    tuple: tuple

    def value(self, n: Structure) -> tuple:
        if not model_in_open(n, self.domain):
            raise PreconditionError("model outside the domain of the section")
        return self.tuple


def wellbehaved_section(f: FormulaInContext, point) -> Section:
    m, a = point
    a = tuple(a)
    if not holds(f, m, a):
        raise PreconditionError(f"{a} is not in the definable set of {f}")
    return Section(f, PresentedOpen(f, a).reduced(), a)


def section_violations(sec: Section, homs: Iterable[Homomorphism]) -> list:
    """Homs fixing the section tuple whose action does not send section values to section values."""
    bad = []
    for h in homs:
        if not model_in_open(h.source, sec.domain):
            continue
        if h.apply(sec.formula.sorts, sec.tuple) != sec.tuple:
            continue
        img = definable_action(sec.formula, h, sec.value(h.source))
        if not model_in_open(h.target, sec.domain) or img != sec.value(h.target):
            bad.append(h)
    return bad


# ---------------------------------------------------------------------------
# Convergence of nets along directed diagrams


def tail_index(d: DirectedDiagram, member) -> Optional[object]:
    """First stage (in index order) from which every later stage satisfies ``member``."""
    for st in d.index:
        if all(member(e) for e in d.above(st)):
            return st
    return None


def net_converges(d: DirectedDiagram, m: Structure, opens: Sequence[PresentedOpen]) -> bool:
    """Every listed open containing ``m`` eventually contains the stages."""
    for o in opens:
        if model_in_open(m, o) and tail_index(d, lambda e: model_in_open(d.models[e], o)) is None:
            return False
    return True


def hom_net_converges(d: DirectedDiagram, cocone, stage, boxes: Sequence[HomOpenBox]) -> bool:
    """The net ``e ↦ g_{stage,e}`` over stages above ``stage`` converges to the cocone map."""
    f = cocone[stage]
    ups = d.above(stage)
    for box in boxes:
        if not hom_in_box(f, box):
            continue
        if not any(all(hom_in_box(d.arrows[(stage, e)], box) for e in d.above(s0)) for s0 in ups):
            return False
    return True
