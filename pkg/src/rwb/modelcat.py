"""Products, directed colimits and definable-set functors on finite structures."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Mapping, Optional, Sequence

from .errors import DiagramError, NotInjective, PreconditionError, SortError
from .query import evaluate, find_homs, holds
from .structure import Homomorphism, Structure
from .syntax import FormulaInContext, Signature, dkey


def pair_name(parts: Sequence[str]) -> str:
    """Fixed pairing encoder keeping product elements inside the universe."""
    return "<" + ",".join(parts) + ">"


def product(ms: Sequence[Structure], signature: Optional[Signature] = None):
    """Cartesian product with its projections; the empty product is terminal."""
    if not ms and signature is None:
        raise SortError("the empty product needs an explicit signature")
    sig = ms[0].signature if ms else signature
    if any(m.signature != sig for m in ms):
        raise SortError("product of structures over different signatures")
    carriers, coords = {}, {}
    for s in sig.sorts:
        carriers[s] = []
        for combo in cartesian(*(m.elements(s) for m in ms)):
            name = pair_name(combo)
            carriers[s].append(name)
            coords[(s, name)] = combo
    rels = {}
    for r, sorts in sig.rel_sorts.items():
        if not ms:
            rels[r] = set(cartesian(*(carriers[s] for s in sorts)))
            continue
        rels[r] = set()
        for facts in cartesian(*(sorted(m.relations[r]) for m in ms)):
            rels[r].add(tuple(pair_name(col) for col in zip(*facts)) if sorts else ())
    funs = {}
    for f, (args, res) in sig.fun_sorts.items():
        table = {}
        for k in cartesian(*(carriers[s] for s in args)):
            comps = [coords[(s, a)] for s, a in zip(args, k)]
            table[k] = pair_name(tuple(m.functions[f][tuple(c[i] for c in comps)] for i, m in enumerate(ms)))
        funs[f] = table
    p = Structure(sig, carriers, rels, funs)
    projections = []
    for i, m in enumerate(ms):
        maps = {s: {a: coords[(s, a)][i] for a in carriers[s]} for s in sig.sorts}
        projections.append(Homomorphism(p, m, maps, check=False))
    return p, projections


# ---------------------------------------------------------------------------
# Directed diagrams


@dataclass
class DirectedDiagram:
    """Diagram over a finite directed poset.

    ``index`` lists the stages (a linear extension is expected; it fixes the
    colimit naming rule). ``leq`` holds the pairs ``(d, e)`` with ``d <= e``;
    reflexive pairs are added automatically. ``arrows[(d, e)]`` is the map
    ``M_d -> M_e``; identities may be omitted.
    """
    index: tuple
    leq: frozenset
    models: Mapping
    arrows: Mapping = field(default_factory=dict)

    def __post_init__(self):
        self.index = tuple(self.index)
        self.leq = frozenset(self.leq) | {(d, d) for d in self.index}
        arrows = dict(self.arrows)
        for d in self.index:
            arrows.setdefault((d, d), Homomorphism.identity(self.models[d]))
        self.arrows = arrows
        self.validate()

    def validate(self):
        idx = set(self.index)
        if len(idx) != len(self.index):
            raise DiagramError("duplicate stage in index")
        if not self.index:
            raise DiagramError("empty index is not directed")
        for d, e in self.leq:
            if d not in idx or e not in idx:
                raise DiagramError(f"order pair ({d}, {e}) mentions unknown stages")
            if d != e and (e, d) in self.leq:
                raise DiagramError("order is not antisymmetric")
        for d, e in self.leq:
            for e2, f in self.leq:
                if e == e2 and (d, f) not in self.leq:
                    raise DiagramError("order is not transitive")
        for d in self.index:
            for e in self.index:
                if not any((d, u) in self.leq and (e, u) in self.leq for u in self.index):
                    raise DiagramError(f"stages {d} and {e} have no upper bound: index is not directed")
        for d, e in self.leq:
            h = self.arrows.get((d, e))
            if h is None:
                raise DiagramError(f"missing arrow for {d} <= {e}")
            if h.source != self.models[d] or h.target != self.models[e] or not h.is_valid():
                raise DiagramError(f"arrow {d} <= {e} is not a homomorphism M_{d} -> M_{e}")
        for d in self.index:
            if self.arrows[(d, d)] != Homomorphism.identity(self.models[d]):
                raise DiagramError(f"arrow {d} <= {d} is not the identity")
        for d, e in self.leq:
            for e2, f in self.leq:
                if e == e2 and self.arrows[(d, e)].compose(self.arrows[(e, f)]) != self.arrows[(d, f)]:
                    raise DiagramError(f"arrows do not compose along {d} <= {e} <= {f}")

    def above(self, d) -> tuple:
        return tuple(e for e in self.index if (d, e) in self.leq)

    @property
    def signature(self):
        return self.models[self.index[0]].signature


class _UF:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            if b < a:
                a, b = b, a
            self.parent[b] = a


def directed_colimit(d: DirectedDiagram):
    """Colimit of a directed diagram with its cocone.

    Classes of ``(stage, element)`` pairs are named by their least pair in
    (index position, canonical element) order; a name clash between
    different classes of one sort is broken by suffixing ``@stage``.
    """
    sig = d.signature
    rank = {s: i for i, s in enumerate(d.index)}
    uf = _UF()
    for (a, b), h in d.arrows.items():
        for s, m in h.maps.items():
            for x, y in m.items():
                uf.union((s, rank[a], dkey(x), x), (s, rank[b], dkey(y), y))
    for st in d.index:
        for s in sig.sorts:
            for x in d.models[st].carriers[s]:
                uf.find((s, rank[st], dkey(x), x))
    classes = {}
    for node in list(uf.parent):
        classes.setdefault(uf.find(node), []).append(node)
    name_of = {}
    used = {s: set() for s in sig.sorts}
    for rep in sorted(classes, key=lambda n: (n[1], n[2], n[0])):
        s, r, _, x = rep
        name = x if x not in used[s] else f"{x}@{d.index[r]}"
        used[s].add(name)
        name_of[rep] = name
    node_name = {node: name_of[uf.find(node)] for node in uf.parent}
    carriers = {s: set() for s in sig.sorts}
    for (s, _, _, _), name in node_name.items():
        carriers[s].add(name)
    cocone = {}
    for st in d.index:
        m = d.models[st]
        maps = {s: {x: node_name[(s, rank[st], dkey(x), x)] for x in m.carriers[s]} for s in sig.sorts}
        cocone[st] = maps
    rels = {r: set() for r in sig.rel_sorts}
    funs = {f: {} for f in sig.fun_sorts}
    for st in d.index:
        m, c = d.models[st], cocone[st]
        for r, sorts in sig.rel_sorts.items():
            for t in m.relations[r]:
                rels[r].add(tuple(c[s][x] for s, x in zip(sorts, t)))
        for f, (args, res) in sig.fun_sorts.items():
            for k, v in m.functions[f].items():
                key = tuple(c[s][x] for s, x in zip(args, k))
                val = c[res][v]
                if funs[f].setdefault(key, val) != val:
                    raise DiagramError(f"function {f} is not well defined on the colimit")
    colim = Structure(sig, carriers, rels, funs)
    return colim, {st: Homomorphism(d.models[st], colim, cocone[st], check=False) for st in d.index}


# ---------------------------------------------------------------------------
# Definable-set functors


def definable_action(f: FormulaInContext, h: Homomorphism, elements: Sequence) -> tuple:
    """Action of ``h`` on the definable set of ``f``: the image tuple."""
    elements = tuple(elements)
    if not holds(f, h.source, elements):
        raise PreconditionError(f"{elements} is not in the definable set of {f}")
    return h.apply(f.sorts, elements)


@dataclass
class ColimitReport:
    bijection: bool
    stage_sizes: dict
    colimit_size: int
    classes: int
    not_well_defined: list = field(default_factory=list)
    not_injective: list = field(default_factory=list)
    not_surjective: list = field(default_factory=list)

    def to_dict(self):
        return {"bijection": self.bijection, "stage_sizes": {str(k): v for k, v in self.stage_sizes.items()},
                "colimit_size": self.colimit_size, "classes": self.classes,
                "not_well_defined": [list(map(list, w)) for w in self.not_well_defined],
                "not_injective": [list(map(list, w)) for w in self.not_injective],
                "not_surjective": [list(w) for w in self.not_surjective]}


def check_colimit_preservation(f: FormulaInContext, d: DirectedDiagram,
                               colimit=None) -> ColimitReport:
    """Compare colim_d [[f]](M_d) with [[f]](colim_d M_d) through the canonical map."""
    colim, cocone = colimit if colimit is not None else directed_colimit(d)
    rank = {s: i for i, s in enumerate(d.index)}
    stage_ext = {st: evaluate(f, d.models[st]) for st in d.index}
    uf = _UF()
    for (a, b), h in d.arrows.items():
        for t in stage_ext[a]:
            uf.union((rank[a], t), (rank[b], definable_action(f, h, t)))
    for st in d.index:
        for t in stage_ext[st]:
            uf.find((rank[st], t))
    comparison = {}
    report = ColimitReport(True, {st: len(v) for st, v in stage_ext.items()}, 0, 0)
    classes = {}
    for node in uf.parent:
        classes.setdefault(uf.find(node), []).append(node)
    for rep, members in sorted(classes.items()):
        images = {cocone[d.index[r]].apply(f.sorts, t) for r, t in members}
        if len(images) != 1:
            report.not_well_defined.append(sorted(images))
        comparison[rep] = min(images, key=lambda t: tuple(map(dkey, t)))
    target = evaluate(f, colim)
    report.colimit_size = len(target)
    report.classes = len(classes)
    seen = {}
    for rep, img in comparison.items():
        if img in seen:
            report.not_injective.append((seen[img][1], rep[1]))
        seen[img] = rep
        if img not in target:
            report.not_well_defined.append([img])
    for t in sorted(target - set(comparison.values()), key=lambda t: tuple(map(dkey, t))):
        report.not_surjective.append(t)
    report.bijection = not (report.not_well_defined or report.not_injective or report.not_surjective)
    return report


# ---------------------------------------------------------------------------
# Factorization


def factor_hom(h: Homomorphism):
    """Split an injective ``h`` as an isomorphism onto its image then an inclusion.

    The image carries exactly the images of the source facts, so the first
    factor is a genuine isomorphism and ``incl ∘ iso == h``.
    """
    if not h.is_injective():
        raise NotInjective("component maps of the homomorphism are not 1-1")
    src, tgt = h.source, h.target
    sig = src.signature
    carriers = {s: set(h.maps[s].values()) for s in sig.sorts}
    rels = {r: {h.apply(sorts, t) for t in src.relations[r]} for r, sorts in sig.rel_sorts.items()}
    funs = {f: {h.apply(args, k): h.maps[res][v] for k, v in src.functions[f].items()}
            for f, (args, res) in sig.fun_sorts.items()}
    image = Structure(sig, carriers, rels, funs)
    iso = Homomorphism(src, image, h.maps)
    incl = Homomorphism(image, tgt, {s: {a: a for a in carriers[s]} for s in sig.sorts})
    return iso, incl


def isomorphism(m: Structure, n: Structure) -> Optional[Homomorphism]:
    """An isomorphism ``m -> n``, or None.

    A bijective homomorphism between finite structures with equally many
    facts per symbol reflects every fact, so it is an isomorphism.
    """
    sig = m.signature
    if any(len(m.carriers[s]) != len(n.carriers[s]) for s in sig.sorts):
        return None
    if any(len(m.relations[r]) != len(n.relations[r]) for r in sig.rel_sorts):
        return None
    for h in find_homs(m, n):
        if h.is_injective():
            return h
    return None
