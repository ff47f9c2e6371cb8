"""Finite meet-semilattices, their filters, and maps from the filter space to 2.

Maps ``Filt(S) -> {0, 1}`` are bitmasks over the list of filters. Opens of
the filter space are bitmasks as well, generated by the subbasic sets
``B_a = {F : a in F}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, permutations, product as cartesian
from typing import Iterator, Sequence

from .errors import PreconditionError


@dataclass(frozen=True)
class MeetSemilattice:
    elements: tuple
    leq: frozenset  # pairs (a, b) with a <= b

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "leq", frozenset(map(tuple, self.leq)) | {(a, a) for a in self.elements})
        self.validate()

    def validate(self):
        els, le = self.elements, self.leq
        if not els:
            raise PreconditionError("a meet-semilattice with top is non-empty")
        if len(set(els)) != len(els):
            raise PreconditionError("duplicate elements")
        for a, b in le:
            if a not in els or b not in els:
                raise PreconditionError(f"order mentions unknown element in ({a}, {b})")
            if a != b and (b, a) in le:
                raise PreconditionError("order is not antisymmetric")
        for a, b in le:
            for c in els:
                if (b, c) in le and (a, c) not in le:
                    raise PreconditionError("order is not transitive")
        self.top
        for a in els:
            for b in els:
                self.meet(a, b)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]], names: Sequence = None) -> "MeetSemilattice":
        """``matrix[i][j]`` is truthy iff element i <= element j."""
        n = len(matrix)
        names = tuple(names) if names is not None else tuple(range(n))
        return cls(names, frozenset((names[i], names[j]) for i in range(n) for j in range(n) if matrix[i][j]))

    @classmethod
    def from_json(cls, text: str) -> "MeetSemilattice":
        data = json.loads(text)
        if isinstance(data, dict):
            return cls.from_matrix(data["leq"], data.get("elements"))
        return cls.from_matrix(data)

    def to_matrix(self) -> list:
        return [[int((a, b) in self.leq) for b in self.elements] for a in self.elements]

    def le(self, a, b) -> bool:
        return (a, b) in self.leq

    @property
    def top(self):
        tops = [t for t in self.elements if all((a, t) in self.leq for a in self.elements)]
        if not tops:
            raise PreconditionError("no top element")
        return tops[0]

    def meet(self, a, b):
        lower = [c for c in self.elements if (c, a) in self.leq and (c, b) in self.leq]
        best = [c for c in lower if all((d, c) in self.leq for d in lower)]
        if not best:
            raise PreconditionError(f"{a} and {b} have no meet")
        return best[0]

    def up(self, a) -> frozenset:
        return frozenset(b for b in self.elements if (a, b) in self.leq)

    def down(self, a) -> frozenset:
        return frozenset(b for b in self.elements if (b, a) in self.leq)


def _subsets(els):
    for r in range(len(els) + 1):
        for c in combinations(els, r):
            yield frozenset(c)


def is_filter(s: MeetSemilattice, f: frozenset) -> bool:
    if not f:
        return False
    if any(b not in f for a in f for b in s.up(a)):
        return False
    return all(s.meet(a, b) in f for a in f for b in f)


def all_filters(s: MeetSemilattice) -> list:
    """Every filter, by brute force over subsets, in a fixed order."""
    return [f for f in _subsets(s.elements) if is_filter(s, f)]


def all_ideals(s: MeetSemilattice) -> list:
    """Down-closed directed subsets; the empty set is admitted."""
    out = []
    for d in _subsets(s.elements):
        if any(b not in d for a in d for b in s.down(a)):
            continue
        if all(any(s.le(a, c) and s.le(b, c) for c in d) for a in d for b in d):
            out.append(d)
    return out


def all_downsets(s: MeetSemilattice) -> list:
    return [d for d in _subsets(s.elements) if all(b in d for a in d for b in s.down(a))]


def _bits(members) -> int:
    out = 0
    for i in members:
        out |= 1 << i
    return out


def subbasis(s: MeetSemilattice, filters: list) -> dict:
    """``a -> B_a`` as a bitmask over ``filters``."""
    return {a: _bits(i for i, f in enumerate(filters) if a in f) for a in s.elements}


def open_sets(s: MeetSemilattice, filters: list = None) -> frozenset:
    """Opens of the filter space: unions of finite intersections of the ``B_a``."""
    filters = all_filters(s) if filters is None else filters
    full = (1 << len(filters)) - 1
    basis = {full}
    frontier = set(subbasis(s, filters).values())
    while frontier:
        new = set()
        for b in frontier:
            if b not in basis:
                basis.add(b)
                new |= {b & c for c in basis}
        frontier = new - basis
    opens = {0}
    for b in basis:
        opens |= {o | b for o in opens}
    return frozenset(opens)


def continuous_maps(s: MeetSemilattice) -> frozenset:
    """Maps to the Sierpinski space, as the bitmask of filters sent to 1."""
    return open_sets(s)


def _directed_families(filters: list):
    n = len(filters)
    for mask in range(1, 1 << n):
        fam = [i for i in range(n) if mask >> i & 1]
        if all(any(filters[i] <= filters[k] and filters[j] <= filters[k] for k in fam)
               for i in fam for j in fam):
            yield fam


def dj_preserving_maps(s: MeetSemilattice) -> frozenset:
    """Monotone maps preserving the join of every directed family whose union is a filter."""
    filters = all_filters(s)
    n = len(filters)
    index = {f: i for i, f in enumerate(filters)}
    families = []
    for fam in _directed_families(filters):
        union = frozenset().union(*(filters[i] for i in fam))
        if union in index:
            families.append((fam, index[union]))
    out = set()
    for h in range(1 << n):
        val = lambda i: h >> i & 1
        if any(filters[i] <= filters[j] and val(i) > val(j) for i in range(n) for j in range(n)):
            continue
        if all(val(u) == max(val(i) for i in fam) for fam, u in families):
            out.add(h)
    return frozenset(out)


@dataclass
class StoneReport:
    size: int
    equal: bool
    filters: int
    dj_maps: int
    continuous: int
    opens: int
    ideals: int
    downsets: int
    principal_ok: bool
    only_dj: list = field(default_factory=list)
    only_continuous: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def check_equivalence(s: MeetSemilattice) -> StoneReport:
    filters = all_filters(s)
    dj = dj_preserving_maps(s)
    cont = continuous_maps(s)
    opens = open_sets(s, filters)
    # each B_a has a least member, and it is the principal filter on a
    sub = subbasis(s, filters)
    principal_ok = True
    for a, mask in sub.items():
        members = [filters[i] for i in range(len(filters)) if mask >> i & 1]
        least = [f for f in members if all(f <= g for g in members)]
        principal_ok &= least == [s.up(a)]
    principal_ok &= {s.up(a) for a in s.elements} == set(filters)
    return StoneReport(len(s.elements), dj == cont, len(filters), len(dj), len(cont), len(opens),
                       len(all_ideals(s)), len(all_downsets(s)), principal_ok,
                       sorted(dj - cont), sorted(cont - dj))


# ---------------------------------------------------------------------------
# Generation


def _canonical(n: int, leq: frozenset) -> tuple:
    best = None
    for p in permutations(range(n)):
        key = tuple(sorted((p[a], p[b]) for a, b in leq))
        if best is None or key < best:
            best = key
    return best


def all_lattices(max_size: int) -> Iterator[MeetSemilattice]:
    """Every finite meet-semilattice with top of at most ``max_size`` elements, up to isomorphism.

    These are exactly the finite lattices. Elements are ``0..n-1`` with 0 the
    bottom and ``n-1`` the top.
    """
    for n in range(1, max_size + 1):
        if n == 1:
            yield MeetSemilattice((0,), frozenset())
            continue
        mid = list(range(1, n - 1))
        pairs = [(a, b) for a in mid for b in mid if a != b]
        seen = set()
        for choice in cartesian((0, 1), repeat=len(pairs)):
            strict = {p for p, c in zip(pairs, choice) if c}
            if any((b, a) in strict for a, b in strict):
                continue
            if any((a, c) not in strict for a, b in strict for b2, c in strict if b == b2 and a != c):
                continue
            leq = set(strict) | {(a, a) for a in range(n)}
            leq |= {(0, a) for a in range(n)} | {(a, n - 1) for a in range(n)}
            key = _canonical(n, frozenset(leq))
            if key in seen:
                continue
            try:
                s = MeetSemilattice(tuple(range(n)), frozenset(leq))
            except PreconditionError:
                continue
            seen.add(key)
            yield s


def all_meet_semilattices_bruteforce(max_size: int) -> list:
    """Oracle: every partial order on ``n`` points with top and all meets, up to isomorphism."""
    out = []
    for n in range(1, max_size + 1):
        pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
        seen = set()
        for choice in cartesian((0, 1), repeat=len(pairs)):
            leq = frozenset(p for p, c in zip(pairs, choice) if c) | {(a, a) for a in range(n)}
            key = _canonical(n, leq)
            if key in seen:
                continue
            seen.add(key)
            try:
                out.append(MeetSemilattice(tuple(range(n)), leq))
            except PreconditionError:
                pass
    return out
