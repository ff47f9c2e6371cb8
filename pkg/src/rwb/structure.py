"""Finite many-sorted structures over named elements, and homomorphisms."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from .errors import SortError
from .syntax import Signature, dkey


def _freeze_carriers(sig, carriers):
    out = {}
    for s in sig.sorts:
        out[s] = frozenset(carriers.get(s, ()))
    extra = set(carriers) - set(sig.sorts)
    if extra:
        raise SortError(f"carriers for undeclared sorts {sorted(extra)}")
    return MappingProxyType(out)


class Structure:
    """A finite Sigma-structure. Treat as immutable.

    ``functions`` maps each function symbol to a dict from argument tuples to
    results; nullary symbols (constants) use the empty tuple as key.
    """

    def __init__(self, signature: Signature, carriers: Mapping, relations: Optional[Mapping] = None,
                 functions: Optional[Mapping] = None, check: bool = True):
        relations = relations or {}
        functions = functions or {}
        self.signature = signature
        self.carriers = _freeze_carriers(signature, carriers)
        rels = {}
        for name in signature.rel_sorts:
            rels[name] = frozenset(tuple(t) for t in relations.get(name, ()))
        funs = {}
        for name in signature.fun_sorts:
            funs[name] = MappingProxyType({tuple(k): v for k, v in dict(functions.get(name, {})).items()})
        unknown = (set(relations) - set(rels)) | (set(functions) - set(funs))
        if unknown:
            raise SortError(f"unknown symbols {sorted(unknown)}")
        self.relations = MappingProxyType(rels)
        self.functions = MappingProxyType(funs)
        if check:
            self.validate()

    def validate(self):
        sig = self.signature
        for name, sorts in sig.rel_sorts.items():
            for tup in self.relations[name]:
                if len(tup) != len(sorts) or any(a not in self.carriers[s] for a, s in zip(tup, sorts)):
                    raise SortError(f"fact {name}{tup} is not sort-correct")
        for name, (args, res) in sig.fun_sorts.items():
            table = self.functions[name]
            domain = product_tuples([self.elements(s) for s in args])
            if set(table) != set(domain):
                raise SortError(f"function {name} is not total on its carriers")
            for k, v in table.items():
                if v not in self.carriers[res]:
                    raise SortError(f"function {name}{k} = {v} leaves sort {res}")

    # -- views -----------------------------------------------------------
    def elements(self, sort: str) -> tuple:
        return self._sorted_carriers[sort]

    @cached_property
    def _sorted_carriers(self):
        return {s: tuple(sorted(c, key=dkey)) for s, c in self.carriers.items()}

    @cached_property
    def universe(self) -> tuple:
        """All element names, in canonical order."""
        names = set()
        for c in self.carriers.values():
            names |= c
        return tuple(sorted(names, key=dkey))

    def size(self) -> int:
        return sum(len(c) for c in self.carriers.values())

    def graph(self, fn: str) -> frozenset:
        return frozenset(k + (v,) for k, v in self.functions[fn].items())

    @cached_property
    def key(self):
        return (
            self.signature,
            tuple((s, tuple(sorted(c, key=dkey))) for s, c in self.carriers.items()),
            tuple((r, tuple(sorted(t, key=lambda x: tuple(map(dkey, x))))) for r, t in self.relations.items()),
            tuple((f, tuple(sorted(((k, v) for k, v in t.items()), key=lambda kv: tuple(map(dkey, kv[0]))))) for f, t in self.functions.items()),
        )

    def __eq__(self, other):
        return isinstance(other, Structure) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Structure({self.to_dict()!r})"

    def __reduce__(self):
        return (Structure.from_dict, (self.signature, self.to_dict()))

    @cached_property
    def indexed(self) -> "Indexed":
        return Indexed(self)

    # -- derived structures ----------------------------------------------
    def rename(self, mapping: Mapping) -> "Structure":
        """Apply an injective renaming of element names (missing names are kept)."""
        r = lambda a: mapping.get(a, a)
        return Structure(
            self.signature,
            {s: {r(a) for a in c} for s, c in self.carriers.items()},
            {n: {tuple(map(r, t)) for t in ts} for n, ts in self.relations.items()},
            {n: {tuple(map(r, k)): r(v) for k, v in t.items()} for n, t in self.functions.items()},
        )

    def relationalized(self, graph_names: Mapping) -> "Structure":
        """View with each function replaced by its graph relation."""
        sig = self.signature
        rels = list(sig.relations)
        for f, (args, res) in sig.fun_sorts.items():
            rels.append((graph_names[f], args + (res,)))
        rsig = Signature(sig.sorts, tuple(rels), ())
        relations = dict(self.relations)
        for f in sig.fun_sorts:
            relations[graph_names[f]] = self.graph(f)
        return Structure(rsig, self.carriers, relations)

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "carriers": {s: list(self.elements(s)) for s in self.signature.sorts},
            "relations": {r: [list(t) for t in sorted(ts, key=lambda x: tuple(map(dkey, x)))]
                          for r, ts in self.relations.items()},
            "functions": {f: [[list(k), v] for k, v in sorted(t.items(), key=lambda kv: tuple(map(dkey, kv[0])))]
                          for f, t in self.functions.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, signature: Signature, data: Mapping) -> "Structure":
        funs = {f: {tuple(k): v for k, v in entries} for f, entries in data.get("functions", {}).items()}
        return cls(signature, data.get("carriers", {}),
                   {r: [tuple(t) for t in ts] for r, ts in data.get("relations", {}).items()}, funs)

    @classmethod
    def from_json(cls, signature: Signature, text: str) -> "Structure":
        return cls.from_dict(signature, json.loads(text))

    def describe(self) -> str:
        lines = []
        for s in self.signature.sorts:
            lines.append(f"  {s} = {{{', '.join(self.elements(s))}}}")
        for r, ts in self.relations.items():
            body = ", ".join("(" + ",".join(t) + ")" for t in sorted(ts, key=lambda x: tuple(map(dkey, x))))
            lines.append(f"  {r} = {{{body}}}")
        for f, t in self.functions.items():
            body = ", ".join(f"{f}({','.join(k)})={v}" for k, v in sorted(t.items(), key=lambda kv: tuple(map(dkey, kv[0]))))
            lines.append(f"  {f}: {body}")
        return "\n".join(lines)


def product_tuples(lists: Sequence) -> list:
    out = [()]
    for lst in lists:
        out = [t + (x,) for t in out for x in lst]
    return out


class Indexed:
    """Integer encoding of a structure used by the search kernel."""

    def __init__(self, m: Structure):
        self.names = m.universe
        self.ids = {n: i for i, n in enumerate(self.names)}
        ids = self.ids
        self.carriers = {s: tuple(ids[a] for a in m.elements(s)) for s in m.signature.sorts}
        self.rel = {r: frozenset(tuple(ids[a] for a in t) for t in ts) for r, ts in m.relations.items()}
        self.fun = {f: frozenset(tuple(ids[a] for a in k) + (ids[v],) for k, v in t.items())
                    for f, t in m.functions.items()}

    def table(self, kind: str, name: str) -> frozenset:
        return self.rel[name] if kind == "rel" else self.fun[name]


# ---------------------------------------------------------------------------


class Homomorphism:
    """Sort-indexed family of maps between two structures. Treat as immutable."""

    def __init__(self, source: Structure, target: Structure, maps: Mapping, check: bool = True):
        self.source = source
        self.target = target
        self.maps = MappingProxyType({s: MappingProxyType(dict(maps.get(s, {}))) for s in source.signature.sorts})
        if check and not self.is_valid():
            raise SortError("maps do not form a homomorphism")

    def __call__(self, sort: str, a: str) -> str:
        return self.maps[sort][a]

    def apply(self, sorts: Sequence, elements: Sequence) -> tuple:
        return tuple(self.maps[s][a] for s, a in zip(sorts, elements))

    def is_valid(self) -> bool:
        src, tgt = self.source, self.target
        sig = src.signature
        for s in sig.sorts:
            m = self.maps[s]
            if set(m) != src.carriers[s] or any(v not in tgt.carriers[s] for v in m.values()):
                return False
        for r, sorts in sig.rel_sorts.items():
            rt = tgt.relations[r]
            for t in src.relations[r]:
                if self.apply(sorts, t) not in rt:
                    return False
        for f, (args, res) in sig.fun_sorts.items():
            ft = tgt.functions[f]
            for k, v in src.functions[f].items():
                if ft.get(self.apply(args, k)) != self.maps[res][v]:
                    return False
        return True

    def compose(self, after: "Homomorphism") -> "Homomorphism":
        """``after`` ∘ ``self``."""
        maps = {s: {a: after.maps[s][b] for a, b in m.items()} for s, m in self.maps.items()}
        return Homomorphism(self.source, after.target, maps, check=False)

    def is_injective(self) -> bool:
        return all(len(set(m.values())) == len(m) for m in self.maps.values())

    @classmethod
    def identity(cls, m: Structure) -> "Homomorphism":
        return cls(m, m, {s: {a: a for a in c} for s, c in m.carriers.items()}, check=False)

    @cached_property
    def key(self):
        return (self.source, self.target,
                tuple((s, tuple(sorted(m.items(), key=lambda kv: dkey(kv[0])))) for s, m in self.maps.items()))

    def __eq__(self, other):
        return isinstance(other, Homomorphism) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Homomorphism({ {s: dict(m) for s, m in self.maps.items()} !r})"

    def to_dict(self) -> dict:
        return {s: {a: m[a] for a in sorted(m, key=dkey)} for s, m in self.maps.items()}

    def __reduce__(self):
        return (Homomorphism, (self.source, self.target, self.to_dict(), False))
