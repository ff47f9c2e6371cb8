"""Pretty-printer for the theory DSL; output re-parses to an identical value."""
from __future__ import annotations

from .syntax import And, App, Eq, Exists, FormulaInContext, Rel, Sequent, Theory, Top, Var


def format_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.fn
    return f"{t.fn}({', '.join(format_term(a) for a in t.args)})"


def format_formula(f) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Rel):
        if not f.args:
            return f.name
        return f"{f.name}({', '.join(format_term(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{format_term(f.left)} = {format_term(f.right)}"
    if isinstance(f, Exists):
        return f"exists {f.var}:{f.sort}. {format_formula(f.body)}"
    if isinstance(f, And):
        left = format_formula(f.left)
        if isinstance(f.left, Exists):
            left = f"({left})"
        right = format_formula(f.right)
        if isinstance(f.right, (And, Exists)):
            right = f"({right})"
        return f"{left} & {right}"
    raise TypeError(f"not a regular formula: {f!r}")


def format_context(ctx) -> str:
    return "[" + ", ".join(f"{n}:{s}" for n, s in ctx) + "]"


def format_fic(f: FormulaInContext) -> str:
    return f"{format_context(f.context)} {format_formula(f.body)}"


def format_sequent(s: Sequent) -> str:
    return f"{format_context(s.context)} {format_formula(s.lhs)} |- {format_formula(s.rhs)}"


def format_theory(t: Theory) -> str:
    sig = t.signature
    lines = [f"sort {s};" for s in sig.sorts]
    for name, sorts in sig.relations:
        lines.append(f"rel {name}({', '.join(sorts)});" if sorts else f"rel {name};")
    for name, args, res in sig.functions:
        if args:
            lines.append(f"fun {name}({', '.join(args)}): {res};")
        else:
            lines.append(f"const {name}: {res};")
    for ax in t.axioms:
        label = f"{ax.name}: " if ax.name else ""
        lines.append(f"axiom {label}{format_sequent(ax)};")
    return "\n".join(lines) + "\n"
