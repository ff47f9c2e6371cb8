"""Recursive-descent parser for the ``.rth`` theory DSL.

Grammar (``#`` starts a line comment)::

    theory   := decl*
    decl     := 'sort' ID (',' ID)* ';'
              | 'rel' ID [ '(' [ID (',' ID)*] ')' ] ';'
              | 'fun' ID '(' [ID (',' ID)*] ')' ':' ID ';'
              | 'const' ID ':' ID ';'
              | 'axiom' [ID ':'] sequent ';'
    sequent  := context formula '|-' formula
    context  := '[' [ID ':' ID (',' ID ':' ID)*] ']'
    formula  := 'exists' ID ':' ID (',' ID ':' ID)* '.' formula
              | unit ('&' unit)*
    unit     := 'true' | '(' formula ')' | ID ['(' terms ')'] | term '=' term
              | 'exists' ...            (extends as far right as possible)
"""
from __future__ import annotations

import re
from typing import Optional

from .errors import ParseError, RegularityError, SortError
from .syntax import (TOP, And, App, Eq, Exists, FormulaInContext, Rel, Sequent,
                     Signature, Theory, Var, check_formula)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<turnstile>\|-)
  | (?P<bad>->|=>|<->|<=>|\\/|\|\||\||~|!|¬|∨|∀|→)
  | (?P<sym>[&=()\[\],:;.])
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)

_KEYWORDS = {"sort", "rel", "fun", "const", "axiom", "true", "exists"}
_NON_REGULAR = {"forall", "false", "or", "not", "implies", "iff"}


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def tokenize(text: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "bad":
            raise RegularityError(f"non-regular connective {m.group()!r}", line, col)
        elif kind == "id" and m.group() in _NON_REGULAR:
            raise RegularityError(f"non-regular connective {m.group()!r}", line, col)
        elif kind not in ("ws", "comment"):
            toks.append(_Tok("sym" if kind == "turnstile" else kind, m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class Parser:
    def __init__(self, text: str, signature: Optional[Signature] = None):
        self.toks = tokenize(text)
        self.i = 0
        self.sorts = list(signature.sorts) if signature else []
        self.rels = dict(signature.rel_sorts) if signature else {}
        self.funs = dict(signature.fun_sorts) if signature else {}
        self.axioms = []

    # -- token helpers --------------------------------------------------
    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def at(self, text):
        return self.tok.text == text and self.tok.kind != "eof"

    def expect(self, text):
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        self.i += 1

    def ident(self, what="identifier"):
        tok = self.tok
        if tok.kind != "id" or tok.text in _KEYWORDS:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text

    def sort_name(self):
        tok = self.tok
        name = self.ident("sort name")
        if name not in self.sorts:
            raise SortError(f"undeclared sort {name} (line {tok.line}, column {tok.col})")
        return name

    def signature(self) -> Signature:
        return Signature(tuple(self.sorts), tuple(self.rels.items()),
                         tuple((n, a, r) for n, (a, r) in self.funs.items()))

    # -- declarations ---------------------------------------------------
    def theory(self) -> Theory:
        while self.tok.kind != "eof":
            kw = self.tok
            if kw.text == "sort":
                self.i += 1
                while True:
                    name = self.ident("sort name")
                    if name in self.sorts:
                        raise SortError(f"duplicate sort {name} (line {kw.line})")
                    self.sorts.append(name)
                    if not self.at(","):
                        break
                    self.i += 1
                self.expect(";")
            elif kw.text == "rel":
                self.i += 1
                name = self._new_symbol()
                sorts = []
                if self.at("("):
                    sorts = self._sort_list()
                self.rels[name] = tuple(sorts)
                self.expect(";")
            elif kw.text == "fun":
                self.i += 1
                name = self._new_symbol()
                args = self._sort_list()
                self.expect(":")
                self.funs[name] = (tuple(args), self.sort_name())
                self.expect(";")
            elif kw.text == "const":
                self.i += 1
                name = self._new_symbol()
                self.expect(":")
                self.funs[name] = ((), self.sort_name())
                self.expect(";")
            elif kw.text == "axiom":
                self.i += 1
                label = None
                if self.tok.kind == "id" and self.toks[self.i + 1].text == ":":
                    label = self.ident()
                    self.i += 1
                self.axioms.append(self.sequent(label))
                self.expect(";")
            else:
                raise self.error(f"expected a declaration, found {kw.text!r}")
        return Theory(self.signature(), tuple(self.axioms))

    def _new_symbol(self):
        tok = self.tok
        name = self.ident("symbol name")
        if name in self.rels or name in self.funs:
            raise SortError(f"duplicate symbol {name} (line {tok.line}, column {tok.col})")
        return name

    def _sort_list(self):
        self.expect("(")
        sorts = []
        if not self.at(")"):
            sorts.append(self.sort_name())
            while self.at(","):
                self.i += 1
                sorts.append(self.sort_name())
        self.expect(")")
        return sorts

    # -- formulas -------------------------------------------------------
    def context(self):
        self.expect("[")
        ctx = []
        if not self.at("]"):
            while True:
                tok = self.tok
                name = self.ident("variable")
                if name in self.funs or name in self.rels:
                    raise SortError(f"variable {name} shadows a symbol (line {tok.line})")
                if any(n == name for n, _ in ctx):
                    raise SortError(f"duplicate context variable {name} (line {tok.line})")
                self.expect(":")
                ctx.append((name, self.sort_name()))
                if not self.at(","):
                    break
                self.i += 1
        self.expect("]")
        return tuple(ctx)

    def sequent(self, name=None) -> Sequent:
        ctx = self.context()
        env = dict(ctx)
        lhs = self.formula(env)
        self.expect("|-")
        rhs = self.formula(env)
        return Sequent(ctx, lhs, rhs, name)

    def formula_in_context(self) -> FormulaInContext:
        ctx = self.context()
        body = self.formula(dict(ctx))
        return FormulaInContext(ctx, body)

    def formula(self, env):
        left = self.unit(env)
        while self.at("&"):
            self.i += 1
            left = And(left, self.unit(env))
        return left

    def unit(self, env):
        tok = self.tok
        if tok.text == "exists" and tok.kind == "id":
            self.i += 1
            binders = []
            while True:
                v = self.ident("variable")
                self.expect(":")
                binders.append((v, self.sort_name()))
                if not self.at(","):
                    break
                self.i += 1
            self.expect(".")
            inner = dict(env)
            inner.update(binders)
            body = self.formula(inner)
            for v, s in reversed(binders):
                body = Exists(v, s, body)
            return body
        if tok.text == "true" and tok.kind == "id":
            self.i += 1
            return TOP
        if self.at("("):
            self.i += 1
            f = self.formula(env)
            self.expect(")")
            return f
        if tok.kind == "id" and tok.text in self.rels and tok.text not in env:
            self.i += 1
            args = self._args(env) if self.at("(") else ()
            f = Rel(tok.text, args)
            self._check(f, env, tok)
            return f
        left = self.term(env)
        if not self.at("="):
            raise self.error("expected '=' after term")
        self.i += 1
        right = self.term(env)
        f = Eq(left, right)
        self._check(f, env, tok)
        return f

    def _check(self, f, env, tok):
        try:
            check_formula(f, env, self.signature())
        except SortError as e:
            raise SortError(f"{e} (line {tok.line}, column {tok.col})") from None

    def _args(self, env):
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.term(env))
            while self.at(","):
                self.i += 1
                args.append(self.term(env))
        self.expect(")")
        return tuple(args)

    def term(self, env):
        tok = self.tok
        name = self.ident("term")
        if name in env:
            if self.at("("):
                raise self.error(f"variable {name} applied as a function", tok)
            return Var(name)
        if name in self.funs:
            args = self._args(env) if self.at("(") else ()
            return App(name, args)
        raise SortError(f"unknown variable or function {name} (line {tok.line}, column {tok.col})")

    def done(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected trailing input {self.tok.text!r}")


def parse_theory(text: str) -> Theory:
    return Parser(text).theory()


def parse_formula(text: str, signature: Signature) -> FormulaInContext:
    """Parse ``[x:A, ...] body`` against ``signature``."""
    p = Parser(text, signature)
    f = p.formula_in_context()
    p.done()
    return f


def parse_sequent(text: str, signature: Signature) -> Sequent:
    p = Parser(text, signature)
    s = p.sequent()
    p.done()
    return s
