"""Concrete syntax for types and terms.

Grammar (ASCII keywords, Unicode alternatives in brackets)::

    type  ::= 'Pi' IDENT '.' type  [Π]
            | tatom ('->' type)?   [→]
    tatom ::= IDENT | '(' type ')'
    term  ::= 'lam' IDENT ':' type '.' term   [λ]
            | 'Lam' IDENT '.' term            [Λ]
            | app
    app   ::= postfix+ (term-binder)?        left associative
    postfix ::= atom ('{' type '}')*
    atom  ::= IDENT | '(' term ')'

Identifiers are runs of word characters and primes, so Greek sort names and
numerals such as ``3`` are identifiers.  Inside a type an identifier is a type
variable when bound by an enclosing ``Pi``/``Lam``, otherwise a sort.  Inside a
term it is a bound variable, else a signature constant, else a free variable
from the supplied environment.

``format_term`` output parses back to the same term (names included).
"""

from __future__ import annotations

import re
from typing import Mapping, Optional

from .errors import ParseError, UnknownConstant, UnknownSort
from .terms import (
    App,
    Arrow,
    Base,
    Const,
    Forall,
    Lam,
    Signature,
    Term,
    TVar,
    Type,
    TyApp,
    TyLam,
    Var,
    base_names,
    const_names,
    fresh_name,
    rename_var,
    term_type_substitute,
    type_names,
    type_substitute,
)

_TOKEN = re.compile(r"\s*(?:(->|→)|([(){}:.λΛΠ])|([\w']+))", re.UNICODE)

LAM = {"lam", "λ"}
TLAM = {"Lam", "Λ"}
PI = {"Pi", "Π"}
KEYWORDS = LAM | TLAM | PI


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r} at offset {pos}")
        if m.group(1):
            out.append(("->", "->"))
        elif m.group(2):
            tok = m.group(2)
            kind = {"λ": "lam", "Λ": "Lam", "Π": "Pi"}.get(tok, tok)
            out.append((kind, tok))
        else:
            word = m.group(3)
            if word in LAM:
                out.append(("lam", word))
            elif word in TLAM:
                out.append(("Lam", word))
            elif word in PI:
                out.append(("Pi", word))
            else:
                out.append(("id", word))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text, sig, env, sorts, tvars):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.env = dict(env or {})
        if sorts is None and sig is not None:
            sorts = sig.sorts
        self.sorts = None if sorts is None else set(sorts)
        self.free_tvars = set(tvars or ())

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind=None):
        if self.i >= len(self.toks):
            raise ParseError(f"unexpected end of input, expected {kind or 'token'}")
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}")
        self.i += 1
        return tok[1]

    def done(self):
        if self.i != len(self.toks):
            raise ParseError(f"trailing input at {self.toks[self.i][1]!r}")

    # types

    def type(self, tvs):
        if self.peek() == "Pi":
            self.take()
            name = self.take("id")
            self.take(".")
            return Forall(name, self.type(tvs | {name}))
        left = self.tatom(tvs)
        if self.peek() == "->":
            self.take()
            return Arrow(left, self.type(tvs))
        return left

    def tatom(self, tvs):
        if self.peek() == "(":
            self.take()
            ty = self.type(tvs)
            self.take(")")
            return ty
        name = self.take("id")
        if name in tvs or name in self.free_tvars:
            return TVar(name)
        if self.sorts is not None and name not in self.sorts:
            raise UnknownSort(name)
        return Base(name)

    # terms

    def term(self, scope, tvs):
        kind = self.peek()
        if kind == "lam":
            self.take()
            name = self.take("id")
            self.take(":")
            ty = self.type(tvs)
            self.take(".")
            inner = dict(scope)
            inner[name] = ty
            return Lam(name, ty, self.term(inner, tvs))
        if kind == "Lam":
            self.take()
            name = self.take("id")
            self.take(".")
            return TyLam(name, self.term(scope, tvs | {name}))
        return self.app(scope, tvs)

    def app(self, scope, tvs):
        head = self.postfix(scope, tvs)
        while True:
            kind = self.peek()
            if kind in ("id", "("):
                head = App(head, self.postfix(scope, tvs))
            elif kind in ("lam", "Lam"):
                return App(head, self.term(scope, tvs))
            else:
                return head

    def postfix(self, scope, tvs):
        t = self.atom(scope, tvs)
        while self.peek() == "{":
            self.take()
            ty = self.type(tvs)
            self.take("}")
            t = TyApp(t, ty)
        return t

    def atom(self, scope, tvs):
        if self.peek() == "(":
            self.take()
            t = self.term(scope, tvs)
            self.take(")")
            return t
        name = self.take("id")
        if name in scope:
            return Var(name, scope[name])
        if self.sig is not None and name in self.sig.constants:
            return Const(name, self.sig.constants[name])
        if name in self.env:
            return Var(name, self.env[name])
        raise UnknownConstant(name)


def parse_type(text: str, sig: Optional[Signature] = None, sorts=None, tvars=()) -> Type:
    """Parse a type.  Undeclared names raise UnknownSort when sorts are known."""
    p = _Parser(text, sig, None, sorts, tvars)
    ty = p.type(frozenset())
    p.done()
    return ty


def parse_term(
    text: str,
    sig: Optional[Signature] = None,
    env: Optional[Mapping] = None,
    sorts=None,
    tvars=(),
) -> Term:
    """Parse a term; ``env`` types the free variables that may occur."""
    p = _Parser(text, sig, env, sorts, tvars)
    t = p.term({}, frozenset())
    p.done()
    return t


# ---------------------------------------------------------------------------
# printing


def format_type(ty: Type, unicode: bool = False) -> str:
    arrow = " → " if unicode else " -> "
    if isinstance(ty, (Base, TVar)):
        return ty.name
    if isinstance(ty, Arrow):
        dom = format_type(ty.dom, unicode)
        if isinstance(ty.dom, (Arrow, Forall)):
            dom = f"({dom})"
        return dom + arrow + format_type(ty.cod, unicode)
    if isinstance(ty, Forall):
        var, body = ty.var, ty.body
        if var in base_names(body):
            var = fresh_name(var, base_names(body) | type_names(body))
            body = type_substitute(body, ty.var, TVar(var))
        pi = "Π" if unicode else "Pi "
        return f"{pi}{var}. {format_type(body, unicode)}"
    raise TypeError(f"not a type: {ty!r}")


def _is_atomic(t):
    if isinstance(t, (Var, Const)):
        return True
    if isinstance(t, TyApp):
        return _is_atomic(t.term)
    return False


def format_term(t: Term, unicode: bool = False) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Lam):
        if t.var in const_names(t.body):
            t = rename_var(t, fresh_name(t.var, const_names(t.body) | t.body.free_vars))
        lam = "λ" if unicode else "lam "
        return f"{lam}{t.var}:{format_type(t.var_type, unicode)}. {format_term(t.body, unicode)}"
    if isinstance(t, TyLam):
        tvar, body = t.tvar, t.body
        clash = _term_base_names(body)
        if tvar in clash:
            tvar = fresh_name(tvar, clash | body.free_tvars)
            body = term_type_substitute(body, t.tvar, TVar(tvar))
        lam = "Λ" if unicode else "Lam "
        return f"{lam}{tvar}. {format_term(body, unicode)}"
    if isinstance(t, TyApp):
        inner = format_term(t.term, unicode)
        if not _is_atomic(t.term):
            inner = f"({inner})"
        return f"{inner}{{{format_type(t.type_arg, unicode)}}}"
    if isinstance(t, App):
        spine = []
        head = t
        while isinstance(head, App):
            spine.append(head.arg)
            head = head.fn
        spine.reverse()
        parts = [format_term(head, unicode)]
        if isinstance(head, (Lam, TyLam)):
            parts[0] = f"({parts[0]})"
        for a in spine:
            s = format_term(a, unicode)
            parts.append(s if _is_atomic(a) else f"({s})")
        return " ".join(parts)
    raise TypeError(f"not a term: {t!r}")


def _term_base_names(t):
    names = set()
    if isinstance(t, (Var, Const)):
        names |= base_names(t.type)
    elif isinstance(t, App):
        names |= _term_base_names(t.fn) | _term_base_names(t.arg)
    elif isinstance(t, Lam):
        names |= base_names(t.var_type) | _term_base_names(t.body)
    elif isinstance(t, TyApp):
        names |= _term_base_names(t.term) | base_names(t.type_arg)
    elif isinstance(t, TyLam):
        names |= _term_base_names(t.body)
    return names
