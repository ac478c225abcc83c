"""Many-sorted higher-order formulas read off normal terms of type t.

Hilbert-style terms (iota, eps, eta, tau, most) stay first-class inside the
formulas; nothing is translated into ordinary quantifiers.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Optional, Union

from .errors import NonLogicalHead, TypeCheckError
from .prelude import CONNECTIVES, EQUALITY, GENERALIZED, HILBERT, NEGATION, POLY_AND, QUANTIFIERS
from .reduction import contract, head_decompose, normalize
from .syntax import format_type
from .terms import (
    PROP,
    App,
    Arrow,
    Base,
    Const,
    Forall,
    Lam,
    Signature,
    Term,
    TyApp,
    TyLam,
    Type,
    Var,
    base_names,
    bound_names,
    check_type,
    free_var_types,
    fresh_name,
)

T = Base(PROP)
CHOICE_OPERATORS = HILBERT + GENERALIZED
PRESUPPOSING = ("iota", "eps", "eta")

UNICODE_SYMBOLS = {
    "and": "∧",
    "or": "∨",
    "implies": "→",
    "not": "¬",
    "forall": "∀",
    "exists": "∃",
    "iota": "ι",
    "eps": "ε",
    "eta": "η",
    "tau": "τ",
    "most": "most ",
}
ASCII_SYMBOLS = {
    "and": "&",
    "or": "|",
    "implies": "->",
    "not": "~",
    "forall": "forall ",
    "exists": "exists ",
    "iota": "iota ",
    "eps": "eps ",
    "eta": "eta ",
    "tau": "tau ",
    "most": "most ",
}


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Atom:
    """A predicate applied to its arguments.

    The head is a constant or variable Term, or a Hilbert node when a choice
    term of higher type is itself applied.
    """

    head: Union[Term, "Hilbert"]
    type_args: tuple = ()
    args: tuple = ()


@dataclass(frozen=True)
class Connective:
    op: str
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Quant:
    q: str
    var: str
    type: Type
    body: "Formula"


@dataclass(frozen=True)
class Ind:
    """A non-propositional argument term: a name or function symbol applied."""

    head: Union[Term, "Hilbert"]
    type_args: tuple = ()
    args: tuple = ()


@dataclass(frozen=True)
class Hilbert:
    """``op{type}(pred)``: a generic element chosen by a predicate."""

    op: str
    type: Type
    pred: "Arg"


@dataclass(frozen=True)
class Abs:
    var: str
    type: Type
    body: "Arg"


Formula = Union[Atom, Connective, Not, Quant]
Arg = Union[Formula, Ind, Hilbert, Abs]


# ---------------------------------------------------------------------------
# term -> formula


def term_to_formula(term: Term, sig: Optional[Signature] = None, env=None) -> Formula:
    """Read a beta-normal term of type t as a formula.

    Quantifier arguments that are not abstractions are eta-expanded.  With a
    signature, every head constant must be declared and not defined (defined
    constants should have been unfolded by normalisation).
    """
    env = dict(free_var_types(term) if env is None else env)
    ty = check_type(None, env, term)
    if ty != T:
        raise TypeCheckError(f"a formula needs type t, got {format_type(ty)}")
    head_decompose(term)  # rejects redexes
    return _formula(term, sig, env)


def _spine(term):
    args = []
    while isinstance(term, (App, TyApp)):
        args.append(term.arg if isinstance(term, App) else term.type_arg)
        term = term.fn if isinstance(term, App) else term.term
    args.reverse()
    return term, [a for a in args if isinstance(a, Type)], [a for a in args if not isinstance(a, Type)]


def _check_head(head, sig):
    if not isinstance(head, Const) or sig is None:
        if isinstance(head, Const) and head.name == POLY_AND:
            raise NonLogicalHead(f"defined constant {head.name} must be unfolded")
        return
    if head.name not in sig.constants:
        raise NonLogicalHead(f"constant {head.name} is not in the signature")
    if head.name in sig.definitions:
        raise NonLogicalHead(f"defined constant {head.name} must be unfolded")


def _binder_body(pred, ty, env):
    """Split a predicate into a bound variable and body, eta-expanding if needed."""
    if isinstance(pred, Lam):
        return pred.var, pred.var_type, pred.body
    x = fresh_name("x", set(env) | pred.free_vars)
    return x, ty, App(pred, Var(x, ty))


def _formula(term, sig, env):
    head, tys, terms = _spine(term)
    if isinstance(head, Const):
        name = head.name
        if name in CONNECTIVES and not tys and len(terms) == 2:
            return Connective(name, _formula(terms[0], sig, env), _formula(terms[1], sig, env))
        if name == NEGATION and not tys and len(terms) == 1:
            return Not(_formula(terms[0], sig, env))
        if name in QUANTIFIERS and len(tys) == 1 and len(terms) == 1:
            var, vty, body = _binder_body(terms[0], tys[0], env)
            inner = dict(env)
            inner[var] = vty
            return Quant(name, var, vty, _formula(body, sig, inner))
    head, tys, terms = _choice_head(head, tys, terms, sig, env)
    return Atom(head, tuple(tys), tuple(_arg(a, sig, env) for a in terms))


def _arg(term, sig, env):
    if isinstance(term, Lam):
        inner = dict(env)
        inner[term.var] = term.var_type
        return Abs(term.var, term.var_type, _arg(term.body, sig, inner))
    if isinstance(term, TyLam):
        raise NonLogicalHead(f"type abstraction in argument position: {term}")
    if check_type(None, env, term) == T:
        return _formula(term, sig, env)
    head, tys, terms = _spine(term)
    head, tys, terms = _choice_head(head, tys, terms, sig, env)
    if isinstance(head, Hilbert) and not terms:
        return head
    return Ind(head, tuple(tys), tuple(_arg(a, sig, env) for a in terms))


def _choice_head(head, tys, terms, sig, env):
    """Fold ``op{A} P`` at the head of a spine into a Hilbert node."""
    if isinstance(head, Const) and head.name in CHOICE_OPERATORS and len(tys) == 1 and terms:
        return Hilbert(head.name, tys[0], _arg(terms[0], sig, env)), [], terms[1:]
    _check_head(head, sig)
    return head, tys, terms


# ---------------------------------------------------------------------------
# formula -> term


def _const(name, sig):
    from .prelude import prelude_types

    if sig is not None and name in sig.constants:
        return Const(name, sig.constants[name])
    return Const(name, prelude_types()[name])


def render(f, sig: Optional[Signature] = None) -> Term:
    """The term a formula (or argument) stands for."""
    if isinstance(f, (Atom, Ind)):
        t = render(f.head, sig) if isinstance(f.head, Hilbert) else f.head
        for ty in f.type_args:
            t = TyApp(t, ty)
        for a in f.args:
            t = App(t, render(a, sig))
        return t
    if isinstance(f, Connective):
        return App(App(_const(f.op, sig), render(f.left, sig)), render(f.right, sig))
    if isinstance(f, Not):
        return App(_const(NEGATION, sig), render(f.body, sig))
    if isinstance(f, Quant):
        return App(TyApp(_const(f.q, sig), f.type), Lam(f.var, f.type, render(f.body, sig)))
    if isinstance(f, Hilbert):
        return App(TyApp(_const(f.op, sig), f.type), render(f.pred, sig))
    if isinstance(f, Abs):
        return Lam(f.var, f.type, render(f.body, sig))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# printing


def _ascii_name(text):
    if text.isascii():
        return text
    out = []
    for ch in text:
        if ch.isascii():
            out.append(ch)
            continue
        words = unicodedata.name(ch, "u%04x" % ord(ch)).split()
        if words[:1] == ["GREEK"]:
            letter = words[-1].lower()
            out.append(letter.capitalize() if "CAPITAL" in words else letter)
        else:
            out.append("_".join(w.lower() for w in words))
    return "".join(out)


def _type_text(ty, unicode):
    text = format_type(ty, unicode)
    if not unicode:
        text = _ascii_name(text)
    if isinstance(ty, (Arrow, Forall)):
        text = f"({text})"
    return text


def _name(text, unicode):
    return text if unicode else _ascii_name(text)


def format_formula(f, unicode: bool = True) -> str:
    """Render a formula as text, Unicode by default, ASCII otherwise."""
    return _fmt(f, unicode, top=True)


def _fmt(f, u, top=False):
    sym = UNICODE_SYMBOLS if u else ASCII_SYMBOLS
    if isinstance(f, Connective):
        text = f"{_fmt(f.left, u)} {sym[f.op]} {_fmt(f.right, u)}"
        return text if top else f"({text})"
    if isinstance(f, Not):
        return f"{sym['not']}{_fmt(f.body, u)}"
    if isinstance(f, Quant):
        return f"{sym[f.q]}{_name(f.var, u)}:{_type_text(f.type, u)} {_fmt(f.body, u)}"
    if isinstance(f, Hilbert):
        if isinstance(f.pred, Abs):
            p = f.pred
            return f"{sym[f.op]}{_name(p.var, u)}:{_type_text(p.type, u)} {_fmt(p.body, u)}"
        return f"{sym[f.op].strip()}({_fmt(f.pred, u)})"
    if isinstance(f, Abs):
        lam = "λ" if u else "lam "
        return f"{lam}{_name(f.var, u)}:{_type_text(f.type, u)}. {_fmt(f.body, u, top=True)}"
    if isinstance(f, (Atom, Ind)):
        if isinstance(f.head, Hilbert):
            head = _fmt(f.head, u)
            if isinstance(f.head.pred, Abs):
                head = f"({head})"
        else:
            head = _name(f.head.name, u)
        if isinstance(f.head, Const) and f.head.name == EQUALITY and len(f.args) == 2:
            text = f"{_fmt(f.args[0], u)} = {_fmt(f.args[1], u)}"
            return text if top else f"({text})"
        if not f.args:
            return head
        return f"{head}({', '.join(_fmt(a, u, top=True) for a in f.args)})"
    raise TypeError(f"not a formula: {f!r}")


def formula_to_json(f) -> dict:
    if isinstance(f, (Atom, Ind)) and isinstance(f.head, Hilbert):
        return {
            "kind": "atom" if isinstance(f, Atom) else "term",
            "head": formula_to_json(f.head),
            "head_kind": "choice",
            "type_args": [],
            "args": [formula_to_json(a) for a in f.args],
        }
    if isinstance(f, (Atom, Ind)):
        return {
            "kind": "atom" if isinstance(f, Atom) else "term",
            "head": f.head.name,
            "head_kind": "var" if isinstance(f.head, Var) else "const",
            "head_type": format_type(f.head.type),
            "type_args": [format_type(t) for t in f.type_args],
            "args": [formula_to_json(a) for a in f.args],
        }
    if isinstance(f, Connective):
        return {"kind": "connective", "op": f.op, "left": formula_to_json(f.left), "right": formula_to_json(f.right)}
    if isinstance(f, Not):
        return {"kind": "not", "body": formula_to_json(f.body)}
    if isinstance(f, Quant):
        return {"kind": "quantifier", "q": f.q, "var": f.var, "type": format_type(f.type), "body": formula_to_json(f.body)}
    if isinstance(f, Hilbert):
        return {"kind": "choice", "op": f.op, "type": format_type(f.type), "pred": formula_to_json(f.pred)}
    if isinstance(f, Abs):
        return {"kind": "lambda", "var": f.var, "type": format_type(f.type), "body": formula_to_json(f.body)}
    raise TypeError(f"not a formula: {f!r}")


def formula_sorts(f) -> set:
    """Base sort names mentioned anywhere in a formula."""
    out = set()
    if isinstance(f, (Atom, Ind)):
        out |= formula_sorts(f.head) if isinstance(f.head, Hilbert) else base_names(f.head.type)
        for t in f.type_args:
            out |= base_names(t)
        for a in f.args:
            out |= formula_sorts(a)
    elif isinstance(f, Connective):
        out |= formula_sorts(f.left) | formula_sorts(f.right)
    elif isinstance(f, Not):
        out |= formula_sorts(f.body)
    elif isinstance(f, (Quant, Abs)):
        out |= base_names(f.type) | formula_sorts(f.body)
    elif isinstance(f, Hilbert):
        out |= base_names(f.type) | formula_sorts(f.pred)
    return out


# ---------------------------------------------------------------------------
# Hilbert operators


def _choice_parts(t):
    """``(op, type, pred)`` when ``t`` is ``op{type} pred`` for a choice operator."""
    if (
        isinstance(t, App)
        and isinstance(t.fn, TyApp)
        and isinstance(t.fn.term, Const)
        and t.fn.term.name in CHOICE_OPERATORS
    ):
        return t.fn.term.name, t.fn.type_arg, t.arg
    return None


def _walk(t, bound):
    """Subterms in pre-order with the term variables bound above them."""
    yield t, bound
    if isinstance(t, App):
        yield from _walk(t.fn, bound)
        yield from _walk(t.arg, bound)
    elif isinstance(t, Lam):
        yield from _walk(t.body, bound + ((t.var, t.var_type),))
    elif isinstance(t, TyLam):
        yield from _walk(t.body, bound)
    elif isinstance(t, TyApp):
        yield from _walk(t.term, bound)


def presupposition_terms(term: Term, sig: Optional[Signature] = None) -> list:
    """``P(op{A} P)`` for every iota/eps/eta subterm, normalised and deduplicated.

    A choice term depending on enclosing bound variables yields a presupposition
    universally closed over them.  Terms mentioning bound type variables are
    skipped.
    """
    out, seen = [], set()
    for sub, bound in _walk(term, ()):
        parts = _choice_parts(sub)
        if parts is None or parts[0] not in PRESUPPOSING:
            continue
        if sub.free_tvars - term.free_tvars:
            continue
        p = normalize(App(parts[2], sub), sig)
        for name, ty in reversed(bound):
            if name in p.free_vars:
                p = App(TyApp(_const("forall", sig), ty), Lam(name, ty, p))
        if p.key not in seen:
            seen.add(p.key)
            out.append(p)
    return out


def presuppositions(term: Term, sig: Optional[Signature] = None) -> list:
    """The presuppositions of ``term`` as formulas."""
    return [term_to_formula(p, sig) for p in presupposition_terms(term, sig)]


def typing_facts(term: Term) -> list:
    """``(choice term, type)`` judgements for the closed choice subterms."""
    out, seen = [], set()
    for sub, bound in _walk(term, ()):
        parts = _choice_parts(sub)
        if parts is None or sub.free_vars or sub.free_tvars:
            continue
        if sub.key not in seen:
            seen.add(sub.key)
            out.append((sub, parts[1]))
    return out


TAU_TO_EPS = "tau-to-eps"
EPS_TO_TAU = "eps-to-tau"
DIRECTIONS = (TAU_TO_EPS, EPS_TO_TAU)


def tau_epsilon_rewrite(term: Term, direction: str = TAU_TO_EPS, sig: Optional[Signature] = None) -> Term:
    """Rewrite ``tau{A} P`` to ``eps{A} (lam x:A. not (P x))`` or the converse."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    src, dst = ("tau", "eps") if direction == TAU_TO_EPS else ("eps", "tau")

    def go(t):
        if isinstance(t, App):
            t = App(go(t.fn), go(t.arg))
            parts = _choice_parts(t)
            if parts and parts[0] == src:
                _, ty, pred = parts
                x = fresh_name("x", pred.free_vars | bound_names(pred))
                body = App(pred, Var(x, ty))
                if isinstance(pred, Lam):
                    body = contract(body)
                neg = Lam(x, ty, App(_const(NEGATION, sig), body))
                return App(TyApp(_const(dst, sig), ty), neg)
            return t
        if isinstance(t, Lam):
            return Lam(t.var, t.var_type, go(t.body))
        if isinstance(t, TyLam):
            return TyLam(t.tvar, go(t.body))
        if isinstance(t, TyApp):
            return TyApp(go(t.term), t.type_arg)
        return t

    return go(term)


def cancel_double_negations(term: Term) -> Term:
    """Drop ``not (not A)`` pairs and eta-contract ``lam x. P x`` where possible."""

    def go(t):
        if isinstance(t, App):
            t = App(go(t.fn), go(t.arg))
            if (
                _is_not(t.fn)
                and isinstance(t.arg, App)
                and _is_not(t.arg.fn)
            ):
                return t.arg.arg
            return t
        if isinstance(t, Lam):
            body = go(t.body)
            if (
                isinstance(body, App)
                and isinstance(body.arg, Var)
                and body.arg.name == t.var
                and t.var not in body.fn.free_vars
            ):
                return body.fn
            return Lam(t.var, t.var_type, body)
        if isinstance(t, TyLam):
            return TyLam(t.tvar, go(t.body))
        if isinstance(t, TyApp):
            return TyApp(go(t.term), t.type_arg)
        return t

    return go(term)


def _is_not(t):
    return isinstance(t, Const) and t.name == NEGATION
