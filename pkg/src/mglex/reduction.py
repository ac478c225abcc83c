"""Beta and type-beta reduction, normal forms, eta-long forms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .errors import NormalizationLimit, NotNormal
from .terms import (
    App,
    Arrow,
    Const,
    Forall,
    Lam,
    Signature,
    Term,
    TVar,
    TyApp,
    TyLam,
    Type,
    Var,
    bound_names,
    check_type,
    free_var_types,
    fresh_name,
    substitute,
    term_type_substitute,
    type_names,
    type_substitute,
)

DEFAULT_MAX_STEPS = 1_000_000

STRATEGIES = ("lo", "ri")


def is_redex(t: Term) -> bool:
    return (isinstance(t, App) and isinstance(t.fn, Lam)) or (
        isinstance(t, TyApp) and isinstance(t.term, TyLam)
    )


def contract(t: Term) -> Term:
    if isinstance(t, App):
        return substitute(t.fn.body, t.fn.var, t.arg)
    return term_type_substitute(t.term.body, t.term.tvar, t.type_arg)


def _step_lo(t):
    if is_redex(t):
        return contract(t)
    if isinstance(t, App):
        r = _step_lo(t.fn)
        if r is not None:
            return App(r, t.arg)
        r = _step_lo(t.arg)
        return None if r is None else App(t.fn, r)
    if isinstance(t, Lam):
        r = _step_lo(t.body)
        return None if r is None else Lam(t.var, t.var_type, r)
    if isinstance(t, TyLam):
        r = _step_lo(t.body)
        return None if r is None else TyLam(t.tvar, r)
    if isinstance(t, TyApp):
        r = _step_lo(t.term)
        return None if r is None else TyApp(r, t.type_arg)
    return None


def _step_ri(t):
    if isinstance(t, App):
        r = _step_ri(t.arg)
        if r is not None:
            return App(t.fn, r)
        r = _step_ri(t.fn)
        if r is not None:
            return App(r, t.arg)
    elif isinstance(t, TyApp):
        r = _step_ri(t.term)
        if r is not None:
            return TyApp(r, t.type_arg)
    elif isinstance(t, Lam):
        r = _step_ri(t.body)
        return None if r is None else Lam(t.var, t.var_type, r)
    elif isinstance(t, TyLam):
        r = _step_ri(t.body)
        return None if r is None else TyLam(t.tvar, r)
    if is_redex(t):
        return contract(t)
    return None


def step(term: Term, strategy: str = "lo") -> Optional[Term]:
    """One reduction step, or None when ``term`` is normal.

    ``"lo"`` contracts the leftmost-outermost redex, ``"ri"`` the
    rightmost-innermost one.
    """
    if strategy == "lo":
        return _step_lo(term)
    if strategy == "ri":
        return _step_ri(term)
    raise ValueError(f"unknown strategy {strategy!r}")


def unfold_definitions(term: Term, sig: Optional[Signature]) -> Term:
    """Replace every defined constant by its (closed) definition."""
    if sig is None or not sig.definitions:
        return term
    defs = sig.definitions

    def go(t, depth):
        if depth > 64:
            raise NormalizationLimit("definitions nest deeper than 64 levels")
        if isinstance(t, Const):
            if t.name in defs:
                return go(defs[t.name], depth + 1)
            return t
        if isinstance(t, App):
            return App(go(t.fn, depth), go(t.arg, depth))
        if isinstance(t, Lam):
            return Lam(t.var, t.var_type, go(t.body, depth))
        if isinstance(t, TyApp):
            return TyApp(go(t.term, depth), t.type_arg)
        if isinstance(t, TyLam):
            return TyLam(t.tvar, go(t.body, depth))
        return t

    return go(term, 0)


def reductions(term: Term, strategy: str = "lo", max_steps: int = DEFAULT_MAX_STEPS) -> Iterator[Term]:
    """Yield each successive reduct of ``term`` until it is normal."""
    for _ in range(max_steps):
        nxt = step(term, strategy)
        if nxt is None:
            return
        yield nxt
        term = nxt
    if step(term, strategy) is None:
        return
    raise NormalizationLimit(f"no normal form within {max_steps} steps")


def normalize(
    term: Term,
    sig: Optional[Signature] = None,
    strategy: str = "lo",
    max_steps: int = DEFAULT_MAX_STEPS,
) -> Term:
    """Normal form of ``term``; definitions from ``sig`` are unfolded first."""
    term = unfold_definitions(term, sig)
    for term in reductions(term, strategy, max_steps):
        pass
    return term


def has_redex(t: Term) -> bool:
    if is_redex(t):
        return True
    if isinstance(t, App):
        return has_redex(t.fn) or has_redex(t.arg)
    if isinstance(t, (Lam, TyLam)):
        return has_redex(t.body)
    if isinstance(t, TyApp):
        return has_redex(t.term)
    return False


def is_normal(t: Term) -> bool:
    return not has_redex(t)


# ---------------------------------------------------------------------------
# eta-long forms


def eta_long(term: Term, env=None) -> Term:
    """Eta-expand a beta-normal term until every head is fully applied.

    ``env`` types the free variables; by default their annotations are used.
    """
    env = dict(free_var_types(term) if env is None else env)
    ty = check_type(None, env, term)
    return _long(term, ty, env)


def _env_tvars(env):
    out = set()
    for ty in env.values():
        out |= ty.free_tvars
    return out


def _long(t, ty, env):
    if isinstance(ty, Arrow):
        if isinstance(t, Lam):
            inner = dict(env)
            inner[t.var] = t.var_type
            return Lam(t.var, t.var_type, _long(t.body, ty.cod, inner))
        x = fresh_name("x", set(env) | t.free_vars | bound_names(t))
        inner = dict(env)
        inner[x] = ty.dom
        return Lam(x, ty.dom, _long(App(t, Var(x, ty.dom)), ty.cod, inner))
    if isinstance(ty, Forall):
        if isinstance(t, TyLam):
            body_ty = type_substitute(ty.body, ty.var, TVar(t.tvar))
            return TyLam(t.tvar, _long(t.body, body_ty, env))
        avoid = _env_tvars(env) | t.free_tvars | type_names(ty) | bound_names(t)
        a = fresh_name(ty.var, avoid)
        return TyLam(a, _long(TyApp(t, TVar(a)), type_substitute(ty.body, ty.var, TVar(a)), env))
    return _spine(t, env)


def _spine(t, env):
    if isinstance(t, App):
        fty = check_type(None, env, t.fn)
        return App(_spine(t.fn, env), _long(t.arg, fty.dom, env))
    if isinstance(t, TyApp):
        return TyApp(_spine(t.term, env), t.type_arg)
    if isinstance(t, (Var, Const)):
        return t
    raise NotNormal(f"eta_long expects a beta-normal term, found {t}")


# ---------------------------------------------------------------------------
# head decomposition


@dataclass(frozen=True)
class NormalForm:
    """A beta-normal term split into leading binders, head and spine.

    ``binders`` holds ``("lam", name, type)`` and ``("Lam", name)`` tuples;
    ``args`` holds Types (type applications) and nested NormalForms.
    """

    binders: tuple
    head: Term
    args: tuple

    def reassemble(self) -> Term:
        t = self.head
        for a in self.args:
            t = TyApp(t, a) if isinstance(a, Type) else App(t, a.reassemble())
        for b in reversed(self.binders):
            t = Lam(b[1], b[2], t) if b[0] == "lam" else TyLam(b[1], t)
        return t


def head_decompose(term: Term) -> NormalForm:
    if has_redex(term):
        raise NotNormal(f"term has a redex: {term}")
    return _decompose(term)


def _decompose(t):
    binders = []
    while isinstance(t, (Lam, TyLam)):
        if isinstance(t, Lam):
            binders.append(("lam", t.var, t.var_type))
        else:
            binders.append(("Lam", t.tvar))
        t = t.body
    args = []
    while isinstance(t, (App, TyApp)):
        if isinstance(t, App):
            args.append(_decompose(t.arg))
            t = t.fn
        else:
            args.append(t.type_arg)
            t = t.term
    args.reverse()
    return NormalForm(tuple(binders), t, tuple(args))


NormalArg = Union[Type, NormalForm]
