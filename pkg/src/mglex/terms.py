"""Types, terms and signatures of second-order lambda calculus over many sorts.

Binders are named (for printing) but equality and hashing are alpha-insensitive:
both are computed from a nameless key in which bound variables are replaced by
their binding depth.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .errors import (
    ApplicationMismatch,
    EscapingTypeVariable,
    InvalidSignature,
    TypeCheckError,
    UnboundVariable,
    UnknownConstant,
    UnknownSort,
)

PROP = "t"

# ---------------------------------------------------------------------------
# fresh names


def fresh_name(base: str, avoid) -> str:
    if base not in avoid:
        return base
    stem = re.sub(r"\d+$", "", base) or "v"
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand


# ---------------------------------------------------------------------------
# types


class Type:
    __slots__ = ()

    @cached_property
    def key(self):
        return _type_key(self, ())

    @cached_property
    def free_tvars(self) -> frozenset:
        return _type_ftv(self)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Type) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        from .syntax import format_type

        return format_type(self)


@dataclass(frozen=True, eq=False)
class Base(Type):
    name: str


@dataclass(frozen=True, eq=False)
class TVar(Type):
    name: str


@dataclass(frozen=True, eq=False)
class Arrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True, eq=False)
class Forall(Type):
    var: str
    body: Type


T = Base(PROP)


def arrow(*types: Type) -> Type:
    """Right-nested arrow: ``arrow(a, b, c)`` is ``a -> b -> c``."""
    out = types[-1]
    for t in reversed(types[:-1]):
        out = Arrow(t, out)
    return out


def _type_key(t, bound):
    if isinstance(t, Base):
        return ("B", t.name)
    if isinstance(t, TVar):
        for i in range(len(bound) - 1, -1, -1):
            if bound[i] == t.name:
                return ("b", len(bound) - 1 - i)
        return ("V", t.name)
    if isinstance(t, Arrow):
        return ("->", _type_key(t.dom, bound), _type_key(t.cod, bound))
    if isinstance(t, Forall):
        return ("Pi", _type_key(t.body, bound + (t.var,)))
    raise TypeError(f"not a type: {t!r}")


def _type_ftv(t):
    if isinstance(t, Base):
        return frozenset()
    if isinstance(t, TVar):
        return frozenset((t.name,))
    if isinstance(t, Arrow):
        return t.dom.free_tvars | t.cod.free_tvars
    return t.body.free_tvars - {t.var}


def type_eq(a: Type, b: Type) -> bool:
    """Equality of types up to renaming of bound type variables."""
    return a == b


def type_names(t: Type) -> set:
    """Every type-variable name occurring in ``t``, bound or free."""
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, Arrow):
        return type_names(t.dom) | type_names(t.cod)
    if isinstance(t, Forall):
        return {t.var} | type_names(t.body)
    return set()


def base_names(t: Type) -> set:
    if isinstance(t, Base):
        return {t.name}
    if isinstance(t, Arrow):
        return base_names(t.dom) | base_names(t.cod)
    if isinstance(t, Forall):
        return base_names(t.body)
    return set()


def type_substitute(t: Type, tv: str, u: Type) -> Type:
    """Capture-avoiding ``t[u/tv]``."""
    if tv not in t.free_tvars:
        return t
    if isinstance(t, TVar):
        return u
    if isinstance(t, Arrow):
        return Arrow(type_substitute(t.dom, tv, u), type_substitute(t.cod, tv, u))
    if isinstance(t, Forall):
        var, body = t.var, t.body
        if var in u.free_tvars:
            new = fresh_name(var, u.free_tvars | body.free_tvars | {tv})
            body = type_substitute(body, var, TVar(new))
            var = new
        return Forall(var, type_substitute(body, tv, u))
    return t


def type_subterms(t: Type) -> list:
    out = [t]
    if isinstance(t, Arrow):
        out += type_subterms(t.dom) + type_subterms(t.cod)
    elif isinstance(t, Forall):
        out += type_subterms(t.body)
    return out


def match_type(pattern: Type, target: Type, tvars, subst=None) -> Optional[dict]:
    """First-order matching of ``pattern`` against ``target``.

    Only the type variables named in ``tvars`` may be instantiated.  Returns the
    extended substitution, or None when no instance of ``pattern`` equals
    ``target``.
    """
    subst = dict(subst or {})
    tvars = set(tvars)
    local = set()
    counter = itertools.count()

    def go(p, t):
        if isinstance(p, TVar) and p.name in tvars:
            if t.free_tvars & local:
                return False
            if p.name in subst:
                return subst[p.name] == t
            subst[p.name] = t
            return True
        if isinstance(p, Base):
            return isinstance(t, Base) and p.name == t.name
        if isinstance(p, TVar):
            return isinstance(t, TVar) and p.name == t.name
        if isinstance(p, Arrow):
            return isinstance(t, Arrow) and go(p.dom, t.dom) and go(p.cod, t.cod)
        if isinstance(p, Forall):
            if not isinstance(t, Forall):
                return False
            avoid = type_names(p) | type_names(t) | tvars | local
            name = fresh_name(f"_m{next(counter)}", avoid)
            local.add(name)
            return go(
                type_substitute(p.body, p.var, TVar(name)),
                type_substitute(t.body, t.var, TVar(name)),
            )
        return False

    return subst if go(pattern, target) else None


def strip_foralls(t: Type):
    """Split ``Pi a1 ... an. body`` into ``([a1..an], body)``."""
    binders = []
    while isinstance(t, Forall):
        binders.append(t.var)
        t = t.body
    return binders, t


# ---------------------------------------------------------------------------
# terms


class Term:
    __slots__ = ()

    @cached_property
    def key(self):
        return _term_key(self, (), ())

    @cached_property
    def free_vars(self) -> frozenset:
        return _term_fv(self)

    @cached_property
    def free_tvars(self) -> frozenset:
        return _term_ftv(self)

    @cached_property
    def size(self) -> int:
        if isinstance(self, App):
            return 1 + self.fn.size + self.arg.size
        if isinstance(self, (Lam, TyLam)):
            return 1 + self.body.size
        if isinstance(self, TyApp):
            return 1 + self.term.size
        return 1

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Term) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        from .syntax import format_term

        return format_term(self)


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: str
    type: Type


@dataclass(frozen=True, eq=False)
class Const(Term):
    name: str
    type: Type


@dataclass(frozen=True, eq=False)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True, eq=False)
class Lam(Term):
    var: str
    var_type: Type
    body: Term


@dataclass(frozen=True, eq=False)
class TyApp(Term):
    term: Term
    type_arg: Type


@dataclass(frozen=True, eq=False)
class TyLam(Term):
    tvar: str
    body: Term


def apply(fn: Term, *args) -> Term:
    """Left-nested application; ``Type`` arguments become type applications."""
    for a in args:
        fn = TyApp(fn, a) if isinstance(a, Type) else App(fn, a)
    return fn


def _term_key(t, vb, tb):
    if isinstance(t, Var):
        for i in range(len(vb) - 1, -1, -1):
            if vb[i] == t.name:
                return ("b", len(vb) - 1 - i)
        return ("v", t.name, _type_key(t.type, tb))
    if isinstance(t, Const):
        return ("c", t.name, _type_key(t.type, tb))
    if isinstance(t, App):
        return ("@", _term_key(t.fn, vb, tb), _term_key(t.arg, vb, tb))
    if isinstance(t, Lam):
        return ("lam", _type_key(t.var_type, tb), _term_key(t.body, vb + (t.var,), tb))
    if isinstance(t, TyApp):
        return ("{}", _term_key(t.term, vb, tb), _type_key(t.type_arg, tb))
    if isinstance(t, TyLam):
        return ("Lam", _term_key(t.body, vb, tb + (t.tvar,)))
    raise TypeError(f"not a term: {t!r}")


def _term_fv(t):
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Const):
        return frozenset()
    if isinstance(t, App):
        return t.fn.free_vars | t.arg.free_vars
    if isinstance(t, Lam):
        return t.body.free_vars - {t.var}
    if isinstance(t, TyApp):
        return t.term.free_vars
    return t.body.free_vars


def _term_ftv(t):
    if isinstance(t, (Var, Const)):
        return t.type.free_tvars
    if isinstance(t, App):
        return t.fn.free_tvars | t.arg.free_tvars
    if isinstance(t, Lam):
        return t.var_type.free_tvars | t.body.free_tvars
    if isinstance(t, TyApp):
        return t.term.free_tvars | t.type_arg.free_tvars
    return t.body.free_tvars - {t.tvar}


def free_var_types(t: Term) -> dict:
    """Map each free variable of ``t`` to its annotated type."""
    out = {}

    def go(u, bound):
        if isinstance(u, Var):
            if u.name not in bound:
                out.setdefault(u.name, u.type)
        elif isinstance(u, App):
            go(u.fn, bound)
            go(u.arg, bound)
        elif isinstance(u, Lam):
            go(u.body, bound | {u.var})
        elif isinstance(u, TyApp):
            go(u.term, bound)
        elif isinstance(u, TyLam):
            go(u.body, bound)

    go(t, frozenset())
    return out


def var_occurrences(t: Term, name: str) -> int:
    """Count free occurrences of the term variable ``name``."""
    if isinstance(t, Var):
        return int(t.name == name)
    if isinstance(t, App):
        return var_occurrences(t.fn, name) + var_occurrences(t.arg, name)
    if isinstance(t, Lam):
        return 0 if t.var == name else var_occurrences(t.body, name)
    if isinstance(t, TyApp):
        return var_occurrences(t.term, name)
    if isinstance(t, TyLam):
        return var_occurrences(t.body, name)
    return 0


def const_names(t: Term) -> set:
    if isinstance(t, Const):
        return {t.name}
    if isinstance(t, App):
        return const_names(t.fn) | const_names(t.arg)
    if isinstance(t, (Lam, TyLam)):
        return const_names(t.body)
    if isinstance(t, TyApp):
        return const_names(t.term)
    return set()


def bound_names(t: Term) -> set:
    if isinstance(t, App):
        return bound_names(t.fn) | bound_names(t.arg)
    if isinstance(t, Lam):
        return {t.var} | bound_names(t.body)
    if isinstance(t, TyLam):
        return {t.tvar} | bound_names(t.body)
    if isinstance(t, TyApp):
        return bound_names(t.term)
    return set()


def subterms(t: Term):
    """Pre-order walk over every subterm."""
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, App):
            stack.append(u.arg)
            stack.append(u.fn)
        elif isinstance(u, (Lam, TyLam)):
            stack.append(u.body)
        elif isinstance(u, TyApp):
            stack.append(u.term)


def substitute(term: Term, var: str, replacement: Term) -> Term:
    """Capture-avoiding ``term[replacement/var]``."""
    if var not in term.free_vars:
        return term
    if isinstance(term, Var):
        return replacement
    if isinstance(term, App):
        return App(substitute(term.fn, var, replacement), substitute(term.arg, var, replacement))
    if isinstance(term, Lam):
        x, body = term.var, term.body
        if x in replacement.free_vars:
            new = fresh_name(x, replacement.free_vars | body.free_vars | {var})
            body = substitute(body, x, Var(new, term.var_type))
            x = new
        return Lam(x, term.var_type, substitute(body, var, replacement))
    if isinstance(term, TyApp):
        return TyApp(substitute(term.term, var, replacement), term.type_arg)
    if isinstance(term, TyLam):
        a, body = term.tvar, term.body
        if a in replacement.free_tvars:
            new = fresh_name(a, replacement.free_tvars | body.free_tvars)
            body = term_type_substitute(body, a, TVar(new))
            a = new
        return TyLam(a, substitute(body, var, replacement))
    return term


def term_type_substitute(term: Term, tv: str, u: Type) -> Term:
    """Capture-avoiding substitution of type ``u`` for type variable ``tv``."""
    if tv not in term.free_tvars:
        return term
    if isinstance(term, Var):
        return Var(term.name, type_substitute(term.type, tv, u))
    if isinstance(term, Const):
        return Const(term.name, type_substitute(term.type, tv, u))
    if isinstance(term, App):
        return App(term_type_substitute(term.fn, tv, u), term_type_substitute(term.arg, tv, u))
    if isinstance(term, Lam):
        return Lam(
            term.var,
            type_substitute(term.var_type, tv, u),
            term_type_substitute(term.body, tv, u),
        )
    if isinstance(term, TyApp):
        return TyApp(term_type_substitute(term.term, tv, u), type_substitute(term.type_arg, tv, u))
    if isinstance(term, TyLam):
        a, body = term.tvar, term.body
        if a in u.free_tvars:
            new = fresh_name(a, u.free_tvars | body.free_tvars | {tv})
            body = term_type_substitute(body, a, TVar(new))
            a = new
        return TyLam(a, term_type_substitute(body, tv, u))
    return term


def rename_var(term: Lam, new: str) -> Lam:
    """Alpha-rename the binder of a lambda."""
    if new == term.var:
        return term
    return Lam(new, term.var_type, substitute(term.body, term.var, Var(new, term.var_type)))


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class Signature:
    """Declared sorts, typed constants, base coercions and constant definitions.

    ``base_coercions`` holds triples ``(source_sort, target_sort, constant)``.
    ``definitions`` maps some constants to closed terms that are unfolded
    before normalisation.
    """

    sorts: frozenset = frozenset({PROP})
    constants: Mapping = field(default_factory=dict)
    base_coercions: frozenset = frozenset()
    definitions: Mapping = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        sorts: Iterable[str] = (),
        constants: Mapping = None,
        base_coercions: Iterable = (),
        definitions: Mapping = None,
        require_closed: bool = True,
    ) -> "Signature":
        sorts = frozenset(sorts) | {PROP}
        consts = dict(constants or {})
        edges = frozenset(tuple(e) for e in base_coercions)
        for i, j, name in sorted(edges):
            want = Arrow(Base(i), Base(j))
            if name in consts and consts[name] != want:
                raise InvalidSignature(f"coercion {name} declared with type {consts[name]}, expected {want}")
            consts[name] = want
        sig = cls(sorts, consts, edges, dict(definitions or {}))
        sig.validate(require_closed)
        return sig

    def validate(self, require_closed=True):
        for name, ty in self.constants.items():
            for b in base_names(ty):
                if b not in self.sorts:
                    raise UnknownSort(b)
        seen = {}
        for i, j, name in self.base_coercions:
            for s in (i, j):
                if s not in self.sorts:
                    raise UnknownSort(s)
            if i == j:
                raise InvalidSignature(f"coercion {name} is a loop on {i}")
            if (i, j) in seen:
                raise InvalidSignature(f"two coercions from {i} to {j}: {seen[(i, j)]}, {name}")
            seen[(i, j)] = name
        if _has_cycle(seen):
            raise InvalidSignature("base coercions contain a cycle")
        if require_closed:
            for (i, j) in seen:
                for (j2, k) in seen:
                    if j2 == j and (i, k) not in seen:
                        raise InvalidSignature(
                            f"coercions {seen[(i, j)]} and {seen[(j, k)]} have no declared composite {i} -> {k}"
                        )
        for name, body in self.definitions.items():
            if name not in self.constants:
                raise UnknownConstant(name)
            got = check_type(self, {}, body)
            if got != self.constants[name]:
                raise TypeCheckError(f"definition of {name} has type {got}, declared {self.constants[name]}")

    def coercion(self, i: str, j: str) -> Optional[str]:
        for a, b, name in self.base_coercions:
            if a == i and b == j:
                return name
        return None

    @cached_property
    def coercion_table(self) -> dict:
        return {(i, j): name for i, j, name in self.base_coercions}

    @cached_property
    def coercion_edges(self) -> dict:
        """Map coercion constant name to its ``(source, target)`` pair."""
        return {name: (i, j) for i, j, name in self.base_coercions}

    def extend(self, sorts=(), constants=None, base_coercions=(), definitions=None, require_closed=True):
        merged = dict(self.constants)
        merged.update(constants or {})
        defs = dict(self.definitions)
        defs.update(definitions or {})
        return Signature.build(
            self.sorts | set(sorts),
            merged,
            self.base_coercions | {tuple(e) for e in base_coercions},
            defs,
            require_closed,
        )

    def const(self, name: str) -> Const:
        if name not in self.constants:
            raise UnknownConstant(name)
        return Const(name, self.constants[name])


def _has_cycle(edges):
    graph = {}
    for i, j in edges:
        graph.setdefault(i, []).append(j)
    state = {}

    def visit(n):
        state[n] = 1
        for m in graph.get(n, ()):
            if state.get(m) == 1:
                return True
            if m not in state and visit(m):
                return True
        state[n] = 2
        return False

    return any(n not in state and visit(n) for n in list(graph))


# ---------------------------------------------------------------------------
# type checking


def check_wf_type(sig: Optional[Signature], ty: Type):
    if sig is None:
        return
    for b in base_names(ty):
        if b not in sig.sorts:
            raise UnknownSort(b)


def check_type(sig: Optional[Signature], env: Optional[Mapping], term: Term) -> Type:
    """Compute the type of ``term`` with free variables typed by ``env``.

    With ``sig=None`` constants are trusted to carry their declared types.
    Raises the TypeCheckError subclasses from ``mglex.errors``.
    """
    return _check(sig, dict(env or {}), term)


def _check(sig, env, term):
    if isinstance(term, Var):
        if term.name not in env:
            raise UnboundVariable(term.name)
        ty = env[term.name]
        if ty != term.type:
            raise TypeCheckError(f"variable {term.name} annotated {term.type} but bound at {ty}")
        return ty
    if isinstance(term, Const):
        if sig is not None:
            if term.name not in sig.constants:
                raise UnknownConstant(term.name)
            if sig.constants[term.name] != term.type:
                raise TypeCheckError(
                    f"constant {term.name} used at {term.type}, declared {sig.constants[term.name]}"
                )
        return term.type
    if isinstance(term, App):
        ft = _check(sig, env, term.fn)
        at = _check(sig, env, term.arg)
        if not isinstance(ft, Arrow):
            raise ApplicationMismatch("a function type", ft, "cannot apply")
        if ft.dom != at:
            raise ApplicationMismatch(ft.dom, at)
        return ft.cod
    if isinstance(term, Lam):
        check_wf_type(sig, term.var_type)
        inner = dict(env)
        inner[term.var] = term.var_type
        return Arrow(term.var_type, _check(sig, inner, term.body))
    if isinstance(term, TyApp):
        tt = _check(sig, env, term.term)
        check_wf_type(sig, term.type_arg)
        if not isinstance(tt, Forall):
            raise ApplicationMismatch("a quantified type", tt, "cannot instantiate")
        return type_substitute(tt.body, tt.var, term.type_arg)
    if isinstance(term, TyLam):
        for y in term.body.free_vars:
            if y in env and term.tvar in env[y].free_tvars:
                raise EscapingTypeVariable(term.tvar, y)
        return Forall(term.tvar, _check(sig, env, term.body))
    raise TypeError(f"not a term: {term!r}")


def type_of(term: Term, sig: Optional[Signature] = None) -> Type:
    """Type of a term whose free variables are typed by their annotations."""
    return check_type(sig, free_var_types(term), term)
