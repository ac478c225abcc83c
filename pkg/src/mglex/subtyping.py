"""Coercive subtyping over System F types.

Judgements ``S < T`` are derived with transitivity, arrow variance and the two
quantifier rules, starting from the base coercions of a Signature.  Every
derivation carries a linear coercion term with one free variable of type ``S``.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .reduction import normalize
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
    TVar,
    TyApp,
    TyLam,
    Type,
    Var,
    check_type,
    free_var_types,
    fresh_name,
    match_type,
    substitute,
    type_names,
    type_subterms,
    type_substitute,
    var_occurrences,
)

IDENTITY = "Identity"
BASE_EDGE = "BaseEdge"
TRANSITIVITY = "Transitivity"
ARROW_COCO = "ArrowCoCo"
ARROW_COVARIANT = "ArrowCovariant"
ARROW_CONTRAVARIANT = "ArrowContravariant"
FORALL_INTRO = "ForallIntro"
FORALL_ELIM = "ForallElim"
FORALL_ELIM_LEFT = "ForallElimLeft"

RULES = (
    IDENTITY,
    BASE_EDGE,
    TRANSITIVITY,
    ARROW_COCO,
    ARROW_COVARIANT,
    ARROW_CONTRAVARIANT,
    FORALL_INTRO,
    FORALL_ELIM,
    FORALL_ELIM_LEFT,
)


@dataclass(frozen=True)
class SubtypeDerivation:
    """One node of a subtyping derivation, concluding ``source < target``.

    ``coercion`` names the base coercion constant of a BaseEdge node and
    ``witness`` is the instantiating type of a quantifier elimination.
    """

    rule: str
    source: Type
    target: Type
    premises: tuple = ()
    coercion: Optional[str] = None
    witness: Optional[Type] = None

    @property
    def conclusion(self):
        return (self.source, self.target)

    @property
    def height(self) -> int:
        return 1 + max((p.height for p in self.premises), default=0)

    def pretty(self, indent: int = 0) -> str:
        extra = ""
        if self.coercion:
            extra = f" [{self.coercion}]"
        elif self.witness is not None:
            extra = f" [W := {self.witness}]"
        lines = [f"{'  ' * indent}{self.source} < {self.target}   ({self.rule}{extra})"]
        for p in self.premises:
            lines.append(p.pretty(indent + 1))
        return "\n".join(lines)


@dataclass(frozen=True)
class CoercionTerm:
    """A coercion ``term : target_type`` over the single free ``source_var``."""

    term: Term
    source_var: Var
    target_type: Type

    @property
    def source_type(self) -> Type:
        return self.source_var.type

    def is_linear(self) -> bool:
        return self.term.free_vars == {self.source_var.name} and var_occurrences(
            self.term, self.source_var.name
        ) == 1

    def apply_to(self, u: Term) -> Term:
        return substitute(self.term, self.source_var.name, u)

    def normal(self, sig: Optional[Signature] = None) -> Term:
        return normalize(self.term, sig)


# ---------------------------------------------------------------------------
# validation


def check_derivation(sig: Signature, d: SubtypeDerivation) -> bool:
    """True when every node follows from its premises by its rule."""
    ps = d.premises
    if d.rule == IDENTITY:
        ok = not ps and d.source == d.target
    elif d.rule == BASE_EDGE:
        ok = (
            not ps
            and isinstance(d.source, Base)
            and isinstance(d.target, Base)
            and sig.coercion(d.source.name, d.target.name) == d.coercion
            and d.coercion is not None
        )
    elif d.rule == TRANSITIVITY:
        ok = (
            len(ps) == 2
            and ps[0].source == d.source
            and ps[0].target == ps[1].source
            and ps[1].target == d.target
        )
    elif d.rule == ARROW_COCO:
        # A<B, C<D  /  D->A < C->B
        ok = (
            len(ps) == 2
            and isinstance(d.source, Arrow)
            and isinstance(d.target, Arrow)
            and ps[0].conclusion == (d.source.cod, d.target.cod)
            and ps[1].conclusion == (d.target.dom, d.source.dom)
        )
    elif d.rule == ARROW_COVARIANT:
        ok = (
            len(ps) == 1
            and isinstance(d.source, Arrow)
            and isinstance(d.target, Arrow)
            and d.source.dom == d.target.dom
            and ps[0].conclusion == (d.source.cod, d.target.cod)
        )
    elif d.rule == ARROW_CONTRAVARIANT:
        ok = (
            len(ps) == 1
            and isinstance(d.source, Arrow)
            and isinstance(d.target, Arrow)
            and d.source.cod == d.target.cod
            and ps[0].conclusion == (d.target.dom, d.source.dom)
        )
    elif d.rule == FORALL_INTRO:
        ok = (
            len(ps) == 1
            and isinstance(d.target, Forall)
            and d.target.var not in d.source.free_tvars
            and ps[0].conclusion == (d.source, d.target.body)
        )
    elif d.rule == FORALL_ELIM:
        p = ps[0] if len(ps) == 1 else None
        ok = (
            p is not None
            and d.witness is not None
            and p.source == d.source
            and isinstance(p.target, Forall)
            and type_substitute(p.target.body, p.target.var, d.witness) == d.target
        )
    elif d.rule == FORALL_ELIM_LEFT:
        p = ps[0] if len(ps) == 1 else None
        ok = (
            p is not None
            and d.witness is not None
            and isinstance(d.source, Forall)
            and p.source == type_substitute(d.source.body, d.source.var, d.witness)
            and p.target == d.target
        )
    else:
        ok = False
    return ok and all(check_derivation(sig, p) for p in ps)


# ---------------------------------------------------------------------------
# algorithmic search


def _base_path(sig, i, j):
    """Shortest chain of base coercion names from sort i to sort j."""
    table = sig.coercion_table
    succ = {}
    for (a, b), name in sorted(table.items()):
        succ.setdefault(a, []).append((b, name))
    prev = {i: None}
    queue = deque([i])
    while queue:
        a = queue.popleft()
        if a == j:
            break
        for b, name in succ.get(a, ()):
            if b not in prev:
                prev[b] = (a, name)
                queue.append(b)
    if j not in prev:
        return None
    path = []
    node = j
    while prev[node] is not None:
        a, name = prev[node]
        path.append((a, node, name))
        node = a
    return list(reversed(path))


def _instantiation_candidates(sig, s, t):
    seen, out = set(), []
    body_vars = {s.var}
    m = match_type(s.body, t, body_vars)
    if m is not None and s.var in m:
        out.append(m[s.var])
        seen.add(m[s.var])
    for w in [Base(n) for n in sorted(sig.sorts)] + type_subterms(t):
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def derive_subtype(
    sig: Signature, s: Type, t: Type, alternative_elim: bool = False
) -> Optional[SubtypeDerivation]:
    """Search for a derivation of ``s < t``; None when there is none.

    The search is syntax-directed: base pairs go through the base coercion
    graph, arrows through the variance rules, quantifiers on the right through
    introduction and quantifiers on the left through elimination with
    instantiations drawn from the sorts and the subterms of ``t``.  With
    ``alternative_elim`` a left quantifier is eliminated in one sequent-style
    step instead of identity + elimination + transitivity.
    """
    return _derive(sig, s, t, alternative_elim)


def _derive(sig, s, t, alt):
    if s == t:
        return SubtypeDerivation(IDENTITY, s, t)
    if isinstance(s, Base) and isinstance(t, Base):
        path = _base_path(sig, s.name, t.name)
        if not path:
            return None
        nodes = [SubtypeDerivation(BASE_EDGE, Base(a), Base(b), coercion=n) for a, b, n in path]
        d = nodes[0]
        for nxt in nodes[1:]:
            d = SubtypeDerivation(TRANSITIVITY, d.source, nxt.target, (d, nxt))
        return d
    if isinstance(t, Forall):
        var, body = t.var, t.body
        if var in s.free_tvars:
            new = fresh_name(var, s.free_tvars | type_names(body))
            body = type_substitute(body, var, TVar(new))
            var = new
        p = _derive(sig, s, body, alt)
        if p is not None:
            return SubtypeDerivation(FORALL_INTRO, s, Forall(var, body), (p,))
    if isinstance(s, Arrow) and isinstance(t, Arrow):
        if s.dom == t.dom:
            p = _derive(sig, s.cod, t.cod, alt)
            if p is not None:
                return SubtypeDerivation(ARROW_COVARIANT, s, t, (p,))
        elif s.cod == t.cod:
            p = _derive(sig, t.dom, s.dom, alt)
            if p is not None:
                return SubtypeDerivation(ARROW_CONTRAVARIANT, s, t, (p,))
        else:
            cod = _derive(sig, s.cod, t.cod, alt)
            dom = _derive(sig, t.dom, s.dom, alt) if cod is not None else None
            if dom is not None:
                return SubtypeDerivation(ARROW_COCO, s, t, (cod, dom))
    if isinstance(s, Forall):
        for w in _instantiation_candidates(sig, s, t):
            inst = type_substitute(s.body, s.var, w)
            p = _derive(sig, inst, t, alt)
            if p is None:
                continue
            if alt:
                return SubtypeDerivation(FORALL_ELIM_LEFT, s, t, (p,), witness=w)
            elim = SubtypeDerivation(
                FORALL_ELIM, s, inst, (SubtypeDerivation(IDENTITY, s, s),), witness=w
            )
            return SubtypeDerivation(TRANSITIVITY, s, t, (elim, p))
    return None


# ---------------------------------------------------------------------------
# coercion terms


def coercion_term(d: SubtypeDerivation, var: str = "x") -> CoercionTerm:
    """Extract the coercion term of a derivation by structural recursion."""
    names = (f"z{i}" for i in itertools.count(1))
    term = _extract(d, var, names)
    return CoercionTerm(term, Var(var, d.source), d.target)


def _extract(d, x, names):
    rule, ps = d.rule, d.premises
    if rule == IDENTITY:
        return Var(x, d.source)
    if rule == BASE_EDGE:
        return App(Const(d.coercion, Arrow(d.source, d.target)), Var(x, d.source))
    if rule == TRANSITIVITY:
        first = _extract(ps[0], x, names)
        second = _extract(ps[1], x, names)
        return substitute(second, x, first)
    if rule == ARROW_COCO:
        # x:A < t:B, z:C < u:D  gives  f:D->A < lam z:C. t[x := f u]
        z = next(names)
        t = _extract(ps[0], x, names)
        u = _extract(ps[1], z, names)
        return Lam(z, d.target.dom, substitute(t, x, App(Var(x, d.source), u)))
    if rule == ARROW_COVARIANT:
        w = next(names)
        t = _extract(ps[0], x, names)
        return Lam(w, d.target.dom, substitute(t, x, App(Var(x, d.source), Var(w, d.target.dom))))
    if rule == ARROW_CONTRAVARIANT:
        # x:A < t:B  gives  g:B->T < lam z:A. g t[x := z]
        z = next(names)
        t = _extract(ps[0], z, names)
        return Lam(z, d.target.dom, App(Var(x, d.source), t))
    if rule == FORALL_INTRO:
        return TyLam(d.target.var, _extract(ps[0], x, names))
    if rule == FORALL_ELIM:
        return TyApp(_extract(ps[0], x, names), d.witness)
    if rule == FORALL_ELIM_LEFT:
        t = _extract(ps[0], x, names)
        return substitute(t, x, TyApp(Var(x, d.source), d.witness))
    raise ValueError(f"unknown rule {rule!r}")


def coercive_apply(sig: Signature, f: Term, u: Term, env=None) -> Optional[Term]:
    """Apply ``f : A -> B`` to ``u : A0``, inserting a coercion when ``A0 < A``."""
    if env is None:
        env = {**free_var_types(f), **free_var_types(u)}
    ft = check_type(sig, env, f)
    ut = check_type(sig, env, u)
    if not isinstance(ft, Arrow):
        return None
    if ft.dom == ut:
        return App(f, u)
    d = derive_subtype(sig, ut, ft.dom)
    if d is None:
        return None
    return App(f, coercion_term(d).apply_to(u))


# ---------------------------------------------------------------------------
# coherence


def collapse_coercions(term: Term, sig: Signature) -> Term:
    """Rewrite ``c_jk (c_ij u)`` to ``c_ik u`` using the declared composites."""
    edges = sig.coercion_edges
    table = sig.coercion_table

    def go(t):
        if isinstance(t, App):
            fn, arg = go(t.fn), go(t.arg)
            if (
                isinstance(fn, Const)
                and fn.name in edges
                and isinstance(arg, App)
                and isinstance(arg.fn, Const)
                and arg.fn.name in edges
            ):
                i, j = edges[arg.fn.name]
                j2, k = edges[fn.name]
                if j == j2 and (i, k) in table:
                    name = table[(i, k)]
                    return App(Const(name, Arrow(Base(i), Base(k))), arg.arg)
            return App(fn, arg)
        if isinstance(t, Lam):
            return Lam(t.var, t.var_type, go(t.body))
        if isinstance(t, TyLam):
            return TyLam(t.tvar, go(t.body))
        if isinstance(t, TyApp):
            return TyApp(go(t.term), t.type_arg)
        return t

    return go(term)


def default_universe(sig: Signature, depth: int) -> list:
    """Every type that can occur in a derivation of height ``depth`` between
    two base sorts.

    By induction on derivations, the supertypes and subtypes of a sort reachable
    from one are vacuous quantifications ``Pi X1 .. Xk. e`` of sorts; each
    quantifier costs one introduction, so ``k <= depth - 2``.  Arrow types and
    type variables never occur.
    """
    sorts = [Base(s) for s in sorted(sig.sorts - {PROP})]
    out = list(sorts)
    layer = sorts
    for k in range(max(0, depth - 2)):
        var = f"X{k + 1}"
        layer = [Forall(var, ty) for ty in layer]
        out += layer
    return out


def enumerate_derivations(
    sig: Signature, s: Type, t: Type, depth: int, universe=None, witnesses=None
) -> Iterator[SubtypeDerivation]:
    """Every derivation of ``s < t`` of height at most ``depth``.

    Intermediate types of transitivity and quantified premises range over
    ``universe`` (by default the exact universe for base judgements, see
    ``default_universe``); eliminations instantiate with ``witnesses`` (see
    ``check_coherence``).  The count grows quickly, so this is meant for
    small depths.
    """
    universe = list(universe or default_universe(sig, depth))
    if s not in universe:
        universe.append(s)
    if t not in universe:
        universe.append(t)
    witnesses = _witnesses(witnesses)
    memo = {}

    def gen(a, b, h):
        if h <= 0:
            return []
        k = (a, b, h)
        if k in memo:
            return memo[k]
        out = []
        if a == b:
            out.append(SubtypeDerivation(IDENTITY, a, b))
        if isinstance(a, Base) and isinstance(b, Base):
            name = sig.coercion(a.name, b.name)
            if name:
                out.append(SubtypeDerivation(BASE_EDGE, a, b, coercion=name))
        if h > 1:
            for mid in universe:
                for p in gen(a, mid, h - 1):
                    for q in gen(mid, b, h - 1):
                        out.append(SubtypeDerivation(TRANSITIVITY, a, b, (p, q)))
            if isinstance(a, Arrow) and isinstance(b, Arrow):
                cods = gen(a.cod, b.cod, h - 1)
                doms = gen(b.dom, a.dom, h - 1)
                for p in cods:
                    for q in doms:
                        out.append(SubtypeDerivation(ARROW_COCO, a, b, (p, q)))
                if a.dom == b.dom:
                    out += [SubtypeDerivation(ARROW_COVARIANT, a, b, (p,)) for p in cods]
                if a.cod == b.cod:
                    out += [SubtypeDerivation(ARROW_CONTRAVARIANT, a, b, (q,)) for q in doms]
            if isinstance(b, Forall) and b.var not in a.free_tvars:
                out += [SubtypeDerivation(FORALL_INTRO, a, b, (p,)) for p in gen(a, b.body, h - 1)]
            for f in universe:
                if not isinstance(f, Forall):
                    continue
                for w in witnesses:
                    if type_substitute(f.body, f.var, w) == b:
                        out += [
                            SubtypeDerivation(FORALL_ELIM, a, b, (p,), witness=w)
                            for p in gen(a, f, h - 1)
                        ]
        memo[k] = out
        return out

    yield from gen(s, t, depth)


@dataclass
class PairReport:
    source: str
    target: str
    derivations: int
    normal_forms: list
    coercions: list
    expected: str

    @property
    def unique(self) -> bool:
        return len(self.coercions) == 1

    @property
    def matches_declared(self) -> bool:
        return self.coercions == [self.expected]

    def to_dict(self):
        return {
            "source": self.source,
            "target": self.target,
            "derivations": self.derivations,
            "normal_forms": self.normal_forms,
            "coercions": self.coercions,
            "expected": self.expected,
            "unique": self.unique,
            "matches_declared": self.matches_declared,
        }


@dataclass
class CoherenceReport:
    depth: int
    pairs: list = field(default_factory=list)

    @property
    def coherent(self) -> bool:
        return all(p.unique and p.matches_declared for p in self.pairs)

    @property
    def flagged(self) -> list:
        return [p for p in self.pairs if not (p.unique and p.matches_declared)]

    def to_dict(self):
        return {
            "depth": self.depth,
            "coherent": self.coherent,
            "pairs": [p.to_dict() for p in self.pairs],
        }

    def to_text(self) -> str:
        lines = [f"coherence report, derivation height <= {self.depth}"]
        for p in self.pairs:
            verdict = "unique" if p.unique else "NOT UNIQUE"
            lines.append(
                f"  {p.source} < {p.target}: {verdict}; {p.derivations} derivations; "
                f"coercion {' | '.join(p.coercions)}"
            )
            if len(p.normal_forms) > 1:
                lines.append(f"    beta-normal compounds: {' | '.join(p.normal_forms)}")
            if not p.matches_declared:
                lines.append(f"    expected: {p.expected}")
        lines.append("coherent" if self.coherent else "incoherent")
        return "\n".join(lines)


def _declared_compound(sig, i, j, var):
    """The declared composite ``c_ij x``, or the shortest compound when undeclared."""
    name = sig.coercion(i, j)
    if name:
        return f"{name} {var}"
    out = var
    for _, _, step in _base_path(sig, i, j):
        out = f"{step} ({out})" if " " in out else f"{step} {out}"
    return out


def _core_sort(ty):
    while isinstance(ty, Forall):
        ty = ty.body
    return ty.name if isinstance(ty, Base) else None


def _witnesses(witnesses):
    return [Base(PROP)] if witnesses is None else list(witnesses)


def check_coherence(
    sig: Signature, max_depth: int, universe=None, witnesses=None
) -> CoherenceReport:
    """Count all derivations between base sorts up to ``max_depth`` and
    collect their normal coercions.

    Instead of materialising every derivation, this tabulates, per judgement
    and height bound, how many derivations produce each normal coercion.  By
    confluence the normal form of a composite coercion only depends on the
    normal forms of its parts, so the table is exact.  ``enumerate_derivations``
    is the literal enumeration for cross-checking at small depths.

    Quantifiers met between base sorts are vacuous, so the witness of an
    elimination never reaches the normal coercion of a base judgement.  One
    representative witness (``t``) therefore suffices and keeps the table
    small; pass ``witnesses`` to range over more types, which multiplies the
    derivation counts but leaves the set of coercions unchanged.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    universe = list(universe or default_universe(sig, max_depth))
    sorts = [Base(n) for n in sorted(sig.sorts - {PROP})]
    witnesses = _witnesses(witnesses)
    var = "x"
    cache = {}

    def compose(first, second):
        # a bare variable is the identity coercion
        if isinstance(second, Var):
            return first
        if isinstance(first, Var):
            return second
        k = (first, second)
        if k not in cache:
            cache[k] = normalize(substitute(second, var, first))
        return cache[k]

    def axioms(a, b):
        c = Counter()
        if a == b:
            c[Var(var, a)] += 1
        if isinstance(a, Base) and isinstance(b, Base):
            name = sig.coercion(a.name, b.name)
            if name:
                c[App(Const(name, Arrow(a, b)), Var(var, a))] += 1
        return c

    def reachable(a, b):
        # every judgement between sort quantifications needs a path of base coercions
        i, j = _core_sort(a), _core_sort(b)
        return i is None or j is None or i == j or _base_path(sig, i, j) is not None

    pairs = [(a, b) for a in universe for b in universe if reachable(a, b)]
    empty = Counter()
    table = {(a, b): axioms(a, b) for a, b in pairs}
    for _ in range(max_depth - 1):
        prev = table
        table = {}
        for a, b in pairs:
            c = axioms(a, b)
            for mid in universe:
                left, right = prev.get((a, mid), empty), prev.get((mid, b), empty)
                if not left or not right:
                    continue
                for t1, n1 in left.items():
                    for t2, n2 in right.items():
                        c[compose(t1, t2)] += n1 * n2
            if isinstance(b, Forall) and b.var not in a.free_tvars:
                for t1, n1 in prev.get((a, b.body), empty).items():
                    c[normalize(TyLam(b.var, t1))] += n1
            if isinstance(a, Arrow) and isinstance(b, Arrow):
                _arrow_rules(c, prev, a, b, var)
            for f in universe:
                if not isinstance(f, Forall) or not prev.get((a, f)):
                    continue
                for w in witnesses:
                    if type_substitute(f.body, f.var, w) == b:
                        for t1, n1 in prev[(a, f)].items():
                            c[normalize(TyApp(t1, w))] += n1
            table[(a, b)] = c

    report = CoherenceReport(max_depth)
    for a in sorts:
        for b in sorts:
            found = table.get((a, b))
            if not found:
                continue
            normal = sorted({str(t) for t in found})
            collapsed = sorted({str(collapse_coercions(t, sig)) for t in found})
            if a == b:
                expected = var
            else:
                expected = _declared_compound(sig, a.name, b.name, var)
            report.pairs.append(
                PairReport(a.name, b.name, sum(found.values()), normal, collapsed, expected)
            )
    return report


def _arrow_rules(c, prev, a, b, var):
    cods = prev.get((a.cod, b.cod), {})
    doms = prev.get((b.dom, a.dom), {})
    z = fresh_name("z", {var})
    for t1, n1 in cods.items():
        for u, n2 in doms.items():
            u_z = substitute(u, var, Var(z, b.dom))
            body = substitute(t1, var, App(Var(var, a), u_z))
            c[normalize(Lam(z, b.dom, body))] += n1 * n2
    if a.dom == b.dom:
        for t1, n1 in cods.items():
            body = substitute(t1, var, App(Var(var, a), Var(z, b.dom)))
            c[normalize(Lam(z, b.dom, body))] += n1
    if a.cod == b.cod:
        for u, n2 in doms.items():
            c[normalize(Lam(z, b.dom, App(Var(var, a), substitute(u, var, Var(z, b.dom)))))] += n2
