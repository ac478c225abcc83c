"""Seeded random generators for well-typed terms and subtyping pairs."""

import random

from mglex.prelude import standard_signature
from mglex.terms import PROP, Arrow, Base, Forall, Lam, TVar, TyApp, TyLam, Var, App, fresh_name, type_substitute


class Retry(Exception):
    pass


def term_signature(n_sorts):
    sorts = [f"e{i}" for i in range(n_sorts)]
    consts = {}
    for i, s in enumerate(sorts):
        nxt = sorts[(i + 1) % n_sorts]
        consts[f"a{i}"] = Base(s)
        consts[f"f{i}"] = Arrow(Base(s), Base(s))
        consts[f"g{i}"] = Arrow(Base(s), Arrow(Base(nxt), Base(nxt)))
        consts[f"p{i}"] = Arrow(Base(s), Base(PROP))
    consts["top"] = Base(PROP)
    return standard_signature(set(sorts), consts)


class TermGenerator:
    """Type-directed generator that plants beta and type-beta redexes.

    Quantified goals are restricted to shapes whose type variables are
    inhabited by a bound variable, so every goal has a leaf.
    """

    def __init__(self, rng, n_sorts=4):
        self.rng = rng
        self.sig = term_signature(n_sorts)
        self.sorts = [Base(f"e{i}") for i in range(n_sorts)] + [Base(PROP)]
        self.heads = [self.sig.const(n) for n in sorted(self.sig.constants) if n[0] in "afgpt"]

    def closed_type(self, depth=2):
        r = self.rng.random()
        if depth <= 0 or r < 0.45:
            return self.rng.choice(self.sorts)
        if r < 0.8:
            return Arrow(self.closed_type(depth - 1), self.closed_type(depth - 1))
        x = TVar("X")
        if r < 0.9:
            return Forall("X", Arrow(x, x))
        return Forall("X", Arrow(Arrow(x, x), Arrow(x, x)))

    def term(self, budget=60):
        while True:
            ty = self.closed_type()
            try:
                t = self.gen(ty, {}, budget)
            except Retry:
                continue
            if t.size <= 200:
                return t, ty

    def _fresh(self, base, env):
        return fresh_name(base, set(env))

    def gen(self, ty, env, budget):
        if isinstance(ty, Arrow):
            x = self._fresh("x", env)
            return Lam(x, ty.dom, self.gen(ty.cod, {**env, x: ty.dom}, budget - 1))
        if isinstance(ty, Forall):
            used = set().union(*(t.free_tvars for t in env.values())) if env else set()
            a = fresh_name(ty.var, used | {ty.var})
            return TyLam(a, self.gen(type_substitute(ty.body, ty.var, TVar(a)), env, budget - 1))
        if budget <= 1:
            return self.leaf(ty, env)
        r = self.rng.random()
        if r < 0.3:
            a = self.closed_type(1)
            x = self._fresh("y", env)
            half = budget // 2
            return App(Lam(x, a, self.gen(ty, {**env, x: a}, half)), self.gen(a, env, half))
        if r < 0.4:
            return self.church_two(ty, env, budget)
        if r < 0.75:
            return self.spine(ty, env, budget)
        return self.leaf(ty, env)

    def church_two(self, ty, env, budget):
        x = TVar("X")
        two = TyLam(
            "X",
            Lam("f", Arrow(x, x), Lam("z", x, App(Var("f", Arrow(x, x)), App(Var("f", Arrow(x, x)), Var("z", x))))),
        )
        half = budget // 2
        return App(App(TyApp(two, ty), self.gen(Arrow(ty, ty), env, half)), self.gen(ty, env, half))

    def spine(self, ty, env, budget):
        cands = []
        for h in [Var(n, t) for n, t in env.items()] + self.heads:
            args, res = [], h.type
            while isinstance(res, Arrow):
                args.append(res.dom)
                res = res.cod
                if res == ty:
                    cands.append((h, list(args)))
        if not cands:
            return self.leaf(ty, env)
        h, args = self.rng.choice(cands)
        share = max(1, (budget - 1) // len(args))
        out = h
        for a in args:
            out = App(out, self.gen(a, env, share))
        return out

    def leaf(self, ty, env):
        cands = [Var(n, t) for n, t in env.items() if t == ty]
        cands += [h for h in self.heads if h.type == ty]
        if not cands:
            raise Retry
        return self.rng.choice(cands)


def random_dag_signature(rng, n=6, p=0.35):
    """A composition-closed coercion DAG over sorts s0..s{n-1} in random order."""
    order = list(range(n))
    rng.shuffle(order)
    edges = {(order[i], order[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p}
    changed = True
    while changed:
        changed = False
        for i, j in list(edges):
            for j2, k in list(edges):
                if j == j2 and (i, k) not in edges:
                    edges.add((i, k))
                    changed = True
    names = [f"s{i}" for i in range(n)]
    return standard_signature(set(names), {}, [(names[i], names[j], f"c{i}_{j}") for i, j in sorted(edges)])


class PairGenerator:
    """Builds pairs ``S < T`` by construction, dualising at arrow domains."""

    def __init__(self, rng, sig):
        self.rng = rng
        self.sig = sig
        self.sorts = sorted(s for s in sig.sorts if s != PROP)

    def base_type(self, depth):
        r = self.rng.random()
        if depth <= 0 or r < 0.5:
            return Base(self.rng.choice(self.sorts))
        if r < 0.85:
            return Arrow(self.base_type(depth - 1), self.base_type(depth - 1))
        return Forall("X", Arrow(TVar("X"), self.base_type(depth - 1)))

    def sup(self, s, depth=2):
        rng = self.rng
        if isinstance(s, Base):
            ups = [j for (i, j) in self.sig.coercion_table if i == s.name]
            t = Base(rng.choice(ups + [s.name]))
            if depth > 0 and rng.random() < 0.15:
                return Forall("V", t)
            return t
        if isinstance(s, Arrow):
            return Arrow(self.sub(s.dom, depth - 1), self.sup(s.cod, depth - 1))
        if isinstance(s, Forall):
            if rng.random() < 0.5:
                w = Base(rng.choice(self.sorts))
                return self.sup(type_substitute(s.body, s.var, w), depth)
            return Forall(s.var, self.sup(s.body, depth - 1))
        return s

    def sub(self, t, depth=2):
        rng = self.rng
        if isinstance(t, Base):
            downs = [i for (i, j) in self.sig.coercion_table if j == t.name]
            return Base(rng.choice(downs + [t.name]))
        if isinstance(t, Arrow):
            return Arrow(self.sup(t.dom, depth - 1), self.sub(t.cod, depth - 1))
        if isinstance(t, Forall):
            return Forall(t.var, self.sub(t.body, depth - 1))
        return t

    def pair(self):
        s = self.base_type(2)
        return s, self.sup(s)
