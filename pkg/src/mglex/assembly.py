"""Meaning assembly over binary composition trees.

Each node applies one subtree to the other.  When the types clash, modifiers
from the words involved (or a sort coercion) may repair the application.  A
polymorphic function of shape ``Pi xi. xi -> (xi -> A) -> ... -> t`` applied
to an entity opens a copredication cluster: its ``xi -> A`` slots are filled
with modifiers of that entity, subject to the rigidity constraint.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Union

import jsonschema

from .errors import ParseError, TypeCheckError, UnknownWord
from .lexicon import FLEXIBLE, IDENTITY_LABEL, RIGID, LexEntry, Lexicon, OptionalTerm, transformations_for
from .logic import presupposition_terms, typing_facts
from .reduction import normalize
from .subtyping import coercion_term, derive_subtype
from .syntax import format_term
from .terms import (
    PROP,
    App,
    Arrow,
    Base,
    Lam,
    Signature,
    Term,
    TVar,
    TyApp,
    TyLam,
    Type,
    Var,
    check_type,
    fresh_name,
    match_type,
    strip_foralls,
    type_names,
    type_substitute,
)

log = logging.getLogger(__name__)

T = Base(PROP)

TREE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "mglex composition tree",
    "definitions": {
        "tree": {
            "oneOf": [
                {"type": "string"},
                {
                    "type": "object",
                    "required": ["fn", "arg"],
                    "properties": {"fn": {"$ref": "#/definitions/tree"}, "arg": {"$ref": "#/definitions/tree"}},
                    "additionalProperties": False,
                },
            ]
        }
    },
    "oneOf": [
        {"$ref": "#/definitions/tree"},
        {
            "type": "object",
            "required": ["tree"],
            "properties": {
                "tree": {"$ref": "#/definitions/tree"},
                "sentence": {"type": "string"},
                "expected_readings": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
    ],
}


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class Leaf:
    word: str


@dataclass(frozen=True)
class Node:
    fn: "CompositionTree"
    arg: "CompositionTree"


CompositionTree = Union[Leaf, Node]


def tree_from_json(obj) -> CompositionTree:
    if isinstance(obj, str):
        return Leaf(obj)
    if isinstance(obj, Mapping) and set(obj) == {"fn", "arg"}:
        return Node(tree_from_json(obj["fn"]), tree_from_json(obj["arg"]))
    raise ParseError(f"not a composition tree: {obj!r}")


def tree_to_json(tree: CompositionTree):
    if isinstance(tree, Leaf):
        return tree.word
    return {"fn": tree_to_json(tree.fn), "arg": tree_to_json(tree.arg)}


def leaves(tree: CompositionTree) -> list:
    if isinstance(tree, Leaf):
        return [tree.word]
    return leaves(tree.fn) + leaves(tree.arg)


@dataclass(frozen=True)
class TreeDocument:
    tree: CompositionTree
    sentence: Optional[str] = None
    expected_readings: Optional[int] = None


def load_tree(source) -> TreeDocument:
    """Read a tree file: a bare tree or ``{"tree": ..., "sentence": ...}``."""
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith(("{", '"')):
        try:
            doc = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"tree file is not valid JSON: {exc}") from None
    elif isinstance(source, str):
        doc = json.loads(source)
    else:
        doc = source
    try:
        jsonschema.validate(doc, TREE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParseError(f"tree schema violation: {exc.message}") from None
    if isinstance(doc, Mapping) and "tree" in doc:
        return TreeDocument(tree_from_json(doc["tree"]), doc.get("sentence"), doc.get("expected_readings"))
    return TreeDocument(tree_from_json(doc))


# ---------------------------------------------------------------------------
# readings


@dataclass(frozen=True)
class Use:
    """A modifier applied to one word occurrence."""

    occurrence: str
    label: str
    flag: str = FLEXIBLE


@dataclass(frozen=True)
class Reading:
    logical_form: Term
    trace: tuple = ()
    presuppositions: tuple = ()
    typing_facts: tuple = ()

    @property
    def labels(self) -> set:
        return {label for _, label in self.trace}


@dataclass(frozen=True)
class Candidate:
    """A partial reading of a subtree."""

    term: Term
    type: Type
    entry: Optional[LexEntry]
    occurrence: str
    uses: tuple = ()


def rigidity_ok(uses) -> bool:
    """All modifiers flexible, or one rigid modifier used in every slot."""
    uses = list(uses)
    if all(u.flag == FLEXIBLE for u in uses):
        return True
    return all(u.flag == RIGID for u in uses) and len({u.label for u in uses}) == 1


def enforce_rigidity(candidates) -> list:
    """Keep the candidates (sequences of Use) whose choices respect rigidity
    for every word occurrence."""
    out = []
    for uses in candidates:
        by_occ = {}
        for u in uses:
            by_occ.setdefault(u.occurrence, []).append(u)
        if all(rigidity_ok(group) for group in by_occ.values()):
            out.append(uses)
    return out


# ---------------------------------------------------------------------------
# application


def _type(term):
    return check_type(None, {}, term)


def _tidy(term):
    return normalize(term)


def instantiate(term: Term, ty: Type, arg_type: Type):
    """Instantiate the outer quantifiers of ``term`` so it accepts ``arg_type``.

    Returns ``(function, wrap)``: ``wrap`` re-abstracts the binders matching
    left undetermined around the application.  None when matching fails.
    """
    binders, body = strip_foralls(ty)
    if not isinstance(body, Arrow):
        return None
    if not binders:
        return (term, lambda t: t) if body.dom == arg_type else None
    subst = match_type(body.dom, arg_type, binders)
    if subst is None:
        return None
    avoid = type_names(ty) | type_names(arg_type)
    open_vars = []
    fn = term
    for v in binders:
        if v in subst:
            fn = TyApp(fn, subst[v])
        else:
            name = fresh_name(v, avoid)
            avoid.add(name)
            open_vars.append(name)
            fn = TyApp(fn, TVar(name))

    def wrap(t):
        for name in reversed(open_vars):
            t = TyLam(name, t)
        return t

    return fn, wrap


def _apply(fn: Term, arg: Term, arg_type: Type):
    """``fn arg`` after instantiation, or None if it does not type-check."""
    inst = instantiate(fn, _type(fn), arg_type)
    if inst is None:
        return None
    f, wrap = inst
    fty = _type(f)
    if not isinstance(fty, Arrow) or fty.dom != arg_type:
        return None
    return wrap(App(f, arg))


def _expected_domain(fn: Term):
    _, body = strip_foralls(_type(fn))
    return body.dom if isinstance(body, Arrow) else None


def sort_coercion(sig: Signature, source: Type, target: Type) -> Optional[OptionalTerm]:
    """The subtyping coercion ``source -> target`` packaged as a flexible modifier."""
    if source == target:
        return None
    d = derive_subtype(sig, source, target)
    if d is None:
        return None
    c = coercion_term(d)
    term = Lam(c.source_var.name, source, c.term)
    return OptionalTerm(f"<{format_term(normalize(c.term))}>", term, FLEXIBLE)


def resolve_application(sig: Signature, f: Candidate, a: Candidate) -> list:
    """All ways of applying ``f`` to ``a``: ``[(term, uses)]``.

    A direct application is tried first; only when it fails are single
    modifiers of the function word, of the argument word, of both, or a sort
    coercion of the argument tried.
    """
    direct = _apply(f.term, a.term, a.type)
    if direct is not None:
        flag = a.entry.identity_flag if a.entry is not None else FLEXIBLE
        return [(direct, (Use(a.occurrence, IDENTITY_LABEL, flag),))]
    fn_mods = [m for m in (f.entry.optional_terms if f.entry else ()) if m.type.dom == f.type]
    arg_mods = [m for m in (a.entry.optional_terms if a.entry else ()) if m.type.dom == a.type]
    out = []
    for mf in fn_mods:
        t = _apply(App(mf.term, f.term), a.term, a.type)
        if t is not None:
            out.append((t, (Use(f.occurrence, mf.label, mf.flag),)))
    for ma in arg_mods:
        t = _apply(f.term, App(ma.term, a.term), ma.type.cod)
        if t is not None:
            out.append((t, (Use(a.occurrence, ma.label, ma.flag),)))
    for mf in fn_mods:
        for ma in arg_mods:
            t = _apply(App(mf.term, f.term), App(ma.term, a.term), ma.type.cod)
            if t is not None:
                out.append((t, (Use(f.occurrence, mf.label, mf.flag), Use(a.occurrence, ma.label, ma.flag))))
    dom = _expected_domain(f.term)
    if dom is not None and not dom.free_tvars:
        c = sort_coercion(sig, a.type, dom)
        if c is not None:
            t = _apply(f.term, App(c.term, a.term), dom)
            if t is not None:
                out.append((t, (Use(a.occurrence, c.label, c.flag),)))
    return out


def copredication_slots(fn_type: Type, arg_type: Type) -> list:
    """Target types ``A_i`` of the ``xi -> A_i`` slots opened when a function
    of type ``Pi .. xi. xi -> (xi -> A_1) -> ... -> (xi -> A_n) -> B`` takes
    an argument of type ``arg_type``; empty for any other shape."""
    binders, body = strip_foralls(fn_type)
    if not (isinstance(body, Arrow) and isinstance(body.dom, TVar) and body.dom.name in binders):
        return []
    xi = body.dom
    slots = []
    rest = body.cod
    while isinstance(rest, Arrow) and isinstance(rest.dom, Arrow) and rest.dom.dom == xi:
        slots.append(rest.dom.cod)
        rest = rest.cod
    if not slots:
        return []
    subst = match_type(body.dom, arg_type, binders)
    if subst is None:
        return []
    out = []
    for s in slots:
        for v, w in subst.items():
            s = type_substitute(s, v, w)
        out.append(s)
    return out


def slot_options(sig: Signature, entry: Optional[LexEntry], source: Type, target: Type) -> list:
    """Modifiers that may fill a ``source -> target`` slot: the entry's own
    (identity included) plus a sort coercion."""
    opts = transformations_for(entry, source, target)
    c = sort_coercion(sig, source, target)
    if c is not None:
        opts.append(c)
    return opts


def _fill_slots(sig, term, a: Candidate, slots):
    choices = [slot_options(sig, a.entry, a.type, s) for s in slots]
    out = []
    for combo in itertools.product(*choices):
        uses = tuple(Use(a.occurrence, m.label, m.flag) for m in combo)
        if not enforce_rigidity([uses]):
            continue
        t = term
        for m in combo:
            t = App(t, m.term)
        out.append((t, uses))
    return out


def _takes_predicate(entry: LexEntry) -> bool:
    _, body = strip_foralls(entry.type)
    return isinstance(body, Arrow) and isinstance(body.dom, Arrow)


# ---------------------------------------------------------------------------
# assemble


def _candidates(lex: Lexicon, tree, counter) -> list:
    if isinstance(tree, Leaf):
        entry = lex.entry(tree.word)
        occ = f"{tree.word}@{next(counter)}"
        return [Candidate(entry.principal, entry.type, entry, occ)]
    fns = _candidates(lex, tree.fn, counter)
    args = _candidates(lex, tree.arg, counter)
    sig = lex.signature
    out = []
    for f in fns:
        for a in args:
            anchor = a if isinstance(tree.fn, Leaf) and _takes_predicate(f.entry) else f
            for term, uses in resolve_application(sig, f, a):
                filled = [(term, ())]
                slots = _slots_for(f, a, uses)
                if slots:
                    filled = _fill_slots(sig, term, a, slots)
                for t, slot_uses in filled:
                    t = _tidy(t)
                    out.append(Candidate(t, _type(t), anchor.entry, anchor.occurrence, f.uses + a.uses + uses + slot_uses))
    return out


def _slots_for(f: Candidate, a: Candidate, uses) -> list:
    # slots open only on a direct application of the polymorphic function
    if any(u.label != IDENTITY_LABEL for u in uses):
        return []
    return copredication_slots(f.type, a.type)


def _finish(lex: Lexicon, candidates) -> list:
    sig = lex.signature
    merged = {}
    for c in candidates:
        lf = normalize(c.term, sig)
        ty = _type(lf)
        if ty != T:
            log.warning("reading has type %s, not t: %s", ty, format_term(lf))
        trace = {(u.occurrence, u.label) for u in c.uses if u.label != IDENTITY_LABEL}
        if lf.key in merged:
            merged[lf.key][1].update(trace)
        else:
            merged[lf.key] = (lf, set(trace))
    readings = []
    for lf, trace in merged.values():
        presup = tuple(presupposition_terms(lf, sig)) if _type(lf) == T else ()
        readings.append(Reading(lf, tuple(sorted(trace)), presup, tuple(typing_facts(lf))))
    readings.sort(key=lambda r: (r.trace, format_term(r.logical_form)))
    return readings


def assemble(lex: Lexicon, tree: CompositionTree) -> list:
    """Every reading of ``tree``; an empty list is a semantic rejection."""
    for w in leaves(tree):
        if w not in lex:
            raise UnknownWord(w)
    return _finish(lex, _candidates(lex, tree, itertools.count()))


# ---------------------------------------------------------------------------
# brute-force oracle


def oracle_readings(lex: Lexicon, tree: CompositionTree) -> list:
    """Readings by exhaustive enumeration of modifier assignments.

    Every application node tries no modifier or any single modifier on the
    function word, on the argument word, on both, or a sort coercion; every
    copredication slot tries every modifier of the entity word, the identity
    and sort coercions.  Assignments are kept when the whole term type-checks,
    modifiers are only used where the bare application fails, and rigidity
    holds.  Independent of the repair search used by ``assemble``.
    """
    sig = lex.signature
    counter = itertools.count()

    def run(node):
        if isinstance(node, Leaf):
            e = lex.entry(node.word)
            return [(e.principal, e, f"{node.word}@{next(counter)}", ())]
        fns, args = run(node.fn), run(node.arg)
        out = []
        for fterm, fe, focc, fuses in fns:
            for aterm, ae, aocc, auses in args:
                anchor = (ae, aocc) if isinstance(node.fn, Leaf) and _takes_predicate(fe) else (fe, focc)
                bare = _apply(fterm, aterm, _type(aterm))
                fopts = [None] + list(fe.optional_terms if fe else ())
                aopts = [None] + list(ae.optional_terms if ae else ())
                dom = _expected_domain(fterm)
                if dom is not None and not dom.free_tvars:
                    c = sort_coercion(sig, _type(aterm), dom)
                    if c is not None:
                        aopts.append(c)
                for mf, ma in itertools.product(fopts, aopts):
                    if (mf is not None or ma is not None) and bare is not None:
                        continue
                    if mf is not None and ma is not None and ma.label.startswith("<"):
                        continue
                    ft = fterm if mf is None else App(mf.term, fterm)
                    at = aterm if ma is None else App(ma.term, aterm)
                    try:
                        aty = _type(at)
                        _type(ft)
                    except TypeCheckError:
                        continue
                    t = _apply(ft, at, aty)
                    if t is None:
                        continue
                    uses = []
                    if mf is not None:
                        uses.append(Use(focc, mf.label, mf.flag))
                    if ma is not None:
                        uses.append(Use(aocc, ma.label, ma.flag))
                    if not uses:
                        uses.append(Use(aocc, IDENTITY_LABEL, ae.identity_flag if ae else FLEXIBLE))
                    results = [(t, ())]
                    if bare is not None:
                        results = _oracle_slots(sig, fterm, t, aterm, ae, aocc)
                    for full, slot_uses in results:
                        out.append((_tidy(full), anchor[0], anchor[1], fuses + auses + tuple(uses) + slot_uses))
        return out

    cands = [Candidate(t, _type(t), e, occ, uses) for t, e, occ, uses in run(tree)]
    return _finish(lex, cands)


def _oracle_slots(sig, fterm, term, aterm, ae, aocc):
    slots = copredication_slots(_type(fterm), _type(aterm))
    if not slots:
        return [(term, ())]
    aty = _type(aterm)
    pool = list(ae.optional_terms if ae else ())
    pool.append(OptionalTerm(IDENTITY_LABEL, Lam("x", aty, Var("x", aty)), ae.identity_flag if ae else FLEXIBLE))
    for s in slots:
        c = sort_coercion(sig, aty, s)
        if c is not None and c not in pool:
            pool.append(c)
    out = []
    for combo in itertools.product(pool, repeat=len(slots)):
        t = term
        try:
            for m in combo:
                t = App(t, m.term)
            _type(t)
        except TypeCheckError:
            continue
        uses = tuple(Use(aocc, m.label, m.flag) for m in combo)
        if enforce_rigidity([uses]):
            out.append((t, uses))
    return out
