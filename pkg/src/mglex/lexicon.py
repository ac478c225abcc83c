"""Word-anchored lexicon: principal terms plus optional modifiers.

A lexicon document is JSON::

    {
      "schema_version": 1,
      "sorts": ["T", "Pl"],
      "extensions": [],
      "base_coercions": [{"from": "T", "to": "Pl", "name": "c"}],
      "constants": [{"name": "vast", "type": "Pl -> t"}],
      "entries": [
        {"word": "vast", "principal": "vast", "optional": [], "identity_flag": "flexible"}
      ]
    }

Constants may carry a ``definition`` (a closed term unfolded before
normalisation).  ``extensions`` may list ``"plurals"`` to install the plural
operators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

import jsonschema

from .errors import (
    DuplicateWord,
    InvalidSignature,
    ParseError,
    TypeCheckError,
    TypeErrorInEntry,
    UnknownSort,
    UnknownWord,
)
from .prelude import BUILTIN_NAMES, standard_signature
from .syntax import format_term, format_type, parse_term, parse_type
from .terms import Arrow, Lam, Signature, Term, Type, Var, check_type

SCHEMA_VERSION = 1

FLEXIBLE = "flexible"
RIGID = "rigid"
FLAGS = (FLEXIBLE, RIGID)

IDENTITY_LABEL = "id"

_FLAG = {"enum": list(FLAGS)}

LEXICON_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "mglex lexicon",
    "type": "object",
    "required": ["schema_version", "sorts", "constants", "entries"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "sorts": {"type": "array", "items": {"type": "string"}},
        "extensions": {"type": "array", "items": {"enum": ["plurals"]}},
        "base_coercions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "to", "name"],
                "properties": {
                    "from": {"type": "string"},
                    "to": {"type": "string"},
                    "name": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "constants": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "type"],
                "properties": {
                    "name": {"type": "string"},
                    "type": {"type": "string"},
                    "definition": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["word", "principal"],
                "properties": {
                    "word": {"type": "string"},
                    "principal": {"type": "string"},
                    "identity_flag": _FLAG,
                    "optional": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["label", "term", "flag"],
                            "properties": {
                                "label": {"type": "string"},
                                "term": {"type": "string"},
                                "flag": _FLAG,
                            },
                            "additionalProperties": False,
                        },
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class OptionalTerm:
    """A modifier: a closed term of arrow type tagged flexible or rigid."""

    label: str
    term: Term
    flag: str = FLEXIBLE

    @property
    def type(self) -> Type:
        return check_type(None, {}, self.term)

    @property
    def rigid(self) -> bool:
        return self.flag == RIGID

    @property
    def is_identity(self) -> bool:
        return self.label == IDENTITY_LABEL


def identity_modifier(ty: Type, flag: str = FLEXIBLE) -> OptionalTerm:
    return OptionalTerm(IDENTITY_LABEL, Lam("x", ty, Var("x", ty)), flag)


@dataclass(frozen=True)
class LexEntry:
    word: str
    principal: Term
    optional_terms: tuple = ()
    identity_flag: str = FLEXIBLE

    @property
    def type(self) -> Type:
        return check_type(None, {}, self.principal)

    def modifier(self, label: str) -> Optional[OptionalTerm]:
        for m in self.optional_terms:
            if m.label == label:
                return m
        return None


@dataclass(frozen=True)
class Lexicon:
    signature: Signature
    entries: Mapping = field(default_factory=dict)
    declared_constants: tuple = ()
    extensions: tuple = ()

    def entry(self, word: str) -> LexEntry:
        try:
            return self.entries[word]
        except KeyError:
            raise UnknownWord(word) from None

    def __contains__(self, word):
        return word in self.entries


def transformations_for(entry: Optional[LexEntry], source: Type, target: Type) -> list:
    """Modifiers of ``entry`` with type exactly ``source -> target``.

    The identity, carrying the entry's identity flag, comes first when the two
    types coincide.  A missing entry still offers the (flexible) identity.
    """
    out = []
    if source == target:
        flag = entry.identity_flag if entry is not None else FLEXIBLE
        out.append(identity_modifier(source, flag))
    if entry is not None:
        want = Arrow(source, target)
        out += [m for m in entry.optional_terms if m.type == want]
    return out


# ---------------------------------------------------------------------------
# loading


def load_lexicon(source: Union[str, Path, Mapping]) -> Lexicon:
    """Build a validated Lexicon from a path, a JSON string or a parsed document."""
    if isinstance(source, Mapping):
        doc = source
    else:
        text = source
        if isinstance(source, Path) or not str(source).lstrip().startswith("{"):
            text = Path(source).read_text(encoding="utf-8")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"lexicon is not valid JSON: {exc}") from None
    try:
        jsonschema.validate(doc, LEXICON_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "document"
        raise ParseError(f"lexicon schema violation at {where}: {exc.message}") from None
    return _build(doc)


def _build(doc):
    sorts = set(doc["sorts"])
    extensions = tuple(doc.get("extensions", ()))
    edges = [(e["from"], e["to"], e["name"]) for e in doc.get("base_coercions", ())]
    for i, j, _ in edges:
        for s in (i, j):
            if s not in sorts:
                raise UnknownSort(s)

    decls = doc["constants"]
    names = [c["name"] for c in decls]
    if len(set(names)) != len(names):
        dup = next(n for n in names if names.count(n) > 1)
        raise ParseError(f"constant {dup!r} declared twice")
    reserved = sorted(set(names) & BUILTIN_NAMES)
    if reserved:
        raise InvalidSignature(f"constant {reserved[0]!r} is built in")
    constants = {c["name"]: parse_type(c["type"], sorts=sorts | {"t"}) for c in decls}
    sig = standard_signature(sorts, constants, edges, require_closed=True)
    if "plurals" in extensions:
        from .plurals import install_plural_operators

        sig = install_plural_operators(sig)
    defs = {}
    for c in decls:
        if "definition" in c:
            defs[c["name"]] = parse_term(c["definition"], sig)
    if defs:
        sig = sig.extend(definitions=defs)

    entries = {}
    for raw in doc["entries"]:
        word = raw["word"]
        if word in entries:
            raise DuplicateWord(word)
        entries[word] = _entry(sig, raw)
    return Lexicon(sig, entries, tuple(names), extensions)


def _parse_closed(sig, word, text):
    try:
        term = parse_term(text, sig)
    except ParseError as exc:
        raise ParseError(f"entry {word!r}: {exc}") from None
    try:
        ty = check_type(sig, {}, term)
    except UnknownSort:
        raise
    except TypeCheckError as exc:
        raise TypeErrorInEntry(word, str(exc)) from None
    return term, ty


def _entry(sig, raw):
    word = raw["word"]
    principal, _ = _parse_closed(sig, word, raw["principal"])
    mods, labels = [], set()
    for opt in raw.get("optional", ()):
        label = opt["label"]
        if label in labels or label == IDENTITY_LABEL:
            raise TypeErrorInEntry(word, f"modifier label {label!r} is reserved or repeated")
        labels.add(label)
        term, ty = _parse_closed(sig, word, opt["term"])
        if not isinstance(ty, Arrow):
            raise TypeErrorInEntry(word, f"modifier {label!r} has non-arrow type {format_type(ty)}")
        mods.append(OptionalTerm(label, term, opt["flag"]))
    return LexEntry(word, principal, tuple(mods), raw.get("identity_flag", FLEXIBLE))


def dump_lexicon(lex: Lexicon) -> dict:
    """The JSON document ``load_lexicon`` turns back into ``lex``."""
    sig = lex.signature
    constants = []
    for name in lex.declared_constants:
        item = {"name": name, "type": format_type(sig.constants[name])}
        if name in sig.definitions:
            item["definition"] = format_term(sig.definitions[name])
        constants.append(item)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "sorts": sorted(sig.sorts - {"t"}),
        "extensions": list(lex.extensions),
        "base_coercions": [
            {"from": i, "to": j, "name": n} for i, j, n in sorted(sig.base_coercions)
        ],
        "constants": constants,
        "entries": [],
    }
    for e in lex.entries.values():
        doc["entries"].append(
            {
                "word": e.word,
                "principal": format_term(e.principal),
                "optional": [
                    {"label": m.label, "term": format_term(m.term), "flag": m.flag}
                    for m in e.optional_terms
                ],
                "identity_flag": e.identity_flag,
            }
        )
    return doc


def save_lexicon(lex: Lexicon, path) -> None:
    Path(path).write_text(json.dumps(dump_lexicon(lex), ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
