"""Command-line front end.

Exit status: 0 on success, 1 on a negative verdict (no reading, no
derivation, incoherent report), 2 on malformed input, type errors or I/O
failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .assembly import TREE_SCHEMA, assemble, load_tree
from .errors import MglexError, ParseError
from .lexicon import LEXICON_SCHEMA, SCHEMA_VERSION, load_lexicon
from .logic import format_formula, formula_to_json, term_to_formula
from .prelude import standard_signature
from .reduction import DEFAULT_MAX_STEPS, STRATEGIES, reductions, unfold_definitions
from .subtyping import check_coherence, coercion_term, derive_subtype
from .syntax import format_term, format_type, parse_term, parse_type
from .terms import check_type

TREE_SCHEMA_VERSION = 1
REPORT_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _signature(args):
    if getattr(args, "lexicon", None):
        sig = load_lexicon(args.lexicon).signature
        if args.sort or args.coercion or args.const:
            raise CliError("usage_error", "--lexicon cannot be combined with --sort/--coercion/--const")
        return sig
    sorts = set(args.sort or ())
    edges = []
    for spec in args.coercion or ():
        parts = spec.split(":")
        if len(parts) != 3 or not all(parts):
            raise CliError("usage_error", f"--coercion expects FROM:TO:NAME, got {spec!r}")
        edges.append(tuple(parts))
    consts = {}
    for spec in args.const or ():
        name, sep, ty = spec.partition("=")
        if not sep or not name.strip():
            raise CliError("usage_error", f"--const expects NAME=TYPE, got {spec!r}")
        consts[name.strip()] = parse_type(ty, sorts=sorts | {"t"})
    return standard_signature(sorts, consts, edges, require_closed=not getattr(args, "unclosed", False))


def _read_arg(text):
    if text == "-":
        return sys.stdin.read()
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return fh.read()
    return text


def _emit(args, payload, text):
    if args.format == "json":
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args):
    sig = _signature(args)
    if not args.term:
        payload = {"ok": True, "sorts": sorted(sig.sorts), "constants": len(sig.constants)}
        if args.lexicon:
            payload["entries"] = len(load_lexicon(args.lexicon).entries)
        _emit(args, payload, "ok")
        return EXIT_OK
    term = parse_term(_read_arg(args.term), sig)
    ty = check_type(sig, {}, term)
    _emit(args, {"term": format_term(term), "type": format_type(ty)}, f"{format_term(term)} : {format_type(ty)}")
    return EXIT_OK


def cmd_normalize(args):
    sig = _signature(args)
    term = parse_term(_read_arg(args.term), sig)
    ty = check_type(sig, {}, term)
    if not args.keep_definitions:
        term = unfold_definitions(term, sig)
    steps = [term]
    for t in reductions(term, args.strategy, args.max_steps):
        steps.append(t)
    nf = steps[-1]
    payload = {"normal_form": format_term(nf), "type": format_type(ty), "steps": len(steps) - 1}
    if args.trace:
        payload["trace"] = [format_term(t) for t in steps]
        text = "\n".join(f"{i:>4}  {format_term(t)}" for i, t in enumerate(steps))
    else:
        text = format_term(nf)
    _emit(args, payload, text)
    return EXIT_OK


def cmd_subtype(args):
    sig = _signature(args)
    s = parse_type(args.source, sig)
    t = parse_type(args.target, sig)
    d = derive_subtype(sig, s, t, alternative_elim=args.alternative_elim)
    if d is None:
        _emit(args, {"derivable": False, "source": format_type(s), "target": format_type(t)}, "no derivation")
        return EXIT_REJECTED
    c = coercion_term(d)
    payload = {
        "derivable": True,
        "source": format_type(s),
        "target": format_type(t),
        "derivation": d.pretty().splitlines(),
        "coercion": format_term(c.term),
        "variable": f"{c.source_var.name}:{format_type(c.source_type)}",
    }
    text = f"{d.pretty()}\ncoercion: {format_term(c.term)}   (free {payload['variable']})"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_coherence(args):
    sig = _signature(args)
    if args.depth < 1:
        raise CliError("usage_error", "--depth must be positive")
    report = check_coherence(sig, args.depth)
    payload = dict(report.to_dict(), schema_version=REPORT_SCHEMA_VERSION)
    _emit(args, payload, report.to_text())
    return EXIT_OK if report.coherent else EXIT_REJECTED


def _reading_payload(r, sig, style):
    out = {"term": format_term(r.logical_form)}
    try:
        f = term_to_formula(r.logical_form, sig)
        out["logical_form"] = formula_to_json(f) if style == "json" else format_formula(f, style == "unicode")
    except MglexError:
        out["logical_form"] = None
    out["trace"] = [{"occurrence": occ, "label": label} for occ, label in r.trace]
    presup = []
    for p in r.presuppositions:
        f = term_to_formula(p, sig)
        presup.append(formula_to_json(f) if style == "json" else format_formula(f, style == "unicode"))
    out["presuppositions"] = presup
    out["typing_facts"] = [
        {"term": format_term(t), "type": format_type(ty)} for t, ty in r.typing_facts
    ]
    return out


def _reading_text(i, p):
    lf = p["logical_form"]
    if isinstance(lf, dict):
        lf = json.dumps(lf, ensure_ascii=False)
    lines = [f"  reading {i}: {lf if lf is not None else p['term']}", f"    term: {p['term']}"]
    if p["trace"]:
        lines.append("    trace: " + ", ".join(f"{t['occurrence']}:{t['label']}" for t in p["trace"]))
    for q in p["presuppositions"]:
        q = json.dumps(q, ensure_ascii=False) if isinstance(q, dict) else q
        lines.append(f"    presupposes: {q}")
    for fact in p["typing_facts"]:
        lines.append(f"    typing: {fact['term']} : {fact['type']}")
    return "\n".join(lines)


def cmd_assemble(args):
    lex = load_lexicon(args.lexicon)
    results, texts, rejected = [], [], False
    for path in args.tree:
        doc = load_tree(path)
        readings = assemble(lex, doc.tree)
        if args.first:
            readings = readings[:1]
        payloads = [_reading_payload(r, lex.signature, args.logic_form) for r in readings]
        rejected = rejected or not readings
        results.append({"tree": path, "sentence": doc.sentence, "readings": payloads})
        head = doc.sentence or path
        body = [_reading_text(i, p) for i, p in enumerate(payloads, 1)] or ["  no reading (semantic rejection)"]
        texts.append("\n".join([head] + body))
    if args.format == "json":
        payload = results[0]["readings"] if len(results) == 1 else results
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        print("\n\n".join(texts))
    return EXIT_REJECTED if rejected else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _signature_options(p):
    p.add_argument("--lexicon", help="take the signature from a lexicon file")
    p.add_argument("--sort", action="append", metavar="NAME", help="declare a base sort")
    p.add_argument("--coercion", action="append", metavar="FROM:TO:NAME", help="declare a base coercion")
    p.add_argument("--const", action="append", metavar="NAME=TYPE", help="declare a constant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mglex", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="store_true", help="print the package and format versions")
    parser.add_argument("--schema", action="store_true", help="print the lexicon and tree JSON schemas")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("check", help="validate a lexicon or type-check a term")
    _signature_options(p)
    p.add_argument("term", nargs="?", help="term text, @FILE or - for stdin")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("normalize", help="beta-normalise a term")
    _signature_options(p)
    p.add_argument("term", help="term text, @FILE or - for stdin")
    p.add_argument("--trace", action="store_true", help="print every reduction step")
    p.add_argument("--strategy", choices=STRATEGIES, default="lo")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--keep-definitions", action="store_true", help="do not unfold defined constants")
    p.set_defaults(run=cmd_normalize)

    p = sub.add_parser("subtype", help="derive S < T and print its coercion")
    _signature_options(p)
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--alternative-elim", action="store_true", help="one-step quantifier elimination on the left")
    p.set_defaults(run=cmd_subtype)

    p = sub.add_parser("coherence", help="count normal coercions between base sorts")
    _signature_options(p)
    p.add_argument("--depth", type=int, required=True, help="maximal derivation height")
    p.add_argument("--unclosed", action="store_true", help="do not require declared composites")
    p.set_defaults(run=cmd_coherence)

    p = sub.add_parser("assemble", help="compute the readings of composition trees")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--tree", action="append", required=True, help="tree file (repeatable)")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--all", action="store_true", help="print every reading (default)")
    which.add_argument("--first", action="store_true", help="print the first reading only")
    p.add_argument("--logic-form", choices=("unicode", "ascii", "json"), default="unicode")
    p.set_defaults(run=cmd_assemble)

    for sp in sub.choices.values():
        sp.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        print(
            f"mglex {__version__} (lexicon schema {SCHEMA_VERSION}, tree schema {TREE_SCHEMA_VERSION}, "
            f"report schema {REPORT_SCHEMA_VERSION})"
        )
        return EXIT_OK
    if args.schema:
        print(json.dumps({"lexicon": LEXICON_SCHEMA, "tree": TREE_SCHEMA}, ensure_ascii=False, indent=2))
        return EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_ERROR
    try:
        return args.run(args)
    except (MglexError, CliError) as exc:
        return _fail(args, getattr(exc, "code", "error"), str(exc))
    except OSError as exc:
        return _fail(args, "io_error", f"{exc.strerror or exc}: {exc.filename or ''}".rstrip(": "))
    except json.JSONDecodeError as exc:
        return _fail(args, ParseError.code, str(exc))


def _fail(args, code, message):
    if args.format == "json":
        print(json.dumps({"error": code, "message": message}, ensure_ascii=False), file=sys.stderr)
    else:
        print(f"error ({code}): {message}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
