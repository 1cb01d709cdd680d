"""Command-line front end: `theta <verb> ...`."""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .completion import MAX_ARITY, MAX_P, precompletion_level, total_precompletion, verify_eta_properties, eta
from .delta_core import FiniteCategory, FiniteGroupoid
from .presheaf_engine import Nerve, PresheafSyntaxError, parse_presheaf
from .reports import CheckReport, Refusal, dumps, term
from .segal_complete import check_completeness, check_dk, check_segal, homotopy_category
from .strict_ncat import (NCatSyntaxError, equivalence_cells, from_category, is_gaunt_in_dimension, parse_ncat)
from .theta_cell import ThetaSyntaxError, parse_theta, theta_objects

EXIT_OK, EXIT_FALSE, EXIT_REFUSED, EXIT_USAGE = 0, 1, 2, 64


# -- the .cat text format -------------------------------------------------------
#
#   objects: a b
#   morphism: f a b
#   compose: g f = h
#   inverse: f = g
#
# Identities are implicit and named id_<object>; composites with identities are implicit.


class CatSyntaxError(ValueError):
    def __init__(self, msg, line, text=""):
        super().__init__(f"line {line}: {msg}" + (f": {text!r}" if text else ""))
        self.line = line


def parse_cat(text):
    objects, morphisms, composition, inverses = [], {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise CatSyntaxError("expected `keyword: ...`", lineno, raw)
        head, words = head.strip(), rest.split()
        if head == "objects":
            objects.extend(words)
        elif head in ("morphism", "morphisms"):
            if len(words) != 3:
                raise CatSyntaxError("morphism rows read `name source target`", lineno, raw)
            name, s, t = words
            if s not in objects or t not in objects:
                raise CatSyntaxError("unknown endpoint", lineno, raw)
            if name in morphisms or name.startswith("id_"):
                raise CatSyntaxError(f"duplicate or reserved morphism name {name}", lineno, raw)
            morphisms[name] = (s, t)
        elif head == "compose":
            if len(words) != 4 or words[2] != "=":
                raise CatSyntaxError("compose rows read `g f = h`", lineno, raw)
            g, f, _, h = words
            composition[(g, f)] = (h, lineno)
        elif head == "inverse":
            if len(words) != 3 or words[1] != "=":
                raise CatSyntaxError("inverse rows read `f = g`", lineno, raw)
            inverses[words[0]] = (words[2], lineno)
        else:
            raise CatSyntaxError(f"unknown keyword {head!r}", lineno, raw)
    if not objects:
        raise CatSyntaxError("no objects declared", 1)
    ids = {x: f"id_{x}" for x in objects}
    mors = dict(morphisms)
    mors.update({ids[x]: (x, x) for x in objects})
    table = {}
    for (g, f), (h, lineno) in composition.items():
        for name in (g, f, h):
            if name not in mors:
                raise CatSyntaxError(f"unknown morphism {name}", lineno)
        if mors[f][1] != mors[g][0] or mors[h] != (mors[f][0], mors[g][1]):
            raise CatSyntaxError(f"{g} o {f} = {h} has mismatched endpoints", lineno)
        table[(g, f)] = h
    for f, (s, t) in mors.items():
        table[(ids[t], f)] = f
        table[(f, ids[s])] = f
    for f in mors:
        for g in mors:
            if mors[f][1] == mors[g][0] and (g, f) not in table:
                raise CatSyntaxError(f"composite {g} o {f} is missing", len(text.splitlines()))
    try:
        C = FiniteCategory(objects, mors, ids, table)
        if inverses:
            inv = {f: g for f, (g, _) in inverses.items()}
            inv.update({g: f for f, g in list(inv.items())})
            inv.update({i: i for i in ids.values()})
            if set(inv) == set(mors):
                return FiniteGroupoid(objects, mors, ids, table, inverse=inv)
            for f, (g, lineno) in inverses.items():
                if C.compose(g, f) != ids[mors[f][0]]:
                    raise CatSyntaxError(f"{g} is not inverse to {f}", lineno)
    except ValueError as exc:
        if isinstance(exc, CatSyntaxError):
            raise
        raise CatSyntaxError(f"composition table inconsistent ({exc})", len(text.splitlines())) from exc
    return C


def print_cat(C):
    ids = set(C.identities.values())
    lines = ["objects: " + " ".join(str(x) for x in C.objects)]
    for f in C.morphisms:
        if f not in ids:
            lines.append(f"morphism: {f} {C.source[f]} {C.target[f]}")
    for (g, f), h in sorted(C.composition.items(), key=lambda kv: (str(kv[0][1]), str(kv[0][0]))):
        if f not in ids and g not in ids:
            lines.append(f"compose: {g} {f} = {h}")
    inverse = getattr(C, "inverse", None)
    if inverse:
        done = set()
        for f in C.morphisms:
            if f not in ids and f not in done:
                lines.append(f"inverse: {f} = {inverse[f]}")
                done.update((f, inverse[f]))
    return "\n".join(lines) + "\n"


def load_cat(path):
    p = Path(path)
    if not p.exists():
        bundled = resources.files("thetaspaces") / "data" / p.name
        if not bundled.is_file():
            raise FileNotFoundError(path)
        return parse_cat(bundled.read_text())
    return parse_cat(p.read_text())


# -- command plumbing -----------------------------------------------------------


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    src = common.add_argument_group("input")
    src.add_argument("--cat", help="category file in the .cat format")
    src.add_argument("--ncat", help="n-category expression, e.g. susp(isochain(1)@1)")
    src.add_argument("--presheaf", help="presheaf expression, e.g. V1(empty)")
    src.add_argument("--n", type=int, help="ambient dimension for presheaf expressions")
    common.add_argument("--level", default=None, help="Theta object, e.g. [1]([0])")
    common.add_argument("--p", type=int, default=0)
    common.add_argument("--k", type=int, default=None)
    common.add_argument("--window", default=None, help="arity,depth,degree")
    common.add_argument("--json", action="store_true")
    common.add_argument("--strict", action="store_true")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--force", action="store_true")

    top = _Parser(prog="theta", description="Finite Theta_n-space computations.")
    sub = top.add_subparsers(dest="verb", required=True)
    for verb, text in [("eval", "evaluate a presheaf at a level"),
                       ("nerve", "evaluate the nerve of an n-category"),
                       ("complete", "a level of the dimension-k precompletion"),
                       ("total", "a level of the total precompletion (n <= 2)"),
                       ("ho", "the homotopy category"),
                       ("dk", "DK check of the comparison map into the precompletion")]:
        sub.add_parser(verb, parents=[common], help=text)
    chk = sub.add_parser("check", parents=[common], help="run a checker")
    chk.add_argument("what", choices=["segal", "complete", "gaunt", "eta"])
    return top


def _ncat(args):
    if args.cat:
        return from_category(load_cat(args.cat), 1, name=Path(args.cat).stem)
    if args.ncat:
        return parse_ncat(args.ncat)
    raise UsageError("give --cat or --ncat")


def _presheaf(args):
    if args.presheaf:
        depth = args.n
        if depth is None:
            depth = parse_theta(args.level).depth if args.level else 1
        return parse_presheaf(args.presheaf)(depth)
    return Nerve(_ncat(args))


def _level(args, depth):
    if args.level is None:
        raise UsageError("--level is required")
    return parse_theta(args.level, depth)


def _window(args, depth):
    arity, wdepth, degree = 2, depth, 1
    if args.window:
        try:
            arity, wdepth, degree = (int(v) for v in args.window.split(","))
        except ValueError as exc:
            raise UsageError(f"--window expects arity,depth,degree: {args.window!r}") from exc
    if wdepth != depth:
        raise UsageError(f"window depth {wdepth} does not match the input dimension {depth}")
    _guard(args, arity, degree)
    return list(theta_objects(depth, arity)), tuple(range(degree + 1))


def _guard(args, arity, p):
    if args.force:
        if arity > MAX_ARITY or p > MAX_P:
            print(f"warning: forcing arity {arity}, degree {p}; enumeration grows exponentially", file=sys.stderr)
        return
    if arity > MAX_ARITY or p > MAX_P:
        raise Refusal(f"window arity {arity} / degree {p} exceeds the guards ({MAX_ARITY}, {MAX_P}); use --force",
                      estimate=(arity, p))


def _k(args, n):
    k = args.k if args.k is not None else n
    if not 1 <= k <= n:
        raise UsageError(f"--k must lie in 1..{n}")
    return k


def _emit_count(args, elements, extra=None):
    if args.json:
        payload = {"count": len(elements), "elements": term(list(elements))}
        payload.update(extra or {})
        print(json.dumps({"schema": 1, **payload}, indent=2))
    else:
        print(len(elements))
    return EXIT_OK


def _emit_report(args, report):
    verdict = bool(report.verdict)
    if args.json:
        print(dumps(report))
    else:
        print("true" if verdict else "false")
        if not verdict:
            cex = report.counterexample if isinstance(report, CheckReport) else report.first_failure()
            print(f"counterexample: {term(cex)}")
        for c in getattr(report, "caveats", []):
            print(f"caveat: {c}")
    if args.strict and getattr(report, "caveats", None):
        return EXIT_REFUSED
    return EXIT_OK if verdict else EXIT_FALSE


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args)
    except (UsageError, CatSyntaxError, ThetaSyntaxError, NCatSyntaxError, PresheafSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: no such file {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Refusal as exc:
        print(f"refused: {exc.reason}" + (f" (estimate {exc.estimate})" if exc.estimate is not None else ""),
              file=sys.stderr)
        return EXIT_REFUSED


def _dispatch(args):
    verb = args.verb
    if verb == "eval":
        W = _presheaf(args)
        x = _level(args, W.depth)
        _guard(args, x.total_arity(), args.p)
        return _emit_count(args, W.eval(x, args.p))
    if verb == "nerve":
        A = _ncat(args)
        if args.seed:
            A.validate(args.seed)
        x = _level(args, A.n)
        return _emit_count(args, Nerve(A).eval(x, 0))
    if verb == "complete":
        A = _ncat(args)
        k = _k(args, A.n)
        x = _level(args, A.n)
        _guard(args, x.total_arity(), args.p)
        L = precompletion_level(A, k, x, args.p, present=args.json, force=args.force)
        if args.json:
            print(json.dumps({"schema": 1, **L.to_json()}, indent=2))
            return EXIT_OK
        print(L.count)
        return EXIT_OK
    if verb == "total":
        A = _ncat(args)
        x = _level(args, A.n)
        _guard(args, x.total_arity(), args.p)
        T = total_precompletion(A, force=args.force)
        return _emit_count(args, T.eval(x, args.p), {"provenance": "recursive"})
    if verb == "ho":
        W = _presheaf(args)
        ho = homotopy_category(W)
        C = ho.category
        if args.json:
            print(json.dumps({"schema": 1, "objects": term(list(C.objects)),
                              "morphisms": [[term(f), term(C.source[f]), term(C.target[f])] for f in C.morphisms]},
                             indent=2))
        else:
            print(f"objects: {len(C.objects)}")
            print(f"morphisms: {len(C.morphisms)}")
            print(f"isomorphisms: {sum(1 for f in C.morphisms if C.is_iso(f))}")
        return EXIT_OK
    if verb == "dk":
        A = _ncat(args)
        return _emit_report(args, check_dk(eta(A, _k(args, A.n), args.force)))
    if verb == "check":
        return _check(args)
    raise UsageError(f"unknown verb {verb}")


def _check(args):
    what = args.what
    if what == "segal":
        W = _presheaf(args)
        objects, degrees = _window(args, W.depth)
        return _emit_report(args, check_segal(W, objects, degrees))
    if what == "gaunt":
        A = _ncat(args)
        k = _k(args, A.n)
        verdict = is_gaunt_in_dimension(A, k)
        extra = sorted(set(equivalence_cells(A, k)) - set(A.identity_cells(k)), key=repr)
        rep = CheckReport(f"gaunt_{k}", verdict, witnesses=[len(A.cells[k])],
                          counterexample=None if verdict else ("non-identity equivalence", extra[0]))
        return _emit_report(args, rep)
    if what == "complete":
        W = _presheaf(args)
        k = _k(args, W.depth)
        objects, degrees = _window(args, W.depth)
        return _emit_report(args, check_completeness(W, k, objects, degrees))
    if what == "eta":
        A = _ncat(args)
        k = _k(args, A.n)
        arity, degree = 2, 1
        if args.window:
            arity, _, degree = (int(v) for v in args.window.split(","))
        _guard(args, arity, degree)
        reports = verify_eta_properties(A, k, arity, tuple(range(degree + 1)), args.force)
        ok = all(r.verdict for r in reports.values())
        if args.json:
            print(json.dumps({"schema": 1, "verdict": ok, "checks": {n: r.to_json() for n, r in reports.items()}},
                             indent=2))
        else:
            for name, r in reports.items():
                print(f"{name}: {'true' if r.verdict else 'false'}")
        return EXIT_OK if ok else EXIT_FALSE
    raise UsageError(f"unknown check {what}")


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
