"""Command line front end.  Prints deterministic JSON; exit codes 0 decided or
verified, 2 exhausted at the given bounds (or iteration cap hit), 1 invalid input."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import presets, ring, roe, typesem
from .core import InverseSemigroup, PartialBijection, Semigroup, read_table_text
from .decide import folner, measures
from .errors import InvalidInput, InvalidWitness, InvsemError, IterationCapExceeded
from .rep import Representation
from .setalg import AffinePartialMap

EXIT_OK, EXIT_INVALID, EXIT_EXHAUSTED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which means "exhausted" here
        raise UsageError(message)


# ---------------------------------------------------------------------------
# input helpers


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _points(text: str) -> list[int]:
    """"16" is 0..15, "a:b" is a..b-1, "1,4,5" is literal."""
    text = text.strip()
    try:
        if ":" in text:
            a, b = text.split(":")
            return list(range(int(a), int(b)))
        if "," in text or not text:
            return [int(t) for t in text.split(",") if t.strip()]
        return list(range(int(text)))
    except ValueError as exc:
        raise InvalidInput(f"bad point list {text!r}") from exc


def _literal_points(text: str) -> list[int]:
    if ":" in text:
        return _points(text)
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InvalidInput(f"bad point list {text!r}") from exc


def _load_witness(path: str):
    """A witness file, or the saved output of a search that found one."""
    data = _load_json(path)
    if isinstance(data, dict) and isinstance(data.get("witness"), dict):
        return data["witness"]
    return data


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc


def load_semigroup(path: str) -> Semigroup:
    """JSON {"table": [[...]], "labels": [...]} or a text table (size, then rows)."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        return _as_inverse(read_table_text(text), None)
    if isinstance(data, list):
        data = {"table": data}
    return _as_inverse(data["table"], data.get("labels"))


def _as_inverse(table, labels) -> Semigroup:
    try:
        return InverseSemigroup(table, labels)
    except InvalidInput:
        return Semigroup(table, labels)


def load_rep(path: str) -> Representation:
    """JSON {"universe": n or null, "generators": [{"name", "pairs"} | {"name", "map"}]},
    or just the generator list (each pair-generator may carry its own "universe")."""
    data = _load_json(path)
    gens = data["generators"] if isinstance(data, dict) else data
    universe = data.get("universe") if isinstance(data, dict) else None
    names, maps = [], []
    for g in gens:
        names.append(str(g["name"]))
        if "map" in g:
            maps.append(AffinePartialMap.parse(g["map"]))
        else:
            n = g.get("universe", universe)
            if n is None:
                raise InvalidInput(f"generator {g['name']} needs a universe size")
            universe = n
            maps.append(PartialBijection(int(n), [tuple(p) for p in g["pairs"]]))
    affine = [isinstance(m, AffinePartialMap) for m in maps]
    if any(affine) and not all(affine):
        raise InvalidInput("generators mix finite and affine maps")
    return Representation(names, maps, None if all(affine) else universe,
                          label=Path(path).stem)


def get_rep(args) -> Representation:
    if getattr(args, "rep", None):
        return load_rep(args.rep)
    if getattr(args, "preset", None):
        return presets.rep_preset(args.preset)
    raise InvalidInput("give --preset or --rep")


def get_semigroup(args) -> Semigroup:
    if getattr(args, "semigroup", None):
        return load_semigroup(args.semigroup)
    if getattr(args, "preset", None):
        return presets.semigroup_preset(args.preset)
    raise InvalidInput("give --preset or --semigroup")


def _bounds(text: str | None) -> dict[str, int]:
    """"L=2,p=2,k=2" style bounds."""
    out: dict[str, int] = {}
    if not text:
        return out
    for part in text.split(","):
        if "=" not in part:
            raise InvalidInput(f"bad bound {part!r}; expected key=value")
        k, v = part.split("=", 1)
        out[k.strip()] = int(v)
    return out


# ---------------------------------------------------------------------------
# commands; each returns (exit code, JSON-able payload)


def cmd_check_day(args):
    sg = get_semigroup(args)
    d = measures.day_invariance_feasible(sg)
    return EXIT_OK, {"command": "check-day", "size": sg.size, **d.to_json()}


def cmd_check_domain_measure(args):
    rep = get_rep(args)
    d = measures.domain_measure_feasible(rep)
    return EXIT_OK, {"command": "check-domain-measure", "representation": rep.label, **d.to_json()}


def cmd_check_amenable(args):
    rep = get_rep(args)
    if rep.is_finite:
        d = measures.amenable_feasible(rep)
        return EXIT_OK, {"command": "check-amenable", "representation": rep.label, **d.to_json()}
    b = _bounds(args.bounds)
    p, t = b.get("p", 4), b.get("t", 1)
    sets, rels = measures.periodic_fragment(rep, p, t)
    d = measures.fragment_feasibility(rep, sets, rels, candidate=lambda s: s.natural_density())
    return EXIT_OK, {"command": "check-amenable", "representation": rep.label,
                     "bounds": {"p": p, "t": t}, **d.to_json()}


def cmd_folner(args):
    rep = get_rep(args)
    window = _points(args.window) if args.window else None
    res = folner.folner_search(rep, args.eps, window=window, max_size=args.max_size,
                               exhaustive=args.exhaustive, strict=args.strict,
                               split=args.split_eps, amenable=args.amenable, jobs=args.jobs)
    payload = {"command": "folner", "representation": rep.label, "eps": str(args.eps),
               "bounds": {"window": args.window, "max_size": args.max_size,
                          "exhaustive": args.exhaustive, "strict": args.strict,
                          "split_eps": args.split_eps}, **res.to_json()}
    return (EXIT_OK if res.status == folner.FOUND else EXIT_EXHAUSTED), payload


def cmd_paradox(args):
    rep = get_rep(args)
    if args.action == "verify":
        if not args.witness:
            raise InvalidInput("paradox verify needs --witness")
        pw = typesem.paradox_from_json(_load_witness(args.witness[0]), rep)
        problems = typesem.paradox_problems(pw, rep)
        payload = {"command": "paradox verify", "valid": not problems, "problems": problems}
        return (EXIT_OK if not problems else EXIT_INVALID), payload
    b = _bounds(args.bounds)
    L = b.get("L", args.word_len if args.word_len is not None else 2)
    p, k = b.get("p", 2), b.get("k", 2)
    res = typesem.paradox_search(rep, L, p, k)
    payload = {"command": "paradox search", "bounds": {"L": L, "p": p, "k": k}, **res.to_json(rep)}
    return (EXIT_OK if res.witness else EXIT_EXHAUSTED), payload


def _leveled(data, rep):
    return typesem.leveled_from_json(data, rep)


def cmd_typesem(args):
    rep = get_rep(args)
    ws = args.witness or []
    if args.action == "compose":
        if len(ws) != 2:
            raise InvalidInput("compose needs two --witness files")
        w1, w2 = (typesem.witness_from_json(_load_witness(p), rep) for p in ws)
        for w in (w1, w2):
            typesem.verify_witness(w, rep)
        out = typesem.compose_witnesses(w1, w2, rep)
        typesem.verify_witness(out, rep)
        return EXIT_OK, {"command": "typesem compose", "verified": True, "witness": out.to_json(rep)}
    if len(ws) != 1:
        raise InvalidInput(f"{args.action} needs one --witness file")
    data = _load_json(ws[0])
    try:
        if args.action == "sb":
            A, B = _leveled(data["A"], rep), _leveled(data["B"], rep)
            w1 = typesem.witness_from_json(data["w1"], rep)
            w2 = typesem.witness_from_json(data["w2"], rep)
            res = typesem.schroeder_bernstein(w1, A, w2, B, rep, cap=args.cap)
            return EXIT_OK, {"command": "typesem sb", "iterations": res.iterations,
                             "verified": True, "witness": res.witness.to_json(rep)}
        if args.action == "cancel":
            A, B = _leveled(data["A"], rep), _leveled(data["B"], rep)
            ca = [typesem.witness_from_json(w, rep) for w in data["copies_A"]]
            cb = [typesem.witness_from_json(w, rep) for w in data["copies_B"]]
            chi = typesem.witness_from_json(data["chi"], rep)
            res = typesem.koenig_cancel(A, B, ca, cb, chi, rep)
            return EXIT_OK, {"command": "typesem cancel", "verified": True,
                             "witness": res.witness.to_json(rep)}
        n = int(data["n"])
        A = rep.make_set(data["A"])
        emb = typesem.witness_from_json(data["embedding"], rep)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed {args.action} input: {exc}") from exc
    res = typesem.absorb(n, emb, A, rep, cap=args.cap)
    return EXIT_OK, {"command": "typesem absorb", "steps": res.steps, "verified": True,
                     "witness": res.witness.to_json(rep), "paradox": res.paradox.to_json(rep)}


def _ring_for(name: str | None):
    if name in (None, "f2plus_semidirect"):
        return ring.F2PlusSemidirect()
    return ring.FiniteSemigroupRing(presets.semigroup_preset(name))


def cmd_ring(args):
    if args.action == "annihilator":
        rep = ring.annihilator_check(args.n_max if args.n_max is not None else 8,
                                     args.word_len if args.word_len is not None else 5)
        return (EXIT_OK if rep["passed"] else EXIT_EXHAUSTED), {"command": "ring annihilator", **rep}
    R = _ring_for(args.preset)
    if args.folner_set:
        W = ring.folner_to_subspace(R, _literal_points(args.folner_set))
    elif args.subspace:
        W = ring.Subspace.span(R, [ring.parse_element(t, R) for t in args.subspace.split(";")])
    else:
        raise InvalidInput("ring defect needs --subspace or --folner-set")
    if not args.element:
        raise InvalidInput("ring defect needs --element")
    a = ring.parse_element(args.element, R)
    ratio = ring.folner_subspace_defect(W, a)
    return EXIT_OK, {"command": "ring defect", "dim": W.dim, "element": str(a),
                     "ratio": str(ratio), "basis": W.to_json()}


def _sets(text: str | None, rep):
    if not text:
        return []
    return [rep.make_set(t.strip()) for t in text.split(";") if t.strip()]


def cmd_roe(args):
    rep = get_rep(args)
    if rep.is_finite:
        window = _points(args.window) if args.window else list(range(rep.universe_size))
    else:
        window = _points(args.window or "64")
    L = args.word_len if args.word_len is not None else 3
    if args.action == "relations":
        words = [w.strip() for w in (args.words or "").split(";") if w.strip()]
        res = roe.check_relations(rep, window, words or [rep.names[0]], _sets(args.sets, rep))
        return (EXIT_OK if res.passed else EXIT_INVALID), {"command": "roe relations", **res.to_json()}
    if args.action == "traces":
        res = roe.trace_factorization_check(rep, window, L)
        return (EXIT_OK if res["factorizes"] else EXIT_INVALID), {"command": "roe traces", **res}
    if args.action == "corner":
        if args.f1 is None or args.f2 is None:
            raise InvalidInput("corner needs --f1 and --f2")
        res = roe.corner_dimension(_literal_points(args.f1), _literal_points(args.f2), rep,
                                   args.word_len if args.word_len is not None else 8,
                                   strict=args.strict)
        return EXIT_OK, {"command": "roe corner", **res.to_json()}
    if args.action == "hs-defect":
        if not args.F or not args.word:
            raise InvalidInput("hs-defect needs --F and --word")
        A = rep.make_set(args.set) if args.set else rep.full_set()
        res = roe.folner_projection_defect(_literal_points(args.F), args.word, A, rep)
        return EXIT_OK, {"command": "roe hs-defect", **res.to_json()}
    if not args.witness:
        raise InvalidInput("isometries needs --witness")
    pw = typesem.paradox_from_json(_load_witness(args.witness[0]), rep)
    res = roe.isometries_from_paradox(pw, rep, window)
    ok = all(res.checks.values())
    return (EXIT_OK if ok else EXIT_INVALID), {"command": "roe isometries", **res.to_json()}


def cmd_counterexample(args):
    res = ring.counterexample_folner_bound(args.n_max, args.word_len, args.max_size, args.eps)
    res["summary"] = (f"{res['counterexamples']} counterexamples among all enumerated F "
                      f"({res['enumerated']} sets)")
    return EXIT_OK, {"command": "counterexample-folner-bound", **res}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="invsem", description=__doc__.split(".")[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, rep=True, sg=False):
        sp.add_argument("--preset", help="named preset, e.g. day2, symmetric_inverse(3), cuntz2_on_N")
        if rep:
            sp.add_argument("--rep", help="representation JSON file")
        if sg:
            sp.add_argument("--semigroup", help="multiplication table file (JSON or text)")
        sp.add_argument("--out", help="also write the JSON result to this file")

    sp = sub.add_parser("check-day", help="left invariant probability measure on a finite semigroup")
    common(sp, rep=False, sg=True)
    sp.set_defaults(func=cmd_check_day)

    sp = sub.add_parser("check-domain-measure", help="measure invariant on domains")
    common(sp)
    sp.set_defaults(func=cmd_check_domain_measure)

    sp = sub.add_parser("check-amenable", help="domain invariance plus localization")
    common(sp)
    sp.add_argument("--bounds", help="periodic fragment bounds on N, e.g. p=8,t=1")
    sp.set_defaults(func=cmd_check_amenable)

    sp = sub.add_parser("folner", help="bounded search for a Følner set")
    common(sp)
    sp.add_argument("--eps", type=_fraction, required=True)
    sp.add_argument("--window", help="points to search in: N, a:b or a,b,c")
    sp.add_argument("--max-size", type=int)
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--strict", action="store_true", help="require leak < eps|F|")
    sp.add_argument("--split-eps", action="store_true", help="budget eps/|gens| per generator")
    sp.add_argument("--amenable", action="store_true", help="only points in every domain")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_folner)

    sp = sub.add_parser("paradox", help="paradoxical decompositions")
    sp.add_argument("action", choices=["verify", "search"])
    common(sp)
    sp.add_argument("--witness", action="append")
    sp.add_argument("--word-len", type=int)
    sp.add_argument("--bounds", help="search bounds, e.g. L=2,p=2,k=2")
    sp.set_defaults(func=cmd_paradox)

    sp = sub.add_parser("typesem", help="equidecomposition witnesses")
    sp.add_argument("action", choices=["compose", "cancel", "sb", "absorb"])
    common(sp)
    sp.add_argument("--witness", action="append", help="input JSON (twice for compose)")
    sp.add_argument("--cap", type=int, default=typesem.DEFAULT_SB_CAP)
    sp.set_defaults(func=cmd_typesem)

    sp = sub.add_parser("ring", help="semigroup ring checks")
    sp.add_argument("action", choices=["annihilator", "defect"])
    sp.add_argument("--preset", help="f2plus_semidirect (default) or a finite semigroup preset")
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--word-len", type=int)
    sp.add_argument("--subspace", help="ring elements separated by ';'")
    sp.add_argument("--folner-set", help="finite semigroup elements spanning W")
    sp.add_argument("--element", help="ring element a in dim(aW + W)/dim W")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_ring)

    sp = sub.add_parser("roe", help="finite matrix models")
    sp.add_argument("action", choices=["relations", "traces", "corner", "hs-defect", "isometries"])
    common(sp)
    sp.add_argument("--window")
    sp.add_argument("--word-len", type=int)
    sp.add_argument("--words", help="words separated by ';'")
    sp.add_argument("--word")
    sp.add_argument("--sets", help="sets separated by ';'")
    sp.add_argument("--set")
    sp.add_argument("--F")
    sp.add_argument("--f1")
    sp.add_argument("--f2")
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--witness", action="append")
    sp.set_defaults(func=cmd_roe)

    sp = sub.add_parser("counterexample-folner-bound",
                        help="exhaustive Følner check on a ball of N ⋊ F2+")
    sp.add_argument("--n-max", type=int, default=2)
    sp.add_argument("--word-len", type=int, default=3)
    sp.add_argument("--max-size", type=int, default=6)
    sp.add_argument("--eps", type=_fraction, default=Fraction(1, 50))
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_counterexample)
    return p


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"invsem: usage error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        code, payload = args.func(args)
    except IterationCapExceeded as exc:
        _emit({"command": args.command, "status": "Exhausted", "reason": str(exc)}, None)
        return EXIT_EXHAUSTED
    except (InvalidWitness, InvalidInput, InvsemError, ValueError, KeyError, OSError) as exc:
        print(f"invsem: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(payload, getattr(args, "out", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
