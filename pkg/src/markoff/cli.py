"""Command-line interface.

Exit codes: 0 success, 2 invalid arguments, 1 budget exceeded or internal
error.  Output is canonical JSON on stdout (CSV for ``census --format csv``);
errors are reported as JSON objects ``{"error": ..., "kind": ...}``.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from .arith import INF, factorize, is_prime
from .brauer import (
    Element,
    IndeterminateRepresentative,
    InvariantProfile,
    PrecisionError,
    field_conditions,
    invariant,
    star_condition,
)
from .census import CensusConfig, Variant, run_census, star_failure_scan
from .config import BudgetExceeded
from .orbifold import (
    Mode,
    OrbifoldPair,
    Weights,
    classify,
    integral_adeles_empty,
    integral_point_search,
    local_integral_soluble,
    normalize,
)
from .quadform import QuadForm, find_equivalence, narrow_class_group, reduce, represent_primitive
from .serialize import parse_certificate, serialize
from .witness import generic_shape_solve, prop41_witness, thm43_witness, thm44_witness, verify_certificate

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ints(text: str, n: int | None = None) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} integers, got {len(vals)}")
    return vals


def _weights(text: str) -> Weights:
    try:
        return Weights.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _place(tok: str):
    tok = tok.strip().lower()
    if tok in ("inf", "infinity", "oo"):
        return INF
    p = int(tok)
    if not is_prime(p):
        raise UsageError(f"{p} is not a prime")
    return p


# -- commands -------------------------------------------------------------------


def cmd_check_point(args):
    x = normalize(_ints(args.point, 4))
    pair = OrbifoldPair(args.m, _weights(args.weights))
    modes = [Mode.CAMPANA, Mode.DARMON] if args.mode == "both" else [Mode(args.mode)]
    out = {"m": args.m, "point": list(x), "weights": str(pair.weights)}
    for mode in modes:
        res = classify(x, pair, mode)
        out[mode.value] = {
            "class": res.kind.value,
            "reason": res.reason,
            "reports": [
                {"prime": r.prime, "n": list(r.multiplicities), "admissible": list(r.verdicts)}
                for r in res.reports
            ],
        }
    return out


def _default_places(m: int, x) -> list:
    n = 2 * (m - 4) * x[0]
    for i in (1, 2, 3):
        if x[i] != 2 * x[0]:
            n *= x[i] - 2 * x[0]
    return [INF] + list(factorize(n))


def cmd_invariants(args):
    x = normalize(_ints(args.point, 4))
    if x[0] == 0:
        raise ValueError("the point must be strict (x0 != 0)")
    from .orbifold import on_surface

    if not on_surface(x, args.m):
        raise ValueError(f"{x} does not lie on X_{args.m}")
    places = [_place(t) for t in args.places.split(",")] if args.places else _default_places(args.m, x)
    elements = list(Element) if args.element == "all" else [Element(args.element)]
    out = []
    for el in elements:
        inv = {}
        for v in places:
            try:
                inv[v] = invariant(el, x, args.m, v)
            except (IndeterminateRepresentative, PrecisionError):
                inv[v] = None
        out.append(InvariantProfile(el, inv))
    return out[0] if len(out) == 1 else out


def cmd_classify_m(args):
    m = args.m
    fc = field_conditions(m)
    search = integral_point_search(m, args.height)
    return {
        "m": m,
        "local_2": local_integral_soluble(m, 2),
        "local_3": local_integral_soluble(m, 3),
        "real": True,
        "integral_adeles_empty": integral_adeles_empty(m),
        "m_square": fc.m_square,
        "m4_square": fc.m4_square,
        "product_square": fc.product_square,
        "degree4": fc.degree4,
        "star": star_condition(m).verdict.value,
        "integral_point": list(search.triple) if search.triple else None,
        "integral_search_complete": search.complete,
    }


def cmd_witness(args):
    if args.verify:
        cert = parse_certificate(Path(args.verify).read_bytes())
        rep = verify_certificate(cert)
        return {"ok": rep.ok, "failed": rep.failed, "checks": list(rep.checks)}
    w = _weights(args.weights)
    fam = args.family
    if fam == "prop41":
        _need(args, "d")
        return prop41_witness(args.d, w)
    if fam == "thm43":
        _need(args, "p", "alpha", "k")
        return thm43_witness(args.p, args.alpha, args.k, -1 if args.sign == "-" else 1, w)
    if fam == "thm44":
        _need(args, "l")
        return thm44_witness(args.l, w)
    _need(args, "m", "t", "u")
    cert = generic_shape_solve(args.m, w, args.t, args.u)
    return cert if cert is not None else {"certificate": None, "m": args.m, "t": args.t, "u": args.u}


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--{missing[0]} is required for family {args.family}")


def cmd_census(args):
    cfg = CensusConfig(
        bound=args.bound,
        variant=Variant(args.variant),
        weights=_weights(args.weights),
        attempt_witnesses=args.witnesses,
        shard_count=args.shards,
    )
    cps = _ints(args.checkpoints) if args.checkpoints else None
    res = run_census(cfg, cps)
    if args.out:
        Path(args.out).write_bytes(serialize(res.summary()))
    if args.format == "csv":
        return res.to_csv()
    return res.summary()


def cmd_quadform(args):
    if args.action == "class-group":
        if args.disc is None:
            raise UsageError("--disc is required")
        g = narrow_class_group(args.disc)
        return {
            "discriminant": g.discriminant,
            "narrow_classes": g.narrow_class_number,
            "genera": g.genus_count,
            "gl2_classes": g.gl2_class_count,
            "representatives": list(g.narrow_classes),
            "characters": list(g.genus_characters),
            "genus_vectors": [list(v) for v in g.genera],
        }
    if args.form is None:
        raise UsageError("--form is required")
    f = QuadForm(*_ints(args.form, 3))
    if args.action == "reduce":
        g, m = reduce(f)
        return {"form": f, "reduced": g, "map": m}
    if args.action == "represent":
        if args.n is None:
            raise UsageError("--n is required")
        r = represent_primitive(f, args.n)
        return {"form": f, "n": args.n, "representation": None if r is None else [r.x, r.y]}
    if args.other is None:
        raise UsageError("--other is required")
    g = QuadForm(*_ints(args.other, 3))
    m = find_equivalence(f, g)
    return {"form": f, "other": g, "equivalent": m is not None, "map": m}


def cmd_integral(args):
    s = integral_point_search(args.m, args.height)
    return {
        "m": s.m,
        "triple": list(s.triple) if s.triple else None,
        "complete": s.complete,
        "region_bound": s.region_bound,
    }


def cmd_star_scan(args):
    s = star_failure_scan(args.bound)
    return {"bound": s.bound, "failures": list(s.failures), "count": s.count, "bound_quarter_power": f"{s.quarter_power:.3f}"}


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="markoff",
        description="Semi-integral points, Brauer-Manin invariants and census tools for Markoff orbifold pairs.",
        epilog="Exit codes: 0 success, 2 invalid arguments, 1 budget exceeded or internal error. "
        "MARKOFF_BUDGET (e.g. 'factor_bits=80,disc=2000000') overrides computation budgets.",
    )
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check-point", help="classify a projective point on X_m")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--point", required=True, help="x0,x1,x2,x3")
    c.add_argument("--weights", default="2,inf,inf")
    c.add_argument("--mode", choices=["campana", "darmon", "both"], default="both")
    c.set_defaults(func=cmd_check_point)

    c = sub.add_parser("invariants", help="local invariants of alpha_{i,-} and alpha at a rational point")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--point", required=True, help="x0,x1,x2,x3 with x0 != 0")
    c.add_argument("--element", choices=[e.value for e in Element] + ["all"], default="all")
    c.add_argument("--places", help="comma-separated primes and/or inf")
    c.set_defaults(func=cmd_invariants)

    c = sub.add_parser("classify-m", help="local solubility, field conditions and integral points for m")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--height", type=int, default=10**6)
    c.set_defaults(func=cmd_classify_m)

    c = sub.add_parser("witness", help="construct or verify a strict semi-integral certificate")
    c.add_argument("--family", choices=["prop41", "thm43", "thm44", "generic"], default="prop41")
    c.add_argument("--weights", default="2,inf,inf")
    c.add_argument("--d", type=int)
    c.add_argument("--p", type=int)
    c.add_argument("--alpha", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--sign", choices=["+", "-"], default="+")
    c.add_argument("--l", type=int)
    c.add_argument("--m", type=int)
    c.add_argument("--t", type=int)
    c.add_argument("--u", type=int)
    c.add_argument("--verify", metavar="FILE", help="verify a certificate file instead")
    c.set_defaults(func=cmd_witness)

    c = sub.add_parser("census", help="count qualifying d = 29 mod 78")
    c.add_argument("--bound", type=int, required=True)
    c.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.COND_ON_M_MINUS_121.value)
    c.add_argument("--weights", default="2,inf,inf")
    c.add_argument("--witnesses", action="store_true", help="construct a certificate for every d")
    c.add_argument("--shards", type=int, default=1)
    c.add_argument("--checkpoints", help="comma-separated bounds")
    c.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    c.add_argument("--out", help="also write the JSON summary to this file")
    c.set_defaults(func=cmd_census)

    c = sub.add_parser("quadform", help="binary quadratic form tools")
    c.add_argument("action", choices=["class-group", "represent", "reduce", "equivalent"])
    c.add_argument("--disc", type=int)
    c.add_argument("--form", help="a,b,c")
    c.add_argument("--other", help="a,b,c")
    c.add_argument("--n", type=int)
    c.set_defaults(func=cmd_quadform)

    c = sub.add_parser("integral", help="search U_m(Z) through reduced triples")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--height", type=int, default=10**6)
    c.set_defaults(func=cmd_integral)

    c = sub.add_parser("star-scan", help="list m with |m| <= B where the star condition fails")
    c.add_argument("--bound", type=int, required=True)
    c.set_defaults(func=cmd_star_scan)
    return p


def _emit(out, stream) -> None:
    if isinstance(out, str):
        stream.write(out)
    else:
        stream.write(serialize(out).decode("utf-8"))


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _emit({"error": str(exc), "kind": "invalid-argument"}, stdout)
        return EXIT_USAGE
    random.seed(args.seed)
    if args.format == "csv" and args.command != "census":
        _emit({"error": "--format csv is only available for census", "kind": "invalid-argument"}, stdout)
        return EXIT_USAGE
    try:
        out = args.func(args)
    except UsageError as exc:
        _emit({"error": str(exc), "kind": "invalid-argument"}, stdout)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        _emit({"error": str(exc), "kind": "budget-exceeded"}, stdout)
        return EXIT_INTERNAL
    except (ValueError, OSError) as exc:
        _emit({"error": str(exc), "kind": "invalid-argument"}, stdout)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        _emit({"error": f"{type(exc).__name__}: {exc}", "kind": "internal"}, stdout)
        return EXIT_INTERNAL
    _emit(out, stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
