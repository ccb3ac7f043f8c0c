"""Command line interface: ``qsdensity <command> --variety FILE ...``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 a size cap was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from fractions import Fraction

from . import harness, jets
from .density import (
    ClosedFormMu,
    TaylorCondition,
    finite_sing_density,
    main_density,
    scheme_length_density,
    taylor_factor,
    zeta_inverse,
)
from .errors import CapExceeded, QsdError, ValidationError
from .points import enumerate_closed_points, point_from_coords, singular_cones
from .quasismooth import NuProfile, nu_certified, nu_profile
from .toric import load_variety


def _field(s: str):
    try:
        p, a = (int(x) for x in s.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected p,a") from exc
    return p, a


def _ints(s: str):
    return tuple(int(x) for x in s.split(",") if x.strip())


def _hex_coeffs(K, x: int) -> str:
    return "".join(f"{c:02x}" for c in K.coeffs(x))


def _variety(args):
    if not args.variety:
        raise ValidationError("--variety FILE is required for this command")
    return load_variety(args.variety, field_override=args.field)


def _divisor(X, s):
    if s is None:
        raise ValidationError("--divisor is required")
    return X.divisor(s)


def _emit(obj):
    print(json.dumps(obj, indent=2, default=str))


def cmd_classgroup(args):
    X = _variety(args)
    cg = X.class_group
    _emit(
        {
            "free_rank": cg.free_rank,
            "torsion": list(cg.torsion_invariants),
            "grading": [{"free": list(g.free), "torsion": list(g.torsion)} for g in cg.grading],
            "smooth": X.is_smooth,
            "default_twist": list(X.twist.free),
        }
    )


def cmd_basis(args):
    X = _variety(args)
    B = X.monomial_basis(_divisor(X, args.divisor))
    _emit({"class": args.divisor, "size": len(B), "monomials": [list(a) for a in B]})


def cmd_points(args):
    X = _variety(args)
    cones = singular_cones(X) if args.singular_only else None
    w = csv.writer(sys.stdout)
    w.writerow(["degree", "cone_index", "coords", "is_singular_locus"])
    for P in enumerate_closed_points(X, args.max_degree, cones=cones):
        w.writerow([P.degree, P.cone, ":".join(_hex_coeffs(P.field, c) for c in P.coords), int(P.singular)])


def cmd_zeta(args):
    X = _variety(args)
    s = args.s if args.s is not None else X.dim + 1
    res = zeta_inverse(X, s, args.trunc_degree)
    out = res.to_json(args.decimals)
    out["inputs"] = {"s": s, "q": X.q}
    _emit(out)


def _resolve_point(X, spec: str, max_degree: int):
    if spec.startswith("singular:"):
        idx = int(spec.split(":", 1)[1])
        pts = list(enumerate_closed_points(X, max_degree, cones=singular_cones(X)))
        if not 0 <= idx < len(pts):
            raise ValidationError(f"only {len(pts)} singular-locus points up to degree {max_degree}")
        return pts[idx]
    coords = _ints(spec)
    if len(coords) != X.d:
        raise ValidationError(f"--point needs {X.d} coordinates")
    return point_from_coords(X, coords)


def cmd_nu(args):
    X = _variety(args)
    D = _divisor(X, args.divisor)
    P = _resolve_point(X, args.point, args.max_degree)
    E = X.divisor(args.twist) if args.twist else None
    res = nu_certified(P, D, E, X=X, stab_window=args.stab_window, k_max=args.max_k, force_slow=args.slow)
    _emit({"nu": res.value, "stabilized_at_k": res.stabilized_at_k, "certificate": res.certificate, "point": str(P)})


def cmd_density(args):
    X = _variety(args)
    D = _divisor(X, args.divisor)
    E = X.divisor(args.twist) if args.twist else None
    r = args.trunc_degree
    if args.formula == "scheme":
        res = scheme_length_density(ClosedFormMu(X.q), X, args.s, r)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            prof = nu_profile(X, None, D, E, max_degree=r)
        if args.formula == "main":
            res = main_density(prof)
        elif args.formula == "finite":
            res = finite_sing_density(prof, args.s)
        else:
            # sections with no F_q-rational zero: nonzero value at every degree-1 point
            conds = [TaylorCondition(1, v, "nonzero-value") for (e, v), c in prof.classes.items() if e == 1 for _ in range(c)]
            rest = NuProfile(prof.q, prof.depth, prof.dim, {k: c for k, c in prof.classes.items() if k[0] > 1})
            res = taylor_factor(conds, rest)
    out = res.to_json(args.decimals)
    out["inputs"] = {"divisor": args.divisor, "formula": args.formula, "s": args.s, "q": X.q}
    _emit(out)


def cmd_mu(args):
    X = _variety(args)
    if args.mode == "exhaustive":
        if args.cap:
            jets.ENUMERATION_CAP = args.cap
        T = jets.mu_exhaustive(args.point_degree, X, args.a_max, args.order)
    else:
        T = jets.mu_monte_carlo(args.point_degree, X, args.a_max, args.order, args.samples, args.seed)
    w = csv.writer(sys.stdout)
    w.writerow(["a", "mu_num", "mu_den", "method", "ci_halfwidth"])
    for a, mu, method, half in T.rows():
        w.writerow([a, mu.numerator, mu.denominator, method, "" if half is None else f"{half:.6g}"])
    w.writerow(["overflow", T.overflow.numerator, T.overflow.denominator, T.method, ""])


def cmd_sample(args):
    if args.config:
        with open(args.config) as fh:
            cfgd = json.load(fh)
        allowed = set(harness.ExperimentConfig.__dataclass_fields__) - {"Y"}
        extra = set(cfgd) - allowed
        if extra:
            raise ValidationError(f"unknown config keys {sorted(extra)}")
        if "variety" not in cfgd:
            cfgd["variety"] = args.variety
        X = load_variety(cfgd["variety"], field_override=args.field)
        cfgd["variety"] = X
        for key in ("ks", "s_values"):
            if key in cfgd:
                cfgd[key] = tuple(cfgd[key])
        cfg = harness.ExperimentConfig(**cfgd)
    else:
        X = _variety(args)
        cfg = harness.ExperimentConfig(
            X,
            args.divisor,
            args.twist,
            ks=_ints(args.ks),
            mode=args.mode,
            count=args.count,
            seed=args.seed,
            scan_degree=args.scan_degree,
            s_values=_ints(args.s) if args.s else (),
            length_predicates=args.lengths,
            trunc_degree=args.trunc_degree,
            threads=args.threads,
            cap=args.cap,
            out_csv=args.csv,
            out_json=args.json,
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = harness.run_experiment(cfg)
    if not cfg.out_csv:
        cols = ["k", "predicate", "count", "total", "fraction", "ci_lo", "ci_hi", "analytic", "tail", "certified"]
        w = csv.writer(sys.stdout)
        w.writerow(cols)
        for row in rep.rows:
            w.writerow([getattr(row, c) for c in cols])


def cmd_verify(args):
    from .acceptance import run_all

    only = set(_ints(args.only)) if args.only else None
    results = run_all(only)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qsdensity", description="Densities of quasismooth sections on toric varieties.")
    ap.add_argument("--variety", help="variety specification (JSON)")
    ap.add_argument("--field", type=_field, help="override the base field as p,a")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--cap", type=int, default=None, help="enumeration cap (sections or jets)")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("classgroup", help="class group and grading")
    p = sub.add_parser("basis", help="monomial basis of a graded piece")
    p.add_argument("--divisor", required=True)

    p = sub.add_parser("points", help="closed points as CSV")
    p.add_argument("--max-degree", type=int, default=1)
    p.add_argument("--singular-only", action="store_true")

    p = sub.add_parser("zeta", help="truncated 1/zeta_X(s)")
    p.add_argument("--s", type=int)
    p.add_argument("--trunc-degree", type=int, default=8)
    p.add_argument("--decimals", type=int, default=12)

    p = sub.add_parser("nu", help="nu_P(D) by rank stabilisation")
    p.add_argument("--divisor", required=True)
    p.add_argument("--twist")
    p.add_argument("--point", required=True, help='coordinates "a,b,c" or "singular:<index>"')
    p.add_argument("--max-degree", type=int, default=1, help="degree range for singular:<index>")
    p.add_argument("--max-k", type=int, default=40)
    p.add_argument("--stab-window", type=int, default=3)
    p.add_argument("--slow", action="store_true", help="skip the smooth-point shortcut")

    p = sub.add_parser("density", help="analytic densities")
    p.add_argument("--divisor", default="0")
    p.add_argument("--twist")
    p.add_argument("--formula", choices=["main", "finite", "scheme", "taylor"], default="main")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--trunc-degree", type=int, default=6)
    p.add_argument("--decimals", type=int, default=12)

    p = sub.add_parser("mu", help="jet densities mu(a)")
    p.add_argument("--point-degree", type=int, default=1)
    p.add_argument("--a-max", type=int, default=1)
    p.add_argument("--order", type=int)
    p.add_argument("--mode", choices=["exhaustive", "mc"], default="exhaustive")
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("sample", help="run an experiment")
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--divisor")
    p.add_argument("--twist")
    p.add_argument("--ks", default="1")
    p.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--scan-degree", type=int, default=2)
    p.add_argument("--s", help="comma-separated s values")
    p.add_argument("--lengths", action="store_true")
    p.add_argument("--trunc-degree", type=int, default=6)
    p.add_argument("--csv")
    p.add_argument("--json")

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return ap


COMMANDS = {
    "classgroup": cmd_classgroup,
    "basis": cmd_basis,
    "points": cmd_points,
    "zeta": cmd_zeta,
    "nu": cmd_nu,
    "density": cmd_density,
    "mu": cmd_mu,
    "sample": cmd_sample,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = COMMANDS[args.command](args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QsdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return rc or 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
