"""Command-line front end.

Exit codes: 0 check passed, 1 verification failure, 2 usage or parse error,
3 mathematical precondition violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bvlg, catalog, chenruan, frobenius, milnor, polyring, statespace, symmetry
from .polyring import PolyError, parse_polynomial, weight_system
from .symmetry import GroupError, GroupElement, parse_group_elements

USAGE_ERROR = 2
MATH_ERROR = 3

_PRECONDITIONS = (
    GroupError,
    bvlg.BVError,
    statespace.NotAdmissible,
    frobenius.FrobeniusError,
    catalog.CatalogError,
    milnor.MilnorError,
)


def _print_json(data):
    print(json.dumps(data, sort_keys=True))


def _print_table(data: dict):
    print(f"flavor {data['flavor']}  total {data['total']}")
    for entry in data["entries"]:
        print(f"  ({entry['p']}, {entry['q']})  {entry['dim']}")


def cmd_analyze(args) -> int:
    poly = parse_polynomial(args.polynomial)
    ws = weight_system(poly)
    gmax = symmetry.gmax(poly)
    sl = symmetry.sl_subgroup(gmax)
    j = symmetry.j_element(ws)
    invertible = polyring.is_invertible(poly)
    info = {
        "polynomial": str(poly),
        "variables": list(poly.variables),
        "weights": list(ws.weights),
        "degree": ws.degree,
        "j": str(j),
        "age_j": statespace.frac_str(symmetry.age(j)),
        "gmax_order": gmax.order,
        "sl_order": sl.order,
        "sl_index": gmax.order // sl.order,
        "calabi_yau": polyring.check_cy(ws),
        "invertible": invertible,
    }
    bv_ok, bv_idx = polyring.is_bv_form(poly)
    info["bv_form"] = bv_ok
    if bv_ok:
        info["bv_index"] = bv_idx
    if invertible:
        info["atomic_blocks"] = [str(b) for b in polyring.atomic_decomposition(poly)]
        transposed = polyring.transpose(poly)
        info["transpose"] = str(transposed)
        info["self_transpose"] = transposed == poly.normalized()
    if args.json:
        _print_json(info)
    else:
        for key, value in info.items():
            print(f"{key}: {value}")
    return 0


def cmd_state_space(args) -> int:
    poly = parse_polynomial(args.w)
    gens = parse_group_elements(args.gens, poly.nvars) if args.gens else []
    group = symmetry.span(poly.nvars, gens)
    space = statespace.build_state_space(poly, group, args.flavor, jobs=args.jobs)
    data = statespace.table_to_json(statespace.poincare_table(space), args.flavor)
    if args.json:
        _print_json(data)
    else:
        _print_table(data)
    return 0


def _build_model(args) -> bvlg.BVModel:
    w1 = parse_polynomial(args.w1)
    w2 = parse_polynomial(args.w2)
    n = w1.nvars + w2.nvars
    if args.gens:
        gens = parse_group_elements(args.gens, n)
    else:
        ws1, ws2 = weight_system(w1), weight_system(w2)
        j1 = GroupElement(
            [Fraction(w, ws1.degree) for w in ws1.weights] + [0] * w2.nvars
        )
        j2 = GroupElement(
            [0] * w1.nvars + [Fraction(w, ws2.degree) for w in ws2.weights]
        )
        gens = [j1, j2]
    return bvlg.build_bv(w1, w2, gens)


def cmd_bv(args) -> int:
    model = _build_model(args)
    verb = args.verb
    if verb == "mirror":
        mirror = model.mirror()
        data = {
            "check": "mirror",
            "pass": True,
            "w1_mirror": str(mirror.w1),
            "w2_mirror": str(mirror.w2),
            "group_order": mirror.group.order,
            "sigma_group_order": mirror.sigma_group.order,
            "generators": [str(g) for g in mirror.group.gens],
        }
        report = None
    elif verb == "twist":
        tw = model.twist()
        data = {
            "check": "twist",
            "pass": True,
            "twist_polynomial": str(tw.poly),
            "weights": list(tw.ws.weights),
            "degree": tw.ws.degree,
            "delta": tw.delta,
            "twist_group_order": tw.group.order,
        }
        report = None
    else:
        dispatch = {
            "theorem1": bvlg.verify_theorem1,
            "group-lemma": bvlg.verify_group_lemma,
            "twist-iso": lambda m: bvlg.verify_twist_iso(m, "A"),
            "twist-iso-b": lambda m: bvlg.verify_twist_iso(m, "B"),
            "theorem2": frobenius.verify_theorem2,
            "lgcy": chenruan.verify_lgcy,
            "bvms": chenruan.verify_bv_mirror,
            "twist-corollary": chenruan.verify_twist_corollary,
        }
        report = dispatch[verb](model)
        data = report.to_json()
    if args.json:
        _print_json(data)
    else:
        for key, value in data.items():
            print(f"{key}: {value}")
    return 0 if data["pass"] else 1


def cmd_catalog(args) -> int:
    if args.action == "sample":
        parts = args.weights.replace(",", " ").split()
        if len(parts) < 2:
            print("expected weights and degree, e.g. 3,1,1,1,6", file=sys.stderr)
            return USAGE_ERROR
        *weights, degree = (int(p) for p in parts)
        ws = polyring.WeightSystem(tuple(sorted(weights, reverse=True)), degree)
        poly = catalog.sample_polynomial(ws)
        print(poly)
        return 0

    records = catalog.enumerate_k3_systems(max_weight=args.max_weight)
    if args.action == "filter":
        if args.half_degree_only:
            records = catalog.filter_bv(records)
        else:
            gap = catalog.bv_discrepancy(records)
            if gap:
                print(
                    "half-degree systems without an invertible sample: "
                    + "; ".join(f"{r.weights};{r.degree}" for r in gap),
                    file=sys.stderr,
                )
            records = catalog.filter_bv_invertible(records)
    if args.action in ("list", "filter"):
        if args.with_samples:
            refreshed = []
            for r in records:
                sample = r.sample_poly
                if r.bv_admissible and not sample:
                    try:
                        sample = str(catalog.sample_polynomial(r.weight_system))
                    except catalog.NoInvertibleRepresentative:
                        sample = ""
                refreshed.append(
                    catalog.WeightSystemRecord(
                        r.weights, r.degree, r.quasismooth, r.bv_admissible, sample
                    )
                )
            records = refreshed
        if args.out:
            catalog.save_catalog(records, args.out)
            print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
        elif args.json:
            _print_json(
                [
                    {
                        "weights": list(r.weights),
                        "degree": r.degree,
                        "quasismooth": r.quasismooth,
                        "bv_admissible": r.bv_admissible,
                        "sample_poly": r.sample_poly,
                    }
                    for r in records
                ]
            )
        else:
            print(catalog.CSV_HEADER)
            for r in records:
                w = r.weights
                print(
                    f"{w[0]},{w[1]},{w[2]},{w[3]},{r.degree},"
                    f"{int(r.quasismooth)},{int(r.bv_admissible)},{r.sample_poly}"
                )
        return 0
    if args.action == "genericity":
        import random

        rng = random.Random(args.seed)
        pool = catalog.filter_bv_invertible(records)
        small = [r for r in pool if r.degree <= 14]
        picks = rng.sample(small, min(args.count, len(small)))
        failures = 0
        for r in picks:
            rec = catalog.WeightSystemRecord(
                r.weights,
                r.degree,
                r.quasismooth,
                r.bv_admissible,
                str(catalog.sample_polynomial(r.weight_system)),
            )
            ok = catalog.genericity_spot_check(rec, seed=args.seed)
            print(f"{r.weights};{r.degree}: {'ok' if ok else 'DEGENERATE'}")
            failures += 0 if ok else 1
        return 1 if failures else 0
    print(f"unknown catalog action {args.action}", file=sys.stderr)
    return USAGE_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lgmirror",
        description=(
            "Exact-arithmetic Landau-Ginzburg state spaces and mirror-symmetry "
            "checks for Borcea-Voisin-type models.  The enumeration cap for "
            "symmetry groups can be overridden with LGMIRROR_MAX_GROUP."
        ),
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for sector sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="weights, symmetry orders, CY flag, atomic blocks")
    p_an.add_argument("polynomial")
    p_an.add_argument("--json", action="store_true")
    p_an.set_defaults(func=cmd_analyze)

    p_ss = sub.add_parser("state-space", help="bigraded table of an A- or B-model")
    p_ss.add_argument("flavor", choices=["A", "B"])
    p_ss.add_argument("--w", required=True, help="polynomial text")
    p_ss.add_argument(
        "--gens",
        default="",
        help="semicolon-separated generators of comma-separated rationals",
    )
    p_ss.add_argument("--json", action="store_true")
    p_ss.set_defaults(func=cmd_state_space)

    p_bv = sub.add_parser("bv", help="build a BVLG model and run a verifier")
    p_bv.add_argument(
        "verb",
        choices=[
            "mirror",
            "twist",
            "twist-iso",
            "twist-iso-b",
            "group-lemma",
            "theorem1",
            "theorem2",
            "lgcy",
            "bvms",
            "twist-corollary",
        ],
    )
    p_bv.add_argument("--w1", required=True, help="first potential z0^2 + f1")
    p_bv.add_argument("--w2", required=True, help="second potential z0^2 + f2")
    p_bv.add_argument(
        "--gens",
        default="",
        help="generators of G over the combined variables (default: J1 x J2)",
    )
    p_bv.add_argument("--json", action="store_true")
    p_bv.set_defaults(func=cmd_bv)

    p_cat = sub.add_parser("catalog", help="K3 weight-system catalog")
    p_cat.add_argument("action", choices=["list", "filter", "sample", "genericity"])
    p_cat.add_argument("weights", nargs="?", default="", help="for sample: w0,w1,w2,w3,d")
    p_cat.add_argument("--max-weight", type=int, default=40)
    p_cat.add_argument(
        "--half-degree-only",
        action="store_true",
        help="filter: keep all 48 systems with d = 2 w_i instead of the 44 with invertible samples",
    )
    p_cat.add_argument("--with-samples", action="store_true")
    p_cat.add_argument("--count", type=int, default=3, help="genericity: sample size")
    p_cat.add_argument("--out", default="", help="write CSV here instead of stdout")
    p_cat.add_argument("--json", action="store_true")
    p_cat.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    statespace.DEFAULT_JOBS = max(1, args.jobs)
    try:
        return args.func(args)
    except PolyError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except _PRECONDITIONS as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return MATH_ERROR
    finally:
        statespace.DEFAULT_JOBS = 1


if __name__ == "__main__":
    sys.exit(main())
