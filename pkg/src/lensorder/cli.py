"""Command line entry point: ``lensorder {homology, squeeze, verify-contact}``.

Exit codes: 0 for a produced verdict or a passing check, 1 for a failed
verification, 2 for invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import contact_geo as cg
from .chain import HomologyTable
from .morse_bott import TOWER_SENSITIVE, LensData, as_fraction, stabilized_homology
from .oracles import balls_table
from .schemas import validate
from .squeeze import equivariant_verdict, nonequivariant_verdict


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    try:
        value = as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc
    return value


def weight_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(w) for w in text.replace(" ", "").split(",") if w)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"weights must be comma separated integers: {text!r}") from exc


def _lens(n: int, k: int, weights) -> LensData:
    try:
        return LensData(n, k, weights if weights is not None else (1,) * n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# homology

def homology_rows(chain: HomologyTable, oracle: HomologyTable, k: int, max_degree: int,
                  equivariant: bool) -> list[dict]:
    ranks = chain.fk_ranks(k) if chain.modulus is None else dict(chain.ranks)
    rows = []
    for d in range(max_degree + 1):
        c, o = ranks.get(d, 0), oracle.rank(d)
        if equivariant and chain.annotations.get(d) == TOWER_SENSITIVE:
            status = TOWER_SENSITIVE
        else:
            status = "agree" if c == o else "disagree"
        rows.append({"degree": d, "chain": chain.describe(d), "chain_fk_rank": c,
                     "oracle": o, "status": status})
    return rows


def cmd_homology(args) -> int:
    lens = _lens(args.n, args.k, args.weights)
    if args.max_degree < 1:
        raise UsageError("--max-degree must be at least 1")
    if args.R <= 0 or args.a <= 0:
        raise UsageError("R and a must be positive")
    try:
        chain = stabilized_homology(lens, args.R, args.a, args.max_degree, args.equivariant,
                                    coeffs=args.coeff)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    oracle = balls_table(lens.n, lens.k, args.R, args.a, args.max_degree, args.equivariant)
    rows = homology_rows(chain, oracle, lens.k, args.max_degree, args.equivariant)
    ok = all(r["status"] != "disagree" for r in rows)
    governing = "balls_homology_eq" if args.equivariant else "balls_homology"
    if args.format == "json":
        doc = {
            "command": "homology",
            "parameters": {"n": lens.n, "k": lens.k, "weights": list(lens.weights),
                           "R": str(args.R), "a": str(args.a), "max_degree": args.max_degree,
                           "equivariant": args.equivariant, "coefficients": args.coeff},
            "oracle_formula": governing,
            "chain": chain.to_dict(),
            "oracle": oracle.to_dict(),
            "rows": rows,
            "agree": ok,
        }
        validate(doc["chain"], "homology_table")
        validate(doc["oracle"], "homology_table")
        _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        coeff = "Z" if args.coeff == "Z" else f"F{lens.k}"
        kind = "equivariant" if args.equivariant else "non-equivariant"
        lines = [f"{kind} homology of B({args.R}) over ({args.a}, inf], n={lens.n} "
                 f"k={lens.k} weights={','.join(map(str, lens.weights))} coefficients={coeff}",
                 f"oracle: {governing}",
                 f"{'degree':>6}  {'chain':>12}  {'oracle':>6}  status"]
        for r in rows:
            lines.append(f"{r['degree']:>6}  {r['chain']:>12}  {r['oracle']:>6}  {r['status']}")
        lines.append("result: " + ("agree" if ok else "DISAGREE"))
        _emit(args, "\n".join(lines) + "\n")
    return 0 if ok else 1


# squeeze

def cmd_squeeze(args) -> int:
    try:
        if args.equivariant:
            if args.k is None:
                raise UsageError("-k is required with --equivariant")
            _lens(args.n, args.k, None)
            verdict = equivariant_verdict(args.n, args.k, args.R, args.Rp, args.a)
        else:
            if args.n < 1:
                raise UsageError("n must be positive")
            verdict = nonequivariant_verdict(args.n, args.R, args.Rp)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = verdict.to_dict()
    if args.format == "json":
        validate(doc, "squeeze_verdict")
        _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        parts = [f"status: {doc['status']}"]
        if doc["witness"] is not None:
            parts.append(f"{'l' if args.equivariant else 'm'}={doc['witness']}")
        if doc["degree"] is not None:
            parts.append(f"degree {doc['degree']}")
        if doc["diagram"] is not None:
            dg = doc["diagram"]
            parts.append(f"diagram ranks (R''={dg['Rpp']}, R={dg['R']}, R'={dg['Rp']})")
        _emit(args, ", ".join(parts) + f"\nreason: {doc['reason']}\n")
    return 0


# verify-contact

def _contact_report(args, embedding: str, pts, expected_negative: bool) -> dict:
    form = "standard" if embedding == "bhupal" else "symmetric"
    recs = cg.contact_sweep(embedding, pts, args.h, form, args.workers)
    summary = cg.sweep_summary(recs, f"contact:{embedding}", expected_negative)
    summary["form"] = form
    return summary


def _equivariance_report(args, embedding: str, lens, pts, expected_negative: bool) -> dict:
    recs = cg.equivariance_sweep(args.phi, embedding, lens, pts, args.workers)
    return cg.sweep_summary(recs, f"equivariance:{embedding}:{args.phi}", expected_negative)


def cmd_verify_contact(args) -> int:
    lens = _lens(args.n, args.k, args.weights or tuple(range(1, args.n + 1)))
    if args.points < 1:
        raise UsageError("--points must be positive")
    if args.h <= 0:
        raise UsageError("--step must be positive")
    embedding = "corrupt-sigma" if args.corrupt == "sigma" else args.map
    if args.corrupt and args.map != "sigma":
        raise UsageError("--corrupt sigma applies to --map sigma")
    rng = np.random.default_rng(args.seed)
    product_pts = cg.random_product_points(rng, lens.n, args.points)
    base_pts = cg.random_base_points(rng, lens.n, args.points)
    reports = []
    if args.check in ("contact", "all"):
        reports.append(_contact_report(args, embedding, product_pts, False))
    if args.check in ("equivariance", "all"):
        # only the symmetric embedding is equivariant; the older one is a negative control
        reports.append(_equivariance_report(args, embedding, lens, base_pts,
                                            expected_negative=args.map == "bhupal"))
    exit_code = 0
    for r in reports:
        if not r["pass"] and not r["expected_negative"]:
            exit_code = 1
    if args.format == "json":
        doc = {"command": "verify-contact",
               "parameters": {"n": lens.n, "k": lens.k, "weights": list(lens.weights),
                              "points": args.points, "seed": args.seed, "map": args.map,
                              "phi": args.phi, "check": args.check, "h": args.h,
                              "corrupt": args.corrupt},
               "reports": reports}
        if not args.records:
            for r in reports:
                r.pop("records")
        validate(doc, "residual_report")
        _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        lines = []
        for r in reports:
            verdict = "PASS" if r["pass"] else "FAIL"
            if r["expected_negative"]:
                verdict += " (expected-negative)"
            lines.append(f"{r['check']:<32} points={r['points']} max_residual={r['max_residual']:.3e}"
                         f" tolerance={r['tolerance']:.0e} {verdict}")
        _emit(args, "\n".join(lines) + "\n")
    return exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lensorder",
                                     description="Equivariant ball homology and squeezing checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", help="write the report to this file instead of stdout")

    h = sub.add_parser("homology", help="chain-level ball homology next to the closed form")
    h.add_argument("-n", type=int, required=True)
    h.add_argument("-k", type=int, required=True)
    h.add_argument("--weights", type=weight_list)
    h.add_argument("-R", type=rational, required=True)
    h.add_argument("-a", type=rational, default=Fraction(1))
    h.add_argument("--max-degree", type=int, required=True)
    h.add_argument("--equivariant", action="store_true")
    h.add_argument("--coeff", choices=("Fk", "Z"), default="Fk")
    common(h)
    h.set_defaults(func=cmd_homology)

    s = sub.add_parser("squeeze", help="squeezing verdict for prequantized balls")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-k", type=int)
    s.add_argument("-R", type=rational, required=True)
    s.add_argument("--Rp", type=rational, required=True)
    s.add_argument("-a", type=rational, default=Fraction(1))
    s.add_argument("--equivariant", action="store_true")
    common(s)
    s.set_defaults(func=cmd_squeeze)

    v = sub.add_parser("verify-contact", help="finite-difference checks of the jet embeddings")
    v.add_argument("-n", type=int, default=2)
    v.add_argument("-k", type=int, default=5)
    v.add_argument("--weights", type=weight_list, help="default 1,2,...,n")
    v.add_argument("--points", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--map", choices=("sigma", "bhupal"), default="sigma")
    v.add_argument("--phi", choices=tuple(cg.MAPS), default="radial",
                   help="contactomorphism used for the equivariance check")
    v.add_argument("--check", choices=("contact", "equivariance", "all"), default="all")
    v.add_argument("--corrupt", choices=("sigma",), help="test hook: use a broken embedding")
    v.add_argument("--step", dest="h", type=float, default=1e-5, help="difference step")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--records", action="store_true", help="include per-point records in JSON")
    common(v)
    v.set_defaults(func=cmd_verify_contact)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
