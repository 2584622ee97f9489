"""Command-line front end: exact reports as JSON, optional plain tables.

Every subcommand assembles a Report object:

    {"schema": 1, "command": ..., "degree": ..., "seed": ...,
     "precision_bits": ..., "status": "ok"|"failed",
     "failures": [...], "payload": {...}}

The exit code is 0 iff no certificate failed; usage errors exit 2.  All
numbers in payloads are exact (serialized field elements or integers)
except fields named "approx", which are display-only complex evaluations
at the reported precision.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .arrangements import (build, census, collinear_sextactic, freeness_test,
                           koszul_triple, multiplicity_multiset,
                           syzygy_candidates, tjurina_total, verify_syzygy)
from .errors import CertificationFailure, FermatoscError, FewerPoints
from .fermat import (FermatCurve, hyperosculating_conic, inflection_points,
                     osculating_conic_cayley, osculating_conic_closed,
                     sextactic_count_formula, sextactic_points, tangent_line,
                     two_hessian, two_hessian_factored)
from .hompoly import int_mult, osculating_conic_series
from .symmetry import (conic_common_points, fixed_line, generator_panel,
                       group_elements, orbit, tangent_concurrency,
                       verify_invariant_intersection)

KINDS = ("sextactic", "inflection", "all")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fermatosc",
        description="Exact osculating geometry of Fermat curves: special "
                    "points, conics, arrangements, freeness and concurrency "
                    "verification.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, degree=True):
        if degree:
            sp.add_argument("--degree", type=int, required=True,
                            help="curve degree d >= 3")
        sp.add_argument("--out", help="write the JSON report to this path")
        sp.add_argument("--seed", type=int, default=0,
                        help="seed for any sampled checks")
        sp.add_argument("--precision", type=int, default=128,
                        help="embedding precision for approx columns (bits)")
        sp.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for per-line verification")
        sp.add_argument("--format", choices=("json", "table"), default="json")

    sp = sub.add_parser("points", help="list special points")
    common(sp)
    sp.add_argument("--kind", choices=KINDS, default="sextactic")

    sp = sub.add_parser("tangents", help="tangent lines at special points")
    common(sp)
    sp.add_argument("--kind", choices=KINDS, default="sextactic")

    sp = sub.add_parser("conic", help="osculating conic data at one sextactic point")
    common(sp)
    sp.add_argument("--cluster", choices=("z", "y", "x"), default="z")
    sp.add_argument("--j", type=int, default=0)
    sp.add_argument("--k", type=int, default=1)

    sp = sub.add_parser("hessian2", help="Hessian and 2-Hessian identities")
    common(sp)

    sp = sub.add_parser("census", help="singularity census of an arrangement")
    common(sp)
    sp.add_argument("--arrangement", required=True)
    sp.add_argument("--with-fermat", action="store_true")

    sp = sub.add_parser("freeness", help="Tjurina total and freeness verdict")
    common(sp)
    sp.add_argument("--arrangement", required=True)
    sp.add_argument("--with-fermat", action="store_true")

    sp = sub.add_parser("collinear", help="lines through three or more sextactic points")
    common(sp)

    sp = sub.add_parser("verify", help="mechanized concurrency verification")
    common(sp)
    sp.add_argument("--theorem", choices=("main", "invariant-intersection"),
                    required=True)
    sp.add_argument("--line-index", type=int, default=None,
                    help="restrict to one grid line (index into B+M+N)")
    sp.add_argument("--osc-degree", type=int, choices=(1, 2), default=None)

    sp = sub.add_parser("all", help="full verification suite over a degree range")
    common(sp, degree=False)
    sp.add_argument("--min-degree", type=int, default=3)
    sp.add_argument("--max-degree", type=int, default=6)
    sp.add_argument("--collinear-cap", type=int, default=8)
    return p


# -- payload helpers ----------------------------------------------------------


def _point_payload(s, curve, precision):
    approx = s.point.approx(precision)
    return {"cluster": s.cluster, "j": s.j, "k": s.k,
            "coords": s.point.to_json(),
            "approx": [[v.real, v.imag] for v in approx]}


def _inflection_payload(p, idx, curve, precision):
    approx = p.approx(precision)
    return {"index": idx, "coords": p.to_json(),
            "approx": [[v.real, v.imag] for v in approx]}


def _grid_lines(curve):
    lines = []
    for token in ("B", "M", "N"):
        arr = build(token, curve.d)
        for i, L in enumerate(arr.lines):
            lines.append((f"{token}[{i}]", L))
    return lines


def cmd_points(args):
    curve = FermatCurve(args.degree)
    payload, failures = {}, []
    if args.kind in ("sextactic", "all"):
        pts = sextactic_points(curve)
        payload["sextactic"] = [_point_payload(s, curve, args.precision)
                                for s in pts]
        payload["sextactic_count"] = len(pts)
        payload["count_formula"] = sextactic_count_formula(curve)
        if len(pts) != 3 * args.degree ** 2:
            failures.append({"check": "sextactic-count", "got": len(pts)})
        if payload["count_formula"] != len(pts):
            failures.append({"check": "count-formula",
                             "got": payload["count_formula"]})
    if args.kind in ("inflection", "all"):
        pts = inflection_points(curve)
        payload["inflection"] = [_inflection_payload(p, i, curve, args.precision)
                                 for i, p in enumerate(pts)]
        payload["inflection_count"] = len(pts)
        if len(pts) != 3 * args.degree:
            failures.append({"check": "inflection-count", "got": len(pts)})
    return payload, failures


def cmd_tangents(args):
    curve = FermatCurve(args.degree)
    payload, failures = {"tangents": []}, []
    if args.kind in ("sextactic", "all"):
        for s in sextactic_points(curve):
            T = tangent_line(curve, s.point)
            payload["tangents"].append(
                {"at": {"cluster": s.cluster, "j": s.j, "k": s.k},
                 "line": T.to_json_dict()})
    if args.kind in ("inflection", "all"):
        for i, p in enumerate(inflection_points(curve)):
            T = tangent_line(curve, p)
            payload["tangents"].append(
                {"at": {"inflection_index": i}, "line": T.to_json_dict()})
    return payload, failures


def cmd_conic(args):
    curve = FermatCurve(args.degree)
    match = [s for s in sextactic_points(curve)
             if s.cluster == args.cluster and s.j == args.j % args.degree
             and s.k == args.k % (2 * args.degree)]
    if not match:
        raise FewerPoints(f"no sextactic point ({args.cluster}, {args.j}, {args.k})")
    s = match[0]
    O = hyperosculating_conic(curve, s)
    closed = osculating_conic_closed(curve, s.point)
    cayley = osculating_conic_cayley(curve, s.point)
    series = osculating_conic_series(curve.poly, s.point)
    mult = int_mult(curve.poly, O, s.point)
    payload = {
        "point": _point_payload(s, curve, args.precision),
        "conic": O.to_json_dict(),
        "closed_form": closed.to_json_dict(),
        "closed_vs_explicit_proportional": closed.proportional(O),
        "covariant_vs_closed_proportional": cayley.proportional(closed),
        "series_vs_explicit_proportional": series.proportional(O),
        "contact_order": mult,
    }
    failures = []
    for key in ("closed_vs_explicit_proportional",
                "covariant_vs_closed_proportional",
                "series_vs_explicit_proportional"):
        if not payload[key]:
            failures.append({"check": key})
    if mult != 6:
        failures.append({"check": "contact-order", "got": mult})
    return payload, failures


def cmd_hessian2(args):
    curve = FermatCurve(args.degree)
    d = args.degree
    from .hompoly import HomPoly, hessian
    H = hessian(curve.poly)
    expected = HomPoly.monomial(curve.field, (d - 2, d - 2, d - 2),
                                d**3 * (d - 1)**3)
    H2 = two_hessian(curve)
    factored = two_hessian_factored(curve)
    payload = {
        "hessian_matches_closed_form": H == expected,
        "hessian": H.to_json_dict(),
        "two_hessian_matches_factored_form": H2 == factored,
        "two_hessian_terms": len(H2.terms),
    }
    failures = [{"check": k} for k in
                ("hessian_matches_closed_form",
                 "two_hessian_matches_factored_form") if not payload[k]]
    return payload, failures


def _census_payload(entries, precision):
    return {
        "points": [{"coords": e.point.to_json(),
                    "multiplicity": e.multiplicity,
                    "n_lines": e.n_lines,
                    "ordinary": e.ordinary,
                    "on_curve": e.on_curve} for e in entries],
        "multiplicity_multiset": {str(k): v for k, v in
                                  sorted(multiplicity_multiset(entries).items())},
    }


def cmd_census(args):
    curve = FermatCurve(args.degree) if args.with_fermat else None
    arr = build(args.arrangement, args.degree)
    entries = census(arr, curve)
    payload = {"arrangement": args.arrangement,
               "n_lines": len(arr.lines),
               "with_fermat": bool(args.with_fermat)}
    payload.update(_census_payload(entries, args.precision))
    payload["tjurina_total"] = (tjurina_total(entries)
                                if all(e.ordinary for e in entries) else None)
    return payload, []


def cmd_freeness(args):
    curve = FermatCurve(args.degree) if args.with_fermat else None
    arr = build(args.arrangement, args.degree)
    entries = census(arr, curve)
    tau = tjurina_total(entries)
    degree_hat = len(arr.lines) + (args.degree if args.with_fermat else 0)
    verdict = freeness_test(degree_hat, tau)
    payload = {"arrangement": args.arrangement,
               "with_fermat": bool(args.with_fermat),
               "degree_hat": degree_hat,
               "tjurina_total": tau,
               "verdict": verdict.to_json_dict(),
               "criterion": "integer exponent solution of the quadratic "
                            "necessary condition"}
    if sorted(args.arrangement.replace("+", "")) in (
            sorted("BzMxNy"),):
        payload["syzygy_checks"] = _syzygy_payload(args.degree)
    return payload, []


def _syzygy_payload(d):
    out = []
    for name, triple, P in syzygy_candidates(d):
        out.append({"candidate": name,
                    "is_syzygy": verify_syzygy(triple, P)})
    from .arrangements import grid_product_poly
    P = grid_product_poly(d)
    out.append({"candidate": "koszul-xy",
                "is_syzygy": verify_syzygy(koszul_triple(P, 0, 1), P)})
    return out


def cmd_collinear(args):
    curve = FermatCurve(args.degree)
    lines = collinear_sextactic(curve)
    payload = {
        "line_count": len(lines),
        "intra_cluster": sum(1 for L in lines if not L.mixed),
        "mixed_cluster": sum(1 for L in lines if L.mixed),
        "lines": [{"line": L.line.to_json_dict(),
                   "points": [{"cluster": s.cluster, "j": s.j, "k": s.k}
                              for s in L.points]} for L in lines],
    }
    return payload, []


def _verify_line(curve, label, line):
    failures = []
    entry = {"line_label": label, "line": line.to_json_dict()}
    try:
        rep = tangent_concurrency(curve, line)
        entry["tangent"] = rep.to_json_dict()
        if not all(rep.certificates.values()):
            failures.append({"check": "tangent-certificates", "line": label})
    except FermatoscError as exc:
        entry["tangent"] = {"error": str(exc)}
        failures.append({"check": "tangent-concurrency", "line": label,
                         "detail": str(exc)})
    try:
        rep = conic_common_points(curve, line)
        entry["conic"] = rep.to_json_dict()
        expected = 1 if (curve.d == 3 and label.startswith("B")) else 2
        if rep.count != expected:
            failures.append({"check": "conic-common-count", "line": label,
                             "got": rep.count, "expected": expected})
    except FermatoscError as exc:
        entry["conic"] = {"error": str(exc)}
        failures.append({"check": "conic-common-points", "line": label,
                         "detail": str(exc)})
    return entry, failures


def _verify_line_job(job):
    d, label, line_json = job
    curve = FermatCurve(d)
    from .hompoly import HomPoly
    from .tower import field_element_from_json
    terms = {tuple(t[:3]): field_element_from_json(t[3])
             for t in line_json["terms"]}
    line = HomPoly(curve.field, 1, terms)
    return _verify_line(curve, label, line)


def cmd_verify(args):
    curve = FermatCurve(args.degree)
    payload, failures = {}, []
    if args.theorem == "main":
        lines = _grid_lines(curve)
        if args.line_index is not None:
            if not (0 <= args.line_index < len(lines)):
                raise FewerPoints(f"line index out of range 0..{len(lines)-1}")
            lines = [lines[args.line_index]]
        results = []
        if args.jobs > 1:
            jobs = [(curve.d, label, L.to_json_dict()) for label, L in lines]
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for entry, fails in pool.map(_verify_line_job, jobs):
                    results.append(entry)
                    failures.extend(fails)
        else:
            for label, L in lines:
                entry, fails = _verify_line(curve, label, L)
                results.append(entry)
                failures.extend(fails)
        payload["lines"] = results
        payload["line_count"] = len(results)
    else:
        degrees = (1, 2) if args.osc_degree is None else (args.osc_degree,)
        checks = []
        panel = [(name, g) for name, g in generator_panel(curve.field)
                 if fixed_line(g) is not None]
        specials = [("sextactic", s.point) for s in sextactic_points(curve)]
        specials += [("inflection", p) for p in inflection_points(curve)]
        for n in degrees:
            for name, g in panel:
                seen = set()
                for kind, p in specials:
                    if kind == "inflection" and n == 2:
                        continue
                    if p in seen:
                        continue
                    orb = orbit(p, g)
                    seen.update(orb)
                    ok = verify_invariant_intersection(curve, g, p, n)
                    checks.append({"automorphism": name, "osc_degree": n,
                                   "orbit_size": len(orb), "kind": kind,
                                   "invariant": ok})
                    if not ok:
                        failures.append({"check": "invariant-intersection",
                                         "automorphism": name,
                                         "osc_degree": n, "kind": kind})
        payload["checks"] = checks
        payload["check_count"] = len(checks)
        payload["all_invariant"] = all(c["invariant"] for c in checks)
    return payload, failures


def cmd_all(args):
    if not (3 <= args.min_degree <= args.max_degree <= 64):
        raise ValueError("need 3 <= min-degree <= max-degree <= 64")
    rng = random.Random(args.seed)
    payload, failures = {"degrees": {}}, []
    for d in range(args.min_degree, args.max_degree + 1):
        section = {}
        ns = argparse.Namespace(degree=d, precision=args.precision,
                                seed=args.seed, jobs=args.jobs)
        sec_fail = []

        pay, fails = cmd_hessian2(ns)
        section["hessian"] = {k: v for k, v in pay.items()
                              if not isinstance(v, dict)}
        sec_fail += fails

        curve = FermatCurve(d)
        infl = inflection_points(curve)
        sample = infl if d <= 6 else [infl[i] for i in
                                      rng.sample(range(len(infl)), 6)]
        mults = [int_mult(curve.poly, tangent_line(curve, p), p)
                 for p in sample]
        section["inflection"] = {"count": len(infl),
                                 "checked": len(sample),
                                 "tangent_contacts": sorted(set(mults))}
        if len(infl) != 3 * d or set(mults) != {d}:
            sec_fail.append({"check": "inflection-suite", "degree": d})

        pts = sextactic_points(curve)
        idx = rng.sample(range(len(pts)), min(6, len(pts)))
        contacts = []
        prop_ok = True
        for i in idx:
            s = pts[i]
            O = hyperosculating_conic(curve, s)
            contacts.append(int_mult(curve.poly, O, s.point))
            closed = osculating_conic_closed(curve, s.point)
            cay = osculating_conic_cayley(curve, s.point)
            prop_ok = prop_ok and closed.proportional(O) \
                and cay.proportional(closed)
        section["sextactic"] = {"count": len(pts),
                                "count_formula": sextactic_count_formula(curve),
                                "sampled": len(idx),
                                "conic_contacts": sorted(set(contacts)),
                                "conic_pipelines_proportional": prop_ok}
        if (len(pts) != 3 * d * d or set(contacts) != {6} or not prop_ok
                or sextactic_count_formula(curve) != len(pts)):
            sec_fail.append({"check": "sextactic-suite", "degree": d})

        frees = {}
        for label, with_f, dh_extra in (
                ("B", False, 0), ("M", False, 0), ("N", False, 0),
                ("BzMxNy", False, 0), ("triangle+B", False, 0),
                ("triangle+BzMxNy", False, 0), ("M+triangle", False, 0),
                ("B", True, d), ("BzMxNy", True, d), ("M", True, d)):
            arr = build(label, d)
            entries = census(arr, curve if with_f else None)
            tau = tjurina_total(entries)
            verdict = freeness_test(len(arr.lines) + dh_extra, tau)
            key = label + ("+F" if with_f else "")
            frees[key] = {"tau": tau, "free": verdict.free,
                          "exponents": (list(verdict.exponents)
                                        if verdict.exponents else None),
                          "discriminant_sign": verdict.discriminant_sign}
        section["freeness"] = frees
        expected_free = {
            "B": (True, [d + 1, 2 * d - 2]),
            "BzMxNy": (True, [d + 1, 2 * d - 2]),
            "triangle+B": (True, [d + 1, 2 * d + 1]),
            "triangle+BzMxNy": (True, [d + 1, 2 * d + 1]),
            "BzMxNy+F": (True, [2 * d - 2, 2 * d + 1]),
            "B+F": (False, None), "M": (False, None), "N": (False, None),
            "M+triangle": (False, None), "M+F": (False, None)}
        for key, (free, exps) in expected_free.items():
            got = frees[key]
            if got["free"] != free or (free and got["exponents"] != exps):
                sec_fail.append({"check": "freeness", "arrangement": key,
                                 "degree": d})

        section["syzygies"] = _syzygy_payload(d)
        koszul_ok = [e for e in section["syzygies"]
                     if e["candidate"] == "koszul-xy"][0]["is_syzygy"]
        if not koszul_ok:
            sec_fail.append({"check": "koszul-syzygy", "degree": d})

        if d <= args.collinear_cap:
            lines = collinear_sextactic(curve)
            section["collinear"] = {
                "line_count": len(lines),
                "intra_cluster": sum(1 for L in lines if not L.mixed),
                "mixed_cluster": sum(1 for L in lines if L.mixed)}
            if d == 3:
                ok = (len(lines), section["collinear"]["intra_cluster"],
                      section["collinear"]["mixed_cluster"]) == (81, 27, 54)
            else:
                ok = (len(lines) == 9 * d
                      and all(len(L.points) == d for L in lines))
            if not ok:
                sec_fail.append({"check": "collinear", "degree": d})

        vargs = argparse.Namespace(degree=d, theorem="main", line_index=None,
                                   osc_degree=None, jobs=args.jobs,
                                   precision=args.precision, seed=args.seed)
        vpay, vfails = cmd_verify(vargs)
        section["concurrency"] = {
            "lines_verified": vpay["line_count"],
            "failures": len(vfails)}
        sec_fail += vfails

        iargs = argparse.Namespace(degree=d, theorem="invariant-intersection",
                                   line_index=None, osc_degree=None,
                                   jobs=args.jobs, precision=args.precision,
                                   seed=args.seed)
        ipay, ifails = cmd_verify(iargs)
        section["invariant_intersection"] = {
            "checks": ipay["check_count"],
            "all_invariant": ipay["all_invariant"]}
        sec_fail += ifails

        payload["degrees"][str(d)] = section
        failures.extend(sec_fail)
    return payload, failures


COMMANDS = {
    "points": cmd_points,
    "tangents": cmd_tangents,
    "conic": cmd_conic,
    "hessian2": cmd_hessian2,
    "census": cmd_census,
    "freeness": cmd_freeness,
    "collinear": cmd_collinear,
    "verify": cmd_verify,
    "all": cmd_all,
}


# -- rendering -----------------------------------------------------------------


def _render_table(report) -> str:
    lines = [f"fermatosc {report['command']} "
             f"(degree {report.get('degree', '-')}) "
             f"status={report['status']}"]
    payload = report["payload"]

    def table(headers, rows):
        widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows
                  else len(str(h)) for i, h in enumerate(headers)]
        fmt = "  ".join("{:<%d}" % w for w in widths)
        out = [fmt.format(*headers), fmt.format(*("-" * w for w in widths))]
        out += [fmt.format(*(str(c) for c in row)) for row in rows]
        return out

    if "sextactic" in payload and isinstance(payload["sextactic"], list):
        rows = [(s["cluster"], s["j"], s["k"],
                 _fmt_complex(s["approx"])) for s in payload["sextactic"]]
        lines += table(("cluster", "j", "k", "approx"), rows)
    elif "multiplicity_multiset" in payload:
        rows = sorted(payload["multiplicity_multiset"].items(),
                      key=lambda kv: int(kv[0]))
        lines += table(("multiplicity", "points"), rows)
        if payload.get("tjurina_total") is not None:
            lines.append(f"tjurina total: {payload['tjurina_total']}")
    elif "verdict" in payload:
        v = payload["verdict"]
        lines.append(f"degree_hat={payload['degree_hat']} "
                     f"tau={payload['tjurina_total']} free={v['free']} "
                     f"exponents={v['exponents']} "
                     f"discriminant={v['discriminant_sign']}")
        for c in payload.get("syzygy_checks", []):
            lines.append(f"syzygy candidate {c['candidate']}: "
                         f"{'passes' if c['is_syzygy'] else 'fails'}")
    elif "lines" in payload and report["command"] == "collinear":
        lines.append(f"lines: {payload['line_count']} "
                     f"(intra {payload['intra_cluster']}, "
                     f"mixed {payload['mixed_cluster']})")
    elif "lines" in payload:
        rows = []
        for entry in payload["lines"]:
            t = entry.get("tangent", {})
            c = entry.get("conic", {})
            rows.append((entry["line_label"],
                         t.get("count", "err"), c.get("count", "err")))
        lines += table(("line", "tangent pts", "conic pts"), rows)
    elif "degrees" in payload:
        for dstr, section in payload["degrees"].items():
            lines.append(f"degree {dstr}:")
            for key, val in section.items():
                lines.append(f"  {key}: {json.dumps(val, default=str)}")
    else:
        lines.append(json.dumps(payload, indent=2, default=str))
    if report["failures"]:
        lines.append("failures:")
        for f in report["failures"]:
            lines.append("  " + json.dumps(f, default=str))
    return "\n".join(lines) + "\n"


def _fmt_complex(approx):
    return " , ".join(f"{re:+.4f}{im:+.4f}i" for re, im in approx)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[args.command]
    try:
        payload, failures = handler(args)
    except (ValueError, FewerPoints) as exc:
        parser.exit(2, f"error: {exc}\n")
    except FermatoscError as exc:
        payload = {"error": str(exc)}
        failures = [{"check": "fatal", "detail": str(exc)}]
    report = {
        "schema": 1,
        "command": args.command,
        "degree": getattr(args, "degree", None),
        "seed": args.seed,
        "precision_bits": args.precision,
        "status": "ok" if not failures else "failed",
        "failures": failures,
        "payload": payload,
    }
    if args.format == "table":
        text = _render_table(report)
    else:
        text = json.dumps(report, indent=2, default=str) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if not failures else 1


if __name__ == "__main__":
    sys.exit(main())
