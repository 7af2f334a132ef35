"""Command-line interface: verify / torsion / fit / quotients.

Exit codes: 0 ok, 1 property failure, 2 input error, 3 estimator
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import verification
from .asymptotics import bounds_report, degree_fit, leading_fit, symmetry_fit
from .catalog import catalog_get, catalog_names
from .data import ResultRecord, census_volumes, results_root, store_result
from .fkdet import EstimatorError
from .presentations import CohomologyClass, parse_presentation_text, validate_class
from .quotients import congruence_quotients, cyclic_quotient, quotient_search, cycle_notation
from .svgplot import curve_svg
from .torsion import (
    DEFAULT_GRID,
    EstimatorConfig,
    TorsionSpec,
    log_grid,
    read_curve_values,
    torsion_curve,
    write_curve,
)

EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_NON_CONVERGENCE = 3


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        lo_s, hi_s, n_s = text.split(":")
        lo = float(Fraction(lo_s))
        hi = float(Fraction(hi_s))
        n = int(n_s)
        return log_grid(lo, hi, n)
    except (ValueError, ZeroDivisionError) as err:
        raise ValueError(f"bad grid spec {text!r}: expected lo:hi:n ({err})")


def _parse_phi(text: str, rank: int) -> CohomologyClass:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != rank:
        raise ValueError(f"phi has {len(parts)} weights for rank {rank}")
    return CohomologyClass(tuple(Fraction(p) for p in parts))


def _load_presentation(args) -> tuple:
    """Returns (presentation, phi, metadata)."""
    if bool(args.catalog) == bool(args.file):
        raise ValueError("exactly one of --catalog / --file is required")
    if args.catalog:
        pres, phi, meta = catalog_get(args.catalog)
    else:
        path = Path(args.file)
        if not path.exists():
            raise ValueError(f"no presentation file at {path}")
        pres, phi_file = parse_presentation_text(path.read_text(), name=path.stem)
        phi = phi_file
        meta = {}
    if getattr(args, "phi", None):
        phi = _parse_phi(args.phi, pres.rank)
        if not validate_class(pres, phi):
            raise ValueError("phi does not vanish on all relators")
    if phi is None:
        raise ValueError("no cohomology class: supply --phi")
    return pres, phi, meta


def _build_estimator(args, pres) -> EstimatorConfig:
    quotients = []
    if getattr(args, "congruence_fields", None):
        fields = [int(x) for x in args.congruence_fields.split(",")]
        quotients.extend(congruence_quotients(pres, fields))
    if getattr(args, "cyclic_order", None):
        q = cyclic_quotient(pres, args.cyclic_order)
        if q is None:
            raise ValueError(f"no cyclic quotient of order {args.cyclic_order}")
        quotients.append(q)
    if getattr(args, "quotient_degree", None):
        found = quotient_search(pres, args.quotient_degree, limit=4)
        quotients.extend(q for q in found if q.order > 1)
    return EstimatorConfig(
        method=args.method,
        quotients=tuple(quotients),
        series_depth=args.series_depth,
        workers=args.workers,
    )


def cmd_torsion(args) -> int:
    try:
        pres, phi, meta = _load_presentation(args)
        grid = _parse_grid(args.grid) if args.grid else DEFAULT_GRID
        estimator = _build_estimator(args, pres)
        if estimator.method in ("quotient", "auto") and not estimator.quotients:
            # deterministic default family
            fields = [7, 13] if pres.rank == 2 else []
            if pres.rank == 2:
                estimator.quotients = tuple(congruence_quotients(pres, fields))
            if not estimator.quotients:
                found = quotient_search(pres, min(6, 6), limit=3)
                estimator.quotients = tuple(q for q in found if q.order > 1)
        spec = TorsionSpec(
            presentation=pres,
            phi=phi,
            grid=grid,
            estimator=estimator,
            dropped_relator=meta.get("redundant_relator"),
        )
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    out_dir = results_root(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = []
    try:
        curve = torsion_curve(spec)
    except EstimatorError as err:
        print(f"estimator failure: {err}", file=sys.stderr)
        return EXIT_NON_CONVERGENCE
    base = out_dir / f"{pres.name}-curve"
    csv_path, json_path = write_curve(curve, base.with_suffix(".csv"))
    asymptotes = []
    try:
        fit = degree_fit(curve)
        pts = curve.unflagged()
        t_hi, v_hi = pts[-1].t, pts[-1].value
        t_lo, v_lo = pts[0].t, pts[0].value
        asymptotes = [
            (fit.k_plus, math.log(v_hi) - fit.k_plus * math.log(t_hi), f"slope {fit.k_plus:.2f}"),
            (fit.k_minus, math.log(v_lo) - fit.k_minus * math.log(t_lo), f"slope {fit.k_minus:.2f}"),
        ]
    except ValueError:
        pass
    svg_path = curve_svg(
        [(p.t, p.value) for p in curve.unflagged()],
        base.with_suffix(".svg"),
        asymptotes=asymptotes,
        title=f"{pres.name}: torsion samples",
    )
    for pt in curve.points:
        if pt.flagged:
            failures.append(f"t={pt.t:g}: {pt.note or 'flagged'}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    print(f"wrote {svg_path}")
    if failures:
        for f in failures:
            print(f"flagged: {f}", file=sys.stderr)
        return EXIT_NON_CONVERGENCE
    return EXIT_OK


def cmd_fit(args) -> int:
    path = Path(args.curve)
    if not path.exists():
        print(f"error: no curve file at {path}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        values = read_curve_values(path)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    from .torsion import CurvePoint, TorsionCurve  # lightweight shim around raw values
    from .fkdet import DeterminantEstimate

    points = [
        CurvePoint(
            t=t,
            value=v,
            estimate=DeterminantEstimate(value=v, method="rules", params={"trace": "loaded"}),
        )
        for t, v in values
    ]
    curve = TorsionCurve(spec=None, points=points)  # type: ignore[arg-type]
    try:
        fit = degree_fit(curve)
        x = args.x if args.x is not None else fit.thurston_estimate
        lead = leading_fit(curve, x=x, t_min=args.t_min)
    except ValueError as err:
        print(f"fit failure: {err}", file=sys.stderr)
        return EXIT_NON_CONVERGENCE
    volume = args.volume
    if volume is None and args.catalog:
        table = census_volumes()
        rec = table.get(args.catalog)
        volume = rec.volume if rec else None
    lower = 1.0
    if args.lower is not None:
        lower = args.lower
    bounds = bounds_report(
        lower=lower,
        leading=lead,
        upper=args.upper,
        total_volume=volume,
        band_slack=args.band_slack,
    )
    report = {
        "degrees": fit.to_json(),
        "leading": lead.to_json(),
        "bounds": bounds.to_json(),
    }
    out_dir = results_root(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / (path.stem + "-fit.json")
    report_path.write_text(json.dumps(report, indent=1))
    rows = [
        ("bottom slope", f"{fit.k_minus:.4f}"),
        ("top slope", f"{fit.k_plus:.4f}"),
        ("thurston estimate", f"{fit.thurston_estimate:.4f}"),
        ("gauge k", f"{lead.gauge_k:.4f}"),
        ("leading coefficient", f"{lead.leading_coefficient:.4f}"),
        ("C band", f"[{lead.confidence_band[0]:.4f}, {lead.confidence_band[1]:.4f}]"),
        ("lower bound A", f"{bounds.lower:.4f}"),
        ("upper bound", "-" if bounds.upper is None else f"{bounds.upper:.4f}"),
        ("volume cap", "-" if bounds.volume_cap is None else f"{bounds.volume_cap:.4f}"),
        ("bounds satisfied", str(bounds.satisfied)),
    ]
    width = max(len(r[0]) for r in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")
    print(f"wrote {report_path}")
    return EXIT_OK if bounds.satisfied else EXIT_PROPERTY_FAILURE


def cmd_quotients(args) -> int:
    try:
        pres, _, _ = _load_presentation(args)
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    found = quotient_search(pres, args.degree, limit=args.limit)
    lines = []
    for q in found:
        images = "  ".join(
            f"{name}->{cycle_notation(p)}"
            for name, p in zip(pres.generator_names, q.generator_images)
        )
        lines.append(f"degree {q.degree} order {q.order}: {images}")
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out} ({len(found)} quotients)")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    suites = verification.available_suites()
    wanted = suites.keys() if args.suite == "all" else [args.suite]
    unknown = [s for s in wanted if s not in suites]
    if unknown:
        print(f"error: unknown suite {unknown[0]!r}; have {', '.join(suites)}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    all_ok = True
    summary = {}
    for name in wanted:
        results = suites[name]()
        for check, ok, detail in results:
            status = "ok" if ok else "FAIL"
            print(f"[{status}] {name}: {check}" + (f" ({detail})" if detail else ""))
            all_ok = all_ok and ok
        summary[name] = {
            "passed": sum(1 for _, ok, _ in results if ok),
            "failed": sum(1 for _, ok, _ in results if not ok),
        }
    print(json.dumps({"suites": summary, "ok": all_ok}))
    return EXIT_OK if all_ok else EXIT_PROPERTY_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l2t",
        description="torsion functions of knot/link exteriors and their fits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the identity/invariant suites")
    p_verify.add_argument("--suite", default="all", help="all|" + "|".join(verification.available_suites()))
    p_verify.set_defaults(func=cmd_verify)

    def add_source(p):
        p.add_argument("--catalog", help=f"catalog name ({', '.join(catalog_names())})")
        p.add_argument("--file", help="presentation file (gens:/rel:/phi: format)")

    p_tor = sub.add_parser("torsion", help="sample a torsion curve")
    add_source(p_tor)
    p_tor.add_argument("--phi", help="comma-separated rational weights")
    p_tor.add_argument("--grid", help="lo:hi:n log-spaced sample grid (default 1/8:8:17)")
    p_tor.add_argument("--method", default="auto", choices=["rules", "quotient", "series", "auto"])
    p_tor.add_argument("--quotient-degree", type=int, help="search transitive quotients up to this degree")
    p_tor.add_argument("--congruence-fields", help="comma-separated field sizes for PSL(2,q) quotients")
    p_tor.add_argument("--cyclic-order", type=int, help="use the cyclic quotient of this order")
    p_tor.add_argument("--series-depth", type=int, default=40)
    p_tor.add_argument("--out", help="output directory (default $L2T_RESULTS_DIR or ./results)")
    p_tor.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p_tor.set_defaults(func=cmd_torsion)

    p_fit = sub.add_parser("fit", help="extract degrees/leading coefficient from a curve file")
    p_fit.add_argument("curve", help="curve CSV written by the torsion command")
    p_fit.add_argument("--x", type=float, help="Thurston norm (default: from the degree fit)")
    p_fit.add_argument("--t-min", type=float, help="explicit lower t cutoff for the top window")
    p_fit.add_argument("--volume", type=float, help="total hyperbolic volume for the cap check")
    p_fit.add_argument("--catalog", help="catalog name for a census volume lookup")
    p_fit.add_argument("--lower", type=float, help="lower bound A (default 1)")
    p_fit.add_argument("--upper", type=float, help="externally supplied upper bound")
    p_fit.add_argument("--band-slack", type=float, default=0.0)
    p_fit.add_argument("--out", help="output directory")
    p_fit.set_defaults(func=cmd_fit)

    p_quo = sub.add_parser("quotients", help="search finite permutation quotients")
    add_source(p_quo)
    p_quo.add_argument("--degree", type=int, required=True)
    p_quo.add_argument("--limit", type=int, default=20)
    p_quo.add_argument("--out", help="output file (cycle notation, one per line)")
    p_quo.set_defaults(func=cmd_quotients)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
