"""Command-line interface: ``littlewood <command> [options]``.

Exit codes: 0 success (all checks pass), 1 a check failed, 2 usage error
(including a refused solve), 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .certify_alpha import THRESHOLD_FLOAT, THRESHOLD_TEXT, certify
from .errors import LittlewoodError
from .fixtures import (
    PUBLISHED_ALPHA,
    PUBLISHED_CONDITION_BOUND,
    PUBLISHED_IMAG_THRESHOLD,
    PUBLISHED_MIXED_CELLS,
    PUBLISHED_PATH_COUNT,
    PUBLISHED_RADIUS,
    PUBLISHED_RESIDUAL_BOUND,
    TOY_SYSTEMS,
    fixture_strings,
    truncated_fixture,
)
from .geometry import (
    TOUCHING_DISTANCE,
    CYLINDER_RADIUS,
    axis_pairs,
    contact_point,
    decode_solution,
    pairwise_angles,
    pairwise_distances,
    point_line_distance,
    shared_angles,
)
from .homotopy import DEFAULT_MAX_PATHS, TrackerOptions, filter_real, solve_system
from .interval import krawczyk_operator
from .polysys import (
    LITTLEWOOD_VARIABLES,
    PolynomialSystem,
    build_generic_distance_polynomial,
    build_littlewood_system,
)
from .refine import condition_number, newton_refine, residual_inf_norm

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
CHECKS = ("residual", "distance", "alpha", "krawczyk", "angles")
RESIDUAL_TOL = 1e-8
DISTANCE_TOL = 1e-8
REFINE_DRIFT_TOL = 1e-6
ANGLE_TOL = 1e-6


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    inputs: list[str]
    options: dict
    outputs: list[str] = field(default_factory=list)
    started: str = ""
    finished: str = ""

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "options": self.options,
            "outputs": self.outputs,
            "version": __version__,
            "python": platform.python_version(),
            "timestamps": {"started": self.started, "finished": self.finished},
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# ---------------------------------------------------------------- inputs


def _load_solution(args) -> tuple[str, list[str], int | None]:
    """(label, decimal strings, precision digits) from ``--fixture`` or ``--input``."""
    if getattr(args, "input", None):
        path = Path(args.input)
        try:
            doc = json.loads(path.read_text())
            values = [str(v) for v in doc["values"]]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read solution file {path}: {exc}") from None
        if "variables" in doc and tuple(doc["variables"]) != LITTLEWOOD_VARIABLES:
            raise UsageError(f"solution file {path} lists unexpected variables")
        return str(path), values, doc.get("precision_digits")
    name = getattr(args, "fixture", None) or "first"
    if getattr(args, "truncate", None) is not None:
        return f"{name}@{args.truncate}", truncated_fixture(name, args.truncate), args.truncate
    return name, list(fixture_strings(name)), 12


def _solution_doc(values, digits: int) -> dict:
    return {"variables": list(LITTLEWOOD_VARIABLES), "values": [str(v) for v in values],
            "precision_digits": digits}


def _load_system(spec: str) -> tuple[str, PolynomialSystem]:
    if spec == "littlewood":
        return spec, build_littlewood_system()
    if spec in TOY_SYSTEMS:
        return spec, PolynomialSystem.loads(TOY_SYSTEMS[spec])
    path = Path(spec)
    try:
        return str(path), PolynomialSystem.loads(path.read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read system {spec!r}: {exc}") from None


def _floats(values) -> list[float]:
    return [float(v) for v in values]


# --------------------------------------------------------------- outputs


def _emit(args, payload, text: str) -> list[str]:
    """Write ``payload`` (json) or ``text`` to ``--output`` or stdout; returns output paths."""
    body = json.dumps(payload, indent=2) + "\n" if args.format == "json" else text.rstrip("\n") + "\n"
    if args.output:
        Path(args.output).write_text(body)
        return [args.output]
    sys.stdout.write(body)
    return []


def _table(rows: list[list[str]], header: list[str]) -> str:
    widths = [max(len(str(r[k])) for r in rows + [header]) for k in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*map(str, r)) for r in rows]
    return "\n".join(line.rstrip() for line in lines)


# -------------------------------------------------------------- commands


def cmd_generate(args) -> tuple[int, list[str], list[str]]:
    if args.generic:
        p = build_generic_distance_polynomial()
        payload = {"variables": list(p.variables), "terms": p.to_json(), "degree": p.total_degree}
        text = f"# variables: {' '.join(p.variables)}\n{p.to_text()}"
        return EXIT_OK, ["generic"], _emit(args, payload, text)
    system = build_littlewood_system()
    body = system.dumps(args.format)
    if args.output:
        Path(args.output).write_text(body if body.endswith("\n") else body + "\n")
        return EXIT_OK, ["littlewood"], [args.output]
    sys.stdout.write(body if body.endswith("\n") else body + "\n")
    return EXIT_OK, ["littlewood"], []


def _check_residual(system, values, ctx):
    r = residual_inf_norm(system, _floats(values))
    return r <= RESIDUAL_TOL, f"{r:.3e} (tol {RESIDUAL_TOL:g})", f"{PUBLISHED_RESIDUAL_BOUND:g} at 50 digits"


def _check_distance(system, values, ctx):
    d = pairwise_distances(decode_solution(_floats(values)))
    err = max(abs(v - TOUCHING_DISTANCE) for v in d)
    return err <= DISTANCE_TOL, f"21 pairs, max |d - 2| = {err:.3e}", "all 21 distances equal 2"


def _check_alpha(system, values, ctx):
    report = certify(system, [Fraction(v) for v in values])
    ctx["alpha"] = report
    published = PUBLISHED_ALPHA.get(ctx["fixture"])
    ref = f"alpha {published['alpha']:.4e} at {published['digits']} digits" if published else f"alpha <= {THRESHOLD_FLOAT:.4f}"
    ok = report.certified_approximate and report.certified_real
    return ok, f"alpha {float(report.alpha):.4e} (<= {THRESHOLD_TEXT}: {report.certified_approximate})", ref


def _check_krawczyk(system, values, ctx):
    x0 = _floats(values)
    x, _ = newton_refine(system, x0)
    drift = float(np.max(np.abs(np.asarray(x) - np.asarray(x0))))
    if drift > REFINE_DRIFT_TOL:
        return False, f"refined point moved {drift:.3e} from the input", f"r = {PUBLISHED_RADIUS:g}, contained"
    report = krawczyk_operator(system, x, ctx["radius"])
    return (report.contained,
            f"r = {ctx['radius']:g}, contained {report.contained}, contraction {report.contraction_factor:.3g}",
            f"r = {PUBLISHED_RADIUS:g}, contained")


def _check_angles(system, values, ctx):
    angles = pairwise_angles(decode_solution(_floats(values)))
    right = any(abs(a - math.pi / 2) <= ANGLE_TOL for a in angles)
    return len(angles) == 21 and right, f"{len(angles)} angles, pi/2 present: {right}", "21 angles incl. pi/2"


_CHECK_FUNCS: dict[str, Callable] = {
    "residual": _check_residual,
    "distance": _check_distance,
    "alpha": _check_alpha,
    "krawczyk": _check_krawczyk,
    "angles": _check_angles,
}


def _parse_checks(text: str) -> list[str]:
    if text == "all":
        return list(CHECKS)
    names = [c.strip() for c in text.split(",") if c.strip()]
    unknown = [c for c in names if c not in CHECKS]
    if unknown or not names:
        raise UsageError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)} or 'all'")
    return names


def cmd_verify(args):
    label, values, _ = _load_solution(args)
    if len(values) != 20:
        raise UsageError(f"a solution has 20 entries, got {len(values)}")
    checks = _parse_checks(args.checks)
    system = build_littlewood_system()
    ctx = {"fixture": label if label in PUBLISHED_ALPHA else None, "radius": args.radius}
    results = []
    for name in checks:
        try:
            ok, measured, published = _CHECK_FUNCS[name](system, values, ctx)
        except (LittlewoodError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            ok, measured, published = False, f"error: {type(exc).__name__}: {exc}", "-"
        results.append({"check": name, "passed": bool(ok), "measured": measured, "published": published})
    all_ok = all(r["passed"] for r in results)
    text = _table([[r["check"], "PASS" if r["passed"] else "FAIL", r["measured"], r["published"]]
                   for r in results], ["check", "result", "measured", "published"])
    text += f"\n\n{label}: {'all checks passed' if all_ok else 'some checks FAILED'}"
    payload = {"solution": label, "checks": results, "passed": all_ok}
    return (EXIT_OK if all_ok else EXIT_FAIL), [label], _emit(args, payload, text)


def _bezout(system: PolynomialSystem) -> int:
    return math.prod(system.degrees)


def cmd_solve(args):
    label, system = _load_system(args.system)
    if not system.is_square:
        raise UsageError(f"system {label} is not square ({len(system)} equations, {system.nvars} variables)")
    bezout = _bezout(system)
    cap = args.max_paths if args.max_paths > 0 else DEFAULT_MAX_PATHS
    if bezout > cap and not args.i_know_this_is_huge:
        msg = [f"refusing to solve {label}: Bezout path estimate {bezout:,} exceeds the cap {cap:,}"]
        if system == build_littlewood_system():
            msg.append(f"recorded full run: {PUBLISHED_MIXED_CELLS:,} mixed cells, "
                       f"{PUBLISHED_PATH_COUNT:,} paths")
        msg.append("pass --i-know-this-is-huge to override")
        print("\n".join(msg), file=sys.stderr)
        return EXIT_USAGE, [label], []

    opts = TrackerOptions(end_tol=args.end_tol)
    if args.max_paths == 0:
        result = solve_system(system, args.seed, opts, max_paths=0)
    else:
        result = solve_system(system, args.seed, opts, max_paths=args.max_paths, workers=args.workers)
    summary = {"system": label, "bezout": bezout, **result.summary()}
    if not result.tracked:
        text = (f"{label}: {len(result.cells)} mixed cells, BKK path count {result.bkk} "
                f"(Bezout {bezout}); no paths tracked")
        code = EXIT_OK if args.max_paths == 0 else EXIT_USAGE
        return code, [label], _emit(args, {"summary": summary, "endpoints": []}, text)

    real = filter_real(result.endpoints(), args.theta)
    records = [{"status": p.status, "s": p.s, "t": p.t, "residual": p.residual,
                "coordinates": [[repr(float(z.real)), repr(float(z.imag))] for z in p.current]}
               for p in result.paths]
    summary["real"] = len(real)
    lines = [f"{label}: {len(result.cells)} mixed cells, BKK {result.bkk}, "
             f"{summary['converged']} converged, {summary['diverged']} diverged, {summary['failed']} failed, "
             f"{len(real)} real (theta {args.theta:g})"]
    for rec in records:
        coords = ", ".join(f"{float(re):.12g}{float(im):+.3g}j" for re, im in rec["coordinates"])
        lines.append(f"  {rec['status']:<9} s={rec['s']:.3g}  ({coords})")
    return EXIT_OK, [label], _emit(args, {"summary": summary, "endpoints": records}, "\n".join(lines))


def cmd_refine(args):
    label, values, _ = _load_solution(args)
    system = build_littlewood_system()
    digits = args.precision_digits
    x, report = newton_refine(system, values if digits and digits > 16 else _floats(values),
                              precision_digits=digits)
    if digits and digits > 16:
        import mpmath

        with mpmath.workdps(digits + 10):
            out_values = [mpmath.nstr(v, digits + 2, strip_zeros=False) for v in x]
    else:
        out_values = [repr(float(v)) for v in x]
        digits = 16
    doc = _solution_doc(out_values, digits)
    doc["report"] = {"iterates": report.iterates, "final_residual_inf_norm": report.final_residual_inf_norm,
                     "step_norms": report.step_norms, "converged": report.converged}
    try:
        doc["report"]["condition_number"] = condition_number(system, _floats(out_values))
    except LittlewoodError:
        doc["report"]["condition_number"] = None
    text = (f"{label}: {report.iterates} Newton steps, residual {report.final_residual_inf_norm:.3e}, "
            f"converged {report.converged}, condition {doc['report']['condition_number']:.4g} "
            f"(published bound {PUBLISHED_CONDITION_BOUND:g})\n" + json.dumps(_solution_doc(out_values, digits)))
    if args.format == "json" or args.output:
        args.format = "json"
    return (EXIT_OK if report.converged else EXIT_FAIL), [label], _emit(args, doc, text)


def _alpha_row(name: str, values) -> dict:
    report = certify(build_littlewood_system(), [Fraction(v) for v in values])
    row = {"fixture": name, **report.to_dict()}
    published = PUBLISHED_ALPHA.get(name.split("@")[0])
    if published:
        row["published"] = published
        row["ratio"] = {k: float(getattr(report, k)) / published[k] for k in ("alpha", "beta", "gamma")}
    return row


def cmd_certify_alpha(args):
    if args.paper_fixtures:
        rows = []
        for name, pub in PUBLISHED_ALPHA.items():
            rows.append(_alpha_row(f"{name}@{pub['digits']}", truncated_fixture(name, pub["digits"])))
        inputs = [r["fixture"] for r in rows]
    else:
        label, values, _ = _load_solution(args)
        rows = [_alpha_row(label, values)]
        inputs = [label]
    ok = all(r["threshold_check"] and r["real"] for r in rows)
    table = []
    for r in rows:
        pub = r.get("published", {})
        for key in ("alpha", "beta", "gamma"):
            table.append([r["fixture"], key, r[key]["decimal"],
                          f"{pub[key]:.4e}" if pub else "-",
                          f"{r['ratio'][key]:.3f}" if pub else "-"])
        table.append([r["fixture"], "certified", str(r["threshold_check"]), "True" if pub else "-", ""])
    text = _table(table, ["point", "quantity", "computed", "published", "ratio"])
    text += f"\n\nthreshold {THRESHOLD_TEXT} = {THRESHOLD_FLOAT:.6f}"
    return (EXIT_OK if ok else EXIT_FAIL), inputs, _emit(args, {"certificates": rows}, text)


def cmd_certify_krawczyk(args):
    label, values, _ = _load_solution(args)
    system = build_littlewood_system()
    x, _ = newton_refine(system, _floats(values))
    report = krawczyk_operator(system, x, args.radius)
    payload = {"solution": label, **report.to_dict()}
    text = (f"{label}: Krawczyk box radius {args.radius:g}, contained {report.contained}, "
            f"contraction factor {report.contraction_factor:.4g}")
    return (EXIT_OK if report.contained else EXIT_FAIL), [label], _emit(args, payload, text)


def cmd_angles(args):
    label, values, _ = _load_solution(args)
    angles = pairwise_angles(decode_solution(_floats(values)))
    payload = {"solution": label, "angles": angles}
    lines = [f"{label}: 21 pairwise acute angles"]
    lines += [f"  {a:.12f} rad  {math.degrees(a):10.6f} deg" for a in angles]
    if args.compare:
        first, second = (decode_solution(_floats(fixture_strings(n))) for n in ("first", "second"))
        common = shared_angles(first, second, ANGLE_TOL)
        payload["shared_first_second"] = common
        lines.append(f"angles shared by first and second (tol {ANGLE_TOL:g}): "
                     + ", ".join(f"{a:.12f}" for a in common))
    return EXIT_OK, [label], _emit(args, payload, "\n".join(lines))


def cmd_export_geometry(args):
    label, values, _ = _load_solution(args)
    arr = decode_solution(_floats(values))
    contacts = []
    for (i, j), (a, b) in zip(axis_pairs(arr), ((arr.axes[i - 1], arr.axes[j - 1]) for i, j in axis_pairs(arr))):
        p = contact_point(a, b)
        contacts.append({"pair": [i, j], "point": [float(v) for v in p],
                         "distance_to_axes": [point_line_distance(p, a), point_line_distance(p, b)]})
    payload = {
        "solution": label,
        "radius": CYLINDER_RADIUS,
        "axes": [{"index": k + 1, "point": list(ax.point), "direction": list(ax.direction)}
                 for k, ax in enumerate(arr.axes)],
        "contacts": contacts,
    }
    args.format = "json"
    return EXIT_OK, [label], _emit(args, payload, "")


# ---------------------------------------------------------------- parser


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=("text", "json"), default=d("text"), help="output format")
    parser.add_argument("--seed", type=int, default=d(0), help="random seed for liftings and coefficients")
    parser.add_argument("--precision-digits", type=int, default=d(None),
                        help="working precision for refinement (above 16 uses mpmath)")
    parser.add_argument("--radius", type=float, default=d(PUBLISHED_RADIUS), help="Krawczyk box radius")
    parser.add_argument("--output", default=d(None), help="output file (default: stdout)")
    parser.add_argument("--manifest", default=d(None),
                        help="run manifest path (default: next to --output)")


def _solution_flags(parser: argparse.ArgumentParser) -> None:
    src = parser.add_mutually_exclusive_group()
    src.add_argument("--fixture", choices=("first", "second"), help="embedded published solution")
    src.add_argument("--input", help="solution JSON file {variables, values, precision_digits}")
    parser.add_argument("--truncate", type=int, default=None,
                        help="chop fixture entries to this many decimal places")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="littlewood", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    p = sub.add_parser("generate", parents=[common], help="write the 20-equation system")
    p.add_argument("--generic", action="store_true", help="emit the generic two-line polynomial instead")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", parents=[common], help="run checks on a solution")
    _solution_flags(p)
    p.add_argument("--checks", default="all", help=f"comma list of {', '.join(CHECKS)} or 'all'")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", parents=[common], help="polyhedral homotopy solve")
    p.add_argument("system", help="system file, or one of: " + ", ".join(["littlewood", *TOY_SYSTEMS]))
    p.add_argument("--end-tol", type=float, default=TrackerOptions.end_tol, help="endpoint residual tolerance")
    p.add_argument("--max-paths", type=int, default=DEFAULT_MAX_PATHS,
                   help="path cap; 0 reports cells and path count without tracking")
    p.add_argument("--i-know-this-is-huge", action="store_true", help="lift the path-count guard")
    p.add_argument("--theta", type=float, default=PUBLISHED_IMAG_THRESHOLD, help="imaginary-part threshold")
    p.add_argument("--workers", type=int, default=1, help="tracking threads")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("refine", parents=[common], help="Newton-refine a solution")
    _solution_flags(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("certify-alpha", parents=[common], help="exact alpha-theory certificate")
    _solution_flags(p)
    p.add_argument("--paper-fixtures", action="store_true",
                   help="certify both embedded solutions and compare with the published values")
    p.set_defaults(func=cmd_certify_alpha)

    p = sub.add_parser("certify-krawczyk", parents=[common], help="interval Krawczyk test")
    _solution_flags(p)
    p.set_defaults(func=cmd_certify_krawczyk)

    p = sub.add_parser("angles", parents=[common], help="pairwise axis angles")
    _solution_flags(p)
    p.add_argument("--compare", action="store_true", help="also list angles shared by both fixtures")
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("export-geometry", parents=[common], help="axes and contact points as JSON")
    _solution_flags(p)
    p.set_defaults(func=cmd_export_geometry)
    return parser


def _options(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def _write_manifest(args, manifest: RunManifest) -> None:
    path = args.manifest or (f"{args.output}.manifest.json" if args.output else None)
    if path:
        Path(path).write_text(manifest.to_json())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = RunManifest(args.command, [], _options(args), started=_now())
    try:
        code, inputs, outputs = args.func(args)
    except UsageError as exc:
        print(f"littlewood {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        print(f"littlewood {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    manifest.inputs, manifest.outputs, manifest.finished = inputs, outputs, _now()
    manifest.options["exit_code"] = code
    _write_manifest(args, manifest)
    return code


if __name__ == "__main__":
    sys.exit(main())
