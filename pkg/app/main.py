"""
Staircase - command-line entry point.

Subcommands:
- staircase  POINTS.json        standard monomials E_A, r and s
- spoly      POLYGON.json       dilate reports and S_P brackets per d
- seshadri   a b c              rational interval around the Seshadri constant
- atlas                         large-irreducible polygon classes (CSV)
- verify-pr  [r ...]            checks for the P_r family
- check                         randomized invariant suite

Exit codes: 0 ok, 1 violated property, 2 bad input, 3 inconclusive under --strict.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from app.config import settings
from app.errors import InputError, StaircaseError, UnsupportedError, VerificationError, WitnessInsufficientError
from app.schemas import FiniteFnIn, JobConfig, PointSetIn, PolygonIn, finite_fn_json, point_set_json, polygon_json
from app.services.atlas_service import atlas_service, format_atlas_csv, witness_json
from app.services.cache_service import cache_service
from app.services.figure_service import figure_service
from app.services.property_service import property_service
from app.services.spolytope_service import parse_schedule, spolytope_service
from app.services.staircase_service import staircase_service
from app.utils.linear_algebra import format_rat
from app.utils.monomial_orders import deglex, parse_order

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_BAD_INPUT = 2
EXIT_INCONCLUSIVE = 3


class InconclusiveResult(StaircaseError):
    """Raised under --strict when a verdict could not be decided."""


def _rat(value) -> Optional[str]:
    return None if value is None else format_rat(value)


def _dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _cached(job: JobConfig, canonical_input, extra, compute) -> dict:
    """Payload envelope {"stdout": ..., "svg": ...}, from the cache when allowed."""
    if not job.use_cache:
        return compute()
    key = cache_service.make_key(job.command, canonical_input, job.order, extra)
    text = cache_service.get_or_compute(key, job.command, lambda: json.dumps(compute(), sort_keys=True))
    return json.loads(text)


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_staircase(job: JobConfig) -> dict:
    A = PointSetIn.model_validate(_read_json(job.inputs[0])).to_domain()
    order = parse_order(job.order)
    want_svg = bool(job.svg) or job.output_format == "svg"

    def compute():
        E = staircase_service.compute_E(A, order)
        if not order.is_graded:
            if staircase_service.compute_E_lex(A, order).as_set() != E.as_set():
                raise VerificationError("lex_recursion", f"{len(A)} points")
            logger.info("lex staircase agrees with the recursive construction")
        graded = E if order == deglex(A.n) else staircase_service.compute_E(A, deglex(A.n))
        body = {
            "order": order.spec(),
            "points": point_set_json(A),
            "E": [list(e) for e in E.elements],
            "size": len(E),
            "r": staircase_service.r_value(A, graded),
            "s": staircase_service.s_value(A, graded),
        }
        svg = figure_service.staircase_svg(E.elements, title=order.spec()) if want_svg and A.n == 2 else None
        return {"stdout": _dump(body), "svg": svg}

    return _cached(job, point_set_json(A), {"svg": want_svg}, compute)


def _spoly_csv(rows: List[dict]) -> str:
    columns = ["d", "points", "r", "s", "v_est", "w_est", "v_lo", "v_hi", "w_lo", "w_hi",
               "v_lo_run", "w_lo_run", "v_hi_run", "w_hi_run"]
    lines = [";".join(columns)]
    for row in rows:
        lines.append(";".join("" if row[c] is None else str(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def cmd_spoly(job: JobConfig) -> dict:
    P = PolygonIn.model_validate(_read_json(job.inputs[0])).to_domain()
    schedule = parse_schedule(job.d_schedule)
    f = FiniteFnIn.model_validate(_read_json(job.inputs[1])).to_domain() if len(job.inputs) > 1 else None
    want_svg = bool(job.svg) or job.output_format == "svg"
    canonical = {"polygon": polygon_json(P), "witness": finite_fn_json(f) if f else None}

    def compute():
        entries = spolytope_service.dilate_schedule(P, schedule)
        rows = []
        for entry in entries:
            report, br = entry.report, entry.bracket
            rows.append({
                "d": format_rat(report.d),
                "points": report.point_count,
                "r": report.r,
                "s": report.s,
                "v_est": _rat(report.v_est),
                "w_est": _rat(report.w_est),
                "v_lo": _rat(br.v_lo),
                "v_hi": _rat(br.v_hi),
                "w_lo": _rat(br.w_lo),
                "w_hi": _rat(br.w_hi),
                "v_lo_run": _rat(entry.v_lo_run),
                "w_lo_run": _rat(entry.w_lo_run),
                "v_hi_run": _rat(entry.v_hi_run),
                "w_hi_run": _rat(entry.w_hi_run),
            })

        exact = None
        body = {"polygon": polygon_json(P), "schedule": rows, "exact": None}
        if f is not None:
            verdict = atlas_service.certify_irreducible(f)
            body["witness_verdict"] = verdict.status
            if verdict.is_irreducible:
                exact = spolytope_service.triangle_sp_exact(P, f, verdict)
                body["exact"] = {
                    "shape": exact.shape,
                    "vertices": [[format_rat(x), format_rat(y)] for x, y in exact.vertices],
                    "v": format_rat(exact.v),
                    "w": format_rat(exact.w),
                }
            elif verdict.status == "inconclusive":
                logger.warning(f"witness verdict inconclusive: {verdict.reason}")
                if job.strict:
                    raise InconclusiveResult(verdict.reason or "witness verdict inconclusive")
            else:
                raise InputError("witness is reducible; exact S_P needs an irreducible witness")

        svg = None
        if want_svg:
            panels = []
            for d in schedule:
                dilate = spolytope_service.dilate_staircase(P, d)
                elements = dilate[1].elements if dilate else ()
                panels.append((d, elements, spolytope_service.a_lower(P, d)))
            svg = figure_service.spoly_svg(panels, exact.polygon if exact else None)

        stdout = _spoly_csv(rows) if job.output_format == "csv" else _dump(body)
        return {"stdout": stdout, "svg": svg}

    return _cached(job, canonical, {"schedule": job.d_schedule, "format": job.output_format, "svg": want_svg}, compute)


def cmd_seshadri(job: JobConfig) -> dict:
    try:
        a, b, c = (int(x) for x in job.inputs)
    except ValueError as e:
        raise InputError(f"weights must be three integers, got {job.inputs}") from e
    schedule = parse_schedule(job.d_schedule)

    def compute():
        result = spolytope_service.seshadri_bracket(a, b, c, schedule)
        if job.output_format == "json":
            stdout = _dump({"weights": [a, b, c], "lo": format_rat(result.lo), "hi": _rat(result.hi)})
        else:
            hi = "inf" if result.hi is None else format_rat(result.hi)
            stdout = f"[{format_rat(result.lo)}, {hi}]\n"
        return {"stdout": stdout, "svg": None}

    return _cached(job, [a, b, c], {"schedule": job.d_schedule, "format": job.output_format}, compute)


def cmd_atlas(job: JobConfig) -> dict:
    def compute():
        report = atlas_service.atlas_search(job.max_2vol)
        if job.output_format == "json":
            stdout = _dump({
                "max_2vol": report.max_double_area,
                "rows": [
                    {"corners": [list(v) for v in row.vertices], "sm": row.m, "two_vol": row.double_area,
                     "witness": witness_json(row.witness) if row.witness else None}
                    for row in report.rows
                ],
                "inconclusive": [{"corners": [list(v) for v in i.vertices], "reason": i.reason}
                                 for i in report.inconclusive],
            })
        else:
            stdout = format_atlas_csv(report)
        return {"stdout": stdout, "svg": None, "inconclusive": len(report.inconclusive)}

    result = _cached(job, job.max_2vol, {"format": job.output_format}, compute)
    if job.strict and result.get("inconclusive"):
        sys.stdout.write(result["stdout"])
        raise InconclusiveResult(f"{result['inconclusive']} inconclusive classes")
    return result


def cmd_verify_pr(job: JobConfig) -> dict:
    try:
        rs = [int(r) for r in job.inputs] or list(range(1, 11))
    except ValueError as e:
        raise InputError(f"r values must be integers, got {job.inputs}") from e
    reports = atlas_service.verify_pr_range(rs)
    if job.output_format == "json":
        stdout = _dump([
            {"r": p.r, "m": p.m, "two_vol": p.double_area, "clauses": p.clauses,
             "staircase": [list(e) for e in p.staircase]}
            for p in reports
        ])
    else:
        stdout = "".join(f"P_{p.r}: m={p.m} two_vol={p.double_area} ok\n" for p in reports)
    return {"stdout": stdout, "svg": None}


def cmd_check(job: JobConfig) -> dict:
    report = property_service.run(seed=job.seed, cases=job.cases)
    if job.output_format == "json":
        stdout = _dump({
            "seed": report.seed,
            "passed": report.passed,
            "results": [{"name": r.name, "passed": r.passed, "cases": r.cases, "detail": r.detail}
                        for r in report.results],
        })
    else:
        stdout = "".join(
            f"{'ok  ' if r.passed else 'FAIL'} {r.name} ({r.cases} cases){': ' + r.detail if r.detail else ''}\n"
            for r in report.results
        )
    return {"stdout": stdout, "svg": None, "passed": report.passed}


COMMANDS = {
    "staircase": cmd_staircase,
    "spoly": cmd_spoly,
    "seshadri": cmd_seshadri,
    "atlas": cmd_atlas,
    "verify-pr": cmd_verify_pr,
    "check": cmd_check,
}

DEFAULT_FORMATS = {
    "staircase": "json",
    "spoly": "json",
    "seshadri": "text",
    "atlas": "csv",
    "verify-pr": "text",
    "check": "text",
}


# =============================================================================
# ARGUMENTS
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="staircase", description=settings.app_name)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.version}")
    parser.add_argument("--no-cache", action="store_true", help="bypass the result cache")
    parser.add_argument("--format", dest="output_format", choices=["json", "csv", "svg", "text"])
    parser.add_argument("--strict", action="store_true", help="exit 3 on inconclusive verdicts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("staircase", help="standard monomials of a point set")
    p.add_argument("points", help="PointSet JSON file")
    p.add_argument("--order", default=settings.default_order)
    p.add_argument("--svg", metavar="OUT")

    p = sub.add_parser("spoly", help="S_P brackets over a dilate schedule")
    p.add_argument("polygon", help="Polygon JSON file")
    p.add_argument("--witness", help="FiniteFn JSON file of an irreducible witness (triangles)")
    p.add_argument("--d-schedule", default=settings.default_d_schedule)
    p.add_argument("--svg", metavar="OUT")

    p = sub.add_parser("seshadri", help="Seshadri interval of P(a,b,c)")
    p.add_argument("weights", nargs=3)
    p.add_argument("--d-schedule", default=settings.default_d_schedule)

    p = sub.add_parser("atlas", help="large irreducible polygons up to a double-area bound")
    p.add_argument("--max-2vol", type=int, default=settings.default_max_2vol)

    p = sub.add_parser("verify-pr", help="checks for the P_r family")
    p.add_argument("r", nargs="*")

    p = sub.add_parser("check", help="randomized invariant suite")
    p.add_argument("--seed", type=int, default=settings.check_seed)
    p.add_argument("--cases", type=int, default=settings.check_cases)

    for name in COMMANDS:
        # global flags are also accepted after the subcommand
        sub.choices[name].add_argument("--no-cache", action="store_true", default=argparse.SUPPRESS)
        sub.choices[name].add_argument("--format", dest="output_format", default=argparse.SUPPRESS,
                                       choices=["json", "csv", "svg", "text"])
        sub.choices[name].add_argument("--strict", action="store_true", default=argparse.SUPPRESS)
    return parser


def job_from_args(args: argparse.Namespace) -> JobConfig:
    inputs = {
        "staircase": lambda: [args.points],
        "spoly": lambda: [args.polygon] + ([args.witness] if args.witness else []),
        "seshadri": lambda: list(args.weights),
        "verify-pr": lambda: list(args.r),
    }.get(args.command, lambda: [])()
    return JobConfig(
        command=args.command,
        inputs=inputs,
        order=getattr(args, "order", settings.default_order),
        d_schedule=getattr(args, "d_schedule", settings.default_d_schedule),
        max_2vol=getattr(args, "max_2vol", settings.default_max_2vol),
        use_cache=not args.no_cache and args.command not in ("verify-pr", "check"),
        output_format=args.output_format or DEFAULT_FORMATS[args.command],
        strict=args.strict,
        seed=getattr(args, "seed", settings.check_seed),
        cases=getattr(args, "cases", settings.check_cases),
        svg=getattr(args, "svg", None),
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.info(f"Starting {settings.app_name} {args.command}...")
    try:
        job = job_from_args(args)
        result = COMMANDS[job.command](job)
    except InconclusiveResult as e:
        logger.error(f"Inconclusive: {e}")
        return EXIT_INCONCLUSIVE
    except VerificationError as e:
        logger.error(str(e))
        return EXIT_VIOLATION
    except (InputError, UnsupportedError, WitnessInsufficientError) as e:
        logger.error(f"Bad input: {e}")
        return EXIT_BAD_INPUT
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_BAD_INPUT
    except json.JSONDecodeError as e:
        logger.error(f"Malformed JSON: {e}")
        return EXIT_BAD_INPUT
    except OSError as e:
        logger.error(f"Cannot read input: {e}")
        return EXIT_BAD_INPUT

    if job.output_format == "svg" and not job.svg:
        sys.stdout.write(result.get("svg") or "")
    else:
        sys.stdout.write(result["stdout"])
    if job.svg:
        if result.get("svg") is None:
            logger.warning("no figure for this input")
        else:
            Path(job.svg).write_text(result["svg"], encoding="utf-8")
            logger.info(f"Wrote {job.svg}")

    if result.get("passed") is False:
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
