"""Command-line entry point.

Commands: check, localise, audit, export-scheme, list-catalog.  Exit codes:
0 success / all requested verdicts pass, 1 malformed input or bad
parameters, 2 any fail verdict or a localisation refusal, 3 inapplicable
verdicts only.  Reports are emitted as text or JSON; identical invocations
produce identical reports.
"""

import argparse
import json
import sys
from typing import Any

from ._version import __version__
from .catalog import build_problem, build_scheme, catalog, verify_catalog
from .checks import (
    FAIL,
    INAPPLICABLE,
    PASS,
    Report,
    audit_dimension,
    audit_reversible_classical,
    check_completeness,
    check_security,
    check_theorem1,
)
from .linalg import basis_ket
from .localiser import LocalisationError, check_zero_leakage, localise
from .serialize import (
    SchemeFormatError,
    audit_to_json,
    problem_from_json,
    report_to_json,
    result_to_json,
    scheme_from_json,
    scheme_to_json,
)
from .tolerances import DEFAULT_TOLERANCES

_MAX_TEXT_CASES = 12
_CHECK_NAMES = ("security", "completeness", "theorem1")
_TOL_NAMES = ("unitarity", "hermiticity", "rank", "equality") + _CHECK_NAMES + ("leakage",)


class CliError(Exception):
    """Input problem that maps to exit code 1."""


def _parse_params(pairs: list[str]) -> dict[str, str]:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise CliError(f"parameter {pair!r} is not of the form KEY=VALUE")
        key, value = pair.split("=", 1)
        params[key.strip()] = value.strip()
    return params


def _parse_tols(pairs: list[str]) -> dict[str, float]:
    tols = {}
    for pair in pairs:
        if "=" not in pair:
            raise CliError(f"tolerance {pair!r} is not of the form NAME=VALUE")
        name, value = pair.split("=", 1)
        name = name.strip()
        if name not in _TOL_NAMES:
            raise CliError(f"unknown tolerance {name!r}; known: {', '.join(_TOL_NAMES)}")
        try:
            parsed = float(value)
        except ValueError:
            raise CliError(f"tolerance {name!r} has non-numeric value {value!r}") from None
        if not parsed > 0:
            raise CliError(f"tolerance {name!r} must be positive, got {parsed}")
        tols[name] = parsed
    return tols


def _scheme_params(builder: str, params: dict[str, str], seed: int) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if "n" in params:
        out["n"] = int(params["n"])
    if builder == "tag-evaluate":
        words = params.get("S") or params.get("circuit_set")
        if not words:
            raise CliError("tag-evaluate needs S=WORD,WORD,... (e.g. S=I,X,Z)")
        out["circuit_set"] = tuple(w for w in words.split(",") if w)
    return out


def _problem_params(params: dict[str, str], seed: int) -> dict[str, Any]:
    dims = params.get("dims")
    if not dims:
        raise CliError("problem builders need dims=D1,D2,D3")
    parts = [int(x) for x in dims.split(",")]
    if len(parts) != 3:
        raise CliError(f"dims must have three components, got {dims!r}")
    return {"dims": tuple(parts), "seed": int(params.get("seed", seed))}


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def _get_scheme(args: argparse.Namespace):
    if args.scheme:
        return scheme_from_json(_load_json(args.scheme))
    if args.builder:
        params = _scheme_params(args.builder, _parse_params(args.params), args.seed)
        try:
            return build_scheme(args.builder, **params)
        except (TypeError, ValueError) as exc:
            raise CliError(str(exc)) from None
    raise CliError("provide --scheme FILE or --builder NAME")


def _get_problem(args: argparse.Namespace):
    if args.problem:
        return problem_from_json(_load_json(args.problem))
    if args.builder:
        params = _problem_params(_parse_params(args.params), args.seed)
        try:
            return build_problem(args.builder, **params)
        except (TypeError, ValueError) as exc:
            raise CliError(str(exc)) from None
    raise CliError("provide --problem FILE or --builder NAME")


def _emit(args: argparse.Namespace, text: str, payload: Any) -> None:
    if args.format == "json":
        body = json.dumps(payload, indent=2, sort_keys=True)
    else:
        body = text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body + "\n")
    else:
        print(body)


def _report_lines(report: Report) -> list[str]:
    head = f"{report.kind}: {report.verdict}  worst_metric={report.worst_metric:.3e}"
    for name, value in report.tolerances.items():
        head += f"  {name}<={value:g}"
    if report.reason:
        head += f"  reason={report.reason}"
    lines = [head]
    worst = sorted(report.cases, key=lambda c: -c[1])[:_MAX_TEXT_CASES]
    for case_id, metric in worst:
        lines.append(f"  {case_id}  {metric:.3e}")
    if len(report.cases) > _MAX_TEXT_CASES:
        lines.append(f"  ... ({len(report.cases) - _MAX_TEXT_CASES} more cases)")
    return lines


def _verdict_exit(verdicts: list[str]) -> int:
    if any(v == FAIL for v in verdicts):
        return 2
    if any(v == INAPPLICABLE for v in verdicts):
        return 3
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    scheme = _get_scheme(args)
    tols = _parse_tols(args.tol)
    fallback = tols.get("equality", DEFAULT_TOLERANCES.equality)
    wanted = _CHECK_NAMES if args.which == "all" else (args.which,)
    reports: dict[str, Report] = {}
    security = completeness = None
    if "security" in wanted or "theorem1" in wanted:
        security = check_security(scheme, tols.get("security", fallback))
    if "completeness" in wanted or "theorem1" in wanted:
        completeness = check_completeness(scheme, tols.get("completeness", fallback))
    if "security" in wanted:
        reports["security"] = security
    if "completeness" in wanted:
        reports["completeness"] = completeness
    if "theorem1" in wanted:
        reports["theorem1"] = check_theorem1(
            scheme,
            basis_ket(scheme.input_dim, 0),
            tols.get("theorem1", fallback),
            security_report=security,
            completeness_report=completeness,
        )
    lines = [f"scheme: {scheme.name}"]
    for name in wanted:
        lines.extend(_report_lines(reports[name]))
    payload = {
        "scheme": scheme.name,
        "reports": {name: report_to_json(reports[name]) for name in wanted},
    }
    _emit(args, "\n".join(lines), payload)
    return _verdict_exit([reports[name].verdict for name in wanted])


def _cmd_localise(args: argparse.Namespace) -> int:
    problem = _get_problem(args)
    tols = _parse_tols(args.tol)
    base = DEFAULT_TOLERANCES.replace(
        **{k: v for k, v in tols.items() if k in ("unitarity", "hermiticity", "rank", "equality")}
    )
    if "leakage" in tols:
        base = base.replace(equality=tols["leakage"])
    ok, deviation = check_zero_leakage(problem, base.equality)
    if not ok:
        payload = {
            "verdict": FAIL,
            "reason": "leakage-detected",
            "max_deviation": deviation,
            "tolerances": {"leakage": base.equality},
        }
        _emit(args, f"zero-leakage: fail  max_deviation={deviation:.3e}", payload)
        return 2
    try:
        result = localise(problem, base)
    except LocalisationError as exc:
        payload = {"verdict": FAIL, "reason": "localisation-refused", "detail": str(exc)}
        _emit(args, f"localise: refused  {exc}", payload)
        return 2
    text = "\n".join(
        [
            f"zero-leakage: pass  max_deviation={deviation:.3e}",
            f"rank: {result.rank}",
            f"factor_dims: {result.factor_dims[0]}x{result.factor_dims[1]}",
            f"gram_residual: {result.gram_residual:.3e}",
            f"reconstruction_residual: {result.reconstruction_residual:.3e}",
        ]
    )
    payload = {"verdict": PASS, "max_deviation": deviation, **result_to_json(result)}
    _emit(args, text, payload)
    return 0


def _cmd_audit(args: argparse.Namespace) -> int:
    if (args.set_size is None) == (args.classical_bits is None):
        raise CliError("provide exactly one of --set-size or --classical-bits")
    if args.set_size is not None:
        if args.set_size < 1:
            raise CliError(f"--set-size must be >= 1, got {args.set_size}")
        audit = audit_dimension(args.set_size)
        text = f"set_size: {audit.set_size}\nqubits_required: {audit.qubits_required}"
    else:
        try:
            audit = audit_reversible_classical(args.classical_bits)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        text = "\n".join(
            [
                f"classical_bits: {audit.classical_bits}",
                f"state_count: {audit.state_count}",
                f"set_size: {audit.set_size}",
                f"qubits_required: {audit.qubits_required}",
                f"log2_floor: {audit.log2_floor}",
                f"log2_ceil: {audit.log2_ceil}",
                f"exponential_bound_holds: {str(audit.exponential_bound_holds).lower()}",
            ]
        )
    _emit(args, text, audit_to_json(audit))
    return 0


def _cmd_export_scheme(args: argparse.Namespace) -> int:
    scheme = _get_scheme(args)
    args.format = "json"  # scheme files are always JSON
    _emit(args, "", scheme_to_json(scheme))
    return 0


def _cmd_list_catalog(args: argparse.Namespace) -> int:
    if not args.verify:
        lines = []
        payload = []
        for entry in catalog():
            expect = ", ".join(f"{k}={v}" for k, v in sorted(entry.expected.items()))
            params = ", ".join(f"{k}={v}" for k, v in entry.params.items())
            lines.append(f"{entry.name}: {entry.builder}({params})  expected: {expect}")
            payload.append(
                {
                    "name": entry.name,
                    "builder": entry.builder,
                    "params": {k: list(v) if isinstance(v, tuple) else v for k, v in entry.params.items()},
                    "expected": dict(entry.expected),
                }
            )
        _emit(args, "\n".join(lines), payload)
        return 0
    all_match, rows = verify_catalog()
    lines = []
    payload_rows = []
    for name, checker, expected, actual in rows:
        mark = "ok" if expected == actual else "MISMATCH"
        lines.append(f"{name} {checker}: expected={expected} actual={actual} {mark}")
        payload_rows.append(
            {"entry": name, "checker": checker, "expected": expected, "actual": actual}
        )
    lines.append(f"catalog: {'all verdicts match' if all_match else 'verdict mismatches found'}")
    _emit(args, "\n".join(lines), {"all_match": all_match, "rows": payload_rows})
    return 0 if all_match else 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhekit",
        description=(
            "Simulate homomorphic-encryption schemes on small quantum systems, "
            "test their security, completeness and message-orthogonality "
            "properties, run the data-localisation construction, and audit "
            "evaluation-set dimension bounds."
        ),
    )
    parser.add_argument("--version", action="version", version=f"qhekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=0, help="builder seed (default 0)")
        p.add_argument(
            "--params", nargs="*", default=[], metavar="K=V", help="builder parameters"
        )
        p.add_argument(
            "--tol", nargs="*", default=[], metavar="NAME=VAL", help="tolerance overrides"
        )
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="write the report to this file instead of stdout")

    p_check = sub.add_parser("check", help="run scheme checkers")
    p_check.add_argument("--scheme", help="scheme JSON file")
    p_check.add_argument("--builder", help="identity | qotp | tag-evaluate")
    p_check.add_argument(
        "--which", choices=_CHECK_NAMES + ("all",), default="all", help="which checker to run"
    )
    add_common(p_check)
    p_check.set_defaults(func=_cmd_check)

    p_loc = sub.add_parser("localise", help="run the data-localisation construction")
    p_loc.add_argument("--problem", help="localisation problem JSON file")
    p_loc.add_argument("--builder", help="constructed-secure | leaky")
    add_common(p_loc)
    p_loc.set_defaults(func=_cmd_localise)

    p_audit = sub.add_parser("audit", help="evaluation-set dimension audit")
    p_audit.add_argument("--set-size", type=int, help="evaluation set cardinality")
    p_audit.add_argument(
        "--classical-bits", type=int, help="audit all reversible classical circuits on n bits"
    )
    add_common(p_audit)
    p_audit.set_defaults(func=_cmd_audit)

    p_export = sub.add_parser("export-scheme", help="write a built scheme as JSON")
    p_export.add_argument("--scheme", help="scheme JSON file to re-emit")
    p_export.add_argument("--builder", help="identity | qotp | tag-evaluate")
    add_common(p_export)
    p_export.set_defaults(func=_cmd_export_scheme)

    p_cat = sub.add_parser("list-catalog", help="list or verify the scheme catalog")
    p_cat.add_argument(
        "--verify", action="store_true", help="run all checkers and compare with expectations"
    )
    add_common(p_cat)
    p_cat.set_defaults(func=_cmd_list_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, SchemeFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
