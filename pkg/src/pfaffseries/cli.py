"""Command-line front end.

Documents are JSON.  A system document holds ``m``, ``n``, ``p`` and ``f``
(expression strings); a solution document holds ``m``, ``n``, ``order`` and
``coefficients``, a list of ``{"k": [...], "c": ["p/q", ...]}`` entries.
Rationals are always strings so nothing is rounded on the way through.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .criteria import run_all
from .diagnostics import DEFAULT_RADIUS_FLOOR, InsufficientData, degree_profile, gevrey_fit, radius_estimate
from .expr import ParseError
from .integrability import defects, is_completely_integrable
from .series import Series
from .solver import SolveStatus, solve_formal, verify
from .system import PfaffianSystem, validate

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INPUT = 2


class InputError(Exception):
    """Malformed or invalid input document; maps to exit code 2."""


# -- documents ---------------------------------------------------------------


def _read_json(path: str) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from None


def _rational(v, where: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise InputError(f"{where}: rationals must be integers or strings like \"p/q\", got {v!r}")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{where}: not a rational number: {v!r}") from None


def _uint(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise InputError(f"{where}: expected a non-negative integer, got {v!r}")
    return v


def system_from_document(doc: object, source: str = "system") -> PfaffianSystem:
    if not isinstance(doc, dict):
        raise InputError(f"{source}: expected a JSON object")
    missing = [key for key in ("p", "f") if key not in doc]
    if missing:
        raise InputError(f"{source}: missing field(s) {', '.join(missing)}")
    p, f = doc["p"], doc["f"]
    if not isinstance(p, list) or not isinstance(f, list):
        raise InputError(f"{source}: p and f must be lists")
    m = _uint(doc.get("m", len(p)), f"{source}: m")
    if len(p) != m or len(f) != m:
        raise InputError(f"{source}: p and f must have m = {m} entries")
    n = doc.get("n", len(f[0]) if f and isinstance(f[0], list) else 0)
    n = _uint(n, f"{source}: n")
    for i, fi in enumerate(f, start=1):
        if not isinstance(fi, list) or len(fi) != n or not all(isinstance(e, str) for e in fi):
            raise InputError(f"{source}: f[{i}] must be a list of {n} expression strings")
    pv = [_uint(x, f"{source}: p[{i}]") for i, x in enumerate(p, start=1)]
    try:
        system = PfaffianSystem.from_strings(pv, f, m=m, n=n)
    except ParseError as exc:
        raise InputError(f"{source}: syntax error: {exc}") from None
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None
    errors = validate(system)
    if errors:
        raise InputError(f"{source}: invalid system: " + "; ".join(errors))
    return system


def system_to_document(system: PfaffianSystem) -> dict:
    return {"m": system.m, "n": system.n, "p": list(system.p),
            "f": [[str(c) for c in fi] for fi in system.f]}


def solution_to_document(phi: Sequence[Series], order: int) -> dict:
    keys = sorted({k for s in phi for k in s.terms}, key=lambda k: (sum(k), [-e for e in k]))
    return {
        "m": phi[0].m,
        "n": len(phi),
        "order": order,
        "coefficients": [{"k": list(k), "c": [str(s.coeff(k)) for s in phi]} for k in keys],
    }


def _entries(doc: dict, source: str, m: int, n: int, order: int | None, key: str):
    items = doc.get(key)
    if not isinstance(items, list):
        raise InputError(f"{source}: {key} must be a list")
    out = {}
    for pos, entry in enumerate(items, start=1):
        where = f"{source}: {key}[{pos}]"
        if not isinstance(entry, dict) or "k" not in entry or "c" not in entry:
            raise InputError(f"{where}: expected an object with k and c")
        k, c = entry["k"], entry["c"]
        if not isinstance(k, list) or len(k) != m:
            raise InputError(f"{where}: k must list {m} exponents")
        k = tuple(_uint(e, where) for e in k)
        if sum(k) < 1:
            raise InputError(f"{where}: |k| must be at least 1")
        if order is not None and sum(k) > order:
            raise InputError(f"{where}: |k| = {sum(k)} exceeds order {order}")
        if not isinstance(c, list) or len(c) != n:
            raise InputError(f"{where}: c must list {n} rationals")
        if k in out:
            raise InputError(f"{where}: duplicate multi-index {list(k)}")
        out[k] = tuple(_rational(v, where) for v in c)
    return out


def solution_from_document(doc: object, source: str = "solution") -> tuple[Series, ...]:
    if not isinstance(doc, dict):
        raise InputError(f"{source}: expected a JSON object")
    for key in ("m", "n", "order", "coefficients"):
        if key not in doc:
            raise InputError(f"{source}: missing field {key}")
    m, n = _uint(doc["m"], f"{source}: m"), _uint(doc["n"], f"{source}: n")
    order = _uint(doc["order"], f"{source}: order")
    if m < 1 or n < 1:
        raise InputError(f"{source}: m and n must be positive")
    entries = _entries(doc, source, m, n, order, "coefficients")
    return tuple(Series(m, order, {k: c[a] for k, c in entries.items()}) for a in range(n))


def _load_assignments(path: str, system: PfaffianSystem) -> dict:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    key = "assignments" if "assignments" in doc else "coefficients"
    return _entries(doc, path, system.m, system.n, None, key)


# -- output helpers ------------------------------------------------------------


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _dump_solution(doc: dict) -> str:
    # one coefficient entry per line keeps long solutions readable and diffable
    head = {k: v for k, v in doc.items() if k != "coefficients"}
    lines = [json.dumps(e) for e in doc["coefficients"]]
    body = ",\n    ".join(lines)
    text = json.dumps(head)[:-1] + ', "coefficients": [\n    ' + body + "\n]}" if lines else json.dumps(doc)
    return text + "\n"


def _pair_name(i: int, j: int) -> str:
    return f"F_{i}{j}" if i < 10 and j < 10 else f"F_{i},{j}"


def _defect_text(F) -> str:
    return str(F[0]) if len(F) == 1 else "[" + ", ".join(str(c) for c in F) + "]"


# -- commands --------------------------------------------------------------------


def cmd_solve(args) -> int:
    system = system_from_document(_read_json(args.system), args.system)
    policy, assignments = args.free_policy, None
    if policy.startswith("value:"):
        assignments = _load_assignments(policy[len("value:"):], system)
        policy = "value"
    elif policy not in ("zero", "fail"):
        raise InputError(f"unknown free policy {policy!r} (use zero, fail or value:<file>)")
    solution, report = solve_formal(system, args.order, policy, assignments)

    # the report shares stdout only when the solution goes to a file
    report_stream = sys.stdout if args.out else sys.stderr
    if args.emit == "json":
        report_stream.write(_dump(report.to_dict()))
    else:
        lines = [f"status: {report.status.value} (order {report.order})"]
        if report.status is SolveStatus.SOLVED:
            totals = {"determined": 0, "free": 0, "forced": 0}
            for c in report.counts.values():
                for kind, v in c.items():
                    totals[kind] = totals.get(kind, 0) + v
            lines.append("ledger: " + ", ".join(f"{v} {kind}" for kind, v in totals.items()))
            for e in report.free:
                vals = ", ".join(str(v) for v in e["value"])
                comps = ", ".join(str(c) for c in e["components"])
                lines.append(f"free: k = {list(e['k'])} components [{comps}] set to [{vals}]")
        if report.witness:
            w = report.witness
            lines.append(f"witness: k = {list(w['k'])}, equation {w['equation']}, "
                         f"component {w['component']}, row \"{w['row']}\"")
        if report.message:
            lines.append(report.message)
        report_stream.write("\n".join(lines) + "\n")

    if solution is None:
        return EXIT_REJECTED
    _emit(_dump_solution(solution_to_document(solution.phi, args.order)), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    system = system_from_document(_read_json(args.system), args.system)
    phi = solution_from_document(_read_json(args.solution), args.solution)
    if phi[0].m != system.m or len(phi) != system.n:
        raise InputError(f"solution shape (m={phi[0].m}, n={len(phi)}) does not match "
                         f"system (m={system.m}, n={system.n})")
    vr = verify(system, phi)
    if not vr.ok:
        if args.emit == "json":
            _emit(_dump({"residual": vr.to_dict(), "criteria": None}), args.out)
        else:
            f = vr.failing
            _emit(f"residual verified through degree {vr.degree} of {vr.trunc}\n"
                  f"rejected: equation {f['equation']}, component {f['component']}, "
                  f"coefficient {f['coefficient']} at {f['monomial']}\n", args.out)
        return EXIT_REJECTED
    report = run_all(system, phi, args.eig_bound)
    if args.emit == "json":
        _emit(_dump({"residual": vr.to_dict(), "criteria": report.to_dict()}), args.out)
        return EXIT_OK
    lines = [f"residual verified through degree {vr.degree}"]
    for v in report.verdicts:
        line = f"{v.label()}: {v.status_text()}"
        if v.conclusion and v.holds:
            line += f"; {v.conclusion}"
        lines.append(line)
        if v.certificate and v.status.value in ("holds", "fails"):
            lines.append("  certificate: " + json.dumps(v.certificate, sort_keys=True))
        if v.note:
            lines.append(f"  note: {v.note}")
    lines.append(report.summary())
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_integrability(args) -> int:
    system = system_from_document(_read_json(args.system), args.system)
    verdict = is_completely_integrable(system)
    F = defects(system)
    if args.emit == "json":
        _emit(_dump({"verdict": verdict.to_dict(),
                     "defects": {_pair_name(i, j): [str(c) for c in comp] for (i, j), comp in F.items()}}),
              args.out)
        return EXIT_OK
    if system.m < 2:
        _emit("vacuously integrable\n", args.out)
        return EXIT_OK
    head = "completely integrable" if verdict.holds else "not integrable"
    parts = [head] + [f"{_pair_name(i, j)} = {_defect_text(comp)}" for (i, j), comp in F.items()]
    _emit("; ".join(parts) + "\n", args.out)
    return EXIT_OK


def _parse_ray(ray: str, m: int):
    if ray == "diagonal":
        return "diagonal"
    name = ray[len("axis_"):] if ray.startswith("axis_") else ray.lstrip("x")
    if not name.isdigit() or not 1 <= int(name) <= m:
        raise InputError(f"bad ray {ray!r}: use diagonal or axis_1..axis_{m}")
    return int(name)


def cmd_diagnose(args) -> int:
    phi = solution_from_document(_read_json(args.solution), args.solution)
    m = phi[0].m
    rays = args.ray or [f"axis_{i}" for i in range(1, m + 1)] + (["diagonal"] if m > 1 else [])
    directions = [(r, _parse_ray(r, m)) for r in rays]
    warnings = []
    profile = degree_profile(phi)
    try:
        fit = gevrey_fit(profile)
    except InsufficientData as exc:
        fit = None
        warnings.append(f"Gevrey fit: {exc}")
    radii = {}
    for name, d in directions:
        try:
            radii[name] = radius_estimate(phi, d)
        except InsufficientData as exc:
            radii[name] = None
            warnings.append(f"radius along {name}: {exc}")
    for w in warnings:
        sys.stderr.write(f"warning: InsufficientData: {w}\n")

    if args.emit == "csv":
        _emit(profile.to_csv(), args.out)
        return EXIT_OK
    if args.emit == "json":
        doc = {
            "profile": [{"degree": d, "max_abs_coeff": v} for d, v in enumerate(profile.as_floats(), start=1)],
            "zero_degrees": list(profile.zero_degrees),
            "gevrey": None if fit is None else {
                "s": fit.s, "log_a": fit.log_a, "log_c": fit.log_c,
                "r_squared": fit.r_squared, "verdict": fit.verdict()},
            "radius": radii,
            "radius_floor": args.radius_floor,
            "warnings": warnings,
        }
        _emit(_dump(doc), args.out)
        return EXIT_OK
    lines = ["degree  max |c_k|"]
    lines += [f"{d:6d}  {v:.6e}" for d, v in enumerate(profile.as_floats(), start=1)]
    if fit is not None:
        lines.append(f"Gevrey fit: s = {fit.s:.4f}, log A = {fit.log_a:.4f}, "
                     f"log C = {fit.log_c:.4f}, r^2 = {fit.r_squared:.4f}")
        lines.append(f"verdict: {fit.verdict()}")
    for name, r in radii.items():
        if r is None:
            continue
        tag = f" (below floor {args.radius_floor}: effectively zero)" if r < args.radius_floor else ""
        lines.append(f"radius along {name}: {r:.4f}{tag}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pfaffseries",
                                 description="Formal power-series solutions of singular Pfaffian systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a truncated formal solution")
    p.add_argument("system")
    p.add_argument("--order", type=int, default=12)
    p.add_argument("--free-policy", default="zero", metavar="zero|fail|value:FILE")
    p.add_argument("--emit", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="verify a solution and run the convergence criteria")
    p.add_argument("system")
    p.add_argument("solution")
    p.add_argument("--eig-bound", type=int)
    p.add_argument("--emit", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    for name in ("integrability", "defect"):
        p = sub.add_parser(name, help="print the integrability defects")
        p.add_argument("system")
        p.add_argument("--emit", choices=("text", "json"), default="text")
        p.add_argument("--out")
        p.set_defaults(func=cmd_integrability)

    p = sub.add_parser("diagnose", help="coefficient growth diagnostics")
    p.add_argument("solution")
    p.add_argument("--ray", action="append", metavar="axis_i|diagonal")
    p.add_argument("--radius-floor", type=float, default=DEFAULT_RADIUS_FLOOR)
    p.add_argument("--emit", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diagnose)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "order", 1) is not None and getattr(args, "order", 1) < 1:
        sys.stderr.write("error: --order must be at least 1\n")
        return EXIT_INPUT
    if getattr(args, "eig_bound", None) is not None and args.eig_bound < 0:
        sys.stderr.write("error: --eig-bound must be non-negative\n")
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
