"""Command-line front end: ``darboux-mellin COMMAND [--config PATH] ...``.

Exit codes: 0 success, 1 verification failure or inconclusive certificate,
2 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath

from ._numbers import format_decimal, is_exact
from .asymptotics import Expansion, as_expansion, certify_zero_free, partial_sum, tail_certificate
from .config import ConfigError, JobConfig, bundled_config_path, load_config
from .elementary import elementary_mellin, monomial_mellin
from .lie import extend_automorphism, hall_basis, is_quasiunipotent, var_check
from .mellin import RationalMellin, inverse_mellin, partial_fractions
from .oracle import OneForm, QuadratureError, iterated_quadrature, saddle_path
from .saddle import ValidationError

COMMANDS = ("mellin", "expand", "eval", "verify", "zeros", "lie")


class InputError(Exception):
    pass


@dataclass
class Target:
    rational: RationalMellin
    expansion: Expansion
    envelope_estimated: bool


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def build_target(cfg: JobConfig) -> Target:
    """The function under study: a rational transform, one integral, or a combination."""
    if cfg.rational is not None:
        num, poles = cfg.rational
        try:
            rational = partial_fractions(num, poles)
        except ValueError as exc:
            raise InputError(f"{cfg.where('rational')}: {exc}") from None
        return Target(rational, as_expansion(rational), False)
    if not cfg.forms:
        raise InputError(f"{cfg.path}: no [[forms]] or [rational] section to work on")
    groups = cfg.integrals or [(Fraction(1), list(range(len(cfg.forms))))]
    rational = RationalMellin()
    expansion = as_expansion(0)
    estimated = False
    for coeff, idx in groups:
        try:
            series = elementary_mellin([cfg.forms[i] for i in idx], cfg.chart, cfg.truncation)
        except ValueError as exc:
            raise InputError(f"{cfg.where('engine', 'truncation')}: {exc}") from None
        rational = rational + series.rational() * coeff
        expansion = expansion + as_expansion(series) * coeff
        estimated |= series.envelope_estimated
    return Target(rational, expansion, estimated)


def _levels(cfg: JobConfig) -> list[tuple[float, float]]:
    """``(user t, chart level)`` pairs; chart levels must lie in ``(0, 1]``."""
    scale = cfg.chart.scale if cfg.chart is not None else 1.0
    out = []
    for t in cfg.t:
        level = t / scale
        if not 0 < level <= 1:
            raise InputError(f"{cfg.where('engine', 't')}: t = {t} is outside (0, scale]")
        out.append((t, level))
    return out


def cmd_mellin(cfg: JobConfig, out: Path) -> int:
    target = build_target(cfg)
    items = sorted(target.rational.items(), key=lambda kv: (kv[0][0], kv[0][1]))
    if all(is_exact(c) for _, c in items):
        header = ["pole", "multiplicity", "coefficient_num", "coefficient_den"]
        rows = [[_fraction_str(-a), k, c.numerator, c.denominator] for (a, k), c in items]
    else:
        header = ["pole", "multiplicity", "coefficient"]
        rows = [[_fraction_str(-a), k, format_decimal(c)] for (a, k), c in items]
    _write_csv(out / "mellin.csv", header, rows)
    print(f"mellin: {len(rows)} partial-fraction terms -> {out / 'mellin.csv'}")
    return 0


def cmd_expand(cfg: JobConfig, out: Path) -> int:
    target = build_target(cfg)
    series = partial_sum(target.expansion, cfg.order)
    rows = [[mu.numerator, mu.denominator, j, format_decimal(c)]
            for (mu, j), c in sorted(series.items())]
    _write_csv(out / "expand.csv", ["mu_num", "mu_den", "log_power", "coefficient"], rows)
    cert = tail_certificate(target.expansion, cfg.order)
    report = cert.as_dict()
    report["envelope_estimated"] = target.envelope_estimated
    _write_json(out / "tail_certificate.json", report)
    print(f"expand: {len(rows)} terms below s_p = {_fraction_str(cert.s_p)} -> {out / 'expand.csv'}")
    return 0


def cmd_eval(cfg: JobConfig, out: Path) -> int:
    target = build_target(cfg)
    series = partial_sum(target.expansion, cfg.order)
    cert = tail_certificate(target.expansion, cfg.order)
    rows = []
    for t, level in _levels(cfg):
        value = series.evaluate(level, prec=cfg.precision)
        rows.append([format_decimal(t), format_decimal(value),
                     format_decimal(cert.bound(level, prec=cfg.precision))])
    _write_csv(out / "eval.csv", ["t", "partial_sum", "tail_bound"], rows)
    print(f"eval: {len(rows)} levels -> {out / 'eval.csv'}")
    return 0


def _oracle_tol(tol: float) -> float:
    return max(min(1e-12, tol * 1e-3), 1e-14)


def cmd_verify(cfg: JobConfig, out: Path) -> int:
    rows, summary = [], []
    levels = [t for t in cfg.t]
    if any(not 0 < t <= 1 for t in levels) and cfg.cases:
        raise InputError(f"{cfg.where('engine', 't')}: corpus levels must lie in (0, 1]")
    jobs = []
    for case in cfg.cases:
        chart = case["chart"]
        series = inverse_mellin(monomial_mellin(case["monomials"], chart))
        forms = [OneForm.monomial_dx(m, n) if kind == "dx" else OneForm.monomial_dy(m, n)
                 for (m, n), kind in case["monomials"]]
        jobs.append((case["name"], chart, [(Fraction(1), forms)], series, None,
                     [(t, t) for t in levels]))
    if not cfg.cases:
        target = build_target(cfg)
        if not cfg.forms or cfg.rational is not None:
            raise InputError(f"{cfg.path}: verify needs [[forms]] or [[cases]]")
        groups = cfg.integrals or [(Fraction(1), list(range(len(cfg.forms))))]
        forms = [(c, [OneForm.from_tables(cfg.forms[i].dx, cfg.forms[i].dy) for i in idx])
                 for c, idx in groups]
        jobs.append(("target", cfg.chart, forms, target.expansion.series, target.expansion.remainder,
                     _levels(cfg)))
    all_pass = True
    for name, chart, groups, series, remainder, pairs in jobs:
        case_pass = True
        for t, level in pairs:
            symbolic = float(series.evaluate(level, prec=cfg.precision))
            path = saddle_path(chart.lambda1, chart.lambda2, level)
            oracle = 0.0
            for coeff, forms in groups:
                oracle += float(coeff) * iterated_quadrature(forms, path, tol=_oracle_tol(cfg.tol))
            abs_err = abs(symbolic - oracle)
            rel_err = abs_err / abs(oracle) if oracle != 0 else abs_err
            slack = float(remainder.evaluate(level, absolute_log=True)) if remainder else 0.0
            ok = rel_err <= cfg.tol or abs_err <= slack + cfg.tol * abs(oracle)
            case_pass &= ok
            rows.append([format_decimal(t), format_decimal(symbolic), format_decimal(oracle),
                         format_decimal(abs_err), format_decimal(rel_err), "true" if ok else "false"])
        summary.append({"name": name, "rows": len(pairs), "pass": case_pass})
        all_pass &= case_pass
    _write_csv(out / "verify.csv", ["t", "symbolic", "oracle", "abs_err", "rel_err", "pass"], rows)
    _write_json(out / "verify_summary.json",
                {"tol": cfg.tol, "cases": summary, "pass": all_pass,
                 "max_rel_err": max((float(r[4]) for r in rows), default=0.0)})
    failed = sum(1 for r in rows if r[5] == "false")
    print(f"verify: {len(rows)} rows, {failed} failing -> {out / 'verify.csv'}")
    return 0 if all_pass else 1


def cmd_zeros(cfg: JobConfig, out: Path) -> int:
    target = build_target(cfg)
    cert = certify_zero_free(target.expansion, order=cfg.zero_order)
    report = cert.as_dict()
    report["envelope_estimated"] = target.envelope_estimated
    _write_json(out / "zeros.json", report)
    print(f"zeros: {cert.status}" + (f", t_star = {format_decimal(cert.t_star)}" if cert.t_star else ""))
    return 1 if cert.status == "inconclusive" else 0


def cmd_lie(cfg: JobConfig, out: Path) -> int:
    if not cfg.lie:
        raise InputError(f"{cfg.path}: lie needs a [lie] section")
    lie = cfg.lie
    try:
        alg = hall_basis(int(lie["generators"]), int(lie["degree"]))
        aut = extend_automorphism(alg, lie["matrix"])
    except (ValueError, MemoryError) as exc:
        raise InputError(f"{cfg.where('lie')}: {exc}") from None
    rows, all_qu = [], True
    for k in range(1, alg.K + 1):
        if alg.dim(k) == 0:
            rows.append([k, 0, "true", "1"])
            continue
        report = is_quasiunipotent(aut[k])
        all_qu &= report.quasi_unipotent
        detail = report.annihilator_str() if report else str(report.witness).replace("**", "^")
        rows.append([k, alg.dim(k), "true" if report else "false", detail])
    _write_csv(out / "lie.csv", ["degree", "dim", "quasi_unipotent", "annihilator_or_witness"], rows)
    status = 0 if all_qu else 1
    if "p" in lie and "q" in lie:
        vr = var_check(alg, lie["matrix"], int(lie["p"]), int(lie["q"]))
        _write_json(out / "lie.json", {
            "ok": vr.ok, "message": vr.message, "identity_checks": vr.identity_checks,
            "identity_holds": vr.identity_holds,
            "nilpotency": {str(k): v for k, v in vr.nilpotency.items()},
        })
        if not vr.ok:
            status = 1
    print(f"lie: degrees 1..{alg.K}, quasi-unipotent on all: {all_qu} -> {out / 'lie.csv'}")
    return status


HANDLERS = {"mellin": cmd_mellin, "expand": cmd_expand, "eval": cmd_eval,
            "verify": cmd_verify, "zeros": cmd_zeros, "lie": cmd_lie}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darboux-mellin",
        description="Mellin transforms, asymptotic expansions and certificates for iterated integrals.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="TOML job file (default: the bundled example for the command)")
    parser.add_argument("--order", type=int, help="expansion order p")
    parser.add_argument("--t", help="comma-separated level values")
    parser.add_argument("--tol", type=float, help="verification tolerance (relative)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--precision", type=int, help="working precision in bits")
    return parser


def _apply_flags(cfg: JobConfig, args) -> None:
    if args.order is not None:
        if args.order < 1:
            raise InputError("--order must be a positive integer")
        cfg.order = args.order
        cfg.zero_order = args.order
    if args.t is not None:
        try:
            cfg.t = [float(v) for v in args.t.split(",") if v.strip()]
        except ValueError:
            raise InputError(f"--t expects comma-separated numbers, got {args.t!r}") from None
        if not cfg.t or any(not v > 0 for v in cfg.t):
            raise InputError("--t values must be positive")
    if args.tol is not None:
        if not args.tol > 0:
            raise InputError("--tol must be positive")
        cfg.tol = args.tol
    if args.out is not None:
        cfg.out = args.out
    if args.precision is not None:
        if args.precision < 53:
            raise InputError("--precision must be at least 53 bits")
        cfg.precision = args.precision


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = args.config or str(bundled_config_path(args.command))
    try:
        cfg = load_config(config)
        _apply_flags(cfg, args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        with mpmath.workprec(cfg.precision):
            return HANDLERS[args.command](cfg, out)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, InputError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"error: numeric non-convergence: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
