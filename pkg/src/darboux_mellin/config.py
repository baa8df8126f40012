"""TOML job configuration with strict key checking and line-referenced errors."""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ._numbers import coerce
from .saddle import FormSeries, SaddleChart, ValidationError

__all__ = ["ConfigError", "JobConfig", "load_config", "bundled_config_path"]

SCHEMA = {
    "chart": {"lambda1", "lambda2", "M", "scale"},
    "forms": {"dx", "dy", "envelope", "truncation", "complete"},
    "integrals": {"coefficient", "forms"},
    "rational": {"numerator", "poles"},
    "engine": {"truncation", "order", "t", "tol", "zero_order"},
    "output": {"dir", "precision"},
    "cases": {"name", "lambda1", "lambda2", "monomials"},
    "lie": {"generators", "degree", "matrix", "p", "q"},
}
ARRAY_SECTIONS = {"forms", "integrals", "cases"}


class ConfigError(Exception):
    """Invalid configuration; ``str()`` carries the file and line reference."""


def bundled_config_path(name: str) -> Path:
    return Path(str(resources.files("darboux_mellin") / "configs" / f"{name}.toml"))


def _line_of(text: str, section: str | None, key: str | None = None) -> int:
    """First line defining ``key`` inside ``section`` (or the section header)."""
    lines = text.splitlines()
    start = 0
    if section is not None:
        header = re.compile(r"^\s*\[\[?\s*" + re.escape(section) + r"\s*\]\]?\s*(#.*)?$")
        for i, line in enumerate(lines):
            if header.match(line):
                start = i
                break
        else:
            return 1
    if key is None:
        return start + 1
    pattern = re.compile(r"^\s*" + re.escape(key) + r"\s*=")
    for i in range(start, len(lines)):
        if pattern.match(lines[i]):
            return i + 1
    return start + 1


@dataclass
class JobConfig:
    path: str
    text: str
    chart: SaddleChart | None = None
    forms: list[FormSeries] = field(default_factory=list)
    integrals: list[tuple[Fraction, list[int]]] = field(default_factory=list)
    rational: tuple[list, dict] | None = None
    truncation: int = 10
    order: int = 3
    t: list[float] = field(default_factory=lambda: [k / 10 for k in range(1, 10)])
    tol: float = 1e-8
    zero_order: int = 10
    out: str = "out"
    precision: int = 128
    cases: list[dict] = field(default_factory=list)
    lie: dict = field(default_factory=dict)

    def where(self, section: str | None, key: str | None = None) -> str:
        return f"{self.path}:{_line_of(self.text, section, key)}"


def _table(entries, where: str) -> dict:
    out = {}
    for entry in entries:
        if not isinstance(entry, list) or len(entry) != 3:
            raise ConfigError(f"{where}: coefficient entries are [m, n, c] triples")
        m, n, c = entry
        if not isinstance(m, int) or not isinstance(n, int):
            raise ConfigError(f"{where}: indices m, n must be integers")
        try:
            out[(m, n)] = out.get((m, n), 0) + coerce(c)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{where}: bad coefficient {c!r} ({exc})") from None
    return out


def _number(value, where: str) -> Fraction:
    try:
        return coerce(value) if not isinstance(value, float) else Fraction(repr(value))
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None


def load_config(path: str | Path) -> JobConfig:
    """Parse and validate a job file; raises ``ConfigError`` (``FileNotFoundError`` if absent)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    cfg = JobConfig(str(path), text)

    for section, body in raw.items():
        if section not in SCHEMA:
            raise ConfigError(f"{cfg.where(None, section)}: unknown section [{section}]")
        if section in ARRAY_SECTIONS:
            if not isinstance(body, list):
                raise ConfigError(f"{cfg.where(section)}: [{section}] must be an array of tables ([[{section}]])")
            tables = body
        else:
            if not isinstance(body, dict):
                raise ConfigError(f"{cfg.where(None, section)}: [{section}] must be a table")
            tables = [body]
        for table in tables:
            for key in table:
                if key not in SCHEMA[section]:
                    raise ConfigError(f"{cfg.where(section, key)}: unknown key '{key}' in [{section}]")

    try:
        if "chart" in raw:
            c = raw["chart"]
            for key in ("lambda1", "lambda2"):
                if key not in c:
                    raise ConfigError(f"{cfg.where('chart')}: missing key '{key}'")
            cfg.chart = SaddleChart(_number(c["lambda1"], cfg.where("chart", "lambda1")),
                                    _number(c["lambda2"], cfg.where("chart", "lambda2")),
                                    c.get("M", 1), c.get("scale", 1.0))
        for i, f in enumerate(raw.get("forms", [])):
            where = cfg.where("forms")
            form = FormSeries(
                dx=_table(f.get("dx", []), where),
                dy=_table(f.get("dy", []), where),
                envelope=f.get("envelope"),
                truncation=f.get("truncation"),
                complete=bool(f.get("complete", True)),
            )
            if cfg.chart is not None:
                for (m, n) in form.indices():
                    if min(m, n) < cfg.chart.min_index:
                        raise ValidationError(
                            f"form {i}: index {(m, n)} must exceed -M (M = {cfg.chart.pole_bound})")
            cfg.forms.append(form)
        if cfg.forms and cfg.chart is None:
            raise ConfigError(f"{cfg.where('forms')}: forms need a [chart] section")
        for entry in raw.get("integrals", []):
            idx = entry.get("forms", [])
            if not idx or any(not isinstance(i, int) or not 0 <= i < len(cfg.forms) for i in idx):
                raise ConfigError(f"{cfg.where('integrals', 'forms')}: form indices must refer to [[forms]] entries")
            cfg.integrals.append((_number(entry.get("coefficient", 1), cfg.where("integrals", "coefficient")), idx))
        if "rational" in raw:
            r = raw["rational"]
            num = [_number(c, cfg.where("rational", "numerator")) for c in r.get("numerator", [1])]
            poles: dict = {}
            for entry in r.get("poles", []):
                if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[1], int) or entry[1] < 1:
                    raise ConfigError(f"{cfg.where('rational', 'poles')}: poles are [location, multiplicity] pairs")
                shift = -_number(entry[0], cfg.where("rational", "poles"))
                poles[shift] = poles.get(shift, 0) + entry[1]
            if not poles:
                raise ConfigError(f"{cfg.where('rational')}: [rational] needs at least one pole")
            cfg.rational = (num, poles)
        engine = raw.get("engine", {})
        for key, kind in (("truncation", int), ("order", int), ("zero_order", int)):
            if key in engine:
                if not isinstance(engine[key], int) or engine[key] < 1:
                    raise ConfigError(f"{cfg.where('engine', key)}: '{key}' must be a positive integer")
                setattr(cfg, key, engine[key])
        if "t" in engine:
            cfg.t = _t_list(engine["t"], cfg.where("engine", "t"))
        if "tol" in engine:
            cfg.tol = float(engine["tol"])
            if not cfg.tol > 0:
                raise ConfigError(f"{cfg.where('engine', 'tol')}: tolerance must be positive")
        output = raw.get("output", {})
        cfg.out = str(output.get("dir", cfg.out))
        if "precision" in output:
            if not isinstance(output["precision"], int) or output["precision"] < 53:
                raise ConfigError(f"{cfg.where('output', 'precision')}: precision is an integer >= 53 (bits)")
            cfg.precision = output["precision"]
        for case in raw.get("cases", []):
            where = cfg.where("cases")
            chart = SaddleChart(_number(case.get("lambda1", 1), where), _number(case.get("lambda2", 1), where),
                                pole_bound=3)
            monomials = []
            for entry in case.get("monomials", []):
                if (not isinstance(entry, list) or len(entry) != 3 or entry[2] not in ("dx", "dy")
                        or not all(isinstance(v, int) for v in entry[:2])):
                    raise ConfigError(f"{where}: monomials are [m, n, \"dx\"|\"dy\"] triples")
                monomials.append(((entry[0], entry[1]), entry[2]))
            if not monomials:
                raise ConfigError(f"{where}: case needs at least one monomial")
            cfg.cases.append({"name": str(case.get("name", f"case{len(cfg.cases) + 1}")),
                              "chart": chart, "monomials": monomials})
        if "lie" in raw:
            lie = dict(raw["lie"])
            for key in ("generators", "degree", "matrix"):
                if key not in lie:
                    raise ConfigError(f"{cfg.where('lie')}: missing key '{key}'")
            matrix = lie["matrix"]
            n = lie["generators"]
            if (not isinstance(matrix, list) or len(matrix) != n
                    or any(not isinstance(row, list) or len(row) != n for row in matrix)):
                raise ConfigError(f"{cfg.where('lie', 'matrix')}: matrix must be {n}x{n}")
            if any(not isinstance(v, int) for row in matrix for v in row):
                raise ConfigError(f"{cfg.where('lie', 'matrix')}: matrix entries must be integers")
            cfg.lie = lie
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return cfg


def _t_list(values, where: str) -> list[float]:
    if isinstance(values, (int, float)):
        values = [values]
    out = []
    for v in values:
        if not isinstance(v, (int, float)) or not 0 < v:
            raise ConfigError(f"{where}: level values must be positive numbers")
        out.append(float(v))
    return out
