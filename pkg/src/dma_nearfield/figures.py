"""Figure data bundles: run configuration, tables, plot scripts, manifests.

Data files are the contract; plot scripts are a convenience for gnuplot.
CSV numbers use 9 significant digits (``'#.9g'``), comma separators and
``\\n`` line endings, so identical inputs give byte-identical files.  An
unbounded beam-depth limit is written as the literal ``inf`` and a gain
that does not exist as ``nan``.
"""
import ast
import datetime
import json
import math
import operator
import os
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import __version__
from ._backend import BACKEND
from .array_model import ArrayConfig, DistanceMode, SphericalPosition
from .beamdepth import (
    PUBLISHED_MODEL,
    XSource,
    critical_range,
    fit_depth_model,
    model_x_delta,
    per_delta_mse,
    solve_x_delta,
    verify_depth_limits,
    x_delta_grid,
)
from .gain import relative_gain_lemma1, relative_gain_lemma2, relative_gain_oracle

__all__ = [
    "ConfigError",
    "RunConfig",
    "Table",
    "FigureBundle",
    "load_config",
    "sweep_values",
    "gain_curve_bundle",
    "xdelta_bundle",
    "depth_bundle",
    "fit_bundle",
    "figure_config",
    "write_bundle",
    "format_number",
]

OUTDIR_ENV = "DMA_NEARFIELD_OUTDIR"


class ConfigError(ValueError):
    """Malformed configuration file or parameter."""


# -- configuration -----------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_number(text):
    """Parse a float, allowing ``pi`` and basic arithmetic (``pi/3``, ``2*pi``)."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.Name) and node.id in ("inf", "nan"):
            return float(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"not a number: {text!r}")

    try:
        return ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc


def parse_list(text):
    return tuple(parse_number(t) for t in str(text).split(",") if t.strip())


def parse_range(text):
    """``start:stop:step`` -> tuple of floats."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = (parse_number(p) for p in parts)
    if not step > 0:
        raise ValueError("sweep step must be positive")
    if stop < start:
        raise ValueError("sweep stop must not be below start")
    return start, stop, step


def sweep_values(start, stop, step):
    """Inclusive arithmetic sweep, rounded to 12 decimals for stable output."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def _fmt_range(rng):
    return ":".join(repr(float(v)) for v in rng)


def _fmt_list(values):
    return ",".join(repr(float(v)) for v in values)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one command run."""

    N_m: int = 10
    N_e: int = 200
    d_e: float = 0.005
    d_m: float = 0.005
    lambda_: float = 0.01
    alpha: float = 0.0
    beta: float = None
    P_b: float = 1.0
    r: float = 7.0
    phi: float = math.pi / 3
    theta: float = math.pi / 2
    delta: float = 0.9
    alpha_list: tuple = (0.0, 2.0, 4.0, 8.0, 12.0)
    delta_list: tuple = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    dr_range: tuple = (0.0, 10.0, 0.25)
    w_range: tuple = (0.0, 15.0, 0.1)
    mode: str = "exact"
    x_source: str = "model"
    fit: bool = False
    output_format: str = "csv"

    def __post_init__(self):
        try:
            DistanceMode.parse(self.mode)
            XSource(self.x_source)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"output_format must be csv or json, got {self.output_format!r}")
        for name in ("dr_range", "w_range"):
            start, stop, step = getattr(self, name)
            if not step > 0 or stop < start:
                raise ConfigError(f"{name}: need step > 0 and stop >= start")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must lie in (0, 1)")
        try:
            self.array
            self.user
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def array(self):
        return ArrayConfig(self.N_m, self.N_e, self.d_e, self.d_m, self.lambda_,
                           self.alpha, self.beta, self.P_b)

    @property
    def user(self):
        return SphericalPosition(self.r, self.phi, self.theta)

    @property
    def distance_mode(self):
        return DistanceMode.parse(self.mode)

    def to_items(self):
        """Key/value pairs in a form :func:`load_config` reads back exactly."""
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            key = "lambda" if f.name == "lambda_" else f.name
            if f.name in ("dr_range", "w_range"):
                out.append((key, _fmt_range(v)))
            elif f.name in ("alpha_list", "delta_list"):
                out.append((key, _fmt_list(v)))
            elif isinstance(v, bool):
                out.append((key, "true" if v else "false"))
            elif isinstance(v, str):
                out.append((key, v))
            elif v is None:
                continue
            elif isinstance(v, int):
                out.append((key, str(v)))
            else:
                out.append((key, repr(float(v))))
        return out


_INT_KEYS = {"N_m", "N_e"}
_FLOAT_KEYS = {"d_e", "d_m", "lambda_", "alpha", "beta", "P_b", "r", "phi", "theta", "delta"}
_LIST_KEYS = {"alpha_list", "delta_list"}
_RANGE_KEYS = {"dr_range", "w_range"}
_STR_KEYS = {"mode", "x_source", "output_format"}
_BOOL_KEYS = {"fit"}
#: written to manifests for provenance or as derived results; ignored on re-read
_RESULT_PREFIX = "result_"
_MANIFEST_ONLY = {"command", "figure", "tool_version", "backend", "generated_at",
                  "wall_clock_s", "files", "rows"}


def coerce_value(key, raw):
    """Convert a raw string for ``key`` to its typed value."""
    if key in _INT_KEYS:
        v = parse_number(raw)
        if v != int(v):
            raise ValueError(f"{key} must be an integer")
        return int(v)
    if key in _FLOAT_KEYS:
        return parse_number(raw)
    if key in _LIST_KEYS:
        return parse_list(raw)
    if key in _RANGE_KEYS:
        return parse_range(raw)
    if key in _BOOL_KEYS:
        low = str(raw).strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{key} must be a boolean")
    if key in _STR_KEYS:
        return str(raw).strip()
    raise KeyError(key)


def load_config(path, base=None):
    """Read a ``key = value`` file (``#`` comments) on top of ``base``.

    Raises
    ------
    ConfigError
        With ``path:line:`` diagnostics for unknown keys or bad values.
    """
    base = RunConfig() if base is None else base
    updates = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected key = value, got {text!r}")
            key, raw = (s.strip() for s in text.split("=", 1))
            if key == "lambda":
                key = "lambda_"
            if key in _MANIFEST_ONLY or key.startswith(_RESULT_PREFIX):
                continue
            try:
                updates[key] = coerce_value(key, raw)
            except KeyError:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}") from None
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    try:
        return replace(base, **updates)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# -- tables and bundles ------------------------------------------------------

def format_number(v):
    if v is None:
        return "nan"
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0.0:
        v = 0.0  # drop the sign of -0.0
    return format(v, "#.9g")


@dataclass
class Table:
    name: str
    columns: list
    descriptions: list
    rows: list = field(default_factory=list)

    def to_csv(self):
        lines = [f"# {c}: {d}" for c, d in zip(self.columns, self.descriptions)]
        lines.append(",".join(self.columns))
        lines.extend(",".join(format_number(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def to_records(self):
        def conv(v):
            s = format_number(v)
            return s if s in ("inf", "-inf", "nan") else float(s)

        return [dict(zip(self.columns, map(conv, row))) for row in self.rows]

    def column(self, name):
        k = self.columns.index(name)
        return [row[k] for row in self.rows]


@dataclass
class FigureBundle:
    """Tables, a gnuplot script and a reproducibility manifest."""

    stem: str
    command: str
    config: RunConfig
    tables: list
    plot_script: str
    extra_manifest: dict = field(default_factory=dict)

    def table(self, name=None):
        if name is None:
            return self.tables[0]
        return next(t for t in self.tables if t.name == name)

    def file_name(self, table):
        return f"{self.stem}.csv" if table is self.tables[0] else f"{self.stem}_{table.name}.csv"

    def manifest_items(self, wall_clock_s=None):
        items = [("command", self.command)]
        items += list(self.extra_manifest.items())
        items += self.config.to_items()
        items += [("tool_version", __version__), ("backend", BACKEND),
                  ("rows", ",".join(str(len(t.rows)) for t in self.tables)),
                  ("files", ",".join(self.file_name(t) for t in self.tables))]
        items.append(("generated_at", datetime.datetime.now(datetime.timezone.utc).isoformat()))
        if wall_clock_s is not None:
            items.append(("wall_clock_s", f"{wall_clock_s:.3f}"))
        return items


def write_bundle(bundle, outdir, wall_clock_s=None):
    """Write CSV tables, optional JSON mirror, plot script and manifest; return paths."""
    os.makedirs(outdir, exist_ok=True)
    written = []

    def emit(name, text):
        path = os.path.join(outdir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)

    for t in bundle.tables:
        emit(bundle.file_name(t), t.to_csv())
    if bundle.config.output_format == "json":
        doc = {t.name: {"columns": dict(zip(t.columns, t.descriptions)), "rows": t.to_records()}
               for t in bundle.tables}
        emit(f"{bundle.stem}.json", json.dumps(doc, indent=1, sort_keys=True) + "\n")
    emit(f"{bundle.stem}.plt", bundle.plot_script)
    emit(f"{bundle.stem}.manifest",
         "".join(f"{k} = {v}\n" for k, v in bundle.manifest_items(wall_clock_s)))
    return written


# -- gain curves (figure 1) --------------------------------------------------

def gain_curve_bundle(cfg, stem="gain_curve"):
    """Relative gain against range mismatch for each attenuation in ``alpha_list``."""
    base = cfg.array
    user = cfg.user
    mode = cfg.distance_mode
    drs = sweep_values(*cfg.dr_range)
    table = Table(
        "gain",
        ["alpha", "w", "delta_r", "gain_oracle", "gain_lemma1", "gain_lemma2", "lemma2_valid"],
        ["microstrip attenuation [1/m]", "0.5 N_e d_e alpha",
         "range mismatch, focus at r + delta_r [m]",
         "element-wise relative gain", "closed form K^2 D^2 / eta^2",
         "closed form K^2 / eta^2", "1 if t_y <= 0.46"],
    )
    for alpha in cfg.alpha_list:
        arr = base.with_alpha(alpha)
        for dr in drs:
            l2 = relative_gain_lemma2(arr, user, dr)
            table.rows.append([alpha, arr.w, dr,
                               relative_gain_oracle(arr, user, user.shifted(dr), mode),
                               relative_gain_lemma1(arr, user, dr), l2.value, l2.valid])
    alphas = " ".join(format_number(a) for a in cfg.alpha_list)
    script = _plot_header(stem, "range mismatch {/Symbol D}r [m]", "relative gain") + (
        f"alphas = \"{alphas}\"\n"
        f"plot for [a in alphas] '{stem}.csv' using ($1 == a+0 ? $3 : 1/0):4 "
        "with points pt 3 title sprintf('oracle, alpha=%s', a), \\\n"
        f"     for [a in alphas] '{stem}.csv' using ($1 == a+0 ? $3 : 1/0):6 "
        "with lines title sprintf('closed form, alpha=%s', a)\n"
    )
    return FigureBundle(stem, "gain-curve", cfg, [table], script)


def _plot_header(stem, xlabel, ylabel):
    return (
        "# gnuplot script; data columns are documented in the CSV header\n"
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        "set key autotitle columnhead\n"
        f"set terminal pngcairo size 900,600\nset output '{stem}.png'\n"
        f"set xlabel '{xlabel}'\nset ylabel '{ylabel}'\nset grid\n"
    )


# -- x_delta(w) (figure 2) ---------------------------------------------------

def xdelta_bundle(cfg, stem="xdelta"):
    """Numerical ``x_delta(w)`` against the piecewise-linear model."""
    ws = sweep_values(*cfg.w_range)
    deltas = np.asarray(cfg.delta_list, dtype=float)
    x = x_delta_grid(deltas, ws)
    x0 = np.array([solve_x_delta(d, 0.0) for d in deltas])
    refit = fit_depth_model(ws, deltas, x_numeric=x) if cfg.fit else None

    cols = ["delta", "w", "x_numeric", "x0", "offset", "x_model_published"]
    desc = ["gain fraction", "0.5 N_e d_e alpha", "root of K(x,w)^2 = delta K(0,w)^2",
            "x_delta(0)", "x_numeric - x0", "piecewise-linear model, published coefficients"]
    if refit:
        cols.append("x_model_refit")
        desc.append("piecewise-linear model, refitted coefficients")
    table = Table("xdelta", cols, desc)
    for k, d in enumerate(deltas):
        published = x0[k] + PUBLISHED_MODEL.offset(d, ws)
        fitted = x0[k] + refit.model.offset(d, ws) if refit else None
        for j, w in enumerate(ws):
            row = [d, w, x[k, j], x0[k], x[k, j] - x0[k], published[j]]
            if refit:
                row.append(fitted[j])
            table.rows.append(row)

    mse_published = per_delta_mse(PUBLISHED_MODEL, x, ws, deltas)
    mcols = ["delta", "mse_published"]
    mdesc = ["gain fraction", "mean squared error of the published model over the w sweep"]
    if refit:
        mcols.append("mse_refit")
        mdesc.append("mean squared error of the refitted model")
    mse = Table("mse", mcols, mdesc)
    for d in deltas:
        row = [d, mse_published[float(d)]]
        if refit:
            row.append(refit.mse[float(d)])
        mse.rows.append(row)

    dl = " ".join(format_number(d) for d in deltas)
    script = _plot_header(stem, "w", "x_{/Symbol d}(w)") + (
        f"deltas = \"{dl}\"\n"
        f"plot for [d in deltas] '{stem}.csv' using ($1 == d+0 ? $2 : 1/0):3 "
        "with points pt 6 title sprintf('numeric, delta=%s', d), \\\n"
        f"     for [d in deltas] '{stem}.csv' using ($1 == d+0 ? $2 : 1/0):6 "
        "with lines title sprintf('model, delta=%s', d)\n"
    )
    extra = {}
    if refit:
        extra = {f"result_refit_{f.name}": repr(getattr(refit.model, f.name))
                 for f in fields(refit.model)}
    return FigureBundle(stem, "xdelta", cfg, [table, mse], script, extra)


# -- beam depth (figure 3) ---------------------------------------------------

def depth_bundle(cfg, stem="depth"):
    """Beam-depth limits and the gains reached at them across a w sweep."""
    base = cfg.array
    user = cfg.user
    ws = sweep_values(*cfg.w_range)
    src = XSource(cfg.x_source)
    table = Table(
        "depth",
        ["w", "alpha", "x_delta", "critical_range", "delta_minus", "delta_plus",
         "gain_minus", "gain_plus", "lemma2_minus", "lemma2_plus"],
        ["0.5 N_e d_e alpha", "microstrip attenuation [1/m]",
         f"x_delta(w) ({src.value})", "range beyond which delta_plus is unbounded [m]",
         "near-side beam-depth limit [m]", "far-side limit [m], inf when unbounded",
         "element-wise gain at r - delta_minus", "element-wise gain at r + delta_plus",
         "K^2/eta^2 at r - delta_minus", "K^2/eta^2 at r + delta_plus"],
    )
    for w in ws:
        arr = base.with_w(w)
        chk = verify_depth_limits(arr, user, cfg.delta, src, mode=cfg.distance_mode)
        lim = chk.limits
        table.rows.append([w, arr.alpha, lim.x_delta, lim.critical_range, lim.delta_minus,
                           math.inf if lim.unbounded else lim.delta_plus,
                           chk.gain_at_minus, chk.gain_at_plus,
                           chk.lemma2_at_minus, chk.lemma2_at_plus])
    script = _plot_header(stem, "w", "relative gain at the limits") + (
        "set y2label 'beam depth limit [m]'\nset ytics nomirror\nset y2tics\n"
        f"plot '{stem}.csv' using 1:7 with lines dt 2, '' using 1:8 with lines dt 2, \\\n"
        "     '' using 1:5 axes x1y2 with lines, '' using 1:6 axes x1y2 with lines\n"
    )
    return FigureBundle(stem, "depth", cfg, [table], script)


def fit_bundle(cfg, stem="fit"):
    """Refit the piecewise-linear model and tabulate it next to the published one."""
    ws = sweep_values(*cfg.w_range)
    deltas = np.asarray(cfg.delta_list, dtype=float)
    res = fit_depth_model(ws, deltas)
    coef = Table("coefficients", ["index", "refit", "published"],
                 ["0..7 = a0_c,a0_d,a1_c,a1_d,b0_c,b0_d,b1_c,b1_d; 8 = w0",
                  "least-squares coefficients", "published coefficients"])
    names = [f.name for f in fields(res.model)]
    for k, name in enumerate(names):
        coef.rows.append([k, getattr(res.model, name), getattr(PUBLISHED_MODEL, name)])
    mse_published = per_delta_mse(PUBLISHED_MODEL, res.x_numeric, ws, deltas)
    mse = Table("mse", ["delta", "mse_refit", "mse_published", "crossing_w_refit", "crossing_w_published"],
                ["gain fraction", "mean squared error, refit", "mean squared error, published",
                 "w where the upper branch meets x_delta(0), refit", "same, published"])
    for d in deltas:
        mse.rows.append([d, res.mse[float(d)], mse_published[float(d)],
                         res.model.crossing_w(d), PUBLISHED_MODEL.crossing_w(d)])
    from .beamdepth import model_sse
    extra = {"result_sse_refit": repr(res.sse),
             "result_sse_published": repr(model_sse(PUBLISHED_MODEL, res.x_numeric, ws, deltas))}
    script = _plot_header(stem, "delta", "MSE") + (
        "set logscale y\n"
        f"plot '{stem}_mse.csv' using 1:2 with linespoints, '' using 1:3 with linespoints\n"
    )
    return FigureBundle(stem, "fit", cfg, [coef, mse], script, extra)


def figure_config(figure):
    """Run configuration matching each figure's stated parameters."""
    if figure == 1:
        return RunConfig()
    if figure == 2:
        return RunConfig(fit=True)
    if figure == 3:
        return RunConfig(r=30.0, phi=math.pi / 3, theta=math.pi / 3, delta=0.9, x_source="model")
    raise ConfigError(f"unknown figure {figure!r}; expected 1, 2 or 3")


FIGURE_BUILDERS = {1: gain_curve_bundle, 2: xdelta_bundle, 3: depth_bundle}
