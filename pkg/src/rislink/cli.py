"""Command-line front end producing CSV/JSON tables.

Settings are merged in this order, later sources winning: built-in
defaults, ``--preset``, ``--config`` file, explicit flags.  The config file
is flat ``key = value`` text; keys are the long flag names with dashes or
underscores, ``#`` starts a comment.  Channel keys accept comma lists and
every combination is evaluated.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import (
    ChannelParams,
    db_to_linear,
    laguerre_params,
    product_moments,
)
from .errors import (
    ConvergenceError,
    DomainError,
    PoleProximityError,
    QuadratureError,
    RisError,
)
from .metrics import (
    ModulationParams,
    asep_closed_form,
    asep_quadrature,
    asymptotic_gains,
    asymptotic_outage,
    capacity_closed_form,
    capacity_quadrature,
    outage_probability,
)
from .montecarlo import (
    McConfig,
    clt_baseline_cdf,
    mc_asep,
    mc_capacity,
    mc_outage,
    simulate_z_samples,
)
from .optimizer import (
    OptProblem,
    optimal_n_exact,
    optimal_n_log,
    optimal_n_quadratic,
    percent_error,
)

__all__ = ["main", "build_parser", "SweepSpec", "RunConfig", "PRESETS", "ConfigError", "run"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

COMMANDS = ("outage", "asep", "capacity", "diversity", "optimize-n", "simulate")
AXES = ("snr_db", "gamma_out_db", "pout_threshold", "n", "m", "omega")
_COMMAND_AXES = {
    "outage": {"snr_db", "gamma_out_db", "n", "m", "omega"},
    "asep": {"snr_db", "n", "m", "omega"},
    "capacity": {"snr_db", "n", "m", "omega"},
    "diversity": {"n", "m", "gamma_out_db"},
    "optimize-n": {"gamma_out_db", "snr_db", "pout_threshold"},
    "simulate": {"snr_db", "gamma_out_db", "n", "m", "omega"},
}
_DEFAULT_AXIS = {
    "outage": "snr_db",
    "asep": "snr_db",
    "capacity": "snr_db",
    "diversity": "n",
    "optimize-n": "gamma_out_db",
    "simulate": "snr_db",
}


class ConfigError(Exception):
    """Invalid or inconsistent run configuration (exit code 2)."""


class NumericalFailure(Exception):
    """A library operation failed while producing a row (exit code 3)."""

    def __init__(self, operation: str, cause: BaseException):
        super().__init__(f"{operation}: {cause}")
        self.operation = operation


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; choose from {', '.join(AXES)}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.start < self.stop):
            raise ConfigError(f"sweep needs finite start < stop, got {self.start}, {self.stop}")
        if int(self.points) != self.points or self.points < 2:
            raise ConfigError(f"sweep needs points >= 2, got {self.points}")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"sweep scale must be linear or log, got {self.scale!r}")
        if self.axis == "pout_threshold" and self.scale != "log":
            raise ConfigError("pout_threshold sweeps require log scale")
        if self.scale == "log" and self.start <= 0:
            raise ConfigError("log-scale sweeps need start > 0")

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        """``axis:start:stop:points[:scale]``."""
        parts = text.strip().split(":")
        if len(parts) not in (4, 5):
            raise ConfigError(f"sweep must look like axis:start:stop:points[:scale], got {text!r}")
        try:
            start, stop = float(parts[1]), float(parts[2])
            points = int(parts[3])
        except ValueError:
            raise ConfigError(f"malformed sweep {text!r}") from None
        return cls(parts[0], start, stop, points, parts[4] if len(parts) == 5 else "linear")

    def values(self) -> list:
        if self.scale == "log":
            exps = np.linspace(math.log10(self.start), math.log10(self.stop), self.points)
            # snap decade exponents so 1e-5 prints as 1e-05, not 9.999999999999999e-06
            vals = [10.0 ** float(np.round(e, 12)) for e in exps]
        else:
            vals = np.linspace(self.start, self.stop, self.points)
        if self.axis == "n":
            ints = []
            for v in vals:
                k = int(round(v))
                if k not in ints:
                    ints.append(k)
            return ints
        return [float(v) for v in vals]

    def text(self) -> str:
        return f"{self.axis}:{self.start!r}:{self.stop!r}:{self.points}:{self.scale}"


@dataclass(frozen=True)
class RunConfig:
    command: str
    scenarios: tuple  # ChannelParams, N included
    sweep: SweepSpec
    gamma_bar_db: float
    gamma_out_db: float
    modulation: ModulationParams
    mc: McConfig | None
    clt: bool
    pout_threshold: float
    n_max: int
    output_path: str | None
    format: str


_FLOAT_LISTS = ("m1", "m2", "omega1", "omega2", "m", "omega")
_FLOATS = ("snr_db", "gamma_out_db", "p", "q", "pout_th")
_INTS = ("trials", "seed", "chunk_size", "n_max")
_STRS = ("format", "out", "sweep")
_BOOLS = ("clt",)
KNOWN_KEYS = frozenset(_FLOAT_LISTS + _FLOATS + _INTS + _STRS + _BOOLS + ("n",))

DEFAULTS = {
    "m1": "1", "m2": "1", "omega1": "1", "omega2": "1", "n": "4",
    "snr_db": "10", "gamma_out_db": "0", "p": "1", "q": "1",
    "trials": "0", "seed": "0", "chunk_size": "65536",
    "pout_th": "1e-6", "n_max": "512", "format": "csv", "clt": "false",
}

PRESETS = {
    "fig1": ("outage", {
        "m": "1", "omega": "1", "n": "5,10", "gamma_out_db": "20",
        "sweep": "snr_db:0:40:41", "clt": "true", "trials": "200000", "seed": "1",
    }),
    "fig2": ("asep", {
        "m": "1,2,4", "omega": "1", "n": "4", "p": "1", "q": "1",
        "sweep": "snr_db:-10:20:31", "trials": "200000", "seed": "2",
    }),
    "fig3": ("diversity", {
        "m": "0.5,1,2,5,10", "omega": "1", "gamma_out_db": "0", "sweep": "n:1:20:20",
    }),
    "fig4": ("capacity", {
        "m": "1", "omega": "1,2,3,4", "n": "4",
        "sweep": "snr_db:-10:30:41", "trials": "200000", "seed": "4",
    }),
    "fig5": ("outage", {
        "m": "1", "omega": "1", "n": "8", "gamma_out_db": "0",
        "sweep": "snr_db:-20:0:21", "clt": "true", "trials": "1000000", "seed": "5",
    }),
    "fig6": ("optimize-n", {
        "m1": "2", "m2": "1", "omega1": "0.4123", "omega2": "0.8973",
        "snr_db": "15", "pout_th": "1e-20", "sweep": "gamma_out_db:-10:30:5",
    }),
    "fig7": ("optimize-n", {
        "m1": "2", "m2": "1", "omega1": "0.4123", "omega2": "0.8973",
        "snr_db": "15", "gamma_out_db": "0", "sweep": "pout_threshold:1e-30:1e-2:29:log",
    }),
}


def _norm_key(k: str) -> str:
    return k.strip().lstrip("-").replace("-", "_")


def read_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` file into raw string settings."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    out = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        key = _norm_key(key)
        if key not in KNOWN_KEYS and key != "preset":
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def _floats(key, text) -> list:
    try:
        vals = [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected number(s), got {text!r}") from None
    if not vals:
        raise ConfigError(f"{key}: empty list")
    return vals


def _ints(key, text) -> list:
    vals = _floats(key, text)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"{key}: expected integer(s), got {text!r}")
    return [int(v) for v in vals]


def _bool(key, text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _single(key, text, conv):
    vals = conv(key, text)
    if len(vals) != 1:
        raise ConfigError(f"{key}: expected a single value, got {text!r}")
    return vals[0]


def merge_settings(command: str, preset: str | None, config_path: str | None, flags: dict) -> dict:
    settings = dict(DEFAULTS)
    file_settings = read_config_file(config_path) if config_path else {}
    preset = flags.get("preset") or file_settings.pop("preset", None) or preset
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        preset_cmd, preset_settings = PRESETS[preset]
        if preset_cmd != command:
            raise ConfigError(f"preset {preset} belongs to the {preset_cmd!r} command")
        settings.update(preset_settings)
    for layer in (file_settings, {k: v for k, v in flags.items() if k != "preset"}):
        for key, value in layer.items():
            if value is None:
                continue
            # symmetric shorthands replace any per-hop values from lower layers
            if key == "m":
                settings.pop("m1", None), settings.pop("m2", None)
            if key in ("m1", "m2"):
                settings.pop("m", None)
            if key == "omega":
                settings.pop("omega1", None), settings.pop("omega2", None)
            if key in ("omega1", "omega2"):
                settings.pop("omega", None)
            settings[key] = str(value)
    return settings


def build_run_config(command: str, settings: dict) -> RunConfig:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    s = settings
    m_pairs = ([(v, v) for v in _floats("m", s["m"])] if "m" in s
               else list(itertools.product(_floats("m1", s["m1"]), _floats("m2", s["m2"]))))
    o_pairs = ([(v, v) for v in _floats("omega", s["omega"])] if "omega" in s
               else list(itertools.product(_floats("omega1", s["omega1"]),
                                           _floats("omega2", s["omega2"]))))
    n_list = _ints("n", s["n"])

    sweep = SweepSpec.parse(s["sweep"]) if s.get("sweep") else None
    if sweep is None:
        axis = _DEFAULT_AXIS[command]
        if axis == "n":
            sweep = SweepSpec("n", 1, 20, 20)
        else:
            base = _single(axis, s[axis], _floats)
            sweep = SweepSpec(axis, base, base + 1.0, 2)
    if sweep.axis not in _COMMAND_AXES[command]:
        raise ConfigError(f"{command} cannot sweep {sweep.axis!r}")

    try:
        scenarios = []
        axis_values = sweep.values()
        if sweep.axis == "m":
            m_pairs = [(v, v) for v in axis_values]
        elif sweep.axis == "omega":
            o_pairs = [(v, v) for v in axis_values]
        elif sweep.axis == "n":
            if any(v < 1 for v in axis_values):
                raise ConfigError("n sweep must stay >= 1")
            n_list = axis_values
        for (m1, m2), (o1, o2), n in itertools.product(m_pairs, o_pairs, n_list):
            scenarios.append(ChannelParams(m1, m2, o1, o2, n))
        mod = ModulationParams(_single("p", s["p"], _floats), _single("q", s["q"], _floats))
        trials = _single("trials", s["trials"], _ints)
        mc = None
        if trials < 0:
            raise ConfigError("trials must be >= 0")
        if trials > 0 or command == "simulate":
            mc = McConfig(trials or 100_000, _single("seed", s["seed"], _ints),
                          _single("chunk_size", s["chunk_size"], _ints))
        pth = _single("pout_th", s["pout_th"], _floats)
        if not 0 < pth < 1:
            raise ConfigError(f"pout_th must lie in (0, 1), got {pth}")
        n_max = _single("n_max", s["n_max"], _ints)
        if n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {n_max}")
    except DomainError as exc:
        raise ConfigError(str(exc)) from None

    fmt = s["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    return RunConfig(
        command=command,
        scenarios=tuple(scenarios),
        sweep=sweep,
        gamma_bar_db=_single("snr_db", s["snr_db"], _floats),
        gamma_out_db=_single("gamma_out_db", s["gamma_out_db"], _floats),
        modulation=mod,
        mc=mc,
        clt=_bool("clt", s["clt"]),
        pout_threshold=pth,
        n_max=n_max,
        output_path=s.get("out") or None,
        format=fmt,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

SCENARIO_COLUMNS = ["m1", "m2", "omega1", "omega2", "n"]


def _call(operation: str, fn: Callable, *args):
    try:
        return fn(*args)
    except (RisError, ArithmeticError, ValueError) as exc:
        raise NumericalFailure(operation, exc) from exc


def _scenario_cells(p: ChannelParams) -> dict:
    return {"m1": p.m1, "m2": p.m2, "omega1": p.omega1, "omega2": p.omega2, "n": p.n}


def _points(cfg: RunConfig):
    """Yield ``(scenario, snr_db, gamma_out_db)`` in axis order within each scenario."""
    axis = cfg.sweep.axis
    values = cfg.sweep.values() if axis in ("snr_db", "gamma_out_db") else [None]
    for p in cfg.scenarios:
        for v in values:
            snr = v if axis == "snr_db" else cfg.gamma_bar_db
            gout = v if axis == "gamma_out_db" else cfg.gamma_out_db
            yield p, snr, gout


def cmd_outage(cfg: RunConfig):
    cols = SCENARIO_COLUMNS + ["gamma_out_db", "snr_db", "pout_analytic", "pout_asymptotic",
                               "pout_clt", "pout_mc", "pout_mc_stderr"]
    rows = []
    for p, snr, gout in _points(cfg):
        gb, go = db_to_linear(snr), db_to_linear(gout)
        lp = _call("laguerre_params", laguerre_params, p)
        row = _scenario_cells(p) | {"gamma_out_db": gout, "snr_db": snr}
        row["pout_analytic"] = _call("outage_probability", outage_probability, go, gb, lp)
        row["pout_asymptotic"] = _call("asymptotic_outage", asymptotic_outage, go, gb, lp)
        row["pout_clt"] = _call("clt_baseline_cdf", clt_baseline_cdf, p, gb, go) if cfg.clt else None
        if cfg.mc is not None:
            est = _call("mc_outage", mc_outage, p, gb, go, cfg.mc)
            row["pout_mc"], row["pout_mc_stderr"] = est.value, est.std_error
        rows.append(row)
    return cols, rows


def _with_fallback(primary: str, fn, fallback: str, fb, args, fb_args, catch):
    try:
        return fn(*args), primary
    except catch:
        return _call(fallback, fb, *fb_args), fallback
    except (RisError, ArithmeticError, ValueError) as exc:
        raise NumericalFailure(primary, exc) from exc


def cmd_asep(cfg: RunConfig):
    cols = SCENARIO_COLUMNS + ["p", "q", "snr_db", "asep_analytic", "asep_method",
                               "asep_mc", "asep_mc_stderr"]
    rows = []
    mod = cfg.modulation
    for p, snr, _ in _points(cfg):
        gb = db_to_linear(snr)
        lp = _call("laguerre_params", laguerre_params, p)
        val, method = _with_fallback("asep_closed_form", asep_closed_form,
                                     "asep_quadrature", asep_quadrature,
                                     (mod, gb, lp), (mod, gb, lp), ConvergenceError)
        row = _scenario_cells(p) | {"p": mod.p, "q": mod.q, "snr_db": snr,
                                    "asep_analytic": val, "asep_method": method}
        if cfg.mc is not None:
            est = _call("mc_asep", mc_asep, p, gb, mod, cfg.mc)
            row["asep_mc"], row["asep_mc_stderr"] = est.value, est.std_error
        rows.append(row)
    return cols, rows


def cmd_capacity(cfg: RunConfig):
    cols = SCENARIO_COLUMNS + ["snr_db", "capacity_analytic", "capacity_method",
                               "capacity_mc", "capacity_mc_stderr"]
    rows = []
    for p, snr, _ in _points(cfg):
        gb = db_to_linear(snr)
        lp = _call("laguerre_params", laguerre_params, p)
        val, method = _with_fallback("capacity_closed_form", capacity_closed_form,
                                     "capacity_quadrature", capacity_quadrature,
                                     (gb, lp), (gb, lp), (PoleProximityError, ConvergenceError))
        row = _scenario_cells(p) | {"snr_db": snr, "capacity_analytic": val,
                                    "capacity_method": method}
        if cfg.mc is not None:
            est = _call("mc_capacity", mc_capacity, p, gb, cfg.mc)
            row["capacity_mc"], row["capacity_mc_stderr"] = est.value, est.std_error
        rows.append(row)
    return cols, rows


def cmd_diversity(cfg: RunConfig):
    cols = SCENARIO_COLUMNS + ["gamma_out_db", "a_plus_one", "b", "diversity_order", "coding_gain"]
    rows = []
    for p, _, gout in _points(cfg):
        lp = _call("laguerre_params", laguerre_params, p)
        g = _call("asymptotic_gains", asymptotic_gains, db_to_linear(gout), lp)
        rows.append(_scenario_cells(p) | {
            "gamma_out_db": gout, "a_plus_one": lp.a + 1.0, "b": lp.b,
            "diversity_order": g.diversity_order, "coding_gain": g.coding_gain,
        })
    return cols, rows


def cmd_optimize(cfg: RunConfig):
    cols = ["m1", "m2", "omega1", "omega2", "snr_db", "gamma_out_db", "pout_th", "n_max",
            "n_exact", "feasible", "pout_exact", "n_log", "a1_log", "n_quadratic", "a1_quadratic",
            "err_log_pct", "err_quadratic_pct"]
    rows = []
    axis = cfg.sweep.axis
    # N is the unknown here; scenario lists collapse to their distinct fading parameters
    fading = []
    for p in cfg.scenarios:
        key = (p.m1, p.m2, p.omega1, p.omega2)
        if key not in fading:
            fading.append(key)
    values = cfg.sweep.values()
    for m1, m2, o1, o2 in fading:
        for v in values:
            snr = v if axis == "snr_db" else cfg.gamma_bar_db
            gout = v if axis == "gamma_out_db" else cfg.gamma_out_db
            pth = v if axis == "pout_threshold" else cfg.pout_threshold
            try:
                prob = OptProblem(m1, m2, o1, o2, db_to_linear(snr), db_to_linear(gout), pth, cfg.n_max)
            except DomainError as exc:
                raise ConfigError(str(exc)) from None
            ex = _call("optimal_n_exact", optimal_n_exact, prob)
            lg = _call("optimal_n_log", optimal_n_log, prob)
            qd = _call("optimal_n_quadratic", optimal_n_quadratic, prob)
            rows.append({
                "m1": m1, "m2": m2, "omega1": o1, "omega2": o2, "snr_db": snr,
                "gamma_out_db": gout, "pout_th": pth, "n_max": cfg.n_max,
                "n_exact": ex.n_opt, "feasible": ex.feasible, "pout_exact": ex.achieved_pout,
                "n_log": lg.n_opt, "a1_log": lg.a_plus_one,
                "n_quadratic": qd.n_opt, "a1_quadratic": qd.a_plus_one,
                "err_log_pct": percent_error(lg.n_opt, ex.n_opt),
                "err_quadratic_pct": percent_error(qd.n_opt, ex.n_opt),
            })
    return cols, rows


def cmd_simulate(cfg: RunConfig):
    cols = SCENARIO_COLUMNS + ["gamma_out_db", "snr_db", "trials", "seed",
                               "z_mean", "z_mean_stderr", "z_mean_theory", "z_var", "z_var_theory",
                               "pout_mc", "pout_mc_stderr", "pout_analytic"]
    rows = []
    z_cache = {}
    for p, snr, gout in _points(cfg):
        if p not in z_cache:
            z_cache.clear()
            z_cache[p] = _call("simulate_z_samples", simulate_z_samples, p, cfg.mc)
        z = z_cache[p]
        gb, go = db_to_linear(snr), db_to_linear(gout)
        mean, var = product_moments(p)
        # gamma_bar * Z^2 <= gamma_out  <=>  Z <= sqrt(gamma_out / gamma_bar)
        hits = (z <= math.sqrt(go / gb)).astype(float)
        pout = float(hits.mean())
        n = z.size
        z_var = float(z.var(ddof=1)) if n > 1 else 0.0
        pout_se = float(hits.std(ddof=1)) / math.sqrt(n) if n > 1 else 0.0
        rows.append(_scenario_cells(p) | {
            "gamma_out_db": gout, "snr_db": snr, "trials": n, "seed": cfg.mc.seed,
            "z_mean": float(z.mean()), "z_mean_stderr": math.sqrt(z_var / n),
            "z_mean_theory": p.n * mean, "z_var": z_var, "z_var_theory": p.n * var,
            "pout_mc": pout, "pout_mc_stderr": pout_se,
            "pout_analytic": _call("outage_probability", outage_probability, go, gb,
                                   laguerre_params(p)),
        })
    return cols, rows


HANDLERS = {
    "outage": cmd_outage,
    "asep": cmd_asep,
    "capacity": cmd_capacity,
    "diversity": cmd_diversity,
    "optimize-n": cmd_optimize,
    "simulate": cmd_simulate,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        # repr is the shortest string that parses back to the same double
        return repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def render(cols, rows, fmt: str, command: str) -> str:
    if fmt == "json":
        doc = {
            "command": command,
            "columns": cols,
            "rows": [{c: _json_value(r.get(c)) for c in cols} for r in rows],
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def run(cfg: RunConfig) -> str:
    cols, rows = HANDLERS[cfg.command](cfg)
    return render(cols, rows, cfg.format, cfg.command)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--preset", help="named experiment: " + ", ".join(PRESETS))
    for name in ("m1", "m2", "omega1", "omega2", "m", "omega"):
        p.add_argument(f"--{name}", help="value or comma list")
    p.add_argument("--n", help="element count(s), comma list")
    p.add_argument("--snr-db", help="average SNR in dB")
    p.add_argument("--gamma-out-db", help="outage threshold in dB")
    p.add_argument("--p", help="modulation constant p")
    p.add_argument("--q", help="modulation constant q")
    p.add_argument("--trials", help="Monte Carlo trials (0 disables)")
    p.add_argument("--seed", help="Monte Carlo seed")
    p.add_argument("--chunk-size", help="trials per RNG stream")
    p.add_argument("--pout-th", help="target outage probability")
    p.add_argument("--n-max", help="largest admissible element count")
    p.add_argument("--sweep", help="axis:start:stop:points[:linear|log]")
    p.add_argument("--clt", help="include the Gaussian baseline column (true/false)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output file (default stdout)")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rislink", description="RIS link metrics over Nakagami-m fading.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "outage": "outage probability vs a sweep",
        "asep": "average symbol error probability",
        "capacity": "ergodic capacity",
        "diversity": "diversity order and coding gain",
        "optimize-n": "optimum element count by three methods",
        "simulate": "raw Monte Carlo statistics of the RIS sum",
    }
    for name in COMMANDS:
        _add_common(sub.add_parser(name, help=helps[name]))
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
        settings = merge_settings(args.command, None, args.config, flags)
        cfg = build_run_config(args.command, settings)
        text = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure in {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.output_path:
        try:
            with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"config error: cannot write {cfg.output_path!r}: {exc.strerror}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        sys.stdout.write(text)
    return EXIT_OK
