"""Configuration-driven experiment harness.

Usage::

    nlskdv <simulate|scaling|lemmas|multipliers|picard|norms> --config cfg.json
           [--out DIR] [--seed INT]

Configs are flat JSON objects.  Every run writes into the output directory

* ``manifest.json``   resolved config, status, produced files (loadable by
  :func:`load_config`)
* ``results.csv``     the result table of the subcommand
* ``summary.csv``     verdict rows (exponent/statistic, residual, PASS/FAIL)
* ``provenance.json`` config hash, timestamp and package version

Only ``provenance.json`` depends on the wall clock (pinned by
``SOURCE_DATE_EPOCH`` when set), so repeated runs with the same config and
seed produce byte-identical CSV and manifest files.

Exit status: 0 when every verdict passes, 1 when any verdict fails, 2 on
errors (invalid config, precondition failures, blow-up).  The number of
worker threads used by parameter sweeps is read from ``NLSKDV_THREADS``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import (
    ArgumentError,
    ConfigError,
    ConfigMissingError,
    ConfigParseError,
    ConfigValueError,
    NlsKdvError,
    UnknownKeyError,
)

SUBCOMMANDS = ("simulate", "scaling", "lemmas", "multipliers", "picard", "norms")
THREADS_ENV = "NLSKDV_THREADS"


# --------------------------------------------------------------------------
# schema
# --------------------------------------------------------------------------

_REQUIRED = object()


@dataclass(frozen=True)
class Key:
    kind: str                       # "float", "int", "bool", "str", "int_list", "str_list"
    default: Any = _REQUIRED
    check: Optional[Callable[[Any], bool]] = None
    rule: str = ""


def _pos(x):
    return x > 0


def _even_n(x):
    return x >= 4 and x % 2 == 0


_COMMON = {
    "subcommand": Key("str"),
    "seed": Key("int", 0, lambda x: x >= 0, "seed >= 0"),
    "output_dir": Key("str", None),
}

SCHEMA: Dict[str, Dict[str, Key]] = {
    "simulate": {
        "alpha": Key("float"),
        "gamma": Key("float"),
        "beta": Key("float", 0.0),
        "N": Key("int", check=_even_n, rule="N even and >= 4"),
        "dt": Key("float", check=_pos, rule="dt > 0"),
        "T": Key("float", check=_pos, rule="T > 0"),
        "dealias": Key("bool", True),
        "record_every": Key("int", 1, _pos, "record_every >= 1"),
        "amplitude": Key("float", 1.0),
        "v_mean": Key("float", 0.1),
        "max_drift": Key("float", 1e-6, _pos, "max_drift > 0"),
    },
    "scaling": {
        "family": Key("str", check=lambda x: x in ("UV1", "UV2", "DU2_1", "DU2_2"),
                      rule="family in UV1, UV2, DU2_1, DU2_2"),
        "k": Key("float"),
        "s": Key("float"),
        "Ns": Key("int_list", [16, 32, 64, 128, 256, 512],
                  lambda x: len(x) >= 4 and all(n >= 8 and n % 2 == 0 for n in x)
                  and all(a < b for a, b in zip(x, x[1:])),
                  "at least 4 increasing even N >= 8"),
        "b": Key("float", 0.5),
        "dtau": Key("float", 0.125, lambda x: 0 < x <= 0.25, "0 < dtau <= 1/4"),
        "tolerance": Key("float", 0.1, _pos, "tolerance > 0"),
    },
    "lemmas": {
        "theta": Key("float", 0.9, _pos, "theta > 0"),
        "theta_tilde": Key("float", 0.9, _pos, "theta_tilde > 0"),
        "a_min_exp": Key("int", 4),
        "a_max_exp": Key("int", 14),
        "cubic_theta": Key("float", 0.5),
        "cubic_cutoff": Key("int", 1_000_000, _pos, "cubic_cutoff >= 1"),
        "linear_theta": Key("float", 0.6),
        "linear_n1": Key("int_list", [256, 512, 1024, 2048, 4096]),
        "epsilon": Key("float", 0.2, _pos, "epsilon > 0"),
        "measure_n": Key("int_list", [128, 256, 512]),
        "du2_n": Key("int_list", [128, 256, 512, 1024]),
        "max_measure_slope": Key("float", 0.95),
        "max_tail": Key("float", 1e-2),
    },
    "multipliers": {
        "kinds": Key("str_list", ["UV_w0", "UV_w1", "UV_w2", "DU2_v0", "DU2_v1", "DU2_v2"],
                     lambda x: len(x) > 0 and all(k in ("UV_w0", "UV_w1", "UV_w2", "DU2_v0",
                                                          "DU2_v1", "DU2_v2") for k in x),
                     "kinds among UV_w0..UV_w2, DU2_v0..DU2_v2"),
        "k": Key("float", 1.0),
        "s": Key("float", 1.0),
        "one_minus": Key("float", 0.9, lambda x: 0.5 < x <= 1.0, "1/2 < one_minus <= 1"),
        "truncation": Key("int", 256, lambda x: x >= 64, "truncation >= 64"),
        "threshold": Key("int", 100, _pos, "threshold >= 1"),
    },
    "picard": {
        "alpha": Key("float", 1.0),
        "beta": Key("float", 0.0),
        "gamma": Key("float", 1.0),
        "N": Key("int", 64, lambda x: x >= 16 and x % 2 == 0, "N even and >= 16"),
        "T": Key("float", 0.1, _pos, "T > 0"),
        "num_time_samples": Key("int", 32, lambda x: x >= 16, "num_time_samples >= 16"),
        "k": Key("float", 1.0),
        "s": Key("float", 1.0),
        "max_iters": Key("int", 50, _pos, "max_iters >= 1"),
        "tol": Key("float", 1e-12, _pos, "tol > 0"),
        "amplitude": Key("float", 1e-3),
        "max_distance": Key("float", 1e-6, _pos, "max_distance > 0"),
    },
    "norms": {
        "families": Key("str_list", ["schrodinger", "airy"],
                        lambda x: all(f in ("schrodinger", "airy") for f in x),
                        "families among schrodinger, airy"),
        "mode_range": Key("int", 8, lambda x: x >= 4, "mode_range >= 4"),
        "ensemble_size": Key("int", 50, _pos, "ensemble_size >= 1"),
        "modes_per_member": Key("int", 8, _pos, "modes_per_member >= 1"),
        "max_change": Key("float", 2.0, lambda x: x > 1, "max_change > 1"),
    },
}


@dataclass
class RunConfig:
    subcommand: str
    parameters: Dict[str, Any]
    seed: int = 0
    output_dir: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {"subcommand": self.subcommand, "seed": self.seed}
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        out.update(self.parameters)
        return out


def _reject_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ConfigParseError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def _coerce(name: str, key: Key, value):
    def bad(msg=None):
        return ConfigValueError(msg or f"{name}: expected {key.kind}, got {value!r}")

    if key.kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise bad()
        value = float(value)
        if not math.isfinite(value):
            raise bad(f"{name}: must be finite")
    elif key.kind == "int":
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise bad()
        value = int(value)
    elif key.kind == "bool":
        if not isinstance(value, bool):
            raise bad()
    elif key.kind == "str":
        if not isinstance(value, str):
            raise bad()
    elif key.kind == "int_list":
        if not isinstance(value, list) or not all(
                not isinstance(v, bool) and isinstance(v, (int, float)) and int(v) == v
                for v in value):
            raise bad()
        value = [int(v) for v in value]
    elif key.kind == "str_list":
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise bad()
        value = list(value)
    if key.check is not None and not key.check(value):
        raise ConfigValueError(f"{name}: out of range ({key.rule}), got {value!r}")
    return value


def parse_config(data: Dict[str, Any]) -> RunConfig:
    """Validate a decoded config object and fill defaults."""
    if not isinstance(data, dict):
        raise ConfigParseError("config must be a JSON object")
    if set(data) == {"manifest", "config", "run"}:
        data = data["config"]
        if not isinstance(data, dict):
            raise ConfigParseError("manifest config must be an object")
    sub = data.get("subcommand")
    if sub not in SUBCOMMANDS:
        raise ConfigValueError(f"subcommand must be one of {', '.join(SUBCOMMANDS)}, got {sub!r}")
    schema = SCHEMA[sub]
    unknown = [k for k in data if k not in schema and k not in _COMMON]
    if unknown:
        raise UnknownKeyError(unknown)
    params = {}
    for name, key in schema.items():
        if name in data:
            params[name] = _coerce(name, key, data[name])
        elif key.default is _REQUIRED:
            raise ConfigValueError(f"{name}: required for {sub}")
        else:
            params[name] = key.default
    seed = _coerce("seed", _COMMON["seed"], data.get("seed", 0))
    out = data.get("output_dir")
    if out is not None:
        out = _coerce("output_dir", _COMMON["output_dir"], out)
    if sub == "simulate" and params["T"] < params["dt"]:
        raise ConfigValueError("T: out of range (T >= dt)")
    return RunConfig(sub, params, seed, out)


def load_config(path) -> RunConfig:
    """Read and validate a JSON config (or a manifest written by :func:`run`)."""
    p = Path(path)
    if not p.is_file():
        raise ConfigMissingError(f"config file not found: {p}")
    try:
        text = p.read_text(encoding="utf-8")
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except ConfigParseError:
        raise
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigParseError(f"cannot parse {p}: {exc}") from None
    return parse_config(data)


# --------------------------------------------------------------------------
# result tables
# --------------------------------------------------------------------------


@dataclass
class ResultTable:
    columns: List[str]
    rows: List[list] = field(default_factory=list)
    flagged: set = field(default_factory=set)      # rows allowed to hold non-finite values
    provenance: Dict[str, Any] = field(default_factory=dict)

    def add(self, row: Sequence, blowup: bool = False):
        if len(row) != len(self.columns):
            raise ArgumentError(f"row has {len(row)} values, table has {len(self.columns)} columns")
        if blowup:
            self.flagged.add(len(self.rows))
        self.rows.append(list(row))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return ""
    return str(x)


def write_results(table: ResultTable, path) -> None:
    """CSV with a header row, minimal RFC 4180 quoting, CRLF line ends and
    17 significant digits.  Rows with non-finite numbers are refused unless
    flagged as blow-up rows."""
    for i, row in enumerate(table.rows):
        for v in row:
            if isinstance(v, (float, np.floating)) and not math.isfinite(v) and i not in table.flagged:
                raise ArgumentError(f"row {i} holds a non-finite value and is not flagged")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])


# --------------------------------------------------------------------------
# verdicts
# --------------------------------------------------------------------------

SUMMARY_COLUMNS = ["check", "statistic", "expected", "tolerance", "residual", "verdict", "reference"]


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# slope predictions per family: quantity -> (exponent(k, s), label)
PREDICTIONS = {
    "UV1": {"lhs": (lambda k, s: 2 * k, "2k"), "first_norm": (lambda k, s: 2 * k, "2k"),
            "second_norm": (lambda k, s: s, "s"), "ratio": (lambda k, s: -s, "-s")},
    "UV2": {"ratio": (lambda k, s: k - s - 1.5, "k-s-3/2")},
    "DU2_1": {"lhs": (lambda k, s: 1 + s, "1+s"), "first_norm": (lambda k, s: 2 * k, "2k"),
              "second_norm": (lambda k, s: 2 * k, "2k"), "ratio": (lambda k, s: 1 + s - 4 * k, "1+s-4k")},
    "DU2_2": {"ratio": (lambda k, s: s - k - 0.5, "s-k-1/2")},
}


def _run_scaling(p, seed):
    from .estimate_lab import CounterexampleSpec, bilinear_ratio, fit_scaling

    fam, k, s = p["family"], p["k"], p["s"]
    recs = _pmap(lambda N: bilinear_ratio(CounterexampleSpec(fam, N, k, s, p["dtau"]), p["b"]),
                 p["Ns"])
    table = ResultTable(["family", "N", "k", "s", "lhs", "rhs", "ratio"])
    for N, r in zip(p["Ns"], recs):
        table.add([fam, N, k, s, r.lhs, r.rhs, r.ratio])
    summary = ResultTable(SUMMARY_COLUMNS)
    for name, (fn, label) in PREDICTIONS[fam].items():
        fit = fit_scaling([(N, getattr(r, name)) for N, r in zip(p["Ns"], recs)])
        expected = fn(k, s)
        ok = abs(fit.exponent - expected) <= p["tolerance"]
        summary.add([f"{name}_exponent", fit.exponent, expected, p["tolerance"], fit.residual,
                     _verdict(ok), label])
    return table, summary


def _run_lemmas(p, seed):
    from .estimate_lab import (calculus_integral, dyadic_measure, fit_scaling,
                               polynomial_series, uv_blocks)

    table = ResultTable(["lemma", "parameter", "value", "bound", "ratio"])
    summary = ResultTable(SUMMARY_COLUMNS)
    a_vals = [2.0 ** j for j in range(p["a_min_exp"], p["a_max_exp"] + 1)]
    recs = _pmap(lambda a: calculus_integral(p["theta"], p["theta_tilde"], a), a_vals)
    for a, r in zip(a_vals, recs):
        table.add(["integral", a, r.integral, r.paper_bound, r.ratio])
    fit = fit_scaling([(a, r.ratio) for a, r in zip(a_vals, recs)])
    summary.add(["integral_ratio_exponent", fit.exponent, 0.0, 0.1, fit.residual,
                  _verdict(fit.exponent <= 0.1), "ratio bounded in a"])

    cubic = polynomial_series("cubic", (0, 0, 0), p["cubic_theta"], p["cubic_cutoff"])
    table.add(["cubic_series", p["cubic_cutoff"], cubic.partial_sum, cubic.tail_bound,
               cubic.tail_bound / cubic.partial_sum])
    summary.add(["cubic_tail_bound", cubic.tail_bound, 0.0, p["max_tail"], 0.0,
                 _verdict(math.isfinite(cubic.partial_sum) and cubic.tail_bound < p["max_tail"]),
                 "tail < max_tail"])
    lin = [polynomial_series("linear", (n1, 0), p["linear_theta"]) for n1 in p["linear_n1"]]
    for n1, r in zip(p["linear_n1"], lin):
        table.add(["linear_series", n1, r.partial_sum, r.tail_bound, 0.0])
    fit = fit_scaling([(n1, r.partial_sum) for n1, r in zip(p["linear_n1"], lin)])
    summary.add(["linear_sum_exponent", fit.exponent, 0.0, 0.1, fit.residual,
                 _verdict(fit.exponent <= 0.1), "bounded as n1 doubles"])

    eps = p["epsilon"]
    for n in p["measure_n"]:
        Ms = uv_blocks(n, eps)
        vals = [dyadic_measure("UV", n, M, eps) for M in Ms]
        for M, v in zip(Ms, vals):
            table.add([f"measure_uv_n{n}", M, v, M, v / M])
        fit = fit_scaling(list(zip(Ms, vals)))
        summary.add([f"measure_uv_n{n}_exponent", fit.exponent, 1.0, p["max_measure_slope"],
                     fit.residual, _verdict(fit.exponent <= p["max_measure_slope"]), "M^(1-delta)"])
    Ms = [float(n) ** 3 for n in p["du2_n"]]
    vals = [dyadic_measure("DU2", n, M, eps) for n, M in zip(p["du2_n"], Ms)]
    for n, M, v in zip(p["du2_n"], Ms, vals):
        table.add([f"measure_du2_n{n}", M, v, M, v / M])
    fit = fit_scaling(list(zip(Ms, vals)))
    summary.add(["measure_du2_exponent", fit.exponent, 1.0, p["max_measure_slope"], fit.residual,
                 _verdict(fit.exponent <= p["max_measure_slope"]), "M^(1-delta)"])
    return table, summary


def _run_multipliers(p, seed):
    from .estimate_lab import multiplier_sup

    table = ResultTable(["kind", "k", "s", "one_minus", "truncation", "sup_value",
                         "outer", "lam", "inner", "region"])
    summary = ResultTable(SUMMARY_COLUMNS)
    T = p["truncation"]
    for kind in p["kinds"]:
        sups = []
        for trunc in (T, 2 * T):
            r = multiplier_sup(kind, p["k"], p["s"], p["one_minus"], trunc, p["threshold"])
            pt = r.argmax_point
            outer = next((v for key, v in pt.items() if key.startswith("n")), None)
            inner = [v for key, v in pt.items() if key.startswith("n")]
            table.add([kind, p["k"], p["s"], p["one_minus"], trunc, r.sup_value,
                       outer, pt.get("lam"), inner[1] if len(inner) > 1 else None,
                       pt.get("region")])
            sups.append(r.sup_value)
        ratio = sups[1] / sups[0] if sups[0] > 0 else math.inf
        ok = math.isfinite(sups[1]) and 0.5 <= ratio <= 2.0
        summary.add([f"{kind}_doubling_ratio", ratio, 1.0, 2.0, 0.0, _verdict(ok),
                     "sup stable under truncation doubling"])
    return table, summary


def _run_simulate(p, seed):
    from .dynamics import SimConfig, evolve, smooth_initial_data
    from .errors import BlowUpError

    cfg = SimConfig(p["alpha"], p["beta"], p["gamma"], p["N"], p["dt"], p["T"],
                    p["dealias"], p["record_every"])
    u0, v0 = smooth_initial_data(cfg.grid, p["amplitude"], p["v_mean"])
    table = ResultTable(["t", "M", "Q", "E", "v_mean"])
    try:
        res = evolve(u0, v0, cfg, keep_snapshots=False)
    except BlowUpError as exc:
        for row in (exc.partial.rows() if exc.partial else []):
            table.add(list(row))
        table.add([exc.time, math.nan, math.nan, math.nan, math.nan], blowup=True)
        raise _PartialResults(exc, table) from None
    for row in res.series.rows():
        table.add(list(row))
    summary = ResultTable(SUMMARY_COLUMNS)
    for name in ("M", "Q", "E"):
        d = res.series.relative_drift(name)
        summary.add([f"{name}_relative_drift", d, 0.0, p["max_drift"], 0.0,
                     _verdict(d < p["max_drift"]), "conserved"])
    vm = float(np.ptp(res.series.v_mean))
    summary.add(["v_mean_variation", vm, 0.0, 1e-12, 0.0, _verdict(vm <= 1e-12), "mean preserved"])
    return table, summary


def _run_picard(p, seed):
    from .picard import Couplings, PicardConfig, compare_with_dynamics, fixed_point_defect, iterate
    from .spectral_core import TorusGrid, forward_transform

    grid = TorusGrid(p["N"])
    x = grid.points
    a = p["amplitude"]
    u0 = forward_transform(a * (np.exp(1j * x) + 0.5 * np.exp(-2j * x)), grid, real=False)
    v0 = forward_transform(a * (np.cos(x) + 0.3 * np.sin(3 * x)), grid, real=True)
    cfg = PicardConfig(p["T"], p["num_time_samples"], p["k"], p["s"], p["max_iters"], p["tol"])
    cp = Couplings(p["alpha"], p["beta"], p["gamma"])
    fp = iterate(u0, v0, cfg, cp)
    rep = fp.report
    table = ResultTable(["iteration", "distance", "ratio"])
    for i, d in enumerate(rep.distances):
        table.add([i + 1, d, rep.contraction_ratios[i - 1] if i >= 1 and i - 1 < len(rep.contraction_ratios) else None])
    summary = ResultTable(SUMMARY_COLUMNS)
    worst = max(rep.contraction_ratios, default=0.0)
    summary.add(["max_contraction_ratio", worst, 0.0, 0.5, 0.0,
                 _verdict(rep.converged and worst < 0.5), "geometric contraction"])
    defect = fixed_point_defect(fp, u0, v0, cfg, cp)
    summary.add(["fixed_point_defect", defect, 0.0, 2 * p["tol"], 0.0,
                 _verdict(defect < 2 * p["tol"]), "integral equation"])
    dist = compare_with_dynamics(fp, u0, v0, cfg, cp)
    summary.add(["cross_solver_distance", dist, 0.0, p["max_distance"], 0.0,
                 _verdict(dist < p["max_distance"]), "agreement with ETDRK4"])
    return table, summary


def _run_norms(p, seed):
    from .bourgain_norms import random_ensemble_member, strichartz_ratio

    table = ResultTable(["family", "mode_range", "member", "ratio"])
    summary = ResultTable(SUMMARY_COLUMNS)
    for fi, fam in enumerate(p["families"]):
        maxima = []
        for R in (p["mode_range"], 2 * p["mode_range"]):
            rng = np.random.default_rng([seed, fi, R])
            members = [random_ensemble_member(rng, fam, R, p["modes_per_member"])
                       for _ in range(p["ensemble_size"])]
            ratios = _pmap(lambda f: strichartz_ratio(f, fam), members)
            for i, r in enumerate(ratios):
                table.add([fam, R, i, r])
            maxima.append(max(ratios))
        change = max(maxima) / min(maxima)
        summary.add([f"{fam}_max_ratio_change", change, 1.0, p["max_change"], 0.0,
                     _verdict(change < p["max_change"]), "Strichartz bound"])
    return table, summary


RUNNERS = {
    "simulate": _run_simulate,
    "scaling": _run_scaling,
    "lemmas": _run_lemmas,
    "multipliers": _run_multipliers,
    "picard": _run_picard,
    "norms": _run_norms,
}


class _PartialResults(Exception):
    def __init__(self, error, table):
        super().__init__(str(error))
        self.error = error
        self.table = table


def _dump_json(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def config_hash(config: RunConfig) -> str:
    """SHA-256 of the experiment (subcommand, seed, parameters); the output
    location is not part of it."""
    body = {k: v for k, v in config.to_dict().items() if k != "output_dir"}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the clock for reproducible builds
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = time.gmtime(int(epoch)) if epoch and epoch.isdigit() else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", t)


def run(config: RunConfig, output_dir=None) -> int:
    """Execute a run, write all outputs and return the exit status."""
    out = Path(output_dir or config.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    files = []
    status, error = "ok", None
    code = 0
    try:
        table, summary = RUNNERS[config.subcommand](config.parameters, config.seed)
        write_results(table, out / "results.csv")
        files.append("results.csv")
        if summary.rows:
            write_results(summary, out / "summary.csv")
            files.append("summary.csv")
            if any(r[SUMMARY_COLUMNS.index("verdict")] == "FAIL" for r in summary.rows):
                status, code = "fail", 1
    except _PartialResults as exc:
        write_results(exc.table, out / "results.csv")
        files.append("results.csv")
        status, error, code = "error", f"{type(exc.error).__name__}: {exc.error}", 2
    except NlsKdvError as exc:
        status, error, code = "error", f"{type(exc).__name__}: {exc}", 2
    files.append("provenance.json")
    manifest = {
        "manifest": 1,
        "config": {**config.to_dict(), "output_dir": str(out)},
        "run": {"status": status, "exit_code": code, "error": error, "files": files},
    }
    _dump_json(manifest, out / "manifest.json")
    _dump_json({"config_hash": config_hash(config), "version": __version__,
                "timestamp": _timestamp()},
               out / "provenance.json")
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nlskdv", description=__doc__.split("\n")[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", help="output directory (overrides output_dir)")
    parser.add_argument("--seed", type=int, help="seed for random ensembles (overrides seed)")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if cfg.subcommand != args.subcommand:
        print(f"config error: config is for {cfg.subcommand!r}, not {args.subcommand!r}",
              file=sys.stderr)
        return 2
    if args.seed is not None:
        if args.seed < 0:
            print("config error: seed must be >= 0", file=sys.stderr)
            return 2
        cfg.seed = args.seed
    if args.out:
        cfg.output_dir = args.out
    if cfg.output_dir is None:
        print("config error: no output directory (use --out or output_dir)", file=sys.stderr)
        return 2
    code = run(cfg)
    label = {0: "PASS", 1: "FAIL", 2: "ERROR"}[code]
    print(f"{cfg.subcommand}: {label} (outputs in {cfg.output_dir})")
    return code


if __name__ == "__main__":
    sys.exit(main())
