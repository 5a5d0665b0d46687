"""Scenario documents, figure presets and deterministic result writers.

A scenario is a JSON object

    {"version": 1, "kind": "...", "params": {...},
     "sweep": {"name": {"start":..,"stop":..,"count":..} | [values]},
     "output": {"path": ..., "format": "csv" | "json"}}

parsed strictly: unknown keys are rejected at every level, every kind has
a fixed key list, and numeric preconditions of the underlying operations
are checked at load time where they are statically decidable.  Missing
optional keys are filled with defaults, so serialize(load(doc)) is a
complete document and load(serialize(s)) == s.

CSV output is byte-reproducible: fixed column layouts, 12-significant-digit
scientific notation, '\n' line endings, and sweep cells assembled in grid
order no matter how many worker threads computed them.
"""

import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import branching as _branching
from . import dynamics as _dynamics
from . import stats as _stats
from ._version import __version__
from .errors import (DomainError, ScenarioParseError, ScenarioValidationError)
from .kernels import BACKEND

__all__ = [
    "Scenario",
    "RangeAxis",
    "ListAxis",
    "OutputSpec",
    "RunResult",
    "load_scenario",
    "load_scenario_file",
    "serialize_scenario",
    "scenario_to_json",
    "preset",
    "PRESET_NAMES",
    "run_scenario",
    "write_result",
    "render_csv",
]

SCENARIO_VERSION = 1
KINDS = ("coboson_sweep", "tunnel", "ep_scan", "branching_sweep", "network")
PRESET_NAMES = ("fig1", "fig2a", "fig2b", "fig3a", "fig3b", "fmo_demo")

_REFERENCE_RATE = 0.1  # decay rate defining the t0 time unit


@dataclass(frozen=True)
class RangeAxis:
    start: float
    stop: float
    count: int

    def values(self):
        if self.count < 1:
            raise ScenarioValidationError("axis count must be >= 1")
        return np.linspace(self.start, self.stop, self.count)

    def to_doc(self):
        return {"start": self.start, "stop": self.stop, "count": self.count}


@dataclass(frozen=True)
class ListAxis:
    entries: tuple

    def values(self):
        return np.asarray(self.entries, dtype=np.float64)

    def to_doc(self):
        return list(self.entries)


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class Scenario:
    version: int
    kind: str
    params: dict
    sweep: dict
    output: OutputSpec


@dataclass(frozen=True)
class RunResult:
    """Ordered named tables plus run metadata.

    Single-table kinds have exactly one entry; ``network`` adds a
    "branching" table after the trajectory.
    """

    scenario: Scenario
    tables: list
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# document parsing and validation

def _require_mapping(obj, where):
    if not isinstance(obj, dict):
        raise ScenarioValidationError(f"{where} must be a JSON object")


def _reject_unknown(obj, allowed, where):
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ScenarioValidationError(
            f"unknown key(s) {unknown} in {where}; allowed: {sorted(allowed)}")


def _number(value, key, *, minimum=None, exclusive_min=None, allow_none=False):
    if value is None:
        if allow_none:
            return None
        raise ScenarioValidationError(f"{key} must be a number")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioValidationError(f"{key} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioValidationError(f"{key} must be finite")
    if minimum is not None and value < minimum:
        raise ScenarioValidationError(f"{key} must satisfy {key} >= {minimum}")
    if exclusive_min is not None and value <= exclusive_min:
        raise ScenarioValidationError(f"{key} must satisfy {key} > {exclusive_min}")
    return value


def _integer(value, key, *, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioValidationError(f"{key} must be an integer")
    if minimum is not None and value < minimum:
        raise ScenarioValidationError(f"{key} must satisfy {key} >= {minimum}")
    return value


def _parse_axis(name, spec):
    if isinstance(spec, dict):
        _reject_unknown(spec, ("start", "stop", "count"), f"sweep axis {name!r}")
        for k in ("start", "stop", "count"):
            if k not in spec:
                raise ScenarioValidationError(
                    f"sweep axis {name!r} needs start/stop/count")
        start = _number(spec["start"], f"{name}.start")
        stop = _number(spec["stop"], f"{name}.stop")
        count = _integer(spec["count"], f"{name}.count", minimum=1)
        return RangeAxis(start, stop, count)
    if isinstance(spec, list):
        if not spec:
            raise ScenarioValidationError(f"sweep axis {name!r} must be non-empty")
        return ListAxis(tuple(
            _number(v, f"{name}[{i}]") for i, v in enumerate(spec)))
    raise ScenarioValidationError(
        f"sweep axis {name!r} must be a start/stop/count object or a list")


def _integer_axis_values(axis, name, *, minimum):
    vals = axis.values()
    out = []
    for v in vals:
        if abs(v - round(v)) > 1e-9:
            raise ScenarioValidationError(f"{name} axis must contain integers")
        iv = int(round(v))
        if iv < minimum:
            raise ScenarioValidationError(
                f"{name} axis must satisfy {name} >= {minimum}")
        out.append(iv)
    return out


def _fill_params(params, defaults, kind):
    _require_mapping(params, f"{kind}.params")
    _reject_unknown(params, defaults, f"{kind}.params")
    merged = {}
    for key, default in defaults.items():
        merged[key] = params.get(key, default)
    return merged


def _validate_coboson(params, sweep):
    defaults = {"mode": "spectrum", "source": {"uniform": 16}}
    merged = _fill_params(params, defaults, "coboson_sweep")
    mode = merged["mode"]
    if mode not in ("spectrum", "qdot"):
        raise ScenarioValidationError(
            "coboson_sweep mode must be 'spectrum' or 'qdot'")
    if mode == "spectrum":
        if set(sweep) != {"n"}:
            raise ScenarioValidationError(
                "coboson_sweep (spectrum mode) needs exactly the sweep axis 'n'")
        source = merged["source"]
        _require_mapping(source, "coboson_sweep.params.source")
        keys = set(source)
        if len(keys) != 1 or not keys <= {"uniform", "file", "weights"}:
            raise ScenarioValidationError(
                "source must contain exactly one of: uniform, file, weights")
        if "uniform" in source:
            _integer(source["uniform"], "source.uniform", minimum=1)
        elif "weights" in source:
            if not isinstance(source["weights"], list) or not source["weights"]:
                raise ScenarioValidationError("source.weights must be a non-empty list")
            for i, w in enumerate(source["weights"]):
                _number(w, f"source.weights[{i}]", minimum=0.0)
        elif not isinstance(source["file"], str):
            raise ScenarioValidationError("source.file must be a path string")
        n_values = _integer_axis_values(sweep["n"], "n", minimum=1)
        mode_count = None
        if "uniform" in source:
            mode_count = source["uniform"]
        elif "weights" in source:
            mode_count = len(source["weights"])
        if mode_count is not None and max(n_values) > mode_count:
            raise ScenarioValidationError(
                f"n axis reaches {max(n_values)} but the spectrum has only "
                f"{mode_count} modes (chi_n = 0 for n > J)")
    else:
        if set(sweep) != {"n", "r"}:
            raise ScenarioValidationError(
                "coboson_sweep (qdot mode) needs exactly the sweep axes 'n' and 'r'")
        n_values = _integer_axis_values(sweep["n"], "n", minimum=2)
        r_values = sweep["r"].values()
        if np.any(r_values < 0.0):
            raise ScenarioValidationError("r axis must satisfy r >= 0")
        n_max, r_max = max(n_values), float(np.max(r_values))
        if 2.0 * (n_max - 1) * r_max ** 2 >= 1.0:
            raise ScenarioValidationError(
                f"(n={n_max}, r={r_max}) violates the validity window "
                "2(n-1)r^2 < 1")
    return merged


_TUNNEL_DEFAULTS = {
    "omega1": 0.0, "omega2": 0.0, "v": 1.0,
    "gamma1": None, "gamma2": None,
    "delta1": 0.1, "delta2": 0.1, "scale1": 1.0, "scale2": 1.0,
    "t_max": 12.0, "dt": 0.01, "time_unit": "absolute",
}

_TUNNEL_SWEEPABLE = ("v", "omega1", "omega2", "gamma1", "gamma2",
                     "delta1", "delta2", "scale1", "scale2")


def _validate_tunnel(params, sweep):
    merged = _fill_params(params, _TUNNEL_DEFAULTS, "tunnel")
    _number(merged["omega1"], "omega1")
    _number(merged["omega2"], "omega2")
    _number(merged["v"], "v", minimum=0.0)
    for key in ("gamma1", "gamma2"):
        _number(merged[key], key, minimum=0.0, allow_none=True)
    for key in ("delta1", "delta2", "scale1", "scale2"):
        _number(merged[key], key, minimum=0.0)
    _number(merged["t_max"], "t_max", minimum=0.0)
    _number(merged["dt"], "dt", exclusive_min=0.0)
    if merged["time_unit"] not in ("absolute", "t0"):
        raise ScenarioValidationError("time_unit must be 'absolute' or 't0'")
    if len(sweep) > 1:
        raise ScenarioValidationError("tunnel accepts at most one sweep axis")
    for name in sweep:
        if name not in _TUNNEL_SWEEPABLE:
            raise ScenarioValidationError(
                f"tunnel cannot sweep {name!r}; choose from {_TUNNEL_SWEEPABLE}")
        if name in ("delta1", "delta2") \
                and merged["gamma" + name[-1]] is not None:
            raise ScenarioValidationError(
                f"sweep over {name} conflicts with explicit gamma{name[-1]}")
        vals = sweep[name].values()
        if name != "omega1" and name != "omega2" and np.any(vals < 0.0):
            raise ScenarioValidationError(f"{name} axis must satisfy {name} >= 0")
    return merged


def _validate_ep_scan(params, sweep):
    merged = _fill_params(params, {"omega0": 0.0}, "ep_scan")
    _number(merged["omega0"], "omega0")
    if set(sweep) != {"v", "gamma_diff"}:
        raise ScenarioValidationError(
            "ep_scan needs exactly the sweep axes 'v' and 'gamma_diff'")
    v_vals = sweep["v"].values()
    if np.any(v_vals < 0.0):
        raise ScenarioValidationError("v axis must satisfy v >= 0")
    for name in ("v", "gamma_diff"):
        vals = sweep[name].values()
        if vals.size > 1 and np.any(np.diff(vals) <= 0.0):
            raise ScenarioValidationError(f"{name} axis must be strictly increasing")
    return merged


_BRANCHING_DEFAULTS = {
    "omega0": 0.0, "v": 1.0, "delta1": 0.1, "delta2": 0.1,
    "scale1": 1.0, "scale2": 1.0, "tol": 1e-7,
}

_BRANCHING_SWEEPABLE = ("delta1", "delta2", "omega0", "v")


def _validate_branching(params, sweep):
    merged = _fill_params(params, _BRANCHING_DEFAULTS, "branching_sweep")
    _number(merged["omega0"], "omega0")
    _number(merged["v"], "v", minimum=0.0)
    for key in ("delta1", "delta2", "scale1", "scale2"):
        _number(merged[key], key, minimum=0.0)
    _number(merged["tol"], "tol", exclusive_min=0.0)
    if len(sweep) > 2:
        raise ScenarioValidationError("branching_sweep accepts at most two sweep axes")
    for name in sweep:
        if name not in _BRANCHING_SWEEPABLE:
            raise ScenarioValidationError(
                f"branching_sweep cannot sweep {name!r}; "
                f"choose from {_BRANCHING_SWEEPABLE}")
        vals = sweep[name].values()
        if name != "omega0" and np.any(vals < 0.0):
            raise ScenarioValidationError(f"{name} axis must satisfy {name} >= 0")
    # the closed form needs both channels open everywhere on the grid
    for side in ("1", "2"):
        delta = sweep["delta" + side].values() if "delta" + side in sweep \
            else np.array([merged["delta" + side]])
        if float(np.min(delta)) * merged["scale" + side] <= 0.0:
            raise ScenarioValidationError(
                f"branching_sweep requires scale{side}*delta{side} > 0 "
                "(closed form undefined with a closed channel)")
    return merged


_NETWORK_DEFAULTS = {
    "energies": None, "decays": None, "couplings": None,
    "initial": 0, "horizon": 50.0, "dt": None, "label": None,
}


def _validate_network(params, sweep):
    merged = _fill_params(params, _NETWORK_DEFAULTS, "network")
    if sweep:
        raise ScenarioValidationError("network scenarios do not take sweep axes")
    for key in ("energies", "decays", "couplings"):
        if merged[key] is None:
            raise ScenarioValidationError(f"network requires params.{key}")
    try:
        net = _network_from_params(merged)
    except DomainError as exc:
        raise ScenarioValidationError(str(exc)) from None
    _initial_vector(merged["initial"], net.site_count)  # validates
    _number(merged["horizon"], "horizon", exclusive_min=0.0)
    if merged["dt"] is not None:
        _number(merged["dt"], "dt", exclusive_min=0.0)
    if merged["label"] is not None and not isinstance(merged["label"], str):
        raise ScenarioValidationError("label must be a string")
    return merged


def _network_from_params(params):
    return _dynamics.SiteNetwork(
        energies=np.asarray(params["energies"], dtype=np.float64),
        decays=np.asarray(params["decays"], dtype=np.float64),
        couplings=np.asarray(params["couplings"], dtype=np.float64))


def _initial_vector(spec, m):
    if isinstance(spec, bool):
        raise ScenarioValidationError("initial must be a site index or a vector")
    if isinstance(spec, int):
        if not 0 <= spec < m:
            raise ScenarioValidationError(
                f"initial site index must satisfy 0 <= initial < {m}")
        psi = np.zeros(m, dtype=np.complex128)
        psi[spec] = 1.0
        return psi
    if isinstance(spec, list):
        if len(spec) != m:
            raise ScenarioValidationError(
                f"initial vector must have {m} entries")
        psi = np.empty(m, dtype=np.complex128)
        for i, entry in enumerate(spec):
            if isinstance(entry, list):
                if len(entry) != 2:
                    raise ScenarioValidationError(
                        "complex amplitudes are [re, im] pairs")
                psi[i] = complex(_number(entry[0], f"initial[{i}].re"),
                                 _number(entry[1], f"initial[{i}].im"))
            else:
                psi[i] = _number(entry, f"initial[{i}]")
        norm = float(np.sum(np.abs(psi) ** 2))
        if abs(norm - 1.0) > 1e-9:
            raise ScenarioValidationError(
                f"initial vector must be normalized (|psi|^2 = {norm!r})")
        return psi
    raise ScenarioValidationError("initial must be a site index or a vector")


_VALIDATORS = {
    "coboson_sweep": _validate_coboson,
    "tunnel": _validate_tunnel,
    "ep_scan": _validate_ep_scan,
    "branching_sweep": _validate_branching,
    "network": _validate_network,
}


def load_scenario(document):
    """Parse and validate a scenario from JSON text (or a parsed dict)."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioParseError(
                f"parse error at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}") from None
    else:
        doc = document
    _require_mapping(doc, "scenario document")
    _reject_unknown(doc, ("version", "kind", "params", "sweep", "output"),
                    "scenario document")
    if "version" not in doc:
        raise ScenarioValidationError("scenario document requires 'version'")
    version = _integer(doc["version"], "version", minimum=1)
    if version > SCENARIO_VERSION:
        raise ScenarioValidationError(
            f"document version {version} is newer than supported "
            f"version {SCENARIO_VERSION}")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ScenarioValidationError(f"kind must be one of {KINDS}")
    sweep_doc = doc.get("sweep", {})
    _require_mapping(sweep_doc, "sweep")
    sweep = {name: _parse_axis(name, spec) for name, spec in sweep_doc.items()}
    params = _VALIDATORS[kind](doc.get("params", {}), sweep)
    out_doc = doc.get("output", {})
    _require_mapping(out_doc, "output")
    _reject_unknown(out_doc, ("path", "format"), "output")
    path = out_doc.get("path")
    if path is not None and not isinstance(path, str):
        raise ScenarioValidationError("output.path must be a string or null")
    fmt = out_doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ScenarioValidationError("output.format must be 'csv' or 'json'")
    return Scenario(version, kind, params, sweep, OutputSpec(path, fmt))


def load_scenario_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario file: {exc}") from None
    return load_scenario(text)


def serialize_scenario(sc):
    """Scenario back to a complete (defaults-filled) JSON-ready dict."""
    return {
        "version": sc.version,
        "kind": sc.kind,
        "params": dict(sc.params),
        "sweep": {name: axis.to_doc() for name, axis in sc.sweep.items()},
        "output": {"path": sc.output.path, "format": sc.output.format},
    }


def scenario_to_json(sc):
    return json.dumps(serialize_scenario(sc), indent=2) + "\n"


# ---------------------------------------------------------------------------
# presets

def preset(name):
    """Scenario reproducing one of the reference figures, or the network demo."""
    if name == "fig1":
        doc = {
            "version": 1,
            "kind": "coboson_sweep",
            "params": {"mode": "qdot"},
            "sweep": {"n": {"start": 2, "stop": 50, "count": 49},
                      "r": [0.01, 0.03, 0.05, 0.07]},
        }
    elif name == "fig2a":
        doc = {
            "version": 1,
            "kind": "tunnel",
            "params": {"omega1": 0.0, "omega2": 0.0,
                       "delta1": 0.1, "delta2": 0.1,
                       "t_max": 12.0, "dt": 0.1, "time_unit": "t0"},
            "sweep": {"v": {"start": 0.2, "stop": 2.0, "count": 10}},
        }
    elif name == "fig2b":
        doc = {
            "version": 1,
            "kind": "tunnel",
            "params": {"omega1": 0.0, "omega2": 0.0, "v": 1.0,
                       "delta1": 0.0, "delta2": 0.1,
                       "t_max": 12.0, "dt": 0.1, "time_unit": "t0"},
            "sweep": {"delta2": {"start": 0.02, "stop": 0.5, "count": 13}},
        }
    elif name == "fig3a":
        doc = {
            "version": 1,
            "kind": "branching_sweep",
            "params": {"omega0": 0.5, "v": 1.0},
            "sweep": {"delta1": {"start": 0.02, "stop": 0.5, "count": 13},
                      "delta2": {"start": 0.02, "stop": 0.5, "count": 13}},
        }
    elif name == "fig3b":
        doc = {
            "version": 1,
            "kind": "branching_sweep",
            "params": {"v": 5.0, "delta1": 0.1},
            "sweep": {"omega0": {"start": 0.0, "stop": 2.0, "count": 21},
                      "delta2": {"start": 0.02, "stop": 0.5, "count": 13}},
        }
    elif name == "fmo_demo":
        # two coupled three-site rings with one dissipative collection site;
        # couplings/rates are illustrative, not fitted to any molecule.
        # excitation starts on the bridging chromophore (0-based index 2),
        # which is orthogonal to the ring's symmetry-protected dark state;
        # a start elsewhere leaves half the norm trapped in that state
        doc = {
            "version": 1,
            "kind": "network",
            "params": {
                "energies": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                "decays": [0.0, 0.0, 0.0, 0.0, 0.0, 0.5],
                "couplings": [
                    [0.0, 1.0, 1.0, 0.0, 0.0, 0.0],
                    [1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
                    [1.0, 1.0, 0.0, 0.3, 0.0, 0.0],
                    [0.0, 0.0, 0.3, 0.0, 1.0, 1.0],
                    [0.0, 0.0, 0.0, 1.0, 0.0, 1.0],
                    [0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
                ],
                "initial": 2,
                "horizon": 300.0,
                "dt": 0.01,
                "label": "two-trimer demo with illustrative parameters",
            },
        }
    else:
        raise DomainError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    return load_scenario(doc)


# ---------------------------------------------------------------------------
# running

def _map_ordered(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _grid_cells(sweep):
    """Cartesian cells in document order: first axis outermost."""
    names = list(sweep)
    grids = [sweep[name].values() for name in names]
    if not names:
        return [()], names
    index = np.stack(
        [g.ravel() for g in np.meshgrid(*grids, indexing="ij")], axis=-1)
    return [tuple(row) for row in index], names


def _spectrum_from_source(source):
    if "uniform" in source:
        return _stats.SchmidtSpectrum.uniform(source["uniform"])
    if "weights" in source:
        return _stats.SchmidtSpectrum.from_weights(source["weights"])
    return _stats.SchmidtSpectrum.from_file(source["file"])


def _run_coboson(sc, threads):
    params = sc.params
    if params["mode"] == "qdot":
        n_values = _integer_axis_values(sc.sweep["n"], "n", minimum=2)
        r_values = [float(r) for r in sc.sweep["r"].values()]
        rows = []
        for n in n_values:
            for r in r_values:
                geom = _stats.QuantumDotGeometry(r)
                g2 = _stats.qdot_g2_zero(n, geom)
                rows.append((n, r, g2, 1.0 - g2))
        return [("qdot", ("n", "r", "g2", "delta"), rows)], {}
    spectrum = _spectrum_from_source(params["source"])
    n_values = _integer_axis_values(sc.sweep["n"], "n", minimum=1)
    if max(n_values) > spectrum.mode_count:
        raise DomainError(
            f"n = {max(n_values)} exceeds the {spectrum.mode_count}-mode "
            "spectrum (chi_n = 0 for n > J)")
    table = spectrum.log_chi_table(max(n_values) + 1)
    rows = []
    for n in n_values:
        ratio = _stats._ratio_from_table(table, n)
        lower, upper = _stats.purity_bounds(spectrum, n)
        frag = _stats._fragment_from_table(table, n)
        rows.append((n, ratio, lower, upper, min(max(frag, 0.0), 1.0)))
    return [("coboson", ("n", "chi_ratio", "lower", "upper", "fragment_norm"),
             rows)], {}


def _tunnel_system(params, axis_name, axis_value):
    p = dict(params)
    if axis_name is not None:
        p[axis_name] = float(axis_value)
    gammas = []
    for side in ("1", "2"):
        g = p["gamma" + side]
        if g is None:
            g = p["scale" + side] * p["delta" + side]
        gammas.append(g)
    return _dynamics.TwoSiteSystem(p["omega1"], p["omega2"], p["v"],
                                   gammas[0], gammas[1])


def _run_tunnel(sc, threads):
    params = sc.params
    axis_name = next(iter(sc.sweep), None)
    axis_values = sc.sweep[axis_name].values() if axis_name else [None]
    t_max, dt = params["t_max"], params["dt"]
    psi0 = np.array([1.0, 0.0], dtype=np.complex128)

    def cell(value):
        sys = _tunnel_system(params, axis_name, value)
        if params["time_unit"] == "t0":
            ref = _dynamics.TwoSiteSystem(
                sys.omega1, sys.omega2, sys.v, _REFERENCE_RATE, _REFERENCE_RATE)
            if ref.abs_omega <= 0.0:
                raise DomainError(
                    "time_unit 't0' undefined: reference splitting is zero")
            t0 = 1.0 / ref.abs_omega
        else:
            t0 = 1.0
        traj = _dynamics.propagate(sys, psi0, t_max * t0, dt * t0)
        rows = []
        # the emitted t column is the exact requested grid in t0 units
        for k in range(traj.time_grid.size):
            p11, p12 = traj.site_populations[k]
            base = (k * dt, float(p11), float(p12),
                    float(p11 - p12), float(traj.total_norm[k]))
            rows.append(base if value is None else (float(value),) + base)
        return rows

    blocks = _map_ordered(cell, list(axis_values), threads)
    rows = [row for block in blocks for row in block]
    cols = ("t", "p11", "p12", "delta_p", "norm")
    if axis_name:
        cols = (axis_name,) + cols
    return [("tunnel", cols, rows)], {}


def _run_ep_scan(sc, threads):
    res = _dynamics.ep_scan(sc.sweep["v"].values(),
                            sc.sweep["gamma_diff"].values(),
                            sc.params["omega0"])
    return [("ep_scan", res.columns, res.rows)], dict(res.meta)


def _run_branching(sc, threads):
    params = sc.params
    cells, names = _grid_cells(sc.sweep)
    tol = params["tol"]

    def cell(values):
        p = dict(params)
        for name, value in zip(names, values):
            p[name] = float(value)
        sys = _dynamics.TwoSiteSystem.from_deviations(
            0.0, p["omega0"], p["v"], p["delta1"], p["delta2"],
            p["scale1"], p["scale2"])
        e_span = _branching._default_span(sys)
        f_time, time_est = _branching.f2_time_domain(sys, tol=tol,
                                                     with_estimate=True)
        return ((p["delta1"], p["delta2"], p["omega0"], p["v"],
                 _branching.f2_closed(sys), f_time,
                 _branching.f2_spectral(sys, e_span=e_span)),
                time_est,
                _branching.spectral_truncation(sys, e_span))

    results = _map_ordered(cell, cells, threads)
    rows = [row for row, _, _ in results]
    meta = {"error_estimates": {
        "time_domain_max": max((est for _, est, _ in results), default=0.0),
        "spectral_truncation_max": max((t for _, _, t in results), default=0.0),
    }}
    cols = ("delta1", "delta2", "omega0", "v",
            "f2_closed", "f2_time", "f2_spectral")
    return [("branching", cols, rows)], meta


def _run_network(sc, threads):
    params = sc.params
    net = _network_from_params(params)
    psi0 = _initial_vector(params["initial"], net.site_count)
    horizon = params["horizon"]
    dt = params["dt"]
    if dt is None:
        dt = min(0.02 / net.energy_scale(), horizon / 64.0)
    traj = _dynamics.propagate(net, psi0, horizon, dt)
    step = float(traj.time_grid[1] - traj.time_grid[0]) \
        if traj.time_grid.size > 1 else 0.0
    result = _branching.network_branching(net, psi0, horizon, dt)
    m = net.site_count
    traj_rows = []
    for k in range(traj.time_grid.size):
        traj_rows.append((float(traj.time_grid[k]),
                          *(float(x) for x in traj.site_populations[k]),
                          float(traj.total_norm[k])))
    traj_cols = ("t", *(f"p_{i + 1}" for i in range(m)), "norm")
    branch_rows = [(i + 1, float(f)) for i, f in enumerate(result.fractions)]
    branch_rows.append(("survival", result.survival))
    meta = {"error_estimates": {
        "propagation": traj.error_estimate,
        "sum_rule_defect": result.error_estimate,
    }}
    if params["label"]:
        meta["notes"] = [params["label"]]
    return [("trajectory", traj_cols, traj_rows),
            ("branching", ("site", "fraction"), branch_rows)], meta


_RUNNERS = {
    "coboson_sweep": _run_coboson,
    "tunnel": _run_tunnel,
    "ep_scan": _run_ep_scan,
    "branching_sweep": _run_branching,
    "network": _run_network,
}


def run_scenario(sc, threads=1):
    """Execute a scenario; results are independent of the thread count."""
    start = time.perf_counter()
    tables, meta = _RUNNERS[sc.kind](sc, max(1, int(threads)))
    meta = dict(meta)
    meta.setdefault("error_estimates", {})
    meta["tool_version"] = __version__
    meta["backend"] = BACKEND
    meta["runtime_seconds"] = time.perf_counter() - start
    return RunResult(sc, tables, meta)


# ---------------------------------------------------------------------------
# writers

def format_float(x):
    """Fixed 12-significant-digit scientific notation."""
    return f"{x:.11e}"


def _format_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def render_csv(columns, rows):
    lines = [",".join(columns)]
    lines.extend(",".join(_format_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _jsonable_rows(rows):
    out = []
    for row in rows:
        out.append([
            int(v) if isinstance(v, (int, np.integer)) and not isinstance(v, bool)
            else float(v) if isinstance(v, (float, np.floating))
            else v
            for v in row])
    return out


def result_to_json(result):
    name0, cols0, rows0 = result.tables[0]
    doc = {
        "scenario": serialize_scenario(result.scenario),
        "columns": list(cols0),
        "rows": _jsonable_rows(rows0),
    }
    for name, cols, rows in result.tables[1:]:
        doc[name] = {"columns": list(cols), "rows": _jsonable_rows(rows)}
    doc["metadata"] = result.meta
    return json.dumps(doc, indent=2) + "\n"


def _sibling_path(path, name):
    stem, ext = os.path.splitext(path)
    return f"{stem}_{name}{ext or '.csv'}"


def write_result(result, path=None, fmt=None):
    """Write a run result as CSV or JSON.

    CSV with multiple tables goes to the given path plus suffixed sibling
    files (or blank-line-separated blocks on stdout); JSON is always a
    single document.  Returns the list of paths written ([] for stdout).
    """
    fmt = fmt or result.scenario.output.format
    path = path if path is not None else result.scenario.output.path
    if fmt == "json":
        text = result_to_json(result)
        if path is None:
            sys.stdout.write(text)
            return []
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return [path]
    if path is None:
        chunks = [render_csv(cols, rows) for _, cols, rows in result.tables]
        sys.stdout.write("\n".join(chunks))
        return []
    written = []
    for i, (name, cols, rows) in enumerate(result.tables):
        target = path if i == 0 else _sibling_path(path, name)
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_csv(cols, rows))
        written.append(target)
    return written
