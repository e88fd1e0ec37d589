"""
Configured experiments: single-point negativity, bounds, disorder sweeps,
energy tables, eigencorrelator decay fits and oracle checks.

A configuration is one JSON document.  Every experiment writes a CSV with a
fixed header, one row per (realization, point, quantity), plus a JSON summary
of means and standard errors.  Output bytes depend only on the configuration:
realizations draw from their own ``(seed, realization)`` streams and results
are merged in realization order whatever the worker count.
"""

from __future__ import annotations

import copy
import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import jsonschema
import numpy as np

from .errors import ConfigError, EnumerationTooLargeError, OscnegError, UnavailableConstantError
from .fock import FockOracle
from .lattice import DisorderSpec, anderson_matrix, boundary, build_box, parse_region, sample_springs
from .modes import TruncationPolicy
from .negativity import (
    EnsembleSpec,
    ensemble_energy,
    ensemble_energy_bruteforce,
    exact_log_negativity,
    h_bound,
    product_bound,
)
from .spectral import (
    build_correlation_frame,
    eigencorrelator_decay,
    eigendecompose,
    effective_area_constant,
    symplectic_eigenvalues,
)

__all__ = [
    "CSV_HEADER",
    "MODES",
    "ExperimentConfig",
    "SweepRow",
    "load_config",
    "run",
    "area_law_sweep",
    "energy_table",
    "write_csv",
]

CSV_HEADER = ("realization", "volume", "boundary", "N", "value_kind", "value",
              "trace_check", "tail_bound", "seconds")
MODES = ("exact", "bounds-only", "sweep", "energy", "decay-fit", "oracle-check")

DEFAULTS = {
    "mode": "exact",
    "geometry": {"d": 1, "lo": 0, "hi": 3},
    "disorder": {"lambda": 1.0, "k_max": 8.0, "seed": 0, "realizations": 1, "springs": None},
    "h_matrix": None,
    "region": "left-half",
    "ensemble": {"N": 0, "weights": None},
    "truncation": {"n_max": 60, "tail_eps": 1e-10, "adaptive": True, "budget": 10**8},
    "sweep": {"sizes": [8, 10, 12, 14, 16], "N_values": [0, 1, 2, 3], "exact": True, "budget": 10**5},
    "energy": {"N_values": [0, 1, 2, 3, 4, 5, 6]},
    "oracle": {"n_cut": 30, "tol": 1e-5},
    "output": "oscneg_out",
    "workers": 1,
    "record_timings": False,
}

_num = {"type": "number"}
_int = {"type": "integer"}
_intlist = {"type": "array", "items": {"type": "integer", "minimum": 0}}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "additionalProperties": False, "required": list(required)}


SCHEMA = _obj({
    "mode": {"enum": list(MODES)},
    "geometry": _obj({"d": {"type": "integer", "minimum": 1}, "lo": _int, "hi": _int}),
    "disorder": _obj({
        "lambda": {"type": "number", "minimum": 0},
        "k_max": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "realizations": {"type": "integer", "minimum": 1},
        "springs": {"type": ["array", "null"], "items": _num},
    }),
    "h_matrix": {"type": ["array", "null"], "items": {"type": "array", "items": _num}},
    "region": {"anyOf": [{"type": "string"}, {"type": "array", "items": {"type": "integer", "minimum": 0}}]},
    "ensemble": _obj({
        "N": {"type": "integer", "minimum": 0},
        "weights": {"type": ["array", "null"], "items": {"type": "number", "minimum": 0}},
    }),
    "truncation": _obj({
        "n_max": {"type": "integer", "minimum": 1},
        "tail_eps": {"type": "number", "exclusiveMinimum": 0},
        "adaptive": {"type": "boolean"},
        "budget": {"type": "integer", "minimum": 1},
    }),
    "sweep": _obj({
        "sizes": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
        "N_values": _intlist,
        "exact": {"type": "boolean"},
        "budget": {"type": "integer", "minimum": 1},
    }),
    "energy": _obj({"N_values": _intlist}),
    "oracle": _obj({"n_cut": {"type": "integer", "minimum": 2}, "tol": {"type": "number", "exclusiveMinimum": 0}}),
    "output": {"type": "string"},
    "workers": {"type": "integer", "minimum": 1},
    "record_timings": {"type": "boolean"},
})


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _parse_override(item: str) -> tuple[list[str], object]:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


@dataclass(frozen=True)
class ExperimentConfig:
    data: dict

    def __getitem__(self, key):
        return self.data[key]

    @property
    def mode(self) -> str:
        return self.data["mode"]

    def disorder_spec(self) -> DisorderSpec:
        d = self.data["disorder"]
        springs = tuple(d["springs"]) if d["springs"] is not None else None
        return DisorderSpec(float(d["lambda"]), float(d["k_max"]), int(d["seed"]), springs=springs)

    def ensemble_spec(self) -> EnsembleSpec:
        e = self.data["ensemble"]
        if e["weights"] is not None:
            try:
                return EnsembleSpec.mixture(e["weights"])
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        return EnsembleSpec(int(e["N"]))

    def policy(self) -> TruncationPolicy:
        t = self.data["truncation"]
        return TruncationPolicy(int(t["n_max"]), float(t["tail_eps"]), bool(t["adaptive"]))

    def workers(self) -> int:
        w = int(self.data["workers"])
        cap = os.environ.get("NEG_THREADS")
        if cap:
            try:
                w = min(w, max(1, int(cap)))
            except ValueError:
                raise ConfigError(f"NEG_THREADS={cap!r} is not an integer") from None
        return w


def load_config(source=None, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """Validate a config (dict, JSON path or ``None``) after applying ``key=value`` overrides."""
    if source is None:
        user = {}
    elif isinstance(source, dict):
        user = copy.deepcopy(source)
    else:
        try:
            user = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
    for item in overrides:
        path, value = _parse_override(item)
        node = user
        for p in path[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot set {'.'.join(path)}")
        node[path[-1]] = value
    try:
        jsonschema.validate(user, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    data = _merge(DEFAULTS, user)
    g = data["geometry"]
    if not g["lo"] < g["hi"]:
        raise ConfigError("geometry: lo must be smaller than hi")
    return ExperimentConfig(data)


@dataclass
class SweepRow:
    realization: int | None
    volume: int
    boundary: int
    N: int | None
    value_kind: str
    value: float
    trace_check: float | None = None
    tail_bound: float | None = None
    seconds: float | None = None

    def cells(self) -> list[str]:
        return [_fmt(self.realization), _fmt(self.volume), _fmt(self.boundary), _fmt(self.N),
                self.value_kind, _fmt(self.value), _fmt(self.trace_check), _fmt(self.tail_bound),
                _fmt(self.seconds)]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(rows: Iterable[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in rows:
            w.writerow(row.cells())


# --- per-realization work -------------------------------------------------


def _geometry(cfg: ExperimentConfig, side: int | None = None):
    g = cfg["geometry"]
    hi = g["hi"] if side is None else g["lo"] + side - 1
    box = build_box(g["d"], g["lo"], hi)
    region = parse_region(cfg["region"], box)
    return box, region, len(boundary(box, region))


def _frame(cfg: ExperimentConfig, box, r: int):
    if cfg["h_matrix"] is not None:
        h = np.asarray(cfg["h_matrix"], dtype=float)
        if h.shape != (box.volume, box.volume):
            raise ConfigError(f"h_matrix must be {box.volume}x{box.volume} for this geometry")
    else:
        spec = cfg.disorder_spec()
        try:
            k = sample_springs(spec, box, r)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        h = anderson_matrix(box, spec.coupling, k)
    return eigendecompose(h)


def _map(fn, items, workers):
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _seconds(cfg, t0):
    return time.perf_counter() - t0 if cfg["record_timings"] else None


def _point_rows(cfg, frame, region, r, vol, bnd, spec, exact, budget) -> list[SweepRow]:
    t0 = time.perf_counter()
    symp = symplectic_eigenvalues(build_correlation_frame(frame, region))
    rows = []
    N = spec.N
    if exact:
        rep = exact_log_negativity(spec, symp, cfg.policy(), budget=budget)
        rows.append(SweepRow(r, vol, bnd, N, "log_negativity", rep.log_negativity,
                             rep.trace_check, rep.tail_bound, _seconds(cfg, t0)))
    rows.append(SweepRow(r, vol, bnd, N, "product_bound", product_bound(spec, symp), seconds=_seconds(cfg, t0)))
    rows.append(SweepRow(r, vol, bnd, N, "h_bound", h_bound(frame, region, N), seconds=_seconds(cfg, t0)))
    return rows


def _summarize(rows: list[SweepRow], with_ratio: bool = False) -> dict:
    groups: dict = {}
    for row in rows:
        groups.setdefault((row.volume, row.boundary, row.N, row.value_kind), []).append(row.value)
    points = []
    means, errs = {}, {}
    for (vol, bnd, N, kind), vals in groups.items():
        n = len(vals)
        mean = math.fsum(vals) / n
        se = float(np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else None
        pt = {"volume": vol, "boundary": bnd, "N": N, "value_kind": kind,
              "count": n, "mean": mean, "stderr": se}
        if with_ratio:
            pt["ratio"] = mean / ((2 * N + 1) * bnd) if bnd and N is not None else None
        points.append(pt)
        means.setdefault(kind, []).append(mean)
        if se is not None:
            errs.setdefault(kind, []).append(se)
    summary = {"points": points}
    if len({(p["volume"], p["N"]) for p in points}) == 1:
        summary["means"] = {p["value_kind"]: p["mean"] for p in points}
        summary["stderr"] = {p["value_kind"]: p["stderr"] for p in points}
    return summary


# --- modes -------------------------------------------------------------------


def _single_point(cfg: ExperimentConfig, exact: bool):
    box, region, bnd = _geometry(cfg)
    spec = cfg.ensemble_spec()
    budget = int(cfg["truncation"]["budget"])

    def one(r):
        return _point_rows(cfg, _frame(cfg, box, r), region, r, box.volume, bnd, spec, exact, budget)

    rows = [x for chunk in _map(one, range(cfg["disorder"]["realizations"]), cfg.workers()) for x in chunk]
    return rows, _summarize(rows)


def area_law_sweep(cfg: ExperimentConfig) -> tuple[list[SweepRow], dict]:
    """Disorder means over a grid of box sizes and ensemble orders.

    The exact negativity is included wherever its enumeration window fits
    ``sweep.budget``; both bounds are always reported.
    """
    sw = cfg["sweep"]
    budget = int(sw["budget"])
    rows: list[SweepRow] = []
    for side in sw["sizes"]:
        box, region, bnd = _geometry(cfg, side)

        def one(r, box=box, region=region, bnd=bnd):
            frame = _frame(cfg, box, r)
            out = []
            for N in sw["N_values"]:
                spec = EnsembleSpec(int(N))
                exact = bool(sw["exact"])
                try:
                    out += _point_rows(cfg, frame, region, r, box.volume, bnd, spec, exact, budget)
                except EnumerationTooLargeError:
                    out += _point_rows(cfg, frame, region, r, box.volume, bnd, spec, False, budget)
            return out

        for chunk in _map(one, range(cfg["disorder"]["realizations"]), cfg.workers()):
            rows += chunk
    summary = _summarize(rows, with_ratio=True)
    ratios = [p["ratio"] for p in summary["points"] if p["value_kind"] == "product_bound" and p["ratio"] is not None]
    if ratios:
        summary["product_ratio_min"] = min(ratios)
        summary["product_ratio_max"] = max(ratios)
        summary["product_ratio_variation"] = (max(ratios) - min(ratios)) / max(ratios) if max(ratios) > 0 else 0.0
    return rows, summary


def energy_table(cfg: ExperimentConfig) -> tuple[list[SweepRow], dict]:
    """Closed-form and sector-averaged ensemble energies for each N."""
    box, region, bnd = _geometry(cfg)
    Ns = cfg["energy"]["N_values"]

    def one(r):
        frame = _frame(cfg, box, r)
        out = []
        for N in Ns:
            out.append(SweepRow(r, box.volume, bnd, N, "energy_closed_form", ensemble_energy(frame, N)))
            out.append(SweepRow(r, box.volume, bnd, N, "energy_bruteforce", ensemble_energy_bruteforce(frame, N)))
        return out

    rows = [x for chunk in _map(one, range(cfg["disorder"]["realizations"]), cfg.workers()) for x in chunk]
    summary = _summarize(rows)
    gaps = [abs(a.value - b.value) / max(1.0, abs(a.value)) for a, b in zip(rows[::2], rows[1::2])]
    summary["max_relative_gap"] = max(gaps) if gaps else 0.0
    return rows, summary


def _decay(cfg: ExperimentConfig):
    box, region, bnd = _geometry(cfg)
    spec = cfg.disorder_spec()
    R = cfg["disorder"]["realizations"]
    fit = eigencorrelator_decay(box, spec, R, workers=cfg.workers())
    rows = [SweepRow(None, box.volume, bnd, None, f"corr_mean_r{int(r)}", float(m))
            for r, m in zip(fit.distances, fit.means)]
    rows += [SweepRow(None, box.volume, bnd, None, "decay_C", fit.C),
             SweepRow(None, box.volume, bnd, None, "decay_mu", fit.mu),
             SweepRow(None, box.volume, bnd, None, "decay_residual", fit.residual)]
    summary = {"C": fit.C, "mu": fit.mu, "residual": fit.residual, "flagged": fit.flagged,
               "realizations": R, "C_tilde": None}
    try:
        ct = effective_area_constant(fit, box.d, spec.coupling, spec.k_max)
        summary["C_tilde"] = ct
        rows.append(SweepRow(None, box.volume, bnd, None, "C_tilde", ct))
    except UnavailableConstantError:
        pass
    curve = [(int(r), float(m)) for r, m in zip(fit.distances, fit.means)]
    return rows, summary, {"decay": curve}


def _oracle_check(cfg: ExperimentConfig):
    box, region, bnd = _geometry(cfg)
    spec = cfg.ensemble_spec()
    if spec.weights is not None:
        raise ConfigError("oracle-check supports pure ensembles only")
    oc = cfg["oracle"]
    rows = []
    worst = 0.0
    for r in range(cfg["disorder"]["realizations"]):
        frame = _frame(cfg, box, r)
        symp = symplectic_eigenvalues(build_correlation_frame(frame, region))
        rep = exact_log_negativity(spec, symp, cfg.policy(), budget=int(cfg["truncation"]["budget"]))
        try:
            oracle = FockOracle(frame.h, int(oc["n_cut"]), sorted(region.members))
            ref = oracle.log_negativity(spec.N)
        except ValueError as exc:
            raise ConfigError(f"oracle space too large: {exc}") from exc
        worst = max(worst, abs(ref - rep.log_negativity))
        rows.append(SweepRow(r, box.volume, bnd, spec.N, "log_negativity", rep.log_negativity,
                             rep.trace_check, rep.tail_bound))
        rows.append(SweepRow(r, box.volume, bnd, spec.N, "oracle_log_negativity", ref))
    summary = _summarize(rows)
    summary["max_abs_difference"] = worst
    summary["tolerance"] = float(oc["tol"])
    summary["passed"] = worst <= float(oc["tol"])
    return rows, summary


def _write_dat(path: Path, pairs) -> None:
    with open(path, "w", newline="") as fh:
        for x, y in pairs:
            fh.write(f"{_fmt(x)} {_fmt(y)}\n")


def run(config, overrides: Iterable[str] = (), mode: str | None = None) -> tuple[int, dict]:
    """Run one configured experiment.

    Returns ``(exit_code, artifacts)``.  Exit codes: 0 success, 1 failed check
    or other error, 2 invalid config, 3 enumeration budget exceeded, 4
    insufficient truncation.  ``artifacts`` maps ``csv``/``json``/``dat`` to
    written paths, or holds ``error`` on failure.
    """
    try:
        cfg = config if isinstance(config, ExperimentConfig) else load_config(config, overrides)
        if mode is not None:
            if mode not in MODES:
                raise ConfigError(f"unknown mode {mode!r}")
            cfg = ExperimentConfig({**cfg.data, "mode": mode})
        extra: dict = {}
        code = 0
        if cfg.mode in ("exact", "bounds-only"):
            rows, summary = _single_point(cfg, exact=cfg.mode == "exact")
        elif cfg.mode == "sweep":
            rows, summary = area_law_sweep(cfg)
            for p in summary["points"]:
                if p["ratio"] is not None:
                    key = f"{p['value_kind']}.N{p['N']}"
                    extra.setdefault(key, []).append((p["volume"], p["ratio"]))
        elif cfg.mode == "energy":
            rows, summary = energy_table(cfg)
            code = 0 if summary["max_relative_gap"] <= 1e-10 else 1
        elif cfg.mode == "decay-fit":
            rows, summary, extra = _decay(cfg)
        else:
            rows, summary = _oracle_check(cfg)
            code = 0 if summary["passed"] else 1
    except OscnegError as exc:
        codes = {"config-invalid": 2, "invalid-region": 2, "invalid-geometry": 2,
                 "enumeration-too-large": 3, "insufficient-truncation": 4}
        err = {"error": exc.kind, "message": str(exc)}
        if hasattr(exc, "achieved"):
            err["achieved"] = exc.achieved
        return codes.get(exc.kind, 1), {"error": err}

    out = Path(cfg["output"])
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    csv_path = out.with_name(out.name + ".csv")
    json_path = out.with_name(out.name + ".json")
    write_csv(rows, csv_path)
    summary = {"mode": cfg.mode, "realizations": cfg["disorder"]["realizations"], **summary}
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    artifacts = {"csv": str(csv_path), "json": str(json_path), "summary": summary}
    dats = []
    for key, pairs in extra.items():
        p = out.with_name(f"{out.name}.{key}.dat")
        _write_dat(p, pairs)
        dats.append(str(p))
    if dats:
        artifacts["dat"] = dats
    return code, artifacts
