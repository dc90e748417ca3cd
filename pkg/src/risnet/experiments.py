"""Seeded ensemble experiments behind the ``verify`` and ``compare`` commands.

Both experiments are deterministic functions of their configuration: trial
``i`` uses seed ``config.seed + i`` and draws every random object from its own
stream (see :mod:`risnet.synth`), so results do not depend on the number of
worker threads.  Rows are sorted by trial seed before they are written.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cascade import cascade_z, map_to_dris
from .errors import ConfigError, NetworkError, SearchSpaceTooLarge, SingularMatrixError
from .loadcircuit import build_named, effective_phi
from .netcore import MultiportNetwork, PortPartition, spectral_norm
from .optim import (
    EXHAUSTIVE_CAP,
    LoadModel,
    Objective,
    bdris_objective,
    coordinate_search,
    dris_objective,
    exhaustive_search,
)
from .synth import SynthConfig, random_env, random_load_circuit, random_passive_loads, rng_for
from .termination import LoadVector, channel, terminate_s, terminate_z

CSV_COLUMNS = ("trial_seed", "n_a", "n_s", "n_c", "topology", "route", "objective", "value",
               "runtime_ms", "max_discrepancy")


def _from_dict(cls, data: dict):
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(names)
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        default = names[key].default
        if isinstance(default, bool):
            ok = isinstance(value, bool)
        elif isinstance(default, int):
            ok = isinstance(value, int) and not isinstance(value, bool)
        elif isinstance(default, float):
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        elif isinstance(default, str):
            ok = isinstance(value, str)
        else:
            ok = True
        if not ok:
            raise ConfigError(f"configuration key {key!r} has the wrong type: {value!r}")
        kwargs[key] = value
    return cls(**kwargs)


@dataclass(frozen=True)
class VerifyConfig:
    """Route-equivalence ensemble.

    ``perturb_cascade`` adds that fraction of the largest entry to every entry
    of the cascaded impedance matrix; it exists only as a negative control.
    """

    trials: int = 1000
    seed: int = 0
    max_n_a: int = 4
    max_n_s: int = 4
    max_n_c: int = 10
    eta: float = 0.9
    tolerance: float = 1e-9
    reciprocity_tol: float = 1e-10
    passivity_tol: float = 1e-8
    perturb_cascade: float = 0.0
    record_runtime: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("empty ensemble: trials must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.max_n_a < 2:
            raise ConfigError("max_n_a must be at least 2 (one transmitter, one receiver)")
        if self.max_n_s < 1 or self.max_n_c < 1:
            raise ConfigError("max_n_s and max_n_c must be positive")
        if not 0 < self.eta <= 1:
            raise ConfigError("eta must lie in (0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> "VerifyConfig":
        return _from_dict(cls, data)


@dataclass(frozen=True)
class CompareConfig:
    """Fixed-element versus fixed-load-count comparison.

    ``load_model`` is ``{"kind": "discrete_set", "values": [[re, im], ...]}``
    or ``{"kind": "reactive_grid", "x_min": .., "x_max": .., "steps": ..}``.
    """

    trials: int = 10
    seed: int = 0
    budget: int = 3
    n_t: int = 1
    n_r: int = 1
    eta: float = 0.9
    decoupled: bool = False
    load_model: dict = field(default_factory=lambda: {"kind": "discrete_set",
                                                      "values": [[1.0, -40.0], [1.0, 60.0]]})
    objective: str = "fro_gain"
    algorithm: str = "exhaustive"
    restarts: int = 8
    cap: int = EXHAUSTIVE_CAP
    record_runtime: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("empty ensemble: trials must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.budget < 1:
            raise ConfigError("load budget must be at least 1")
        if self.n_t < 1 or self.n_r < 1:
            raise ConfigError("need at least one transmitter and one receiver")
        if not 0 < self.eta <= 1:
            raise ConfigError("eta must lie in (0, 1]")
        if self.algorithm not in ("exhaustive", "coordinate_descent"):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        try:
            Objective(self.objective)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        model = self.model()
        if self.algorithm == "exhaustive":
            states = len(model.values)
            for n_c in (self.budget, self.budget * (self.budget + 1) // 2):
                if states ** n_c > self.cap:
                    raise SearchSpaceTooLarge(
                        f"{states}^{n_c} candidates exceed the exhaustive cap {self.cap}; "
                        "use algorithm 'coordinate_descent'")

    def model(self) -> LoadModel:
        opts = dict(self.load_model)
        kind = opts.pop("kind", None)
        try:
            if kind == "discrete_set":
                values = opts.pop("values")
                vals = [complex(*v) if isinstance(v, list) else complex(v) for v in values]
                model = LoadModel.discrete(vals)
            elif kind == "reactive_grid":
                model = LoadModel.reactive_grid(opts.pop("x_min"), opts.pop("x_max"), opts.pop("steps"))
            else:
                raise ConfigError(f"unknown load model kind {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid load model: {exc}") from None
        if opts:
            raise ConfigError(f"unknown load model keys {sorted(opts)}")
        return model

    @classmethod
    def from_dict(cls, data: dict) -> "CompareConfig":
        return _from_dict(cls, data)


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def rows_to_csv(rows: list[dict]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in sorted(rows, key=lambda r: r["trial_seed"]):
        w.writerow([_fmt(row.get(c)) for c in CSV_COLUMNS])
    return out.getvalue()


def _run(fn, cfg, threads: int) -> list:
    trials = range(cfg.trials)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda i: fn(cfg, i), trials))
    else:
        results = [fn(cfg, i) for i in trials]
    return sorted(results, key=lambda r: r["trial_seed"])


def _physicality(nets: list[MultiportNetwork]) -> tuple[float, float]:
    asym = norm = 0.0
    for net in nets:
        m = net.matrix
        scale = np.max(np.abs(m))
        if scale:
            asym = max(asym, float(np.max(np.abs(m - m.T)) / scale))
        norm = max(norm, spectral_norm(net.s))
    return asym, norm


def verify_trial(cfg: VerifyConfig, i: int) -> dict:
    """One random instance: channel by the effective-load route and by the cascade route."""
    seed = cfg.seed + i
    start = time.perf_counter()
    rng = rng_for(seed, 0)
    n_a = int(rng.integers(2, cfg.max_n_a + 1))
    n_t = int(rng.integers(1, n_a))
    n_s = int(rng.integers(1, cfg.max_n_s + 1))
    n_c = int(rng.integers(1, cfg.max_n_c + 1))
    env, _ = random_env(SynthConfig(seed, n_t=n_t, n_r=n_a - n_t, n_s=n_s, eta=cfg.eta,
                                    index=1, rep="Z"))
    lc = random_load_circuit(SynthConfig(seed, n_s=n_s, n_c=n_c, eta=cfg.eta, index=2, rep="Z"))
    loads = random_passive_loads(n_c, rng_for(seed, 3))
    out = {"trial_seed": seed, "n_a": n_a, "n_s": n_s, "n_c": n_c}
    try:
        phi = effective_phi(lc, loads)
        zt_direct = terminate_z(env, phi)
        h_direct = channel(zt_direct).h

        casc = cascade_z(env, lc).net
        if cfg.perturb_cascade:
            bump = cfg.perturb_cascade * np.max(np.abs(casc.matrix))
            casc = dataclasses.replace(casc, matrix=casc.matrix + bump)
        zt_casc = terminate_z(casc, loads, which="C")
        h_casc = channel(zt_casc).h

        ref = max(np.linalg.norm(h_casc), np.finfo(float).tiny)
        disc = float(np.linalg.norm(h_direct - h_casc) / ref)
        phi_net = MultiportNetwork(phi, "Z", env.z0)
        asym, norm = _physicality([env, lc.net, phi_net, zt_direct, casc, zt_casc])
        values = (float(np.sum(np.abs(h_direct) ** 2)), float(np.sum(np.abs(h_casc) ** 2)))
    except NetworkError as exc:
        disc, asym, norm, values = math.inf, math.inf, math.inf, (math.nan, math.nan)
        out["error"] = str(exc)
    runtime = (time.perf_counter() - start) * 1e3 if cfg.record_runtime else None
    out.update(discrepancy=disc, asymmetry=asym, spectral_norm=norm, values=values,
               runtime_ms=runtime)
    out["ok"] = bool(disc <= cfg.tolerance and asym <= cfg.reciprocity_tol
                     and norm <= 1 + cfg.passivity_tol)
    return out


def run_verify(cfg: VerifyConfig, threads: int = 1) -> tuple[bool, list[dict], list[dict]]:
    """Run the ensemble; returns ``(all_ok, csv_rows, trial_results)``."""
    results = _run(verify_trial, cfg, threads)
    rows = []
    for r in results:
        for route, value in zip(("direct", "cascaded"), r["values"]):
            rows.append({
                "trial_seed": r["trial_seed"], "n_a": r["n_a"], "n_s": r["n_s"], "n_c": r["n_c"],
                "topology": "custom", "route": route, "objective": "fro_gain", "value": value,
                "runtime_ms": r["runtime_ms"], "max_discrepancy": r["discrepancy"],
            })
    return all(r["ok"] for r in results), rows, results


def fixed_load_size(budget: int) -> int:
    """Largest fully-connected N_S whose load count N_S(N_S+1)/2 fits the budget."""
    n = 1
    while (n + 1) * (n + 2) // 2 <= budget:
        n += 1
    return n


def keep_ris_ports(env: MultiportNetwork, n_keep: int) -> MultiportNetwork:
    """Environment with only the first ``n_keep`` RIS ports; the rest see matched loads."""
    part = env.partition
    keep, drop = part.ris[:n_keep], part.ris[n_keep:]
    if not drop:
        return env
    tmp = PortPartition(env.n_ports, transmit=part.transmit, receive=part.receive,
                        load=keep, ris=drop)
    reduced = terminate_s(env, LoadVector(np.full(len(drop), env.z0)), tmp)
    p = reduced.partition
    return reduced.with_partition(PortPartition(p.n_ports, transmit=p.transmit,
                                                receive=p.receive, ris=p.load))


def compare_trial(cfg: CompareConfig, i: int) -> dict:
    seed = cfg.seed + i
    m = cfg.budget
    model = cfg.model()
    obj = Objective(cfg.objective)
    env, _ = random_env(SynthConfig(seed, n_t=cfg.n_t, n_r=cfg.n_r, n_s=m, eta=cfg.eta,
                                    decoupled=cfg.decoupled, index=1, rep="S"))
    n_small = fixed_load_size(m)
    variants = [
        ("dris", env, None),
        ("bdris_fixed_ns", env, build_named("fully_connected", m, z0=env.z0)),
        ("bdris_fixed_nc", keep_ris_ports(env, n_small),
         build_named("fully_connected", n_small, z0=env.z0)),
    ]
    rows = []
    for topology, e, lc in variants:
        start = time.perf_counter()
        if lc is None:
            net, part, route, n_c = e, e.partition, "direct", len(e.partition.ris)
            fun = dris_objective(net, obj, part)
        else:
            route, n_c = "cascaded", lc.n_c
            fun = bdris_objective(e, lc, obj, "cascaded")
        states = model.states_for(n_c)
        if cfg.algorithm == "exhaustive":
            res = exhaustive_search(fun, states, cfg.cap)
        else:
            res = coordinate_search(fun, states, cfg.restarts, seed)
        disc = None
        if lc is not None:
            try:
                direct = bdris_objective(e, lc, obj, "direct")(res.best_psi.thetas)
            except SingularMatrixError:
                pass  # effective load matrix does not exist at this point; nothing to compare
            else:
                disc = abs(direct - res.best_value) / max(abs(res.best_value), np.finfo(float).tiny)
        runtime = (time.perf_counter() - start) * 1e3 if cfg.record_runtime else None
        rows.append({
            "trial_seed": seed, "n_a": cfg.n_t + cfg.n_r, "n_s": len(e.partition.ris),
            "n_c": n_c, "topology": topology, "route": route, "objective": cfg.objective,
            "value": res.best_value, "runtime_ms": runtime, "max_discrepancy": disc,
        })
    return {"trial_seed": seed, "rows": rows}


def run_compare(cfg: CompareConfig, threads: int = 1) -> list[dict]:
    results = _run(compare_trial, cfg, threads)
    return [row for r in results for row in r["rows"]]
