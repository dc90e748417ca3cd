"""Discrete optimisation of diagonal load vectors.

The searches only ever see a function from a vector of load impedances to a
real objective, so the same code optimises native D-RIS problems and BD-RIS
problems rewritten by :func:`~risnet.cascade.map_to_dris`.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cascade import map_to_dris
from .errors import SearchSpaceTooLarge, SingularMatrixError
from .loadcircuit import LoadCircuit, effective_phi
from .netcore import MultiportNetwork, PortPartition
from .synth import rng_for
from .termination import LoadVector, channel, channel_matrix, terminate_z

#: Default upper bound on the number of candidates an exhaustive search may visit.
EXHAUSTIVE_CAP = 1_000_000

#: Relative improvement below which coordinate descent considers a sweep converged.
IMPROVEMENT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class LoadModel:
    """Admissible states for each tunable load.

    ``values`` is either one array shared by every load or, with
    ``per_load=True``, a sequence with one array per load.
    """

    kind: str
    values: object
    per_load: bool = False

    def __post_init__(self):
        if self.kind not in ("discrete_set", "reactive_grid", "fixed"):
            raise ValueError(f"unknown load model kind {self.kind!r}")
        if self.per_load:
            vals = tuple(np.atleast_1d(np.asarray(v, dtype=complex)) for v in self.values)
            sizes = [v.size for v in vals]
        else:
            vals = np.atleast_1d(np.asarray(self.values, dtype=complex))
            sizes = [vals.size]
        if min(sizes, default=0) < 1:
            raise ValueError("load model has an empty state set")
        if self.kind == "reactive_grid" and min(sizes) < 2:
            raise ValueError("reactive grid needs at least two steps")
        object.__setattr__(self, "values", vals)

    @classmethod
    def discrete(cls, values: Sequence[complex]) -> "LoadModel":
        return cls("discrete_set", values)

    @classmethod
    def reactive_grid(cls, x_min: float, x_max: float, steps: int) -> "LoadModel":
        if steps < 2:
            raise ValueError("reactive grid needs at least two steps")
        return cls("reactive_grid", 1j * np.linspace(x_min, x_max, steps))

    @classmethod
    def fixed(cls, value: complex) -> "LoadModel":
        return cls("fixed", [value])

    def states_for(self, n: int) -> list[np.ndarray]:
        if self.per_load:
            if len(self.values) != n:
                raise ValueError(f"load model defines {len(self.values)} loads, problem has {n}")
            return list(self.values)
        return [self.values] * n


OBJECTIVES = ("siso_gain", "fro_gain", "min_gain")


@dataclass(frozen=True)
class Objective:
    """Channel figure of merit to maximise."""

    kind: str = "fro_gain"

    def __post_init__(self):
        if self.kind not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.kind!r}; choose from {OBJECTIVES}")

    def __call__(self, h: np.ndarray) -> float:
        if self.kind == "siso_gain":
            return float(abs(h[0, 0]) ** 2)
        if self.kind == "fro_gain":
            return float(np.sum(np.abs(h) ** 2))
        return float(np.min(np.sum(np.abs(h) ** 2, axis=1)))


def _objective(obj) -> Objective:
    return obj if isinstance(obj, Objective) else Objective(obj)


@dataclass(frozen=True, eq=False)
class OptimResult:
    best_psi: LoadVector
    best_value: float
    best_index: tuple[int, ...]
    trace: list[tuple[int, float]] = field(repr=False)
    evaluations: int
    seed: int | None = None
    route: str = "direct"


def evaluate(net: MultiportNetwork, loads, objective, partition: PortPartition | None = None) -> float:
    """Objective of the channel obtained by terminating the RIS ports with ``loads``."""
    return _objective(objective)(channel_matrix(net, loads, partition))


def _guarded(fun: Callable[[np.ndarray], float]) -> Callable[[np.ndarray], float]:
    def wrapped(thetas):
        try:
            return fun(thetas)
        except SingularMatrixError:
            return -math.inf
    return wrapped


def _improves(new: float, cur: float, rtol: float) -> bool:
    if cur == -math.inf:
        return new > cur
    return new > cur + rtol * abs(cur)


def _thetas(states, idx) -> np.ndarray:
    return np.array([states[k][i] for k, i in enumerate(idx)], dtype=complex)


def exhaustive_search(fun: Callable[[np.ndarray], float], states: Sequence[np.ndarray],
                      cap: int = EXHAUSTIVE_CAP, workers: int = 1) -> OptimResult:
    """Evaluate every state combination in lexicographic order.

    The first (lexicographically smallest) maximiser wins exact ties, so the
    result does not depend on how evaluations are scheduled across workers.
    """
    sizes = [len(s) for s in states]
    total = math.prod(sizes)
    if total > cap:
        raise SearchSpaceTooLarge(f"{total} candidates exceed the exhaustive cap of {cap}")
    f = _guarded(fun)
    candidates = itertools.product(*(range(n) for n in sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = pool.map(lambda idx: (idx, f(_thetas(states, idx))), candidates, chunksize=64)
            best_idx, best, trace = _reduce(values)
    else:
        best_idx, best, trace = _reduce((idx, f(_thetas(states, idx))) for idx in candidates)
    return _finish(fun, states, best_idx, best, trace, total)


def _reduce(pairs):
    best_idx, best, trace = None, -math.inf, []
    for k, (idx, val) in enumerate(pairs):
        if best_idx is None or val > best:
            best_idx, best = idx, val
            trace.append((k, val))
    return best_idx, best, trace


def _finish(fun, states, best_idx, best, trace, evals, seed=None, route="direct") -> OptimResult:
    thetas = _thetas(states, best_idx)
    check = _guarded(fun)(thetas)
    if check != best and not (math.isnan(check) and math.isnan(best)):
        raise RuntimeError(f"objective is not deterministic: {best!r} then {check!r}")
    return OptimResult(LoadVector(thetas), best, tuple(best_idx), trace, evals, seed, route)


def coordinate_search(fun: Callable[[np.ndarray], float], states: Sequence[np.ndarray],
                      restarts: int = 8, seed: int = 0,
                      rtol: float = IMPROVEMENT_RTOL) -> OptimResult:
    """Cyclic coordinate descent with seeded random restarts.

    Each sweep tries every state of every coordinate in turn and moves to the
    best one (lowest state index on ties) if it beats the current value by more
    than ``rtol`` relative.  A restart ends after a sweep with no move.  The
    trace records the best value found so far after each sweep.
    """
    f = _guarded(fun)
    n = len(states)
    best_idx, best = None, -math.inf
    trace: list[tuple[int, float]] = []
    evals = sweeps = 0
    for r in range(max(1, restarts)):
        rng = rng_for(seed, r)
        idx = [int(rng.integers(len(s))) for s in states]
        cur = f(_thetas(states, idx))
        evals += 1
        moved = True
        while moved:
            moved = False
            for k in range(n):
                cand_best, cand_val = None, -math.inf
                for v in range(len(states[k])):
                    if v == idx[k]:
                        continue
                    trial = idx.copy()
                    trial[k] = v
                    val = f(_thetas(states, trial))
                    evals += 1
                    if cand_best is None or val > cand_val:
                        cand_best, cand_val = v, val
                if cand_best is not None and _improves(cand_val, cur, rtol):
                    idx[k], cur = cand_best, cand_val
                    moved = True
            sweeps += 1
            if best_idx is None or cur > best or (cur == best and tuple(idx) < best_idx):
                best_idx, best = tuple(idx), cur
            trace.append((sweeps, best))
    return _finish(fun, states, best_idx, best, trace, evals, seed)


def dris_objective(net: MultiportNetwork, objective, partition: PortPartition | None = None):
    """Objective as a function of the RIS load impedances of a D-RIS problem."""
    obj = _objective(objective)
    return lambda thetas: obj(channel_matrix(net, thetas, partition))


def _n_loads(net: MultiportNetwork, partition: PortPartition | None) -> int:
    part = partition or net.partition
    return len(part.ris)


def exhaustive(net: MultiportNetwork, model: LoadModel, objective,
               partition: PortPartition | None = None, cap: int = EXHAUSTIVE_CAP,
               workers: int = 1) -> OptimResult:
    """Global optimum of a D-RIS problem over the discrete load model."""
    states = model.states_for(_n_loads(net, partition))
    return exhaustive_search(dris_objective(net, objective, partition), states, cap, workers)


def coordinate_descent(net: MultiportNetwork, model: LoadModel, objective,
                       partition: PortPartition | None = None, restarts: int = 8,
                       seed: int = 0) -> OptimResult:
    states = model.states_for(_n_loads(net, partition))
    return coordinate_search(dris_objective(net, objective, partition), states, restarts, seed)


def bdris_objective(env: MultiportNetwork, lc: LoadCircuit, objective, route: str = "cascaded",
                    env_partition: PortPartition | None = None):
    """Objective as a function of the load-circuit loads, via either route.

    ``"direct"`` reduces the load circuit to its effective load matrix and
    terminates the environment with it; ``"cascaded"`` terminates the cascaded
    network's load ports individually.
    """
    obj = _objective(objective)
    if route == "cascaded":
        net, part = map_to_dris(env, lc, env_partition)
        return dris_objective(net, obj, part)
    if route == "direct":
        part = env_partition or env.partition

        def fun(thetas):
            phi = effective_phi(lc, thetas)
            return obj(channel(terminate_z(env, phi, part)).h)
        return fun
    raise ValueError(f"route must be 'direct' or 'cascaded', got {route!r}")


def optimize_bdris(env: MultiportNetwork, lc: LoadCircuit, model: LoadModel, objective,
                   algo: str = "exhaustive", route: str = "cascaded",
                   env_partition: PortPartition | None = None, cap: int = EXHAUSTIVE_CAP,
                   restarts: int = 8, seed: int = 0) -> OptimResult:
    """Optimise a BD-RIS with an unmodified D-RIS search algorithm."""
    fun = bdris_objective(env, lc, objective, route, env_partition)
    states = model.states_for(lc.n_c)
    if algo == "exhaustive":
        res = exhaustive_search(fun, states, cap)
    elif algo == "coordinate_descent":
        res = coordinate_search(fun, states, restarts, seed)
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    return OptimResult(res.best_psi, res.best_value, res.best_index, res.trace,
                       res.evaluations, res.seed, route)
