"""Seeded random radio environments and load circuits.

Random generator
----------------
Every random object is drawn from NumPy's ``PCG64`` bit generator seeded with
``SeedSequence(seed, spawn_key=(index,))`` where ``index`` is the object's
position in its ensemble.  This fixes the stream per (seed, index) pair, so
ensembles can be generated in any order or in parallel with identical results.

Ensemble
--------
Scattering matrices are ``S = eta * W D W^T`` with ``W`` a Haar-random real
orthogonal matrix and ``D`` a diagonal of uniformly random unit phasors.  The
result is exactly symmetric (reciprocal) with every singular value equal to
``eta`` (passive for ``eta <= 1``, lossless at ``eta = 1``).  This is a test
ensemble, not a propagation model.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, InvalidSkeleton
from .loadcircuit import LoadCircuit
from .netcore import Z0_DEFAULT, MultiportNetwork, PortPartition, s_to_z
from .termination import LoadVector


def rng_for(seed: int, *index: int) -> np.random.Generator:
    """Generator for object ``index`` of the ensemble seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(index))))


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_t: int = 0
    n_r: int = 0
    n_s: int = 0
    n_c: int = 0
    eta: float = 0.9
    lossless: bool = False
    decoupled: bool = False
    index: int = 0
    z0: float = Z0_DEFAULT
    rep: str = "S"

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if min(self.n_t, self.n_r, self.n_s, self.n_c) < 0:
            raise ConfigError("port counts must be non-negative")
        if not 0 < self.eta <= 1:
            raise ConfigError(f"eta must lie in (0, 1], got {self.eta}")
        if self.rep not in ("S", "Z"):
            raise ConfigError(f"rep must be 'S' or 'Z', got {self.rep!r}")

    @property
    def scale(self) -> float:
        return 1.0 if self.lossless else float(self.eta)


def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def symmetric_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random complex symmetric unitary matrix ``W diag(exp(j phi)) W^T``."""
    w = haar_orthogonal(n, rng)
    d = np.exp(2j * np.pi * rng.random(n))
    s = (w * d) @ w.T
    return 0.5 * (s + s.T)


def _network(s: np.ndarray, cfg: SynthConfig, part: PortPartition) -> MultiportNetwork:
    net = MultiportNetwork(s, "S", cfg.z0, partition=part)
    return s_to_z(net) if cfg.rep == "Z" else net


def random_env(cfg: SynthConfig) -> tuple[MultiportNetwork, PortPartition]:
    """Reciprocal, passive radio environment with ``n_t + n_r + n_s`` ports.

    ``decoupled=True`` draws the antenna and RIS blocks independently with no
    coupling between them, so the RIS has no influence on the channel.
    """
    n_a = cfg.n_t + cfg.n_r
    if n_a + cfg.n_s < 1:
        raise ConfigError("environment needs at least one port")
    rng = rng_for(cfg.seed, cfg.index)
    if cfg.decoupled:
        s = np.zeros((n_a + cfg.n_s,) * 2, dtype=complex)
        if n_a:
            s[:n_a, :n_a] = symmetric_unitary(n_a, rng)
        if cfg.n_s:
            s[n_a:, n_a:] = symmetric_unitary(cfg.n_s, rng)
    else:
        s = symmetric_unitary(n_a + cfg.n_s, rng)
    part = PortPartition.environment(cfg.n_t, cfg.n_r, cfg.n_s)
    net = _network(cfg.scale * s, cfg, part)
    return net, part


def random_load_circuit(cfg: SynthConfig) -> LoadCircuit:
    """Randomly connected load circuit with ``n_s`` connection and ``n_c`` load ports."""
    if cfg.n_s < 1 or cfg.n_c < 1:
        raise InvalidSkeleton(f"load circuit needs N_S >= 1 and N_C >= 1, got {cfg.n_s}, {cfg.n_c}")
    rng = rng_for(cfg.seed, cfg.index)
    part = PortPartition.load_circuit(cfg.n_s, cfg.n_c)
    s = cfg.scale * symmetric_unitary(cfg.n_s + cfg.n_c, rng)
    return LoadCircuit(_network(s, cfg, part), part, "custom")


def random_passive_loads(n: int, rng: np.random.Generator, r_max: float = 100.0,
                         x_max: float = 200.0) -> LoadVector:
    """Loads with resistance in ``[0, r_max)`` and reactance in ``[-x_max, x_max)`` ohms."""
    r = r_max * rng.random(n)
    x = x_max * (2 * rng.random(n) - 1)
    return LoadVector(r + 1j * x, passive=True)


def with_index(cfg: SynthConfig, index: int) -> SynthConfig:
    return replace(cfg, index=index)
