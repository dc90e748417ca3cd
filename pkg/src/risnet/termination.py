"""Partial termination of a port subset and wireless channel extraction."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidLoad, PartitionMismatch, SingularTermination
from .netcore import MultiportNetwork, PortPartition, block, s_to_z, solve, z_to_s

#: Finite stand-in for an open circuit in impedance-domain arithmetic.
OPEN_CIRCUIT = 1e9


@dataclass(frozen=True, eq=False)
class LoadVector:
    """Individual load impedances ``theta_i`` (ohms), one per terminated port."""

    thetas: np.ndarray
    passive: bool = False

    def __post_init__(self):
        t = np.atleast_1d(np.array(self.thetas, dtype=np.complex128))
        if t.ndim != 1:
            raise InvalidLoad(f"load vector must be one-dimensional, got shape {t.shape}")
        if not np.all(np.isfinite(t)):
            raise InvalidLoad("load impedances must be finite (use OPEN_CIRCUIT for opens)")
        if self.passive and np.any(t.real < 0):
            raise InvalidLoad("passive load vector has a load with negative resistance")
        t.setflags(write=False)
        object.__setattr__(self, "thetas", t)

    def __len__(self):
        return self.thetas.shape[0]

    @property
    def psi(self) -> np.ndarray:
        """Diagonal load impedance matrix."""
        return np.diag(self.thetas)

    def gammas(self, z0: float) -> np.ndarray:
        """Reflection coefficients ``(theta - z0) / (theta + z0)``."""
        t = self.thetas
        if np.any(t == -z0):
            raise InvalidLoad(f"load impedance equal to -z0 = {-z0} has no reflection coefficient")
        return (t - z0) / (t + z0)

    def tolist(self) -> list[list[float]]:
        return [[float(t.real), float(t.imag)] for t in self.thetas]


@dataclass(frozen=True, eq=False)
class Channel:
    """N_R x N_T channel matrix plus the route and seed that produced it."""

    h: np.ndarray
    route: str = "direct"
    seed: int | None = None
    digest: str | None = None
    meta: dict = field(default_factory=dict, repr=False)


def _as_loads(loads) -> LoadVector:
    return loads if isinstance(loads, LoadVector) else LoadVector(loads)


def _as_phi(phi, n: int) -> np.ndarray:
    if isinstance(phi, LoadVector):
        phi = phi.psi
    phi = np.asarray(phi, dtype=np.complex128)
    if phi.ndim == 1:
        phi = np.diag(phi)
    if phi.shape != (n, n):
        raise PartitionMismatch(f"load matrix has shape {phi.shape}, expected {(n, n)}")
    return phi


def _split(net: MultiportNetwork, partition: PortPartition | None, which: str):
    part = partition if partition is not None else net.partition
    if part is None:
        raise PartitionMismatch("no port partition given and none attached to the network")
    if part.n_ports != net.n_ports:
        raise PartitionMismatch(f"partition covers {part.n_ports} ports, network has {net.n_ports}")
    drop = part[which]
    dropped = set(drop)
    keep = tuple(i for i in range(net.n_ports) if i not in dropped)
    return part, keep, drop


def _reduced(net, matrix, rep, part, keep) -> MultiportNetwork:
    return MultiportNetwork(
        matrix,
        rep,
        net.z0,
        labels=[net.labels[i] for i in keep],
        partition=part.restrict(keep),
    )


def terminate_z(net: MultiportNetwork, phi, partition: PortPartition | None = None,
                which: str = "S", cond_cap: float | None = None) -> MultiportNetwork:
    """Terminate the ``which`` ports with load impedance matrix ``phi``.

    Returns the network seen at the remaining ports,
    ``Z_kk - Z_kd (Z_dd + phi)^{-1} Z_dk``, with labels and partition carried
    over.  ``phi`` may be a full matrix, a 1-D array of diagonal loads or a
    :class:`LoadVector`.  The same routine reduces a load circuit (``which="C"``).
    """
    part, keep, drop = _split(net, partition, which)
    z = s_to_z(net).matrix
    if not drop:
        return _reduced(net, z, "Z", part, keep)
    phi = _as_phi(phi, len(drop))
    z_kk = block(z, keep, keep)
    z_kd = block(z, keep, drop)
    z_dk = block(z, drop, keep)
    z_dd = block(z, drop, drop)
    inner = solve(z_dd + phi, z_dk, SingularTermination, "Z_dd + Phi", cond_cap)
    return _reduced(net, z_kk - z_kd @ inner, "Z", part, keep)


def terminate_s(net: MultiportNetwork, loads, partition: PortPartition | None = None,
                which: str = "S", cond_cap: float | None = None) -> MultiportNetwork:
    """Scattering-domain termination by individual loads.

    ``S_kk + S_kd G (I - S_dd G)^{-1} S_dk`` with ``G`` the diagonal matrix of
    load reflection coefficients.  Works for networks without an impedance
    matrix (ideal wiring).
    """
    part, keep, drop = _split(net, partition, which)
    s = z_to_s(net).matrix
    if not drop:
        return _reduced(net, s, "S", part, keep)
    loads = _as_loads(loads)
    if len(loads) != len(drop):
        raise PartitionMismatch(f"{len(loads)} loads for {len(drop)} terminated ports")
    g = loads.gammas(net.z0)
    s_kk = block(s, keep, keep)
    s_kd = block(s, keep, drop)
    s_dk = block(s, drop, keep)
    s_dd = block(s, drop, drop)
    inner = solve(np.eye(len(drop)) - s_dd * g[None, :], s_dk, SingularTermination,
                  "I - S_dd*Gamma", cond_cap)
    return _reduced(net, s_kk + (s_kd * g[None, :]) @ inner, "S", part, keep)


def terminate(net: MultiportNetwork, loads, partition: PortPartition | None = None,
              which: str = "S", cond_cap: float | None = None) -> MultiportNetwork:
    """Terminate with individual loads in whichever domain ``net`` is held."""
    if net.rep == "Z":
        return terminate_z(net, _as_loads(loads), partition, which, cond_cap)
    return terminate_s(net, loads, partition, which, cond_cap)


def measurable_s(net: MultiportNetwork, cond_cap: float | None = None) -> np.ndarray:
    return z_to_s(net, cond_cap).matrix


def channel(net: MultiportNetwork, partition: PortPartition | None = None,
            route: str = "direct", seed: int | None = None,
            cond_cap: float | None = None) -> Channel:
    """Receive/transmit block of the measurable scattering matrix.

    ``net`` is the network over the antenna ports (``Z`` or ``S``); the
    partition supplies the transmit and receive sets relative to it.
    """
    part = partition if partition is not None else net.partition
    if part is None:
        raise PartitionMismatch("channel extraction needs transmit/receive sets")
    if part.n_ports != net.n_ports:
        raise PartitionMismatch(f"partition covers {part.n_ports} ports, network has {net.n_ports}")
    s = measurable_s(net, cond_cap)
    return Channel(block(s, part.receive, part.transmit), route=route, seed=seed)


def channel_matrix(net: MultiportNetwork, loads, partition: PortPartition | None = None,
                   cond_cap: float | None = None) -> np.ndarray:
    """Terminate the RIS ports with ``loads`` and return the channel matrix."""
    return channel(terminate(net, loads, partition, "S", cond_cap), cond_cap=cond_cap).h


def relabel(net: MultiportNetwork, order: Sequence[int]) -> MultiportNetwork:
    """Reorder ports: new port ``k`` is old port ``order[k]``."""
    order = list(order)
    inv = {old: new for new, old in enumerate(order)}
    part = net.partition
    if part is not None:
        sets = {}
        for attr in ("transmit", "receive", "ris", "connection", "load"):
            sets[attr] = tuple(sorted(inv[i] for i in getattr(part, attr)))
        part = PortPartition(net.n_ports, **sets)
    return replace(
        net,
        matrix=net.matrix[np.ix_(order, order)],
        labels=tuple(net.labels[i] for i in order),
        partition=part,
    )
