"""BD-RIS load circuits built from ideal-wire skeletons.

A skeleton is a set of circuit nodes, the connection ports that attach each
RIS element to a node (other terminal grounded), and branch slots.  A branch
slot is either node-to-ground (shunt) or node-to-node (series, floating); each
slot becomes a load port that is later terminated by its own tunable
impedance.

Port ordering of every load circuit: connection ports first, then load
ports in canonical branch order (ground branches by node, then node-node
branches lexicographically).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidLoad, InvalidSkeleton, SingularNodal
from .netcore import Z0_DEFAULT, MultiportNetwork, PortPartition, s_to_z, solve
from .termination import LoadVector, terminate_s, terminate_z

#: Default shunt used when an impedance-domain skeleton is requested, in units of z0.
SHUNT_FACTOR = 1e6

TOPOLOGIES = ("diagonal", "fully_connected", "group_connected", "pi_network", "custom")

GND = None


def _branch_key(br):
    i, j = br
    return (0, i, -1) if j is GND else (1, i, j)


@dataclass(frozen=True)
class Skeleton:
    """Wiring graph of a load circuit.

    ``external[k]`` is the node that connection port ``k`` attaches to.
    ``branches`` holds ``(i, None)`` for a node-to-ground slot or ``(i, j)``
    for a node-to-node slot.  Branches are stored in canonical order.
    """

    nodes: int
    external: tuple[int, ...]
    branches: tuple[tuple[int, int | None], ...]

    def __post_init__(self):
        if not isinstance(self.nodes, (int, np.integer)) or self.nodes < 1:
            raise InvalidSkeleton(f"skeleton needs at least one node, got {self.nodes!r}")
        ext = tuple(int(n) for n in self.external)
        if not ext:
            raise InvalidSkeleton("skeleton has no connection ports")
        for n in ext:
            if not 0 <= n < self.nodes:
                raise InvalidSkeleton(f"connection port attached to missing node {n}")
        brs = []
        for br in self.branches:
            if len(br) != 2:
                raise InvalidSkeleton(f"branch {br!r} must name two terminals")
            i, j = br
            i = int(i)
            j = GND if j is GND or j == "gnd" else int(j)
            if not 0 <= i < self.nodes or (j is not GND and not 0 <= j < self.nodes):
                raise InvalidSkeleton(f"branch {br!r} references a missing node")
            if j is not GND:
                if i == j:
                    raise InvalidSkeleton(f"branch {br!r} shorts a node to itself")
                i, j = min(i, j), max(i, j)
            brs.append((i, j))
        if not brs:
            raise InvalidSkeleton("skeleton has no branch slots (no tunable loads)")
        brs.sort(key=_branch_key)
        object.__setattr__(self, "nodes", int(self.nodes))
        object.__setattr__(self, "external", ext)
        object.__setattr__(self, "branches", tuple(brs))

    @property
    def n_s(self) -> int:
        return len(self.external)

    @property
    def n_c(self) -> int:
        return len(self.branches)

    def incidence(self) -> np.ndarray:
        """Node-by-port incidence matrix (connection ports, then branch ports).

        Port ``k`` has its positive terminal on the node marked ``+1`` and its
        negative terminal on the node marked ``-1`` (or on ground).
        """
        a = np.zeros((self.nodes, self.n_s + self.n_c))
        for k, node in enumerate(self.external):
            a[node, k] = 1.0
        for k, (i, j) in enumerate(self.branches, start=self.n_s):
            a[i, k] = 1.0
            if j is not GND:
                a[j, k] = -1.0
        return a

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "external": list(self.external),
            "branches": [[i, "gnd" if j is GND else j] for i, j in self.branches],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Skeleton":
        unknown = set(data) - {"nodes", "external", "branches"}
        if unknown:
            raise InvalidSkeleton(f"unknown skeleton keys {sorted(unknown)}")
        try:
            return cls(data["nodes"], tuple(data["external"]),
                       tuple(tuple(b) for b in data["branches"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidSkeleton):
                raise
            raise InvalidSkeleton(f"malformed skeleton: {exc}") from exc


@dataclass(frozen=True, eq=False)
class LoadCircuit:
    net: MultiportNetwork
    partition: PortPartition
    topology: str = "custom"
    groups: tuple[int, ...] | None = None
    skeleton: Skeleton | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise InvalidSkeleton(f"unknown topology {self.topology!r}")
        p = self.partition
        if p.n_ports != self.net.n_ports or not p.connection or not p.load:
            raise InvalidSkeleton("load circuit needs non-empty connection and load port sets")
        if self.net.partition is None:
            object.__setattr__(self, "net", self.net.with_partition(p))
        n_s, n_c = self.n_s, self.n_c
        if self.topology == "fully_connected" and n_c != n_s * (n_s + 1) // 2:
            raise InvalidSkeleton(f"fully connected circuit with N_S={n_s} needs {n_s * (n_s + 1) // 2} loads")
        if self.topology == "group_connected":
            g = self.groups or ()
            if sum(g) != n_s or n_c != sum(k * (k + 1) // 2 for k in g):
                raise InvalidSkeleton(f"group sizes {g} inconsistent with N_S={n_s}, N_C={n_c}")

    @property
    def n_s(self) -> int:
        return len(self.partition.connection)

    @property
    def n_c(self) -> int:
        return len(self.partition.load)

    def with_shunt(self, c: float | None = None) -> "LoadCircuit":
        """Impedance-domain approximation: a shunt ``c`` (ohms) at every node.

        The ideal wiring has no impedance matrix; adding a large shunt gives
        ``Z = c * A^T A`` with ``A`` the incidence matrix.  Errors are
        ``O(|theta| / c)``.
        """
        if self.skeleton is None:
            raise InvalidSkeleton("shunt approximation needs the circuit's skeleton")
        c = SHUNT_FACTOR * self.net.z0 if c is None else float(c)
        a = self.skeleton.incidence()
        net = MultiportNetwork(c * (a.T @ a), "Z", self.net.z0, labels=self.net.labels,
                               partition=self.partition, reciprocal=True)
        return LoadCircuit(net, self.partition, self.topology, self.groups, self.skeleton)


def ideal_wiring_s(incidence: np.ndarray) -> np.ndarray:
    """Scattering matrix of a lossless ideal-wire network.

    Port voltages lie in the row space of the incidence matrix and port
    currents in its null space (KCL), which are orthogonal complements.  With
    ``P`` the orthogonal projector onto the row space, ``S = 2P - I``: real,
    symmetric and unitary.  A single ``n``-way junction gives ``(2/n) J - I``.
    """
    u, sv, _ = np.linalg.svd(incidence.T, full_matrices=False)
    tol = max(incidence.shape) * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
    q = u[:, sv > tol]
    s = 2.0 * (q @ q.T) - np.eye(incidence.shape[1])
    return 0.5 * (s + s.T)


def _labels(skel: Skeleton) -> list[str]:
    out = [f"Sbar{k}" for k in range(skel.n_s)]
    for i, j in skel.branches:
        out.append(f"C{i}-gnd" if j is GND else f"C{i}-{j}")
    return out


def build_skeleton(skel: Skeleton, z0: float = Z0_DEFAULT, topology: str = "custom",
                   groups: Sequence[int] | None = None,
                   shunt: float | None = None) -> LoadCircuit:
    """Load circuit of an ideal-wire skeleton.

    By default the exact scattering representation is returned (lossless and
    reciprocal; no impedance matrix exists).  Passing ``shunt`` returns the
    impedance-domain approximation with that shunt at every node instead.
    """
    part = PortPartition.load_circuit(skel.n_s, skel.n_c)
    net = MultiportNetwork(ideal_wiring_s(skel.incidence()), "S", z0, labels=_labels(skel),
                           partition=part)
    lc = LoadCircuit(net, part, topology, tuple(groups) if groups else None, skel)
    return lc if shunt is None else lc.with_shunt(shunt)


def fully_connected_skeleton(n_s: int) -> Skeleton:
    branches = [(i, GND) for i in range(n_s)]
    branches += [(i, j) for i in range(n_s) for j in range(i + 1, n_s)]
    return Skeleton(n_s, tuple(range(n_s)), tuple(branches))


def group_connected_skeleton(groups: Sequence[int]) -> Skeleton:
    branches = [(i, GND) for i in range(sum(groups))]
    start = 0
    for g in groups:
        branches += [(start + i, start + j) for i in range(g) for j in range(i + 1, g)]
        start += g
    return Skeleton(sum(groups), tuple(range(sum(groups))), tuple(branches))


def build_named(topology: str, n_s: int, groups: Sequence[int] | None = None,
                z0: float = Z0_DEFAULT, domain: str = "S",
                c: float | None = None) -> LoadCircuit:
    """Load circuit for one of the named BD-RIS architectures.

    ``domain="Z"`` returns the shunt-``c`` impedance approximation
    (default ``c = 1e6 * z0``); ``domain="S"`` the exact ideal-wire network.
    """
    if not isinstance(n_s, (int, np.integer)) or n_s < 1:
        raise InvalidSkeleton(f"N_S must be a positive integer, got {n_s!r}")
    if topology == "diagonal":
        skel = Skeleton(n_s, tuple(range(n_s)), tuple((i, GND) for i in range(n_s)))
    elif topology == "fully_connected":
        skel = fully_connected_skeleton(n_s)
    elif topology == "group_connected":
        if not groups or any(g < 1 for g in groups) or sum(groups) != n_s:
            raise InvalidSkeleton(f"group sizes {groups} must be positive and sum to N_S={n_s}")
        skel = group_connected_skeleton(groups)
    elif topology == "pi_network":
        if n_s != 2:
            raise InvalidSkeleton("the pi-network is a two-port")
        skel = Skeleton(2, (0, 1), ((0, GND), (1, GND), (0, 1)))
    else:
        raise InvalidSkeleton(f"unknown named topology {topology!r}")
    if domain not in ("S", "Z"):
        raise ValueError(f"domain must be 'S' or 'Z', got {domain!r}")
    shunt = None
    if domain == "Z":
        shunt = SHUNT_FACTOR * z0 if c is None else c
    return build_skeleton(skel, z0, topology, groups if topology == "group_connected" else None, shunt)


def effective_phi(lc: LoadCircuit, psi, cond_cap: float | None = None) -> np.ndarray:
    """Load impedance matrix the circuit presents at its connection ports.

    Terminates the load ports by ``psi``:
    ``Zlc_SbSb - Zlc_SbC (Zlc_CC + Psi)^{-1} Zlc_CSb``.  Circuits held as
    scattering matrices are reduced in that domain and converted afterwards.
    """
    psi = psi if isinstance(psi, LoadVector) else LoadVector(psi)
    if lc.net.rep == "Z":
        return terminate_z(lc.net, psi, lc.partition, "C", cond_cap).matrix
    return s_to_z(terminate_s(lc.net, psi, lc.partition, "C", cond_cap), cond_cap).matrix


def phi_nodal_oracle(topology, psi, shunt: float | None = None,
                     cond_cap: float | None = None) -> np.ndarray:
    """Connection-port impedance matrix by nodal analysis.

    Independent of the multiport machinery: assembles the node admittance
    matrix from the branch loads (plus an optional shunt at every node, to
    mirror :meth:`LoadCircuit.with_shunt`) and reduces it to the nodes the
    connection ports attach to.
    """
    skel = topology.skeleton if isinstance(topology, LoadCircuit) else topology
    if skel is None:
        raise InvalidSkeleton("nodal oracle needs a skeleton")
    thetas = psi.thetas if isinstance(psi, LoadVector) else np.asarray(psi, dtype=complex)
    if len(thetas) != skel.n_c:
        raise InvalidLoad(f"{len(thetas)} loads for {skel.n_c} branches")
    if np.any(thetas == 0):
        raise InvalidLoad("zero branch impedance has no admittance")
    y = np.zeros((skel.nodes, skel.nodes), dtype=complex)
    for (i, j), theta in zip(skel.branches, thetas):
        g = 1.0 / theta
        y[i, i] += g
        if j is not GND:
            y[j, j] += g
            y[i, j] -= g
            y[j, i] -= g
    if shunt is not None:
        y += np.eye(skel.nodes) / shunt
    e = np.zeros((skel.n_s, skel.nodes))
    e[np.arange(skel.n_s), list(skel.external)] = 1.0
    return e @ solve(y, e.T.astype(complex), SingularNodal, "node admittance matrix", cond_cap)
