"""Cascade of a radio environment with a load circuit.

Two independent routes join the environment's RIS ports to the load
circuit's connection ports: the impedance-domain block formulas
(:func:`cascade_z`) and the scattering-domain Redheffer star product
(:func:`star_s`).  :func:`map_to_dris` wraps whichever applies and hands back
a network whose load ports are ordinary individually-terminated RIS ports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PartitionMismatch, ReferenceImpedanceMismatch, SingularCascade
from .netcore import COND_CAP, MultiportNetwork, PortPartition, block, s_to_z, solve, z_to_s


@dataclass(frozen=True, eq=False)
class CascadeResult:
    """Cascaded network over antennas followed by the load circuit's load ports.

    ``partition`` carries the transmit/receive sets and the load set ``C``.
    ``x_cond`` is the condition number of the interface matrix that was inverted.
    """

    net: MultiportNetwork
    partition: PortPartition
    x_cond: float


def _unwrap(lc, partition):
    net = getattr(lc, "net", lc)
    part = partition or getattr(lc, "partition", None) or net.partition
    if part is None:
        raise PartitionMismatch("load circuit has no (connection, load) partition")
    return net, part


def _interface(env, env_partition, lc, lc_partition):
    env_part = env_partition or env.partition
    if env_part is None:
        raise PartitionMismatch("environment has no port partition")
    lc_net, lc_part = _unwrap(lc, lc_partition)
    if env_part.n_ports != env.n_ports or lc_part.n_ports != lc_net.n_ports:
        raise PartitionMismatch("partition size does not match its network")
    if len(env_part.ris) != len(lc_part.connection):
        raise PartitionMismatch(
            f"environment has {len(env_part.ris)} RIS ports, load circuit "
            f"{len(lc_part.connection)} connection ports"
        )
    if env.z0 != lc_net.z0:
        raise ReferenceImpedanceMismatch(f"z0 differs: {env.z0} vs {lc_net.z0}")
    return env_part, lc_net, lc_part


def _result(env, env_part, lc_net, lc_part, matrix, rep, cond) -> CascadeResult:
    ant = env_part.antenna
    n_a, n_c = len(ant), len(lc_part.load)
    pos = {p: k for k, p in enumerate(ant)}
    part = PortPartition(
        n_a + n_c,
        transmit=tuple(pos[i] for i in env_part.transmit),
        receive=tuple(pos[i] for i in env_part.receive),
        load=tuple(range(n_a, n_a + n_c)),
    )
    labels = [env.labels[i] for i in ant] + [lc_net.labels[i] for i in lc_part.load]
    net = MultiportNetwork(matrix, rep, env.z0, labels=labels, partition=part)
    return CascadeResult(net, part, cond)


def cascade_z(env: MultiportNetwork, lc, env_partition: PortPartition | None = None,
              lc_partition: PortPartition | None = None,
              cond_cap: float | None = None) -> CascadeResult:
    """Impedance-domain cascade joining RIS ports ``S`` to connection ports ``S-bar``.

    With ``X = (Z_SS + Zlc_SbSb)^{-1}``::

        Zc_AA = Z_AA - Z_AS X Z_SA        Zc_AC = Z_AS X Zlc_SbC
        Zc_CA = Zlc_CSb X Z_SA            Zc_CC = Zlc_CC - Zlc_CSb X Zlc_SbC

    ``lc`` is a :class:`~risnet.loadcircuit.LoadCircuit` or a network with a
    connection/load partition.  Both networks must have impedance matrices.
    """
    env_part, lc_net, lc_part = _interface(env, env_partition, lc, lc_partition)
    z = s_to_z(env).matrix
    zl = s_to_z(lc_net).matrix
    a, s = env_part.antenna, env_part.ris
    sb, c = lc_part.connection, lc_part.load
    n_a = len(a)

    interface = block(z, s, s) + block(zl, sb, sb)
    cond = float(np.linalg.cond(interface)) if interface.size else 1.0
    rhs = np.hstack([block(z, s, a), block(zl, sb, c)])
    sol = solve(interface, rhs, SingularCascade, "Z_SS + Zlc_SbSb", cond_cap)
    x_za, x_zc = sol[:, :n_a], sol[:, n_a:]

    z_as = block(z, a, s)
    zl_csb = block(zl, c, sb)
    out = np.block([
        [block(z, a, a) - z_as @ x_za, z_as @ x_zc],
        [zl_csb @ x_za, block(zl, c, c) - zl_csb @ x_zc],
    ])
    return _result(env, env_part, lc_net, lc_part, out, "Z", cond)


def star_s(a: MultiportNetwork, b, a_partition: PortPartition | None = None,
           b_partition: PortPartition | None = None,
           cond_cap: float | None = None) -> CascadeResult:
    """Redheffer star product joining ``a``'s RIS ports to ``b``'s connection ports.

    Waves leaving ``a`` at ``S`` enter ``b`` at ``S-bar`` and vice versa.  With
    ``K = (I - Sa_SS Sb_SbSb)^{-1}`` computed once::

        S_AA = Sa_AA + Sa_AS Sb_SbSb K Sa_SA
        S_AC = Sa_AS (I + Sb_SbSb K Sa_SS) Sb_SbC
        S_CA = Sb_CSb K Sa_SA
        S_CC = Sb_CC + Sb_CSb K Sa_SS Sb_SbC
    """
    a_part, b_net, b_part = _interface(a, a_partition, b, b_partition)
    sa = z_to_s(a).matrix
    sb_ = z_to_s(b_net).matrix
    ant, s = a_part.antenna, a_part.ris
    sbar, c = b_part.connection, b_part.load
    n_s = len(s)

    a_ss = block(sa, s, s)
    b_ss = block(sb_, sbar, sbar)
    b_sc = block(sb_, sbar, c)
    interface = np.eye(n_s) - a_ss @ b_ss
    cond = float(np.linalg.cond(interface)) if interface.size else 1.0
    cap = COND_CAP if cond_cap is None else cond_cap
    if not np.isfinite(cond) or cond > cap:
        raise SingularCascade("I - Sa_SS Sb_SbSb is numerically singular", cond)
    k = np.linalg.inv(interface)

    a_as = block(sa, ant, s)
    a_sa = block(sa, s, ant)
    b_cs = block(sb_, c, sbar)
    k_sa = k @ a_sa
    k_ss_bsc = k @ a_ss @ b_sc
    out = np.block([
        [block(sa, ant, ant) + a_as @ b_ss @ k_sa, a_as @ (b_sc + b_ss @ k_ss_bsc)],
        [b_cs @ k_sa, block(sb_, c, c) + b_cs @ k_ss_bsc],
    ])
    return _result(a, a_part, b_net, b_part, out, "S", cond)


def map_to_dris(env: MultiportNetwork, lc, env_partition: PortPartition | None = None,
                domain: str = "auto",
                cond_cap: float | None = None) -> tuple[MultiportNetwork, PortPartition]:
    """Rewrite a BD-RIS problem as a D-RIS problem over the cascaded network.

    The returned partition lists the load circuit's load ports as the RIS set,
    so the result can be terminated by a diagonal load vector exactly like a
    native D-RIS environment.  ``domain="auto"`` uses the impedance cascade
    when the load circuit is held as ``Z`` and the star product otherwise.
    """
    lc_net, _ = _unwrap(lc, None)
    if domain == "auto":
        domain = "Z" if lc_net.rep == "Z" else "S"
    if domain == "Z":
        res = cascade_z(env, lc, env_partition, cond_cap=cond_cap)
    elif domain == "S":
        res = star_s(env, lc, env_partition, cond_cap=cond_cap)
    else:
        raise ValueError(f"domain must be 'auto', 'Z' or 'S', got {domain!r}")
    p = res.partition
    part = PortPartition(p.n_ports, transmit=p.transmit, receive=p.receive, ris=p.load)
    return res.net.with_partition(part), part
