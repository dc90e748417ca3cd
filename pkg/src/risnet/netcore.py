"""Multiport network value types, Z <-> S conversion and property checks.

A :class:`MultiportNetwork` is a single-frequency N-port held either as an
impedance matrix ``Z`` (ohms) or as a scattering matrix ``S`` referenced to a
real impedance ``z0``.  Everything here is an immutable value; every operation
returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    IndexOutOfRange,
    InvalidPartition,
    NetworkError,
    SingularConversion,
    SingularMatrixError,
)

#: Default reference impedance in ohms.
Z0_DEFAULT = 50.0

#: Matrices with a 2-norm condition number above this are treated as singular.
COND_CAP = 1e12

_SET_NAMES = ("T", "R", "S", "Sbar", "C")
_FIELD_OF = {
    "T": "transmit",
    "R": "receive",
    "S": "ris",
    "Sbar": "connection",
    "C": "load",
}


def solve(a, b, error: type[SingularMatrixError] = SingularMatrixError,
          what: str = "matrix", cond_cap: float | None = None) -> np.ndarray:
    """Return ``a^{-1} b``, refusing ill-conditioned ``a``.

    There is deliberately no pseudo-inverse fallback: a singular ``a`` raises
    ``error`` carrying the condition number.
    """
    cap = COND_CAP if cond_cap is None else cond_cap
    a = np.asarray(a)
    if a.size == 0:
        return np.asarray(b, dtype=complex)
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > cap:
        raise error(f"{what} is numerically singular", cond)
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - cond check catches these
        raise error(f"{what} is singular: {exc}", cond) from exc


def _index_tuple(values: Iterable[int], name: str) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, np.integer)):
            raise InvalidPartition(f"index set {name!r} holds non-integer {v!r}")
        out.append(int(v))
    if any(b <= a for a, b in zip(out, out[1:])):
        raise InvalidPartition(f"index set {name!r} must be strictly increasing, got {out}")
    return tuple(out)


@dataclass(frozen=True)
class PortPartition:
    """Disjoint named port index sets over an ``n_ports`` network.

    Environments use ``transmit``/``receive``/``ris`` (T, R, S); load circuits
    use ``connection``/``load`` (S-bar, C).  The union of all sets must cover
    every port exactly once and each set must be sorted ascending.
    """

    n_ports: int
    transmit: tuple[int, ...] = ()
    receive: tuple[int, ...] = ()
    ris: tuple[int, ...] = ()
    connection: tuple[int, ...] = ()
    load: tuple[int, ...] = ()

    def __post_init__(self):
        seen: set[int] = set()
        for key, attr in _FIELD_OF.items():
            idx = _index_tuple(getattr(self, attr), key)
            object.__setattr__(self, attr, idx)
            for i in idx:
                if not 0 <= i < self.n_ports:
                    raise IndexOutOfRange(f"port {i} in set {key!r} outside 0..{self.n_ports - 1}")
                if i in seen:
                    raise InvalidPartition(f"port {i} appears in more than one set")
                seen.add(i)
        if len(seen) != self.n_ports:
            missing = sorted(set(range(self.n_ports)) - seen)
            raise InvalidPartition(f"ports {missing} belong to no set")

    @classmethod
    def environment(cls, n_t: int, n_r: int, n_s: int) -> "PortPartition":
        """Canonical layout: transmitters, then receivers, then RIS ports."""
        return cls(
            n_t + n_r + n_s,
            transmit=tuple(range(n_t)),
            receive=tuple(range(n_t, n_t + n_r)),
            ris=tuple(range(n_t + n_r, n_t + n_r + n_s)),
        )

    @classmethod
    def load_circuit(cls, n_s: int, n_c: int) -> "PortPartition":
        """Canonical layout: connection ports first, then load ports."""
        return cls(n_s + n_c, connection=tuple(range(n_s)), load=tuple(range(n_s, n_s + n_c)))

    @property
    def antenna(self) -> tuple[int, ...]:
        return tuple(sorted(self.transmit + self.receive))

    def __getitem__(self, name: str) -> tuple[int, ...]:
        if name == "A":
            return self.antenna
        try:
            return getattr(self, _FIELD_OF[name])
        except KeyError:
            raise KeyError(f"unknown port set {name!r}") from None

    def restrict(self, keep: Sequence[int]) -> "PortPartition":
        """Partition of the sub-network formed by ports ``keep`` (in that order)."""
        pos = {p: k for k, p in enumerate(keep)}
        sets = {}
        for attr in _FIELD_OF.values():
            sets[attr] = tuple(pos[i] for i in getattr(self, attr) if i in pos)
        return PortPartition(len(keep), **sets)

    def to_dict(self) -> dict[str, list[int]]:
        return {k: list(self[k]) for k in _SET_NAMES if self[k]}

    @classmethod
    def from_dict(cls, data: dict, n_ports: int) -> "PortPartition":
        unknown = set(data) - set(_SET_NAMES)
        if unknown:
            raise InvalidPartition(f"unknown partition keys {sorted(unknown)}")
        return cls(n_ports, **{_FIELD_OF[k]: tuple(v) for k, v in data.items()})


@dataclass(frozen=True, eq=False)
class MultiportNetwork:
    """An N-port network at one frequency.

    Parameters
    ----------
    matrix : array_like
        N x N impedance (``rep="Z"``) or scattering (``rep="S"``) matrix.
    rep : {"Z", "S"}
    z0 : float
        Real, positive reference impedance shared by all ports.
    labels : sequence of str, optional
        Port labels; defaults to ``P0 .. P{N-1}``.
    partition : PortPartition, optional
        Port roles, carried through termination and cascading.
    reciprocal : bool
        When set, the matrix is checked for symmetry on construction.
    """

    matrix: np.ndarray
    rep: str = "Z"
    z0: float = Z0_DEFAULT
    labels: tuple[str, ...] | None = None
    partition: PortPartition | None = None
    reciprocal: bool = field(default=False, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise NetworkError(f"network matrix must be square and non-empty, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NetworkError("network matrix has non-finite entries")
        if self.rep not in ("Z", "S"):
            raise NetworkError(f"rep must be 'Z' or 'S', got {self.rep!r}")
        z0 = float(self.z0)
        if not (np.isfinite(z0) and z0 > 0):
            raise NetworkError(f"z0 must be positive and finite, got {self.z0!r}")
        n = m.shape[0]
        labels = tuple(f"P{i}" for i in range(n)) if self.labels is None else tuple(map(str, self.labels))
        if len(labels) != n:
            raise NetworkError(f"{len(labels)} labels for a {n}-port network")
        if self.partition is not None and self.partition.n_ports != n:
            raise InvalidPartition(f"partition covers {self.partition.n_ports} ports, network has {n}")
        if self.reciprocal and _asymmetry(m) > 1e-10:
            raise NetworkError("network flagged reciprocal but its matrix is not symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_z(cls, z, z0: float = Z0_DEFAULT, **kw) -> "MultiportNetwork":
        return cls(z, "Z", z0, **kw)

    @classmethod
    def from_s(cls, s, z0: float = Z0_DEFAULT, **kw) -> "MultiportNetwork":
        return cls(s, "S", z0, **kw)

    @property
    def n_ports(self) -> int:
        return self.matrix.shape[0]

    @property
    def z(self) -> np.ndarray:
        return self.matrix if self.rep == "Z" else s_to_z(self).matrix

    @property
    def s(self) -> np.ndarray:
        return self.matrix if self.rep == "S" else z_to_s(self).matrix

    def with_partition(self, partition: PortPartition | None) -> "MultiportNetwork":
        return replace(self, partition=partition)

    @property
    def T(self) -> "MultiportNetwork":
        """Transposed network (reverse every transfer direction)."""
        return replace(self, matrix=self.matrix.T)

    def __repr__(self):
        return f"MultiportNetwork(rep={self.rep!r}, n_ports={self.n_ports}, z0={self.z0})"


@dataclass(frozen=True)
class PropertyReport:
    reciprocal: bool
    passive: bool
    lossless: bool
    max_asymmetry: float
    max_singular_value: float
    tolerance: float


def _asymmetry(m: np.ndarray) -> float:
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(m - m.T)) / scale)


def z_to_s(net: MultiportNetwork, cond_cap: float | None = None) -> MultiportNetwork:
    """Scattering representation ``S = (Z + z0 I)^{-1} (Z - z0 I)``.

    Raises :class:`SingularConversion` when ``Z + z0 I`` is ill-conditioned.
    """
    if net.rep == "S":
        return net
    z = net.matrix
    eye = np.eye(net.n_ports)
    s = solve(z + net.z0 * eye, z - net.z0 * eye, SingularConversion, "Z + z0*I", cond_cap)
    return replace(net, matrix=s, rep="S")


def s_to_z(net: MultiportNetwork, cond_cap: float | None = None) -> MultiportNetwork:
    """Impedance representation ``Z = z0 (I + S)(I - S)^{-1}``.

    ``(I + S)`` and ``(I - S)^{-1}`` commute, so this is evaluated as a left
    solve.  Ideal through-connections have singular ``I - S``: no impedance
    matrix exists and :class:`SingularConversion` is raised.
    """
    if net.rep == "Z":
        return net
    s = net.matrix
    eye = np.eye(net.n_ports)
    z = net.z0 * solve(eye - s, eye + s, SingularConversion, "I - S", cond_cap)
    return replace(net, matrix=z, rep="Z")


def block(net, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    """Sub-matrix with the given (sorted, in-range) row and column port sets.

    ``net`` may be a :class:`MultiportNetwork` or a bare square array.
    """
    m = net.matrix if isinstance(net, MultiportNetwork) else np.asarray(net)
    rows = _index_tuple(rows, "rows")
    cols = _index_tuple(cols, "cols")
    n = m.shape[0]
    for i in rows + cols:
        if not 0 <= i < n:
            raise IndexOutOfRange(f"port index {i} outside 0..{n - 1}")
    return m[np.ix_(rows, cols)]


def spectral_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def check_properties(net: MultiportNetwork, tol: float = 1e-10) -> PropertyReport:
    """Reciprocity, passivity and losslessness of ``net`` at tolerance ``tol``.

    Reciprocity is judged on the stored matrix; passivity and losslessness on
    the scattering matrix (converted from Z if needed, which may raise
    :class:`SingularConversion`).
    """
    asym = _asymmetry(net.matrix)
    s = net.s
    sigma = spectral_norm(s)
    passive = sigma <= 1 + tol
    lossless = bool(np.all(np.abs(s.conj().T @ s - np.eye(net.n_ports)) <= tol))
    return PropertyReport(
        reciprocal=asym <= tol,
        passive=passive,
        lossless=lossless and passive,
        max_asymmetry=asym,
        max_singular_value=sigma,
        tolerance=tol,
    )
