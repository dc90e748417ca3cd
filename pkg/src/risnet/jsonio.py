"""JSON network format.

::

    {"z0": 50.0, "rep": "Z" | "S",
     "matrix": [[[re, im], ...], ...],      # row-major
     "labels": [...],                       # optional
     "partition": {"T": [...], "R": [...], "S": [...]}}   # or {"Sbar": ..., "C": ...}

Load vectors serialise as ``[[re, im], ...]``.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import NetworkError, ParseError
from .netcore import MultiportNetwork, PortPartition

NETWORK_KEYS = {"z0", "rep", "matrix", "labels", "partition"}


def complex_to_json(values) -> list:
    """Nested lists with every complex entry written as ``[re, im]``."""
    arr = np.asarray(values, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_to_json(v) for v in arr]


def complex_from_json(data, ndim: int) -> np.ndarray:
    """Inverse of :func:`complex_to_json`; plain real numbers are accepted too."""
    def conv(x, depth):
        if depth == 0:
            if isinstance(x, (int, float)) and not isinstance(x, bool):
                return complex(x)
            if (isinstance(x, list) and len(x) == 2
                    and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)):
                return complex(x[0], x[1])
            raise ParseError(f"expected [re, im] pair, got {x!r:.60}")
        if not isinstance(x, list):
            raise ParseError(f"expected a list, got {x!r:.60}")
        return [conv(v, depth - 1) for v in x]
    out = conv(data, ndim)
    try:
        arr = np.array(out, dtype=complex)
    except ValueError as exc:
        raise ParseError(f"ragged matrix: {exc}") from None
    if arr.ndim != ndim:
        raise ParseError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    return arr


def network_to_dict(net: MultiportNetwork, partition: PortPartition | None = None) -> dict:
    part = partition if partition is not None else net.partition
    out = {
        "z0": net.z0,
        "rep": net.rep,
        "matrix": complex_to_json(net.matrix),
        "labels": list(net.labels),
    }
    if part is not None:
        out["partition"] = part.to_dict()
    return out


def network_from_dict(data: dict) -> MultiportNetwork:
    if not isinstance(data, dict):
        raise ParseError("network JSON must be an object")
    unknown = set(data) - NETWORK_KEYS
    if unknown:
        raise ParseError(f"unknown network keys {sorted(unknown)}")
    if "matrix" not in data:
        raise ParseError("network JSON has no 'matrix'")
    m = complex_from_json(data["matrix"], 2)
    try:
        part = None
        if data.get("partition") is not None:
            part = PortPartition.from_dict(data["partition"], m.shape[0])
        return MultiportNetwork(m, data.get("rep", "Z"), data.get("z0", 50.0),
                                labels=data.get("labels"), partition=part)
    except (NetworkError, TypeError) as exc:
        raise ParseError(f"invalid network: {exc}") from exc


def dumps_network(net: MultiportNetwork, partition: PortPartition | None = None) -> str:
    return json.dumps(network_to_dict(net, partition), indent=1) + "\n"


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{os.fspath(path)}: {exc.msg}", exc.lineno) from None


def read_network(path) -> MultiportNetwork:
    return network_from_dict(load_json(path))


def write_network(path, net: MultiportNetwork, partition: PortPartition | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_network(net, partition))
