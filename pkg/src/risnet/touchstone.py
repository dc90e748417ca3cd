"""Touchstone v1 (``.sNp``) reader and writer for scattering parameters.

Only version 1 files holding S-parameters are accepted; anything else raises
:class:`~risnet.errors.ParseError` with the offending line number.  Two-port
files follow the v1 column order ``S11 S21 S12 S22``; all other port counts
are row-major.
"""

from __future__ import annotations

import io
import os
import re
from typing import IO, Sequence

import numpy as np

from .errors import FrequencyNotFound, ParseError
from .netcore import MultiportNetwork

FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
FORMATS = ("RI", "MA", "DB")

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z")
_EXT = re.compile(r"\.s(\d+)p\Z", re.IGNORECASE)


def ports_from_filename(path) -> int:
    m = _EXT.search(os.fspath(path))
    if not m or int(m.group(1)) < 1:
        raise ParseError(f"cannot infer port count from file name {os.fspath(path)!r}")
    return int(m.group(1))


def _number(tok: str, line: int) -> float:
    if not _NUMBER.match(tok):
        raise ParseError(f"expected a number, got {tok[:40]!r}", line)
    val = float(tok)
    if not np.isfinite(val):
        raise ParseError(f"number {tok[:40]!r} overflows", line)
    return val


def _options(tokens: list[str], line: int):
    unit, param, fmt, z0 = "GHZ", "S", "MA", 50.0
    it = iter(tokens)
    for tok in it:
        t = tok.upper()
        if t in FREQ_UNITS:
            unit = t
        elif t in FORMATS:
            fmt = t
        elif t == "S":
            param = t
        elif t in ("Y", "Z", "H", "G"):
            raise ParseError(f"{t}-parameter files are not supported (S only)", line)
        elif t == "R":
            nxt = next(it, None)
            if nxt is None:
                raise ParseError("option 'R' needs a reference impedance", line)
            z0 = _number(nxt, line)
            if z0 <= 0:
                raise ParseError(f"reference impedance must be positive, got {z0}", line)
        else:
            raise ParseError(f"unknown option {tok[:40]!r}", line)
    return FREQ_UNITS[unit], param, fmt, z0


def _to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        if fmt == "RI":
            return a + 1j * b
        mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
        return mag * np.exp(1j * np.deg2rad(b))


def parse_touchstone(data: str | bytes, n_ports: int):
    """Parse Touchstone v1 text.

    Returns ``(freqs_hz, s, z0)`` with ``s`` of shape ``(F, N, N)``.
    """
    if isinstance(data, (bytes, bytearray)):
        try:
            data = bytes(data).decode("ascii")
        except UnicodeDecodeError as exc:
            raise ParseError("non-ASCII byte in file", bytes(data).count(b"\n", 0, exc.start) + 1) from None
    if n_ports < 1:
        raise ParseError(f"port count must be positive, got {n_ports}")
    per_record = 1 + 2 * n_ports * n_ports
    scale = fmt = z0 = None
    records: list[list[float]] = []
    record_lines: list[int] = []
    current: list[float] = []
    noise = False
    for lineno, raw in enumerate(data.split("\n"), start=1):
        text = raw.split("!", 1)[0].strip()
        if not text:
            continue
        if text.startswith("["):
            raise ParseError("Touchstone v2 keywords are not supported", lineno)
        if text.startswith("#"):
            if scale is not None:
                raise ParseError("duplicate option line", lineno)
            scale, _, fmt, z0 = _options(text[1:].split(), lineno)
            continue
        if scale is None:
            raise ParseError("data before the option line", lineno)
        if noise:
            continue
        values = [_number(tok, lineno) for tok in text.split()]
        if not current:
            if n_ports == 2 and records and values[0] * scale <= records[-1][0]:
                noise = True  # two-port noise parameter block follows the S data
                continue
            record_lines.append(lineno)
        elif n_ports <= 2:
            raise ParseError("record continues past the end of its line", lineno)
        current.extend(values)
        if len(current) > per_record:
            raise ParseError(f"record has {len(current)} values, expected {per_record}", lineno)
        if len(current) == per_record:
            current[0] *= scale
            if not 0 <= current[0] < np.inf:
                raise ParseError("frequency must be finite and non-negative", record_lines[-1])
            if records and current[0] <= records[-1][0]:
                raise ParseError("frequencies must be strictly increasing", record_lines[-1])
            records.append(current)
            current = []
        elif n_ports <= 2:
            raise ParseError(f"record has {len(current)} values, expected {per_record}", lineno)
    if current:
        raise ParseError(f"truncated record ({len(current)} of {per_record} values)", record_lines[-1])
    if scale is None:
        raise ParseError("missing option line")
    if not records:
        raise ParseError("no network data")
    arr = np.array(records)
    freqs = arr[:, 0]
    vals = _to_complex(arr[:, 1::2], arr[:, 2::2], fmt)
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmax(~np.all(np.isfinite(vals), axis=1)))
        raise ParseError("parameter value overflows", record_lines[bad])
    s = vals.reshape(len(records), n_ports, n_ports)
    if n_ports == 2:
        s = s.transpose(0, 2, 1)
    return freqs, s, z0


def read_touchstone_all(path):
    with open(path, "rb") as fh:
        return parse_touchstone(fh.read(), ports_from_filename(path))


def select(freqs: np.ndarray, frequency: float | None = None, index: int | None = None,
           rtol: float = 1e-9) -> int:
    """Index of the requested point: explicit ``index`` or nearest ``frequency``."""
    if index is not None:
        if not -len(freqs) <= index < len(freqs):
            raise FrequencyNotFound(f"index {index} outside 0..{len(freqs) - 1}")
        return index % len(freqs)
    if frequency is None:
        if len(freqs) == 1:
            return 0
        raise FrequencyNotFound(f"file holds {len(freqs)} frequencies; select one")
    k = int(np.argmin(np.abs(freqs - frequency)))
    if abs(freqs[k] - frequency) > rtol * max(abs(frequency), 1.0):
        raise FrequencyNotFound(f"no point within tolerance of {frequency} Hz (nearest {freqs[k]} Hz)")
    return k


def read_touchstone(path, frequency: float | None = None, index: int | None = None,
                    rtol: float = 1e-9) -> MultiportNetwork:
    """Network at one frequency point of a Touchstone v1 file.

    ``frequency`` is in hertz and matched within relative ``rtol``; ``index``
    selects a point directly.  Single-point files need neither.
    """
    freqs, s, z0 = read_touchstone_all(path)
    k = select(freqs, frequency, index, rtol)
    return MultiportNetwork(s[k], "S", z0)


def _fmt_pair(v: complex, fmt: str) -> str:
    if fmt == "RI":
        a, b = v.real, v.imag
    elif fmt == "MA":
        a, b = abs(v), np.degrees(np.angle(v))
    else:
        a, b = 20 * np.log10(abs(v)), np.degrees(np.angle(v))
    return f"{float(a)!r} {float(b)!r}"


def format_touchstone(freqs: Sequence[float], s, z0: float = 50.0, fmt: str = "RI",
                      comments: Sequence[str] = ()) -> str:
    """Touchstone v1 text. Frequencies are written in Hz so RI data round-trips exactly."""
    fmt = fmt.upper()
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    s = np.asarray(s, dtype=complex)
    if s.ndim == 2:
        s = s[None]
    n = s.shape[1]
    out = io.StringIO()
    for c in comments:
        out.write(f"! {c}\n")
    out.write(f"# HZ S {fmt} R {float(z0)!r}\n")
    for f, m in zip(freqs, s):
        if n == 2:
            vals = [m[0, 0], m[1, 0], m[0, 1], m[1, 1]]
            out.write(f"{float(f)!r} " + " ".join(_fmt_pair(v, fmt) for v in vals) + "\n")
            continue
        for i in range(n):
            row = [_fmt_pair(v, fmt) for v in m[i]]
            chunks = [row[k:k + 4] for k in range(0, n, 4)]
            for j, chunk in enumerate(chunks):
                lead = f"{float(f)!r} " if i == 0 and j == 0 else ""
                out.write(lead + " ".join(chunk) + "\n")
    return out.getvalue()


def write_touchstone(target: str | os.PathLike | IO[str], freqs, s, z0: float = 50.0,
                     fmt: str = "RI") -> None:
    text = format_touchstone(freqs, s, z0, fmt)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w") as fh:
            fh.write(text)
