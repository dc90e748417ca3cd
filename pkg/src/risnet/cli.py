"""Command-line front end.

Exit codes: 0 success, 1 numerical or property failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from . import __version__
from .cascade import map_to_dris
from .errors import (
    ConfigError,
    InvalidLoad,
    InvalidPartition,
    InvalidSkeleton,
    NetworkError,
    ParseError,
    PartitionMismatch,
    ReferenceImpedanceMismatch,
    SearchSpaceTooLarge,
    SingularMatrixError,
)
from .experiments import CompareConfig, VerifyConfig, rows_to_csv, run_compare, run_verify
from .jsonio import complex_from_json, complex_to_json, dumps_network, load_json, read_network
from .loadcircuit import LoadCircuit, Skeleton, build_named, build_skeleton, effective_phi
from .netcore import MultiportNetwork, PortPartition
from .synth import SynthConfig, random_env, random_load_circuit
from .termination import LoadVector, channel, terminate
from .touchstone import read_touchstone

THREADS_ENV = "RISNET_THREADS"

_USAGE_ERRORS = (ConfigError, ParseError, InvalidSkeleton, InvalidPartition, PartitionMismatch,
                 ReferenceImpedanceMismatch, InvalidLoad, SearchSpaceTooLarge)


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if n < 1:
        raise ConfigError("thread count must be at least 1")
    return n


def _config(args) -> dict:
    if args.config is None:
        return {}
    data = load_json(args.config)
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    return data


def _merged(args, keys) -> dict:
    """Configuration file values overridden by explicitly given flags."""
    cfg = _config(args)
    unknown = set(cfg) - set(keys)
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _json_arg(value):
    """Inline JSON, or the path of a JSON file."""
    if isinstance(value, str):
        if os.path.exists(value):
            return load_json(value)
        try:
            return json.loads(value)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"neither a file nor valid JSON: {value[:60]!r} ({exc.msg})") from None
    return value


def _loads(value) -> LoadVector:
    if value is None:
        raise ConfigError("loads are required")
    return LoadVector(complex_from_json(_json_arg(value), 1))


def _load_circuit(cfg: dict) -> LoadCircuit:
    domain = cfg.get("domain", "S")
    if cfg.get("lc") is not None:
        net = read_network(cfg["lc"])
        if net.partition is None:
            raise ConfigError("load circuit file needs a partition with 'Sbar' and 'C'")
        return LoadCircuit(net, net.partition)
    if cfg.get("skeleton") is not None:
        data = _json_arg(cfg["skeleton"])
        if not isinstance(data, dict):
            raise ConfigError("skeleton must be a JSON object")
        shunt = cfg.get("c") if domain == "Z" else None
        if domain == "Z" and shunt is None:
            shunt = 1e6 * 50.0
        return build_skeleton(Skeleton.from_dict(data), shunt=shunt)
    if cfg.get("topology") is not None:
        groups = cfg.get("groups")
        if isinstance(groups, str):
            groups = [int(g) for g in groups.split(",") if g]
        if cfg.get("n_s") is None:
            raise ConfigError("named topology needs n_s")
        return build_named(cfg["topology"], int(cfg["n_s"]), groups, domain=domain, c=cfg.get("c"))
    raise ConfigError("give a load circuit: lc, skeleton or topology")


def _network(cfg: dict) -> MultiportNetwork:
    path = cfg.get("network")
    if path is None:
        raise ConfigError("a network file is required")
    if re.search(r"\.s\d+p\Z", str(path), re.IGNORECASE):
        net = read_touchstone(path, cfg.get("frequency"), cfg.get("index"))
    else:
        net = read_network(path)
    if cfg.get("partition") is not None:
        part = _json_arg(cfg["partition"])
        if not isinstance(part, dict):
            raise ConfigError("partition must be a JSON object")
        net = net.with_partition(PortPartition.from_dict(part, net.n_ports))
    return net


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.seed is not None:
        cfg["seed"] = args.seed
    vc = VerifyConfig.from_dict(cfg)
    ok, rows, results = run_verify(vc, _threads(args))
    _emit(rows_to_csv(rows), args.out)
    worst = max(r["discrepancy"] for r in results)
    failed = sum(not r["ok"] for r in results)
    print(f"verify: {len(results)} trials, max relative discrepancy {worst:.3e}, "
          f"{failed} failing", file=sys.stderr)
    return 0 if ok else 1


def cmd_compare(args) -> int:
    cfg = _config(args)
    if args.seed is not None:
        cfg["seed"] = args.seed
    cc = CompareConfig.from_dict(cfg)
    rows = run_compare(cc, _threads(args))
    _emit(rows_to_csv(rows), args.out)
    return 0 if all(np.isfinite(r["value"]) for r in rows) else 1


_LC_KEYS = ("lc", "skeleton", "topology", "n_s", "groups", "domain", "c")


def cmd_phi(args) -> int:
    cfg = _merged(args, _LC_KEYS + ("loads",))
    lc = _load_circuit(cfg)
    phi = effective_phi(lc, _loads(cfg.get("loads")))
    _emit(dumps_network(MultiportNetwork(phi, "Z", lc.net.z0,
                                         labels=[lc.net.labels[i] for i in lc.partition.connection])),
          args.out)
    return 0


def cmd_cascade(args) -> int:
    cfg = _merged(args, _LC_KEYS + ("env", "route"))
    if cfg.get("env") is None:
        raise ConfigError("an environment network file is required")
    env = read_network(cfg["env"])
    lc = _load_circuit(cfg)
    net, part = map_to_dris(env, lc, domain=cfg.get("route") or "auto")
    _emit(dumps_network(net, part), args.out)
    return 0


def cmd_channel(args) -> int:
    cfg = _merged(args, ("network", "partition", "loads", "frequency", "index"))
    net = _network(cfg)
    if net.partition is None:
        raise ConfigError("channel extraction needs a partition with 'T' and 'R'")
    if net.partition.ris:
        net = terminate(net, _loads(cfg.get("loads")))
    h = channel(net).h
    _emit(json.dumps({"h": complex_to_json(h), "z0": net.z0}, indent=1) + "\n", args.out)
    return 0


def cmd_gen(args) -> int:
    keys = ("kind", "n_t", "n_r", "n_s", "n_c", "eta", "rep", "index", "decoupled", "lossless", "seed")
    cfg = _merged(args, keys)
    kind = cfg.pop("kind", "env")
    try:
        sc = SynthConfig(**cfg)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if kind == "env":
        net, part = random_env(sc)
    elif kind == "lc":
        lc = random_load_circuit(sc)
        net, part = lc.net, lc.partition
    else:
        raise ConfigError(f"kind must be 'env' or 'lc', got {kind!r}")
    _emit(dumps_network(net, part), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int, help="base seed (unsigned 64-bit)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--threads", type=int,
                        help=f"worker threads (default: ${THREADS_ENV} or 1)")

    p = argparse.ArgumentParser(prog="risnet", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", parents=[common], help="route-equivalence ensemble (CSV)")
    sp.set_defaults(func=cmd_verify)
    sp = sub.add_parser("compare", parents=[common], help="fixed N_S vs fixed N_C comparison (CSV)")
    sp.set_defaults(func=cmd_compare)

    def lc_flags(sp):
        sp.add_argument("--lc", help="load circuit network JSON (partition Sbar/C)")
        sp.add_argument("--skeleton", help="skeleton JSON file or inline JSON")
        sp.add_argument("--topology", choices=["diagonal", "fully_connected", "group_connected", "pi_network"])
        sp.add_argument("--n-s", dest="n_s", type=int)
        sp.add_argument("--groups", help="comma-separated group sizes")
        sp.add_argument("--domain", choices=["S", "Z"], help="exact wiring (S) or shunt approximation (Z)")
        sp.add_argument("--c", type=float, help="shunt impedance for --domain Z (ohms)")

    sp = sub.add_parser("phi", parents=[common], help="effective load matrix of a load circuit")
    lc_flags(sp)
    sp.add_argument("--loads", help="[[re, im], ...] inline or file")
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("cascade", parents=[common], help="cascade environment and load circuit")
    lc_flags(sp)
    sp.add_argument("--env", help="environment network JSON (partition T/R/S)")
    sp.add_argument("--route", choices=["auto", "Z", "S"], help="impedance cascade or star product")
    sp.set_defaults(func=cmd_cascade)

    sp = sub.add_parser("channel", parents=[common], help="channel matrix of a network")
    sp.add_argument("--network", help="network JSON or Touchstone .sNp file")
    sp.add_argument("--partition", help='port roles, e.g. {"T":[0],"R":[1],"S":[2]}')
    sp.add_argument("--loads", help="RIS loads [[re, im], ...] inline or file")
    sp.add_argument("--frequency", type=float, help="Touchstone frequency point (Hz)")
    sp.add_argument("--index", type=int, help="Touchstone frequency index")
    sp.set_defaults(func=cmd_channel)

    sp = sub.add_parser("gen", parents=[common], help="emit a synthesized network file")
    sp.add_argument("--kind", choices=["env", "lc"])
    for name in ("n_t", "n_r", "n_s", "n_c", "index"):
        sp.add_argument("--" + name.replace("_", "-"), dest=name, type=int)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--rep", choices=["S", "Z"])
    sp.add_argument("--decoupled", action="store_const", const=True)
    sp.add_argument("--lossless", action="store_const", const=True)
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args)
    except SingularMatrixError as exc:
        print(f"risnet: numerical failure: {exc}", file=sys.stderr)
        return 1
    except _USAGE_ERRORS as exc:
        print(f"risnet: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"risnet: {exc}", file=sys.stderr)
        return 2
    except NetworkError as exc:
        print(f"risnet: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
