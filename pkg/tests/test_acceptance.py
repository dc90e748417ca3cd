"""Acceptance criteria 1-9, each at its stated tolerance.

Every test records one ``PASS``/``FAIL`` line; the lines are printed in the
terminal summary (see ``conftest.py``) and also when this file is run as a
script.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from risnet import (
    LoadCircuit,
    LoadModel,
    MultiportNetwork,
    ParseError,
    PortPartition,
    build_named,
    cascade_z,
    channel,
    effective_phi,
    map_to_dris,
    optimize_bdris,
    phi_nodal_oracle,
    star_s,
    terminate_z,
)
from risnet.experiments import VerifyConfig, run_verify
from risnet.netcore import spectral_norm
from risnet.synth import SynthConfig, random_env, random_load_circuit, random_passive_loads, rng_for
from risnet.termination import terminate_s
from risnet.touchstone import format_touchstone, parse_touchstone

from conftest import rel

RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def asymmetry(m):
    return np.max(np.abs(m - m.T)) / np.max(np.abs(m))


class Physicality:
    """Worst case of reciprocity and passivity over every network seen."""

    asym = 0.0
    norm = 0.0
    count = 0

    @classmethod
    def see(cls, *nets):
        for net in nets:
            cls.asym = max(cls.asym, asymmetry(net.matrix))
            cls.norm = max(cls.norm, spectral_norm(net.s))
            cls.count += 1


def test_c1_central_equivalence():
    start = time.perf_counter()
    ok, _, results = run_verify(VerifyConfig(trials=1000))
    elapsed = time.perf_counter() - start
    worst = max(r["discrepancy"] for r in results)
    passed = len(results) == 1000 and worst <= 1e-9 and elapsed < 10
    record(1, passed, f"1000 trials, max rel discrepancy {worst:.2e} (<= 1e-9), {elapsed:.1f} s (< 10 s)")
    assert passed


def cascade_instances(count=500):
    for k in range(count):
        rng = rng_for(2024, k)
        n_t, n_r, n_s, n_c = (int(v) for v in rng.integers(1, [3, 3, 5, 11]))
        env_s, part = random_env(SynthConfig(seed=2024, n_t=n_t, n_r=n_r, n_s=n_s, index=k))
        lc_s = random_load_circuit(SynthConfig(seed=2025, n_s=n_s, n_c=n_c, index=k))
        yield env_s, part, lc_s


def test_c2_cascade_domains_agree():
    worst, used = 0.0, 0
    for env_s, part, lc_s in cascade_instances():
        env_z = env_s.with_partition(part)
        env_z = MultiportNetwork(env_z.z, "Z", env_s.z0, partition=part)
        lc_z = LoadCircuit(MultiportNetwork(lc_s.net.z, "Z", lc_s.net.z0), lc_s.partition)
        z_route = cascade_z(env_z, lc_z).net
        s_route = star_s(env_s, lc_s).net
        worst = max(worst, rel(z_route.s, s_route.matrix))
        used += 1
    passed = used == 500 and worst <= 1e-9
    record(2, passed, f"{used} instances, max rel difference Z-cascade vs star product {worst:.2e} (<= 1e-9)")
    assert passed


def test_c3_diagonal_collapse():
    factors = np.array([1e3, 1e4, 1e5, 1e6])
    env, part = random_env(SynthConfig(seed=7, n_t=2, n_r=2, n_s=3, rep="Z"))
    psi = random_passive_loads(3, rng_for(7, 99))
    zt_dris = terminate_z(env, psi.thetas).matrix
    casc_err, zt_err = [], []
    for f in factors:
        lc = build_named("diagonal", 3, domain="Z", c=f * env.z0)
        casc = cascade_z(env, lc).net.matrix
        casc_err.append(rel(casc, env.matrix))
        net, p = map_to_dris(env, lc)
        zt_err.append(rel(terminate_z(net, psi.thetas, p).matrix, zt_dris))
    slope_casc = np.polyfit(np.log10(factors), np.log10(casc_err), 1)[0]
    slope_zt = np.polyfit(np.log10(factors), np.log10(zt_err), 1)[0]

    lc = build_named("diagonal", 3, domain="Z", c=1e6 * env.z0)
    net, p = map_to_dris(env, lc)
    h_mapped = channel(terminate_z(net, psi.thetas, p)).h
    h_dris = channel(terminate_z(env, psi.thetas)).h
    h_err = rel(h_mapped, h_dris)
    passed = abs(slope_casc + 1) <= 0.1 and abs(slope_zt + 1) <= 0.1 and h_err <= 1e-5
    record(3, passed, f"log-log slopes {slope_casc:.3f} (Z^casc vs Z), {slope_zt:.3f} (measured Z); "
                      f"channel rel error at c = 1e6 Z0 {h_err:.2e} (<= 1e-5)")
    assert passed


def test_c4_load_circuit_oracle():
    cases = [("diagonal", 3, None), ("fully_connected", 2, None), ("fully_connected", 3, None),
             ("group_connected", 4, (2, 2)), ("pi_network", 2, None)]
    worst = 0.0
    for topology, n_s, groups in cases:
        lc = build_named(topology, n_s, groups)
        for k in range(200):
            psi = random_passive_loads(lc.n_c, rng_for(404, k))
            phi = effective_phi(lc, psi)
            worst = max(worst, rel(phi, phi_nodal_oracle(lc, psi)))
    example = np.round(effective_phi(build_named("fully_connected", 2), [100, 200, 50]).real, 4)
    example_ok = np.array_equal(example, [[71.4286, 57.1429], [57.1429, 85.7143]])
    passed = worst <= 1e-8 and example_ok
    record(4, passed, f"5 topologies x 200 loads, max rel error vs nodal oracle {worst:.2e} (<= 1e-8); "
                      f"worked example {example.tolist()}")
    assert passed


def test_c5_optimizer_routes():
    lc = build_named("fully_connected", 2)
    model = LoadModel.discrete([2 - 40j, 1 + 10j, 3 + 70j])
    same_arg, worst = 0, 0.0
    for k in range(50):
        env, _ = random_env(SynthConfig(seed=505, n_t=1, n_r=1, n_s=2, index=k, rep="Z"))
        d = optimize_bdris(env, lc, model, "siso_gain", route="direct")
        c = optimize_bdris(env, lc, model, "siso_gain", route="cascaded")
        assert d.evaluations == c.evaluations == 27
        same_arg += d.best_index == c.best_index
        worst = max(worst, abs(d.best_value - c.best_value) / abs(d.best_value))
    passed = same_arg == 50 and worst <= 1e-9
    record(5, passed, f"50 environments x 27 candidates, identical argmax {same_arg}/50, "
                      f"max rel best-value difference {worst:.2e} (<= 1e-9)")
    assert passed


def test_c6_physicality():
    # rerun the ensembles of criteria 1, 2, 4 and 5 and check every terminated or cascaded network
    _, _, results = run_verify(VerifyConfig(trials=1000))
    Physicality.asym = max(r["asymmetry"] for r in results)
    Physicality.norm = max(r["spectral_norm"] for r in results)
    Physicality.count = 6 * len(results)
    for k, (env_s, part, lc_s) in enumerate(cascade_instances()):
        Physicality.see(star_s(env_s, lc_s).net,
                        terminate_s(env_s, random_passive_loads(len(part.ris), rng_for(606, k)), part),
                        terminate_s(lc_s.net, random_passive_loads(lc_s.n_c, rng_for(607, k)),
                                    lc_s.partition, which="C"))
    lc = build_named("fully_connected", 3)
    for k in range(200):
        env, part = random_env(SynthConfig(seed=505, n_t=1, n_r=1, n_s=3, index=k, rep="Z"))
        psi = random_passive_loads(lc.n_c, rng_for(404, k))
        net, p = map_to_dris(env, lc)
        phi = effective_phi(lc, psi)
        Physicality.see(net, terminate_z(net, psi, p), terminate_z(env, phi), MultiportNetwork(phi, "Z"))
    passed = Physicality.asym <= 1e-10 and Physicality.norm <= 1 + 1e-8
    record(6, passed, f"{Physicality.count} networks, max asymmetry {Physicality.asym:.2e} (<= 1e-10), "
                      f"max spectral norm {Physicality.norm:.12f} (<= 1 + 1e-8)")
    assert passed


def test_c7_micro_example():
    env = MultiportNetwork.from_z([[50, 10], [10, 20]], partition=PortPartition(2, transmit=(0,), ris=(1,)))
    lc = LoadCircuit(MultiportNetwork.from_z([[30, 5], [5, 40]]), PortPartition.load_circuit(1, 1))
    casc = cascade_z(env, lc).net.matrix
    direct = terminate_z(env, effective_phi(lc, [10.0])).matrix[0, 0].real
    net, p = map_to_dris(env, lc)
    mapped = terminate_z(net, [10.0], p).matrix[0, 0].real
    passed = (np.allclose(casc, [[48, 1], [1, 39.5]], rtol=0, atol=1e-12)
              and round(direct, 4) == round(mapped, 4) == 47.9798)
    record(7, passed, f"Z^casc {casc.real.round(4).tolist()}, measured Z {direct:.4f} (direct) "
                      f"{mapped:.4f} (cascaded)")
    assert passed


TOUCHSTONE_ALPHABET = np.frombuffer(b"0123456789.eE+-  \n\n!#[]SRIMADBGHzkK", dtype=np.uint8)


def test_c8_parser_robustness():
    rng = np.random.default_rng(808)
    exact = True
    for n in (1, 2, 3, 4, 7):
        s = rng.standard_normal((4, n, n)) + 1j * rng.standard_normal((4, n, n))
        freqs = np.sort(rng.random(4)) * 1e10
        f2, s2, z0 = parse_touchstone(format_touchstone(freqs, s, 42.5), n)
        exact &= np.array_equal(f2, freqs) and np.array_equal(s2, s) and z0 == 42.5
    valid = format_touchstone([1e9, 2e9], rng.standard_normal((2, 2, 2)), fmt="MA").encode()
    crashes, structured = [], 0
    for k in range(100_000):
        mode = k % 3
        if mode == 0:
            data = rng.integers(0, 256, int(rng.integers(0, 200)), dtype=np.uint8).tobytes()
        elif mode == 1:
            data = rng.choice(TOUCHSTONE_ALPHABET, int(rng.integers(0, 200))).tobytes()
        else:
            buf = bytearray(valid)
            for _ in range(int(rng.integers(1, 6))):
                buf[int(rng.integers(len(buf)))] = int(rng.integers(0, 256))
            data = bytes(buf)
        try:
            parse_touchstone(data, int(rng.integers(1, 4)))
        except ParseError:
            structured += 1
        except Exception as exc:  # noqa: BLE001 - anything else is a crash
            crashes.append((data, repr(exc)))
    passed = exact and not crashes
    record(8, passed, f"RI round trip exact: {bool(exact)}; 100000 fuzz inputs, {structured} structured "
                      f"errors, {len(crashes)} crashes")
    assert passed, crashes[:3]


def cli(*args):
    return subprocess.run([sys.executable, "-m", "risnet.cli", *args], capture_output=True, check=True).stdout


def test_c9_determinism(tmp_path):
    cfg = tmp_path / "compare.json"
    cfg.write_text('{"trials": 10, "budget": 3}')
    verify = [cli("verify", "--seed", "11", "--threads", t) for t in ("1", "1", "4")]
    compare = [cli("compare", "--config", str(cfg), "--seed", "11", "--threads", t) for t in ("1", "1", "4")]
    passed = len(set(verify)) == 1 and len(set(compare)) == 1 and len(verify[0]) > 0
    record(9, passed, f"verify and compare byte-identical over 2 runs and --threads 1/4 "
                      f"({len(verify[0])} and {len(compare[0])} bytes)")
    assert passed


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
