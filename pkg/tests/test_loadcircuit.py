import numpy as np
import pytest

from risnet import (
    InvalidLoad,
    InvalidSkeleton,
    LoadCircuit,
    MultiportNetwork,
    PortPartition,
    Skeleton,
    SingularNodal,
    build_named,
    build_skeleton,
    check_properties,
    effective_phi,
    phi_nodal_oracle,
    terminate_s,
)
from risnet.loadcircuit import GND, ideal_wiring_s
from risnet.synth import random_passive_loads, rng_for

from conftest import rel

FC_EXAMPLE = np.array([[71.4286, 57.1429], [57.1429, 85.7143]])


def pi_network_z(z_series, z_sh1, z_sh2):
    """Textbook two-port impedance matrix of a pi-network."""
    total = z_series + z_sh1 + z_sh2
    return np.array([
        [z_sh1 * (z_series + z_sh2), z_sh1 * z_sh2],
        [z_sh1 * z_sh2, z_sh2 * (z_series + z_sh1)],
    ]) / total


class TestShuntLimit:
    @pytest.mark.parametrize("theta", [10.0, 50 + 30j, -75j])
    def test_single_shunt(self, theta):
        c = 1e6 * 50
        lc = LoadCircuit(MultiportNetwork.from_z([[c, c], [c, c]]), PortPartition.load_circuit(1, 1))
        phi = effective_phi(lc, [theta])[0, 0]
        assert phi == pytest.approx(c * theta / (c + theta), rel=1e-9)
        assert abs(phi - theta) / abs(theta) == pytest.approx(abs(theta) / c, rel=2e-2)

    def test_diagonal_exact_and_limit(self):
        thetas = np.array([10, 20 + 5j, -40j, 75])
        exact = effective_phi(build_named("diagonal", 4), thetas)
        assert np.max(np.abs(exact - np.diag(thetas))) < 1e-10
        approx = effective_phi(build_named("diagonal", 4, domain="Z"), thetas)
        assert rel(approx, np.diag(thetas)) < 1e-5

    def test_collapse_error_scales_inversely(self):
        thetas = random_passive_loads(3, rng_for(4, 0)).thetas
        errs = [rel(effective_phi(build_named("diagonal", 3, domain="Z", c=f * 50), thetas), np.diag(thetas))
                for f in (1e3, 1e4, 1e5, 1e6)]
        slope = np.polyfit(np.log10([1e3, 1e4, 1e5, 1e6]), np.log10(errs), 1)[0]
        assert slope == pytest.approx(-1, abs=0.1)


class TestNodalOracle:
    def test_single_shunt(self):
        skel = Skeleton(1, (0,), ((0, GND),))
        assert phi_nodal_oracle(skel, [33 + 4j])[0, 0] == pytest.approx(33 + 4j)

    def test_isolated_nodes(self):
        skel = Skeleton(2, (0, 1), ((0, GND), (1, GND)))
        assert np.allclose(phi_nodal_oracle(skel, [12.0, 7j]), np.diag([12.0, 7j]))

    def test_fully_connected_example(self):
        lc = build_named("fully_connected", 2)
        assert np.round(phi_nodal_oracle(lc, [100, 200, 50]).real, 4) == pytest.approx(FC_EXAMPLE, abs=0)
        assert np.round(effective_phi(lc, [100, 200, 50]).real, 4) == pytest.approx(FC_EXAMPLE, abs=0)

    def test_zero_load_rejected(self):
        with pytest.raises(InvalidLoad):
            phi_nodal_oracle(build_named("diagonal", 1), [0.0])

    def test_floating_node_singular(self):
        # node 1 only connects to node 0 through a series branch and carries an external port;
        # a series-only circuit has no path to ground
        skel = Skeleton(2, (0, 1), ((0, 1),))
        with pytest.raises(SingularNodal):
            phi_nodal_oracle(skel, [10.0])

    def test_internal_node_reduction(self):
        # external port at node 0; node 1 is internal: series 30 to node 1, then 20 to ground
        skel = Skeleton(2, (0,), ((1, GND), (0, 1)))
        assert phi_nodal_oracle(skel, [20.0, 30.0])[0, 0] == pytest.approx(50.0)
        assert effective_phi(build_skeleton(skel), [20.0, 30.0])[0, 0] == pytest.approx(50.0, rel=1e-12)


class TestSkeleton:
    def test_wire_plus_load_is_load(self):
        lc = build_skeleton(Skeleton(1, (0,), ((0, GND),)))
        assert lc.net.n_ports == 2
        assert effective_phi(lc, [42 - 7j])[0, 0] == pytest.approx(42 - 7j, rel=1e-12)

    def test_junction_formula(self):
        for n in (2, 3, 5):
            s = ideal_wiring_s(np.ones((1, n)))
            assert np.allclose(s, 2.0 / n * np.ones((n, n)) - np.eye(n), atol=1e-15)

    def test_pi_network(self):
        lc = build_named("pi_network", 2)
        assert lc.skeleton.branches == ((0, GND), (1, GND), (0, 1))
        z_sh1, z_sh2, z_series = 40 + 10j, 65.0, 25 - 30j
        phi = effective_phi(lc, [z_sh1, z_sh2, z_series])
        assert rel(phi, pi_network_z(z_series, z_sh1, z_sh2)) < 1e-12
        assert rel(phi, phi_nodal_oracle(lc, [z_sh1, z_sh2, z_series])) < 1e-12

    @pytest.mark.parametrize("n_s, n_c", [(1, 1), (2, 3), (3, 6), (4, 10)])
    def test_fully_connected_counts(self, n_s, n_c):
        assert build_named("fully_connected", n_s).n_c == n_c

    def test_diagonal_count(self):
        assert build_named("diagonal", 4).n_c == 4

    def test_group_counts(self):
        lc = build_named("group_connected", 5, groups=(2, 3))
        assert lc.n_c == 3 + 6 and lc.groups == (2, 3)

    def test_canonical_branch_order(self):
        skel = Skeleton(3, (0, 1, 2), ((2, 1), (1, "gnd"), (0, 2), (0, GND)))
        assert skel.branches == ((0, GND), (1, GND), (0, 2), (1, 2))

    @pytest.mark.parametrize("topology, kw", [
        ("diagonal", {"n_s": 3}),
        ("fully_connected", {"n_s": 3}),
        ("group_connected", {"n_s": 4, "groups": (2, 2)}),
        ("pi_network", {"n_s": 2}),
    ])
    def test_lossless_reciprocal(self, topology, kw):
        s = build_named(topology, **kw).net.matrix
        assert np.max(np.abs(s.conj().T @ s - np.eye(s.shape[0]))) <= 1e-10
        assert np.max(np.abs(s - s.T)) <= 1e-12
        assert check_properties(build_named(topology, **kw).net).lossless

    def test_invalid(self):
        with pytest.raises(InvalidSkeleton):
            Skeleton(2, (0, 2), ((0, GND),))
        with pytest.raises(InvalidSkeleton):
            Skeleton(2, (0,), ())
        with pytest.raises(InvalidSkeleton):
            Skeleton(2, (0,), ((1, 1),))
        with pytest.raises(InvalidSkeleton):
            build_named("group_connected", 4, groups=(2, 1))
        with pytest.raises(InvalidSkeleton):
            build_named("pi_network", 3)

    def test_dict_round_trip(self):
        skel = Skeleton(3, (0, 2), ((0, GND), (0, 1), (1, 2)))
        assert Skeleton.from_dict(skel.to_dict()) == skel
        assert skel.to_dict()["branches"][0] == [0, "gnd"]

    def test_shunt_approximation_matches_shunted_oracle(self):
        lc = build_named("fully_connected", 3)
        thetas = random_passive_loads(6, rng_for(1, 0)).thetas
        c = 1e4 * 50
        assert rel(effective_phi(lc.with_shunt(c), thetas), phi_nodal_oracle(lc, thetas, shunt=c)) < 1e-9


TOPOLOGIES = [
    ("diagonal", 3, None),
    ("fully_connected", 2, None),
    ("fully_connected", 3, None),
    ("group_connected", 4, (2, 2)),
    ("pi_network", 2, None),
]


@pytest.mark.parametrize("topology, n_s, groups", TOPOLOGIES)
def test_effective_phi_matches_oracle(topology, n_s, groups):
    lc = build_named(topology, n_s, groups)
    worst = 0.0
    for k in range(200):
        psi = random_passive_loads(lc.n_c, rng_for(k, 17))
        phi = effective_phi(lc, psi)
        worst = max(worst, rel(phi, phi_nodal_oracle(lc, psi)))
        assert np.max(np.abs(phi - phi.T)) <= 1e-10 * np.max(np.abs(phi))
    assert worst < 1e-8


def test_group_connected_block_diagonal():
    lc = build_named("group_connected", 4, groups=(2, 2))
    for k in range(50):
        phi = effective_phi(lc, random_passive_loads(lc.n_c, rng_for(k, 5)))
        off = np.concatenate([phi[:2, 2:].ravel(), phi[2:, :2].ravel()])
        assert np.linalg.norm(off) < 1e-8 * np.linalg.norm(phi)


def test_s_domain_reduction_matches_terminate_s():
    lc = build_named("fully_connected", 2)
    s_red = terminate_s(lc.net, [100, 200, 50], which="C").matrix
    phi = effective_phi(lc, [100, 200, 50])
    assert rel(50 * np.linalg.solve(np.eye(2) - s_red, np.eye(2) + s_red), phi) < 1e-12
