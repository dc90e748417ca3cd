"""
Effective load matrix of a load circuit
=======================================

A beyond-diagonal RIS connects its elements through a passive load circuit.
Seen from the RIS ports, the whole circuit collapses to one load matrix Phi.
"""

import numpy as np

import risnet

# a fully-connected circuit for two RIS elements: one shunt load per element
# plus a series load between them, so three tunable loads in total
lc = risnet.build_named("fully_connected", 2)
print(lc.skeleton.branches)        # ((0, None), (1, None), (0, 1)); None is ground
print(lc.net.n_ports)              # 2 connection ports + 3 load ports

phi = risnet.effective_phi(lc, [100, 200, 50])
print(np.round(phi.real, 4))

# the same matrix from plain nodal analysis of the circuit
print(np.round(risnet.phi_nodal_oracle(lc, [100, 200, 50]).real, 4))

# with reactive loads the effective load is reactive too
phi = risnet.effective_phi(lc, [-40j, 25j, 80j])
print(np.abs(phi.real).max())      # ~1e-14

# group-connected: two independent fully-connected groups
lc = risnet.build_named("group_connected", 4, groups=(2, 2))
phi = risnet.effective_phi(lc, np.arange(1, lc.n_c + 1) * 10.0)
print(np.round(phi.real, 3))       # block diagonal

# a diagonal circuit approximated in the impedance domain with a big shunt c
# only approaches the loads themselves; the error falls off as 1/c
thetas = np.array([10, 30 + 20j, -50j])
for c in (1e3, 1e4, 1e5, 1e6):
    lc = risnet.build_named("diagonal", 3, domain="Z", c=c * 50)
    err = np.linalg.norm(risnet.effective_phi(lc, thetas) - np.diag(thetas)) / np.linalg.norm(thetas)
    print(f"c = {c:.0e} Z0   rel error {err:.2e}")
