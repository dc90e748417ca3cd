"""
From BD-RIS to D-RIS by cascading
=================================

Cascading the radio environment with the load circuit gives a bigger network
whose extra ports are the circuit's load ports.  Terminating those with a
diagonal load vector gives the same channel as terminating the environment
with the effective load matrix.
"""

import numpy as np

import risnet
from risnet.synth import SynthConfig, random_env, random_load_circuit, random_passive_loads, rng_for

# the small hand example: one antenna, one RIS element, one load
env = risnet.MultiportNetwork.from_z([[50, 10], [10, 20]],
                                     partition=risnet.PortPartition(2, transmit=(0,), ris=(1,)))
lc = risnet.LoadCircuit(risnet.MultiportNetwork.from_z([[30, 5], [5, 40]]),
                        risnet.PortPartition.load_circuit(1, 1))
print(risnet.cascade_z(env, lc).net.matrix.real)      # [[48, 1], [1, 39.5]]

phi = risnet.effective_phi(lc, [10.0])
print(risnet.terminate_z(env, phi).matrix.real)        # 47.9798

net, part = risnet.map_to_dris(env, lc)
print(risnet.terminate_z(net, [10.0], part).matrix.real)

# a random instance: 2 tx, 2 rx, 3 RIS elements, 6 loads
env, _ = random_env(SynthConfig(seed=1, n_t=2, n_r=2, n_s=3, rep="Z"))
lc = random_load_circuit(SynthConfig(seed=2, n_s=3, n_c=6, rep="Z"))
psi = random_passive_loads(6, rng_for(3, 0))

h_direct = risnet.channel(risnet.terminate_z(env, risnet.effective_phi(lc, psi))).h
net, part = risnet.map_to_dris(env, lc)
h_casc = risnet.channel(risnet.terminate_z(net, psi, part)).h
print(np.linalg.norm(h_direct - h_casc) / np.linalg.norm(h_casc))   # ~1e-15

# the scattering-domain star product gives the same cascaded network
env_s = risnet.z_to_s(env)
lc_s = risnet.LoadCircuit(risnet.z_to_s(lc.net), lc.partition)
star = risnet.star_s(env_s, lc_s).net
print(np.abs(star.matrix - risnet.z_to_s(net).matrix).max())

# reciprocity and passivity survive every step
print(risnet.check_properties(star))
