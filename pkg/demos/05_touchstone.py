"""
Measured S-parameters as the radio environment
==============================================

A Touchstone v1 file can stand in for the environment.  Here a synthetic
one is written to disk, read back at one frequency and terminated.
"""

import os
import tempfile

import numpy as np

import risnet
from risnet.synth import SynthConfig, random_env
from risnet.touchstone import read_touchstone, write_touchstone

sweep = np.stack([random_env(SynthConfig(seed=3, n_t=1, n_r=1, n_s=2, index=k))[0].matrix
                  for k in range(3)])
freqs = [2.4e9, 2.45e9, 2.5e9]

path = os.path.join(tempfile.mkdtemp(), "room.s4p")
write_touchstone(path, freqs, sweep)
print(open(path).read().splitlines()[0])

net = read_touchstone(path, frequency=2.45e9)
print(np.array_equal(net.matrix, sweep[1]))        # RI data round-trips exactly

net = net.with_partition(risnet.PortPartition.environment(1, 1, 2))
for loads in ([50, 50], [1 - 80j, 1 + 80j]):
    h = risnet.channel(risnet.terminate(net, loads)).h
    print(loads, abs(h[0, 0]) ** 2)
