"""
Optimising a BD-RIS with a D-RIS search
=======================================

Because the cascaded network is an ordinary D-RIS problem, an unmodified
search over diagonal loads optimises a BD-RIS.
"""

import numpy as np

import risnet
from risnet.synth import SynthConfig, random_env

env, _ = random_env(SynthConfig(seed=5, n_t=1, n_r=1, n_s=2, rep="Z"))
lc = risnet.build_named("fully_connected", 2)
states = risnet.LoadModel.discrete([2 - 40j, 1 + 10j, 3 + 70j])

direct = risnet.optimize_bdris(env, lc, states, "siso_gain", route="direct")
casc = risnet.optimize_bdris(env, lc, states, "siso_gain", route="cascaded")
print(direct.best_index, direct.best_value)
print(casc.best_index, casc.best_value)   # same loads, same gain

# the plain D-RIS with one load per element, for reference
print(risnet.exhaustive(env, states, "siso_gain").best_value)

# coordinate descent on a larger grid, seeded restarts
grid = risnet.LoadModel.reactive_grid(-200, 200, 21)
cd = risnet.optimize_bdris(env, lc, grid, "siso_gain", algo="coordinate_descent", restarts=8, seed=0)
ex = risnet.optimize_bdris(env, lc, grid, "siso_gain")
print(cd.best_value / ex.best_value, cd.evaluations, ex.evaluations)
print([round(v, 5) for _, v in cd.trace])
