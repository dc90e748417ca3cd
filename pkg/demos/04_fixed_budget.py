"""
Fixed number of elements versus fixed number of loads
=====================================================

A fully-connected BD-RIS with N_S elements needs N_S(N_S+1)/2 tunable loads.
The comparison experiment optimises a D-RIS with M loads, a fully-connected
BD-RIS with the same number of elements, and one with about M loads.
"""

import csv
import io

import numpy as np

from risnet.experiments import CompareConfig, rows_to_csv, run_compare

rows = run_compare(CompareConfig(trials=20, budget=3, seed=1))
table = list(csv.DictReader(io.StringIO(rows_to_csv(rows))))

for variant in ("dris", "bdris_fixed_ns", "bdris_fixed_nc"):
    vals = np.array([float(r["value"]) for r in table if r["topology"] == variant])
    r = next(r for r in table if r["topology"] == variant)
    print(f"{variant:15s} N_S={r['n_s']} N_C={r['n_c']}  mean gain {vals.mean():.4f}  "
          f"median {np.median(vals):.4f}")
