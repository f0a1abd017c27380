"""
A small size and power table
============================

Run a handful of simulation cells: Gaussian log-basis data with AR(1)
covariance, n1 = n2 = 100, p = 200, and signals of decreasing sparsity.
Sparse signals favour the maximum test, dense ones the quadratic test; the
two combinations track whichever is better.
"""

from comptest.harness import expand_grid, run_grid

# 200 replications keeps this under a minute; the bundled configs use 500
cfgs = expand_grid(
    {"replications": 200, "master_seed": 2025, "cov": {"family": "ar1", "rho": 0.5}},
    sizes=[(100, 100, 200)],
    sparsities=[0.0, 0.01, 0.2, 0.5],
)
table = run_grid(cfgs)

print(f"{'sparsity':>8}  " + "  ".join(f"{m:>7}" for m in table.methods))
for rec in table.records():
    print(f"{rec['sparsity_fraction']:>8}  " + "  ".join(f"{rec[m]:7.3f}" for m in table.methods))

# the same table as CSV, ready for a spreadsheet
print()
print(table.to_csv())
