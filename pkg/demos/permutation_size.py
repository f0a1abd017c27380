"""
Empirical size by label permutation
===================================

Pool two groups drawn from one distribution, shuffle the labels many times
and count how often each test rejects. A well calibrated test rejects
close to alpha = 0.05 of the time.
"""

from comptest.distributions import RngStream
from comptest.harness import permutation_size_study
from comptest.simulate import Scenario, ScenarioConfig

# one null data set: 150 samples, 226 taxa, no mean difference
cfg = ScenarioConfig(75, 75, 226, replications=1, master_seed=7)
data = Scenario(cfg).sample(0)

for n1, n2 in [(75, 75), (50, 100)]:
    study = permutation_size_study(data, n1, n2, n_perms=300, alpha=0.05,
                                   rng=RngStream(7).derive("permute", n1, n2))
    cells = "  ".join(f"{m}={r:.3f}" for m, r in study.rates.items())
    print(f"split ({n1},{n2}): {cells}")
