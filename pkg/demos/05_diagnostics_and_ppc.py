"""
Judging a fitted chain
======================

Three questions after any fit: did the chain mix (effective sample
sizes), how does the model score (DIC / WAIC), and does it reproduce the
data's texture (posterior predictive checks)?
"""

from dataclasses import replace

import numpy as np

from spatialvote.diagnostics import (
    PPC_STATISTICS,
    effective_sample_size,
    information_criteria,
    posterior_predictive_check,
)
from spatialvote.simulate import FitSchedule, run_scenario, scenario_catalog

spec = replace(scenario_catalog()[3], n=40, m=120)
res = run_scenario(spec, FitSchedule(iterations_total=2000, burn_in=400))
draws, votes = res.draws, res.parliament.votes

# mixing: ESS per free ideal point, in iid-equivalent draws
anchored = set(res.anchors.indices)
ess = np.array([
    effective_sample_size(draws.ideal_points[:, i, 0])
    for i in range(votes.n) if i not in anchored
])
print(f"retained draws: {draws.n_draws}")
print(f"ideal-point ESS: min {ess.min():.0f}, median {np.median(ess):.0f}, "
      f"max {ess.max():.0f}")
print(f"log-likelihood ESS: {effective_sample_size(draws.log_likelihood):.0f}")

crit = information_criteria(draws, votes)
print(f"\ndic  = {crit.dic:.1f}  (effective parameters {crit.effective_params_dic:.1f})")
print(f"waic = {crit.waic:.1f}  (effective parameters {crit.effective_params_waic:.1f})")

# predictive checks: tail probabilities near 0 or 1 would flag misfit
print("\nstatistic                 observed   p-value")
for stat in sorted(PPC_STATISTICS):
    ppc = posterior_predictive_check(draws, votes, stat, max_replicates=400)
    print(f"{stat:25s} {ppc.observed:8.3f}   {ppc.p_value:7.3f}")
