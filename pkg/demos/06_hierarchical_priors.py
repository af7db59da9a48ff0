"""
Letting the data pick the prior spread
======================================

The ideal-point prior is N(mean, variance) with three flavours: both
moments fixed, variance learned (inverse-gamma second stage), or mean and
variance both learned. On a chamber wider than the default prior, the
hierarchical fits stretch the prior instead of shrinking the positions.
"""

from dataclasses import replace

import numpy as np

from spatialvote.model import PriorKind
from spatialvote.simulate import FitSchedule, run_scenario, scenario_catalog

schedule = FitSchedule(iterations_total=1500, burn_in=300)
base = scenario_catalog()[3]

print("prior          r      width    hyper-mean   hyper-var")
for kind in (PriorKind.FIXED, PriorKind.HIER_VAR, PriorKind.HIER_MEAN_VAR):
    spec = replace(base, n=40, m=120, prior_kind=kind)
    res = run_scenario(spec, schedule)
    if res.draws.hyper_var is None:
        hyper = "     (fixed at 0, 1)"
    else:
        hyper = (f"   {np.mean(res.draws.hyper_mean):8.3f}"
                 f"    {np.mean(res.draws.hyper_var):8.3f}")
    print(f"{kind.value:12s} {res.recovery.pearson_r:6.3f}"
          f"  {res.mean_ci_width:6.3f} {hyper}")

print("\nrecovery is insensitive to the prior flavour here; the hierarchy")
print("matters when the chamber's true spread departs from the fixed prior.")
