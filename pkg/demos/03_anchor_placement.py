"""
How anchor placement shapes the fitted space
============================================

Two legislators are pinned at -1 and +1 to fix location, scale and
reflection. The catalog's first five scenarios fit the same chamber with
different anchor pairs: centrists, one flank, the other flank, opposite
flanks, and the two extremes. Recovery barely moves, which is the point:
anchoring is an identification device, not a modelling choice.

Runs the five fits at reduced scale; expect half a minute or so.
"""

from dataclasses import replace

from spatialvote.simulate import FitSchedule, run_scenario, scenario_catalog

schedule = FitSchedule(iterations_total=1200, burn_in=200)

print(f"{'scenario':11s} {'anchor plan':13s} {'anchored':9s} "
      f"{'r':>6s} {'dic':>9s} {'width':>7s}")
for spec in scenario_catalog()[:5]:
    small = replace(spec, n=40, m=100)
    res = run_scenario(small, schedule)
    ids = [res.parliament.votes.legislator_ids[i] for i in res.anchors.indices]
    plan = (f"{spec.anchor_targets}" if spec.anchor_targets != "extremes"
            else "extremes")
    print(f"{spec.name:11s} {plan:13s} {'/'.join(ids):9s}"
          f" {res.recovery.pearson_r:6.3f} {res.criteria.dic:9.1f}"
          f" {res.mean_ci_width:7.3f}")

print("\nthe anchored pair differs, the recovered ordering does not;")
print("interval widths shift a little because the anchors' distance in the")
print("true space sets the effective scale of the fitted one.")
