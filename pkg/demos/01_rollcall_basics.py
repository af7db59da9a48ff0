"""
Reading and cleaning a roll-call matrix
=======================================

Votes arrive as a delimited table: one row per legislator, one column per
motion, cells coded 1 (Yea), 0 (Nay) or NA. This walks the cleaning steps that
usually precede a fit.
"""

import numpy as np

from spatialvote import rollcall

raw = """\
legislator_id,V1,V2,V3,V4,V5,V6
alice,1,0,1,NA,1,1
bob,1,1,0,0,NA,1
carol,NA,NA,NA,NA,1,1
dave,0,1,1,1,0,1
erin,1,0,NA,1,0,1
"""

vm = rollcall.parse_vote_matrix(raw)
print(f"parsed {vm.n} legislators x {vm.m} motions")

# how patchy is the record?
rates = rollcall.missing_rates(vm)
print(f"overall missing rate: {rates.overall:.2f}")
for lid, r in zip(vm.legislator_ids, rates.per_legislator):
    print(f"  {lid:6s} missing {r:.2f}")

# carol barely voted; drop anyone below 50% participation
filtered, removed = rollcall.filter_low_participation(vm, 0.5)
print("after participation filter:", filtered.legislator_ids, "- removed", removed)

# V6 passed unanimously, so it carries no spatial information
trimmed, dropped = rollcall.drop_unanimous_motions(filtered)
print("after dropping unanimous motions:", trimmed.motion_ids)

# matrices round-trip exactly, so cleaning steps can be checkpointed
again = rollcall.parse_vote_matrix(rollcall.serialize_vote_matrix(trimmed))
assert np.array_equal(again.cells, trimmed.cells)
print("serialize/parse round-trip: exact")
