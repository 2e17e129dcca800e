"""A quantum state whose local marginals certify genuine tripartite
nonlocality.

Every pair of parties measuring the noisy W state sees a two-qubit state that
can never violate CHSH (its Horodecki parameter is 8p^2/9 <= 8/9), so all
bipartite marginals are local for every noise weight.  Yet the marginal
witness evaluated on those same marginals crosses its hybrid-model bound 4
near p = 0.955: above that weight, any global no-signaling box compatible
with the observed marginals must be genuinely tripartite nonlocal.
"""

import numpy as np

from marginalcert import boxes as bx
from marginalcert import polytopes as pt
from marginalcert.entcert import horodecki_m
from marginalcert.quantum import (
    correlators_from_state,
    noisy_w,
    reduced_two_party,
    violation_scenario,
)

scenario = violation_scenario()
witness = bx.marginal_witness()

print("marginals are local at every weight (Horodecki parameter < 1):")
for p in (0.0, 0.5, 0.9, 1.0):
    print("  p = %.2f:  M(rho_red) = %.6f  (= 8p^2/9 = %.6f)"
          % (p, horodecki_m(reduced_two_party(3, p)), 8 * p * p / 9))

print("\nwitness value along the noise axis (bound 4):")
for p in np.linspace(0.90, 1.0, 11):
    table = correlators_from_state(noisy_w(3, p), scenario)
    val = bx.evaluate_inequality(witness, table)
    marker = "  <-- violation" if val > witness.bound else ""
    print("  p = %.3f:  %.6f%s" % (p, val, marker))

lo, hi = 0.9, 1.0
while hi - lo > 1e-7:
    mid = (lo + hi) / 2
    val = bx.evaluate_inequality(witness, correlators_from_state(noisy_w(3, mid), scenario))
    if val > witness.bound:
        hi = mid
    else:
        lo = mid
print("\nviolation threshold: p = %.6f" % ((lo + hi) / 2))

p_demo = 0.97
table = correlators_from_state(noisy_w(3, p_demo), scenario)
box = bx.box_from_correlators(table)
triple = bx.marginals(box)
print("\ncross-check via the membership LP at p = %.2f:" % p_demo)
print("  marginals inside the local-marginal polytope:",
      pt.marginal_membership_pi(triple).member)
print("  marginals inside the hybrid relaxation:",
      pt.marginal_membership_pi_prime_relaxed(triple).member)
