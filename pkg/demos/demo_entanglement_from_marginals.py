"""Separable two-qubit marginals that only entangled global states can have.

For the noisy W family of n qubits, the two-party reductions become separable
below the closed-form weight p_sep(n).  The marginal-compatibility program
asks: up to which weight does a PPT (hence possibly separable) global state
with exactly those reductions exist?  Its optimum p*(n) sits strictly below
p_sep(n), so for weights in (p*, p_sep] the reductions are separable while
every compatible global state is entangled.
"""

import time

from marginalcert.entcert import p_sep, p_sep_bisection, solve_pstar

print("n   p*        p_sep     window width   solve time")
for n in range(3, 8):
    t0 = time.time()
    p_star, cert = solve_pstar(n)
    dt = time.time() - t0
    psep = p_sep(n)
    print("%d   %.6f  %.6f  %.6f       %5.1f s"
          % (n, p_star, psep, psep - p_star, dt))
    checks = cert.evidence["state_checks"]
    print("    recovered optimizer: min eig %.1e, pair residual %.1e, "
          "PPT min eig %.1e" % (checks["state_min_eig"], checks["pair_residual"],
                                checks["ppt_min_eig"]))

print("\nseparability boundary, closed form vs PPT bisection:")
for n in range(3, 8):
    print("  n = %d:  %.9f  vs  %.9f" % (n, p_sep(n), p_sep_bisection(n)))

p_star3, cert = solve_pstar(3, p_query=0.52)
print("\nexample query: n = 3 reductions at weight 0.52 "
      "(separable, since 0.52 < p_sep = %.4f)" % p_sep(3))
print("verdict:", cert.verdict)
