"""marginalcert: certify nonlocality and entanglement of multipartite
systems from their bipartite marginals alone.

The library has three layers:

* box algebra (``boxes``) and quantum-state primitives (``quantum``);
* self-contained solvers: a two-phase simplex with Farkas certificates
  (``lp``) and a primal-dual interior-point SDP solver (``sdp``);
* the certification machinery built on them: polytope memberships and
  extension bounds (``polytopes``), and the marginal-compatibility SDP
  family with analytic certificates (``entcert``).

``schemas`` fixes the JSON interchange formats and ``cli`` exposes every
pipeline as a subcommand.
"""

__version__ = "0.1.0"

from .boxes import (
    BipartiteBox,
    CorrelatorTable,
    InequalitySpec,
    MarginalTriple,
    TripartiteBox,
    box29,
    box29_correlators,
    box_from_correlators,
    chsh_max,
    correlators_from_box,
    evaluate_inequality,
    gyni_spec,
    gyni_value,
    is_nonsignaling,
    marginal_witness,
    marginals,
    svetlichny_max,
    svetlichny_spec,
    svetlichny_value,
    uniform_box,
)
from .entcert import (
    CertResult,
    DualCertificate,
    appendix_dual_certificate,
    appendix_primal_state,
    build_marginal_sdp,
    ghz_marginal_demo,
    ghz_state,
    horodecki_m,
    p_sep,
    ppt_min_eig,
    solve_pstar,
    verify_dual_certificate,
)
from .lp import LinearProgram, LpOutcome, lp_solve, verify_lp_certificate
from .polytopes import (
    ExtensionBounds,
    MembershipReport,
    VertexFamily,
    box_local_membership,
    extension_bounds,
    local_vertices,
    marginal_membership_pi,
    marginal_membership_pi_prime_relaxed,
    svetlichny_vertices,
)
from .quantum import (
    DensityMatrix,
    MeasurementScenario,
    Observable,
    correlators_from_state,
    min_eigenvalue,
    noisy_w,
    partial_trace,
    partial_transpose,
    reduced_two_party,
    tensor,
    violation_scenario,
    w_state,
)
from .sdp import SdpBlock, SdpOutcome, SdpProblem, sdp_solve
