"""netcontain: budget-optimal protection of networks against spreading
processes.

Computes cost-optimal allocations of edge traffic-control, node
preventive (vaccine), and node corrective (antidote) resources that
maximize the exponential decay rate of an outbreak on a weighted directed
contact network, by solving a geometric program exactly, and verifies
solutions by spectral analysis and dynamical simulation.
"""

from .netgraph import (
    ContactNetwork,
    adjacency,
    generate_cycle_plus_random,
    generate_hub_spoke,
    is_strongly_connected,
    load_edgelist,
    reweight,
    save_edgelist,
)
from .spectral import (
    PerronPair,
    perron,
    perron_oracle,
    sensitivity_beta,
    sensitivity_delta,
    spectral_abscissa,
)
from .posy import (
    GpProgram,
    Monomial,
    Posynomial,
    VariableRegistry,
)
from .gpsolve import SolverConfig, Solution, phase_one, solve
from .allocation import (
    AllocationResult,
    BudgetProblem,
    CostModel,
    ResourceBounds,
    brute_force_allocation,
    build_gp,
    default_cost_model,
    solve_allocation,
    traffic_cost,
    uniform_bounds,
)
from .dynamics import (
    TrajectorySeries,
    decay_rate,
    exact_marginals,
    gillespie,
    integrate,
    linear_bound_trajectory,
    meanfield_rhs,
)
from .analysis import (
    budget_sweep,
    edge_centralities,
    eigenvector_centrality,
    pagerank,
    scatter_export,
)

__version__ = "0.1.0"
