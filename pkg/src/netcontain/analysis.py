"""Centralities, budget sweeps, and edge-investment scatter data.

Edge centralities follow the product convention: an edge inherits the
product of its endpoint node centralities, for both the dominant-
eigenvector centrality and PageRank.  Budget sweeps trace the certified
decay rate as a function of total investment and carry the analytic
saturation rate (all enabled resources at their most protective bound)
for comparison.
"""

from dataclasses import dataclass

import numpy as np

from . import gpsolve
from .allocation import (
    InfeasibleError,
    IterationLimitError,
    BudgetProblem,
    solve_allocation,
)
from .netgraph import adjacency, reweight
from .spectral import perron, spectral_abscissa

__all__ = [
    "SweepRow",
    "eigenvector_centrality",
    "pagerank",
    "edge_centralities",
    "budget_sweep",
    "saturation_epsilon",
    "scatter_export",
]

PAGERANK_DAMPING = 0.85
PAGERANK_TOL = 1e-12


def eigenvector_centrality(net):
    """Right dominant eigenvector of the adjacency matrix, L1-normalized."""
    v = perron(adjacency(net)).right
    return v / v.sum()


def pagerank(net, damping=PAGERANK_DAMPING):
    """Stationary vector of the damped, out-weight-normalized random walk.

    Transition probabilities are proportional to outgoing edge weights
    (weights read as traffic volumes); strong connectivity rules out
    dangling nodes.  Power iteration runs to an L1 residual of 1e-12.
    """
    if not (0 < damping < 1):
        raise ValueError("damping must lie in (0, 1)")
    A = adjacency(net)
    out_weight = A.sum(axis=0)
    if np.any(out_weight <= 0):
        raise ValueError("every node needs outgoing weight (graph not strongly connected?)")
    P = A / out_weight  # column-stochastic
    n = net.n
    r = np.full(n, 1.0 / n)
    for _ in range(100_000):
        r_new = damping * (P @ r) + (1.0 - damping) / n
        if np.abs(r_new - r).sum() <= PAGERANK_TOL:
            r = r_new
            break
        r = r_new
    return r / r.sum()


def edge_centralities(net):
    """Per-edge (eigenvector, PageRank) products aligned with ``net.edges``.

    The centrality of edge (src -> dst) is the product of the endpoint
    node values, so the two orientations of a bidirected pair coincide.
    """
    v = eigenvector_centrality(net)
    r = pagerank(net)
    return [
        (src, dst, float(v[src] * v[dst]), float(r[src] * r[dst]))
        for src, dst, _ in net.edges
    ]


@dataclass(frozen=True)
class SweepRow:
    budget: float
    epsilon_star: float
    lambda_star: float
    total_spend: float
    status: str


def saturation_epsilon(prob_template):
    """Decay rate with every enabled resource at its most protective bound.

    This is the ceiling any budget can reach: traffic at the floors,
    infection rates at the floors, recovery rates at the caps.
    """
    b = prob_template.bounds
    net = prob_template.network
    beta = b.beta_lo if prob_template.enable_prevention else b.beta_hi
    delta = b.delta_hi if prob_template.enable_correction else b.delta_lo
    sat_net = reweight(net, b.w_lo) if prob_template.enable_traffic else net
    return float(-spectral_abscissa(sat_net, beta, delta))


def budget_sweep(prob_template, budgets, cfg=None):
    """Re-solve the allocation problem across a sorted budget list.

    Solver failures are recorded in the row status and the sweep moves
    on.  Returns rows in budget order.
    """
    budgets = [float(c) for c in budgets]
    if any(c < 0 for c in budgets):
        raise ValueError("budgets must be nonnegative")
    if sorted(budgets) != budgets:
        raise ValueError("budgets must be sorted ascending")
    cfg = cfg or gpsolve.SolverConfig()
    rows = []
    for c in budgets:
        prob = BudgetProblem(
            network=prob_template.network,
            bounds=prob_template.bounds,
            costs=prob_template.costs,
            budget=c,
            enable_traffic=prob_template.enable_traffic,
            enable_prevention=prob_template.enable_prevention,
            enable_correction=prob_template.enable_correction,
        )
        try:
            res = solve_allocation(prob, cfg)
            rows.append(
                SweepRow(
                    budget=c,
                    epsilon_star=res.epsilon_star,
                    lambda_star=res.lambda_star,
                    total_spend=res.total_spend,
                    status=gpsolve.OPTIMAL,
                )
            )
        except InfeasibleError:
            rows.append(SweepRow(c, np.nan, np.nan, np.nan, gpsolve.INFEASIBLE))
        except IterationLimitError:
            rows.append(SweepRow(c, np.nan, np.nan, np.nan, gpsolve.ITERATION_LIMIT))
    return rows


def scatter_export(result, net):
    """Per-edge records (src, dst, investment, v_ij, r_ij) for scatter plots.

    ``investment`` is the realized per-edge traffic spend from the
    allocation result (zero in the absence of throttling).  Records are
    sorted by eigenvector centrality, descending.
    """
    cents = edge_centralities(net)
    invest = result.spend["traffic"]
    records = [
        (src, dst, float(invest[e]), vc, rc)
        for e, (src, dst, vc, rc) in enumerate(cents)
    ]
    records.sort(key=lambda rec: (-rec[3], rec[0], rec[1]))
    return records
