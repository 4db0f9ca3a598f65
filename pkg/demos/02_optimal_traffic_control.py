"""Cost-optimal traffic control on an air-transport-like network.

Recreates the paper-scale workflow on a reproducible 56-node hub-spoke
surrogate (real airline traffic data is not redistributable): nominal
rates leave the outbreak unstable, a budget of 300 units of traffic
restrictions stabilizes it, and the resulting per-edge investments show
no simple relationship with edge centrality.
"""

import os

import numpy as np

from netcontain import allocation, analysis, dynamics, netgraph, spectral, svgfig

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

net = netgraph.generate_hub_spoke(8, 48, hub_weight=1.3, leaf_weight=0.5, seed=11)
beta, delta = 0.033, 0.1
lam0 = spectral.spectral_abscissa(net, np.full(net.n, beta), np.full(net.n, delta))
print(f"surrogate: n={net.n}, edges={net.num_edges}")
print(f"uncontrolled abscissa: {lam0:+.4f}  (> 0: a random initial infection spreads)")

bounds = allocation.uniform_bounds(net, beta=beta, delta=delta, w_lo_frac=0.2)
costs = allocation.default_cost_model(net, bounds, p_exp=2.0)
prob = allocation.BudgetProblem(network=net, bounds=bounds, costs=costs, budget=300.0)
res = allocation.solve_allocation(prob)
print(f"\nbudget 300 -> certified decay rate epsilon* = {res.epsilon_star:.4f}")
print(f"total spend {res.total_spend:.2f}, edges throttled to the floor: "
      f"{int(np.sum(res.w_star <= bounds.w_lo + 1e-6))}/{net.num_edges}")

# empirical verification of the certificate
traj = dynamics.integrate(
    np.full(net.n, 0.2), netgraph.reweight(net, res.w_star),
    res.beta_star, res.delta_star, t_end=120, dt=0.01,
)
fitted = dynamics.decay_rate(traj)
print(f"fitted decay of the mean-field trajectory: {fitted:.4f} (>= epsilon* - 1e-3)")

# investment vs centrality: the optimal pattern is not a centrality ranking
records = analysis.scatter_export(res, net)
inversions = sum(
    1
    for i in range(len(records) - 1)
    if records[i][2] < records[i + 1][2] - 1e-9  # lower-centrality edge invested more
)
print(f"\ncentrality-ordered investment inversions: {inversions} of {len(records) - 1} "
      "adjacent pairs (no trivial law links investment to edge centrality)")
svgfig.scatter_chart(
    [r[3] for r in records], [r[2] for r in records],
    os.path.join(OUT, "invest_vs_eigcentrality.svg"),
    title="traffic-control investment vs edge eigenvector centrality",
    xlabel="v_ij", ylabel="investment",
)
svgfig.scatter_chart(
    [r[4] for r in records], [r[2] for r in records],
    os.path.join(OUT, "invest_vs_pagerank.svg"),
    title="traffic-control investment vs edge PageRank centrality",
    xlabel="r_ij", ylabel="investment",
)
print(f"wrote scatter charts to {OUT}/")
