import numpy as np
import pytest

from netcontain import allocation as al
from netcontain import gpsolve, netgraph, posy, spectral


def two_cycle(w01=1.0, w10=1.0):
    return netgraph.ContactNetwork(2, ((0, 1, w01), (1, 0, w10)))


def traffic_problem(net, beta, delta, budget, w_lo_frac=0.2, p_exp=2.0):
    bounds = al.uniform_bounds(net, beta=beta, delta=delta, w_lo_frac=w_lo_frac)
    costs = al.default_cost_model(net, bounds, p_exp=p_exp)
    return al.BudgetProblem(network=net, bounds=bounds, costs=costs, budget=budget)


def correction_problem(budget, coeff=1.0):
    # 2-cycle, w and beta pinned, recovery adjustable in [0.5, 2.0]
    net = two_cycle()
    bounds = al.ResourceBounds(
        beta_lo=np.array([1.0, 1.0]), beta_hi=np.array([1.0, 1.0]),
        delta_lo=np.array([0.5, 0.5]), delta_hi=np.array([2.0, 2.0]),
        w_lo=np.array([1.0, 1.0]), w_hi=np.array([1.0, 1.0]),
    )
    costs = al.default_cost_model(net, bounds, correction_coeff=coeff)
    return al.BudgetProblem(
        network=net, bounds=bounds, costs=costs, budget=budget,
        enable_traffic=False, enable_correction=True,
    )


# ---------------------------------------------------------------- cost models


def test_traffic_cost_frozen_values():
    term = al.traffic_cost(2.0, 1.0)
    assert term.true_cost(1.0) == pytest.approx(0.0, abs=1e-12)
    assert term.true_cost(0.25) == pytest.approx(2.0)  # 2*(2 - 1)
    assert term.true_cost(0.2) == pytest.approx(2 * (0.2 ** -0.5 - 1.0))  # ~2.4721
    with pytest.raises(ValueError):
        al.traffic_cost(0.0, 1.0)
    with pytest.raises(ValueError):
        al.traffic_cost(2.0, -1.0)


def test_prevention_cost_shape():
    term = al.prevention_cost(1.0, 0.5)
    assert term.true_cost(0.5) == pytest.approx(0.0, abs=1e-12)
    assert term.true_cost(0.25) == pytest.approx(2.0)  # 1/0.25 - 1/0.5
    assert term.true_cost(0.3) > term.true_cost(0.4)  # decreasing


def test_correction_cost_shape():
    term = al.correction_cost(1.0, 0.5, 3.0)
    # true cost at recovery delta evaluates at dhat = 3 - delta
    assert term.true_cost(3.0 - 0.5) == pytest.approx(0.0, abs=1e-12)
    assert term.true_cost(3.0 - 2.0) == pytest.approx(1.8)  # 3/1 - 3/2.5
    assert term.true_cost(1.5) > term.true_cost(2.0)  # decreasing in dhat


def test_cost_monotonicity_validated_at_corners():
    net = two_cycle()
    bounds = al.uniform_bounds(net, beta=0.3, delta=0.1, w_lo_frac=0.2)
    costs = al.default_cost_model(net, bounds)
    # an increasing "traffic cost" must be rejected
    rising = al.CostTerm(
        poly=posy.Posynomial((posy.monomial(1.0, {al.COST_VAR: 1.0}),)), offset=0.0
    )
    bad = al.CostModel(
        prevention=costs.prevention, correction=costs.correction,
        traffic=(rising,) * net.num_edges, delta_cap=costs.delta_cap,
    )
    with pytest.raises(ValueError, match="decreasing"):
        al.BudgetProblem(network=net, bounds=bounds, costs=bad, budget=1.0)


def test_budget_problem_validation():
    net = two_cycle()
    bounds = al.uniform_bounds(net, beta=0.3, delta=0.1)
    costs = al.default_cost_model(net, bounds)
    with pytest.raises(ValueError, match="strongly connected"):
        path = netgraph.ContactNetwork(2, ((0, 1, 1.0),))
        b2 = al.uniform_bounds(path, beta=0.3, delta=0.1)
        al.BudgetProblem(network=path, bounds=b2, costs=al.default_cost_model(path, b2), budget=1.0)
    with pytest.raises(ValueError, match="nominal"):
        wrong = al.ResourceBounds(
            beta_lo=bounds.beta_lo, beta_hi=bounds.beta_hi,
            delta_lo=bounds.delta_lo, delta_hi=bounds.delta_hi,
            w_lo=bounds.w_lo, w_hi=bounds.w_hi * 2.0,
        )
        al.BudgetProblem(network=net, bounds=wrong, costs=costs, budget=1.0)
    with pytest.raises(ValueError, match="budget"):
        al.BudgetProblem(network=net, bounds=bounds, costs=costs, budget=-1.0)


# ------------------------------------------------------------------- build_gp


def test_build_gp_counts_all_resources():
    # 2 nodes, 2 edges, everything adjustable: lam + 2u + 2beta + 2dhat + 2w
    net = two_cycle()
    bounds = al.ResourceBounds(
        beta_lo=np.array([0.1, 0.1]), beta_hi=np.array([0.3, 0.3]),
        delta_lo=np.array([0.1, 0.1]), delta_hi=np.array([0.5, 0.5]),
        w_lo=np.array([0.2, 0.2]), w_hi=np.array([1.0, 1.0]),
    )
    costs = al.default_cost_model(net, bounds)
    prob = al.BudgetProblem(
        network=net, bounds=bounds, costs=costs, budget=1.0,
        enable_traffic=True, enable_prevention=True, enable_correction=True,
    )
    built = al.build_gp(prob)
    assert len(built.program.registry) == 9
    # 2 eigen rows + 1 budget + 12 box rows (6 variables x 2 sides)
    assert len(built.program.inequalities) == 2 + 1 + 12
    # gauge u_0 == 1 as the only monomial equality
    assert len(built.program.equalities) == 1


def test_build_gp_traffic_only_collapses_node_vars():
    net = two_cycle()
    prob = traffic_problem(net, beta=0.3, delta=0.1, budget=1.0)
    built = al.build_gp(prob)
    assert built.beta_vars == {} and built.dhat_vars == {}
    assert len(built.w_vars) == 2
    assert len(built.program.registry) == 5  # lam, u0, u1, w0, w1


def test_build_gp_zero_budget_all_fixed_drops_budget_row():
    net = two_cycle()
    prob = traffic_problem(net, beta=0.5, delta=0.2, budget=0.0, w_lo_frac=1.0)
    built = al.build_gp(prob)
    # no resource variables at all: eigen rows only
    assert len(built.program.inequalities) == 2


def test_build_gp_infeasible_mandatory_cost():
    # pin one edge below nominal: its cost is mandatory and exceeds C
    net = two_cycle()
    bounds = al.ResourceBounds(
        beta_lo=np.array([0.3, 0.3]), beta_hi=np.array([0.3, 0.3]),
        delta_lo=np.array([0.1, 0.1]), delta_hi=np.array([0.1, 0.1]),
        w_lo=np.array([0.5, 0.2]), w_hi=np.array([1.0, 1.0]),
    )
    costs = al.default_cost_model(net, bounds)
    prob = al.BudgetProblem(network=net, bounds=bounds, costs=costs, budget=10.0)
    built = al.build_gp(prob)
    # pinning is expressed through collapsed boxes; emulate a fixed off-nominal
    # item by solving a tiny-budget problem instead
    tiny = al.BudgetProblem(network=net, bounds=bounds, costs=costs, budget=0.0)
    res = al.solve_allocation(tiny)
    assert res.total_spend == pytest.approx(0.0, abs=1e-9)
    assert built.budget_rhs > 0


# ------------------------------------------------------------- solve + oracle


def test_two_node_traffic_instance_matches_analytic_optimum():
    # beta=0.3, delta=0.1, p=2, budget 2: optimum at w = (4/9, 4/9),
    # lambda* = 0.3*(4/9) - 0.1 = 1/30 (interior stationary point of the
    # symmetric budget-tight reduction; grid oracle agrees below)
    net = two_cycle()
    prob = traffic_problem(net, beta=0.3, delta=0.1, budget=2.0)
    res = al.solve_allocation(prob)
    assert res.lambda_star == pytest.approx(1.0 / 30.0, abs=1e-6)
    assert np.allclose(res.w_star, 4.0 / 9.0, atol=1e-5)
    assert res.total_spend == pytest.approx(2.0, rel=1e-5)
    assert res.epsilon_star == pytest.approx(-res.lambda_star)


def test_two_node_gp_dominates_grid_oracle():
    net = two_cycle()
    prob = traffic_problem(net, beta=0.3, delta=0.1, budget=2.0)
    res = al.solve_allocation(prob)
    lam_grid, alloc = al.brute_force_allocation(prob, 200)
    assert res.lambda_star <= lam_grid + 1e-3
    assert abs(res.lambda_star - lam_grid) <= 1e-2  # grid resolution effect
    spend = sum(
        prob.costs.traffic_spend(e, alloc["w"][e]) for e in range(net.num_edges)
    )
    assert spend <= prob.budget + 1e-9


def test_degenerate_problem_reduces_to_spectral():
    net = two_cycle()
    prob = traffic_problem(net, beta=0.5, delta=0.2, budget=5.0, w_lo_frac=1.0)
    res = al.solve_allocation(prob)
    assert res.lambda_star == pytest.approx(0.3, abs=1e-6)
    assert res.epsilon_star == pytest.approx(-0.3, abs=1e-6)
    assert res.total_spend == pytest.approx(0.0, abs=1e-12)


def test_zero_budget_returns_nominal():
    net = two_cycle()
    prob = traffic_problem(net, beta=0.3, delta=0.1, budget=0.0)
    res = al.solve_allocation(prob)
    assert np.allclose(res.w_star, 1.0)
    assert res.lambda_star == pytest.approx(0.2, abs=1e-8)
    assert res.total_spend == 0.0


def test_huge_budget_saturates_traffic_floors():
    # homogeneous 3-cycle: eps* = delta - beta * rho(0.2 A) = 0.1 - 0.3*0.2
    net = netgraph.ContactNetwork(3, ((0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)))
    prob = traffic_problem(net, beta=0.3, delta=0.1, budget=10.0)
    res = al.solve_allocation(prob)
    assert np.allclose(res.w_star, 0.2, atol=1e-5)
    assert res.epsilon_star == pytest.approx(0.04, abs=1e-5)


def test_correction_instance_matches_hand_derivation():
    # symmetric pinch: budget charge 3/dhat per node against box [1, 2.5],
    # C=1 -> dhat* = 30/17, delta* = 3 - 30/17 = 21/17, lambda* = 1 - 21/17
    prob = correction_problem(budget=1.0)
    res = al.solve_allocation(prob)
    assert np.allclose(res.delta_star, 21.0 / 17.0, atol=1e-6)
    assert res.lambda_star == pytest.approx(1.0 - 21.0 / 17.0, abs=1e-6)
    assert res.total_spend == pytest.approx(1.0, rel=1e-5)


def test_correction_gp_dominates_grid_oracle():
    prob = correction_problem(budget=1.0)
    res = al.solve_allocation(prob)
    lam_grid, _ = al.brute_force_allocation(prob, 200)
    assert res.lambda_star <= lam_grid + 1e-3


def test_corrective_slack_saturates_and_spend_is_true_cost():
    for budget in (0.5, 1.0, 2.5):
        prob = correction_problem(budget=budget)
        res = al.solve_allocation(prob)
        assert np.allclose(res.t_star + res.dhat_star, prob.delta_cap, atol=1e-6)
        direct = sum(
            prob.costs.correction_spend(i, res.delta_star[i]) for i in range(2)
        )
        assert res.total_spend == pytest.approx(direct, rel=1e-9)


def test_mixed_resources_dominate_grid_oracle():
    net = netgraph.ContactNetwork(2, ((0, 1, 2.0), (1, 0, 0.7)))
    bounds = al.ResourceBounds(
        beta_lo=np.array([0.2, 0.25]), beta_hi=np.array([0.6, 0.5]),
        delta_lo=np.array([0.3, 0.4]), delta_hi=np.array([1.0, 1.2]),
        w_lo=np.array([2.0, 0.7]), w_hi=np.array([2.0, 0.7]),
    )
    costs = al.default_cost_model(net, bounds, prevention_coeff=0.8, correction_coeff=1.1)
    prob = al.BudgetProblem(
        network=net, bounds=bounds, costs=costs, budget=1.5,
        enable_traffic=False, enable_prevention=True, enable_correction=True,
    )
    res = al.solve_allocation(prob)
    lam_grid, _ = al.brute_force_allocation(prob, 60)
    assert res.lambda_star <= lam_grid + 1e-3
    assert res.total_spend <= 1.5 * (1 + 1e-6)
    assert np.all(res.beta_star >= bounds.beta_lo - 1e-9)
    assert np.all(res.beta_star <= bounds.beta_hi + 1e-9)
    assert np.all(res.delta_star >= bounds.delta_lo - 1e-9)
    assert np.all(res.delta_star <= bounds.delta_hi + 1e-9)


def test_eigen_rows_tight_at_optimum():
    net = two_cycle()
    prob = traffic_problem(net, beta=0.3, delta=0.1, budget=2.0)
    res = al.solve_allocation(prob)
    lhs = al.eigen_constraint_values(prob, res)
    assert np.max(lhs) == pytest.approx(1.0, abs=1e-6)


def test_budget_monotonicity():
    net = netgraph.generate_cycle_plus_random(4, 3, (0.6, 1.4), seed=9)
    eps = []
    for budget in (0.0, 0.5, 1.5, 4.0, 12.0):
        prob = traffic_problem(net, beta=0.25, delta=0.12, budget=budget)
        eps.append(al.solve_allocation(prob).epsilon_star)
    diffs = np.diff(eps)
    assert np.all(diffs >= -1e-8)


def test_shift_identity_on_random_instances():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        avail = n * (n - 1) - n
        net = netgraph.generate_cycle_plus_random(
            n, int(rng.integers(0, avail + 1)), (0.3, 2.0),
            seed=int(rng.integers(1 << 30)),
        )
        beta = rng.uniform(0.1, 1.0, net.n)
        delta = rng.uniform(0.1, 1.0, net.n)
        cap = float(np.max(delta)) + 1.0
        A = netgraph.adjacency(net)
        shifted = spectral.perron(beta[:, None] * A + np.diag(cap - delta)).rho
        lam = spectral.spectral_abscissa(net, beta, delta)
        assert shifted == pytest.approx(lam + cap, abs=1e-8)


def test_infeasible_when_budget_below_mandatory_cost():
    # corrective model whose cheapest point still costs money: raise the
    # recovery floor above the zero-cost point by using a shifted term
    net = two_cycle()
    bounds = al.ResourceBounds(
        beta_lo=np.array([1.0, 1.0]), beta_hi=np.array([1.0, 1.0]),
        delta_lo=np.array([0.5, 0.5]), delta_hi=np.array([2.0, 2.0]),
        w_lo=np.array([1.0, 1.0]), w_hi=np.array([1.0, 1.0]),
    )
    cap = 3.0
    base = al.correction_cost(1.0, 0.25, cap)  # zero only at delta = 0.25 < floor
    costs = al.CostModel(
        prevention=al.default_cost_model(net, bounds).prevention,
        correction=(base, base),
        traffic=al.default_cost_model(net, bounds).traffic,
        delta_cap=cap,
    )
    prob = al.BudgetProblem(
        network=net, bounds=bounds, costs=costs, budget=1e-4,
        enable_traffic=False, enable_correction=True,
    )
    with pytest.raises(al.InfeasibleError):
        al.solve_allocation(prob)


def test_result_invariants_verified_independently():
    net = netgraph.generate_hub_spoke(3, 4, 1.1, 0.6, seed=2)
    prob = traffic_problem(net, beta=0.15, delta=0.2, budget=4.0)
    res = al.solve_allocation(prob)
    recomputed = spectral.spectral_abscissa(
        netgraph.reweight(net, res.w_star), res.beta_star, res.delta_star
    )
    assert recomputed <= -res.epsilon_star + 1e-6
    assert res.total_spend <= prob.budget * (1 + 1e-6) + 1e-9
    assert np.all(res.w_star >= prob.bounds.w_lo - 1e-9)
    assert np.all(res.w_star <= prob.bounds.w_hi + 1e-9)


def test_brute_force_dimension_guard():
    net = netgraph.ContactNetwork(3, ((0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (0, 2, 1.0), (2, 1, 1.0)))
    prob = traffic_problem(net, beta=0.3, delta=0.1, budget=1.0)
    with pytest.raises(ValueError, match="dimension"):
        al.brute_force_allocation(prob, 10)
    with pytest.raises(ValueError, match="grid_steps"):
        small = traffic_problem(two_cycle(), beta=0.3, delta=0.1, budget=1.0)
        al.brute_force_allocation(small, 1000)


def test_brute_force_degenerate_cases():
    net = two_cycle()
    pinned = traffic_problem(net, beta=0.5, delta=0.2, budget=3.0, w_lo_frac=1.0)
    lam, alloc = al.brute_force_allocation(pinned, 50)
    assert lam == pytest.approx(0.3, abs=1e-9)
    assert np.allclose(alloc["w"], 1.0)
    # budget too small for any positive-cost action: nominal point wins
    cheap = traffic_problem(net, beta=0.5, delta=0.2, budget=1e-9)
    lam, alloc = al.brute_force_allocation(cheap, 50)
    assert np.allclose(alloc["w"], 1.0)
    assert lam == pytest.approx(0.3, abs=1e-9)


def test_phase_one_finds_zero_investment_point():
    # with C above the no-op cost the program always admits an interior
    # point near the zero-investment corner
    net = two_cycle()
    prob = traffic_problem(net, beta=0.3, delta=0.1, budget=1.0)
    built = al.build_gp(prob)
    res = gpsolve.phase_one(built.program)
    assert res.feasible
    x = res.x
    for e, vid in built.w_vars.items():
        assert prob.bounds.w_lo[e] < x[vid] < prob.bounds.w_hi[e]


def test_solver_cfg_threading_and_determinism():
    net = two_cycle()
    prob = traffic_problem(net, beta=0.3, delta=0.1, budget=2.0)
    cfg = gpsolve.SolverConfig(tol=1e-9)
    r1 = al.solve_allocation(prob, cfg)
    r2 = al.solve_allocation(prob, cfg)
    assert np.array_equal(r1.w_star, r2.w_star)
    assert r1.lambda_star == r2.lambda_star
