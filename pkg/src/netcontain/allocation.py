"""Budget-constrained protection-resource allocation as a geometric program.

Given a strongly connected contact network, per-node infection/recovery
rate boxes, per-edge traffic boxes, posynomial cost functions and a budget
C, the allocator finds the resource mix (traffic restrictions, vaccines,
antidotes) that minimizes the dominant eigenvalue of
``diag(beta) @ A - diag(delta)`` - equivalently, maximizes the certified
exponential decay rate ``epsilon = -lambda1`` of an outbreak.

Construction of the program follows the dominant-eigenvalue
characterization ``rho(M) = inf { lam : M u <= lam u, u > 0 }``.  With
``cap = max(delta_hi) + 1`` and the substitution ``dhat_i = cap -
delta_i`` the system matrix ``B A + diag(dhat)`` is nonnegative and
irreducible, its dominant eigenvalue is ``lambda1(B A - D) + cap``, and
each row of ``M u <= lam u`` becomes a posynomial inequality in
``(lam, u, beta, dhat, w)``.

Antidote costs are charged directly on ``dhat``: the per-node corrective
cost must be supplied as a posynomial that is decreasing in ``dhat``
(hence increasing in the recovery rate ``delta = cap - dhat``).  Charging
an increasing posynomial on a separate slack variable ``t`` with
``(t + dhat)/cap <= 1`` does not work: nothing in that relaxation pulls t
up to its cap, the solver drives t toward zero, and maximum recovery
comes out free of charge.  With the dhat-side charge the budget presses
dhat up while the eigenvalue presses it down, the implied slack
``t = cap - dhat`` sits exactly on ``t + dhat = cap`` at every optimum,
and reported spend equals the true antidote cost.

Negative constant terms of cost functions (the value of each cost at its
zero-investment end) cannot live inside posynomials, so every cost is
stored as a posynomial part plus an offset with
``true cost(x) = posynomial(x) - offset``; the offsets migrate to the
budget's right-hand side.
"""

from dataclasses import dataclass

import numpy as np

from . import gpsolve
from .netgraph import adjacency, is_strongly_connected, reweight
from .posy import (
    GpProgram,
    Monomial,
    Posynomial,
    VariableRegistry,
    evaluate,
    monomial,
    substitute_var,
)
from .spectral import perron, spectral_abscissa

__all__ = [
    "COST_VAR",
    "CostTerm",
    "CostModel",
    "ResourceBounds",
    "BudgetProblem",
    "AllocationResult",
    "GpBuild",
    "InfeasibleError",
    "IterationLimitError",
    "ConsistencyError",
    "traffic_cost",
    "prevention_cost",
    "correction_cost",
    "default_cost_model",
    "uniform_bounds",
    "build_gp",
    "solve_allocation",
    "nominal_allocation",
    "brute_force_allocation",
    "eigen_constraint_values",
]

# Placeholder variable id used by univariate cost templates; build_gp
# retags it onto the concrete decision variable.
COST_VAR = 0

DELTA_FLOOR = 1e-9  # recovery rates of zero are clamped here


class InfeasibleError(Exception):
    """No allocation satisfies the budget and box constraints."""


class IterationLimitError(Exception):
    """The GP solver hit its iteration cap before reaching tolerance."""


class ConsistencyError(Exception):
    """A solved allocation failed its independent spectral re-check."""


@dataclass(frozen=True)
class CostTerm:
    """Univariate cost: ``true_cost(x) = poly(x) - offset``, zero at no-op."""

    poly: Posynomial
    offset: float

    def true_cost(self, x):
        return float(evaluate(self.poly, np.array([float(x)]))) - self.offset


def traffic_cost(p_exp, w_bar):
    """Cost of throttling one edge from w_bar down to w.

    ``p_exp * (w**(-1/p_exp) - w_bar**(-1/p_exp))``: zero at the nominal
    traffic, growing with diminishing marginal benefit as w shrinks.  The
    negative constant is returned as the offset.
    """
    if p_exp <= 0 or w_bar <= 0:
        raise ValueError("p_exp and w_bar must be positive")
    poly = Posynomial((monomial(p_exp, {COST_VAR: -1.0 / p_exp}),))
    return CostTerm(poly=poly, offset=p_exp * w_bar ** (-1.0 / p_exp))


def prevention_cost(coeff, beta_hi):
    """Vaccination cost ``coeff * (beta**-1 - beta_hi**-1)``; zero at beta_hi."""
    if coeff <= 0 or beta_hi <= 0:
        raise ValueError("coeff and beta_hi must be positive")
    poly = Posynomial((monomial(coeff, {COST_VAR: -1.0}),))
    return CostTerm(poly=poly, offset=coeff / beta_hi)


def correction_cost(coeff, delta_lo, delta_cap):
    """Antidote cost as a posynomial in ``dhat = delta_cap - delta``.

    True cost in terms of the recovery rate:
    ``coeff * delta_cap * (1/(delta_cap - delta) - 1/(delta_cap - delta_lo))``,
    which is increasing in delta, zero at delta_lo, and approximately
    ``coeff * (delta - delta_lo)`` for rates well below the cap.
    """
    if coeff <= 0 or delta_cap <= delta_lo:
        raise ValueError("need coeff > 0 and delta_cap > delta_lo")
    poly = Posynomial((monomial(coeff * delta_cap, {COST_VAR: -1.0}),))
    return CostTerm(poly=poly, offset=coeff * delta_cap / (delta_cap - delta_lo))


@dataclass(frozen=True)
class ResourceBounds:
    """Per-node rate boxes and per-edge traffic boxes, lo <= hi, all positive.

    ``w_hi`` must equal the network's nominal edge weights; a disabled
    resource is modeled by a collapsed box (lo == hi).
    """

    beta_lo: np.ndarray
    beta_hi: np.ndarray
    delta_lo: np.ndarray
    delta_hi: np.ndarray
    w_lo: np.ndarray
    w_hi: np.ndarray

    def __post_init__(self):
        for name in ("beta_lo", "beta_hi", "delta_lo", "delta_hi", "w_lo", "w_hi"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        for lo, hi, what in (
            (self.beta_lo, self.beta_hi, "beta"),
            (self.delta_lo, self.delta_hi, "delta"),
            (self.w_lo, self.w_hi, "w"),
        ):
            if lo.shape != hi.shape:
                raise ValueError(f"{what} bounds shape mismatch")
            if np.any(lo <= 0) or np.any(lo > hi):
                raise ValueError(f"need 0 < {what}_lo <= {what}_hi element-wise")


@dataclass(frozen=True)
class CostModel:
    """Per-item cost terms; correction terms live in dhat coordinates.

    ``delta_cap`` is ``max(delta_hi) + 1`` for the problem the model was
    built for; corrective spend at recovery rate delta is evaluated at
    ``dhat = delta_cap - delta``.
    """

    prevention: tuple      # CostTerm per node
    correction: tuple      # CostTerm per node, argument dhat
    traffic: tuple         # CostTerm per edge
    delta_cap: float

    @property
    def budget_offset(self):
        """Total constant moved to the budget's right-hand side."""
        return float(
            sum(t.offset for t in self.prevention)
            + sum(t.offset for t in self.correction)
            + sum(t.offset for t in self.traffic)
        )

    def prevention_spend(self, i, beta):
        return self.prevention[i].true_cost(beta)

    def correction_spend(self, i, delta):
        if delta >= self.delta_cap:
            raise ValueError("recovery rate must stay below delta_cap")
        return self.correction[i].true_cost(self.delta_cap - delta)

    def traffic_spend(self, e, w):
        return self.traffic[e].true_cost(w)


def _check_monotone(term, lo, hi, decreasing, what):
    """Numerical monotonicity check at the box corners."""
    a, b = term.true_cost(lo), term.true_cost(hi)
    ok = a >= b - 1e-12 if decreasing else a <= b + 1e-12
    if not ok:
        direction = "decreasing" if decreasing else "increasing"
        raise ValueError(f"{what} cost must be {direction} on its box")


def default_cost_model(
    net, bounds, p_exp=2.0, prevention_coeff=1.0, correction_coeff=1.0
):
    """Eq-style traffic costs plus simple node cost defaults."""
    delta_cap = float(np.max(bounds.delta_hi)) + 1.0
    prevention = tuple(
        prevention_cost(prevention_coeff, bh) for bh in bounds.beta_hi
    )
    correction = tuple(
        correction_cost(correction_coeff, dl, delta_cap) for dl in bounds.delta_lo
    )
    traffic = tuple(traffic_cost(p_exp, wh) for wh in bounds.w_hi)
    return CostModel(
        prevention=prevention, correction=correction, traffic=traffic, delta_cap=delta_cap
    )


@dataclass(frozen=True)
class BudgetProblem:
    network: object
    bounds: ResourceBounds
    costs: CostModel
    budget: float
    enable_traffic: bool = True
    enable_prevention: bool = False
    enable_correction: bool = False

    def __post_init__(self):
        net = self.network
        if not is_strongly_connected(net):
            raise ValueError("network must be strongly connected")
        b = self.bounds
        if b.beta_lo.shape != (net.n,) or b.delta_lo.shape != (net.n,):
            raise ValueError("node bounds must have one entry per node")
        if b.w_lo.shape != (net.num_edges,):
            raise ValueError("edge bounds must have one entry per edge")
        if np.max(np.abs(b.w_hi - net.weights())) > 1e-12 * (1 + np.max(b.w_hi)):
            raise ValueError("w_hi must equal the network's nominal weights")
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if not self.enable_traffic and np.any(b.w_lo != b.w_hi):
            raise ValueError("disabled traffic resources require w_lo == w_hi")
        if not self.enable_prevention and np.any(b.beta_lo != b.beta_hi):
            raise ValueError("disabled prevention resources require beta_lo == beta_hi")
        if not self.enable_correction and np.any(b.delta_lo != b.delta_hi):
            raise ValueError("disabled correction resources require delta_lo == delta_hi")
        expected_cap = float(np.max(b.delta_hi)) + 1.0
        if abs(self.costs.delta_cap - expected_cap) > 1e-12 * expected_cap:
            raise ValueError("cost model delta_cap does not match max(delta_hi) + 1")
        for i in range(net.n):
            _check_monotone(self.costs.prevention[i], b.beta_lo[i], b.beta_hi[i], True, "prevention")
            # correction terms are checked in dhat coordinates (decreasing there)
            dh_lo = self.costs.delta_cap - b.delta_hi[i]
            dh_hi = self.costs.delta_cap - b.delta_lo[i]
            _check_monotone(self.costs.correction[i], dh_lo, dh_hi, True, "correction")
        for e in range(net.num_edges):
            _check_monotone(self.costs.traffic[e], b.w_lo[e], b.w_hi[e], True, "traffic")

    @property
    def delta_cap(self):
        return self.costs.delta_cap


def uniform_bounds(net, beta, delta, w_lo_frac=0.2, beta_lo_frac=None, delta_hi_mult=None):
    """Scalar-broadcast bounds; nominal = zero-spend end of each box.

    ``beta`` is the uncontrolled infection rate (box top), ``delta`` the
    uncontrolled recovery rate (box bottom, clamped to a tiny positive
    floor).  Fractions/multipliers open the boxes for enabled resources;
    leave them None to pin a resource at its nominal value.
    """
    n, ne = net.n, net.num_edges
    beta_hi = np.full(n, float(beta))
    beta_lo = beta_hi * (beta_lo_frac if beta_lo_frac is not None else 1.0)
    delta_lo = np.full(n, max(float(delta), DELTA_FLOOR))
    delta_hi = delta_lo * (delta_hi_mult if delta_hi_mult is not None else 1.0)
    w_hi = net.weights()
    w_lo = w_hi * float(w_lo_frac)
    return ResourceBounds(
        beta_lo=beta_lo, beta_hi=beta_hi,
        delta_lo=delta_lo, delta_hi=delta_hi,
        w_lo=w_lo, w_hi=w_hi,
    )


@dataclass(frozen=True)
class GpBuild:
    """A constructed program plus the variable bookkeeping to read it back."""

    program: GpProgram
    lam: int
    u: tuple                  # var id per node
    beta_vars: dict           # node -> var id (only free betas)
    dhat_vars: dict           # node -> var id
    w_vars: dict              # edge index -> var id
    budget_rhs: float
    delta_cap: float


def _free_items(enabled, lo, hi):
    if not enabled:
        return []
    return [int(i) for i in np.nonzero(lo < hi)[0]]


def build_gp(prob):
    """Assemble the budget-constrained eigenvalue-minimization GP.

    Variables: the eigenvalue bound lam, one positive u per node (u_0
    gauge-fixed to 1 by a monomial equality since u is scale-free), and
    one variable per enabled non-collapsed resource item.  Constraints:
    one posynomial row per node from ``(B A + diag(dhat)) u <= lam u``,
    the normalized budget row, and two box rows per resource variable.
    Collapsed or disabled items enter the eigen rows as fixed constants.
    """
    net = prob.network
    b = prob.bounds
    cap = prob.delta_cap
    A = adjacency(net)
    n = net.n

    reg = VariableRegistry()
    lam = reg.fresh("lam")
    u = tuple(reg.fresh(f"u{i}") for i in range(n))
    beta_vars = {i: reg.fresh(f"beta{i}") for i in _free_items(prob.enable_prevention, b.beta_lo, b.beta_hi)}
    dhat_vars = {i: reg.fresh(f"dhat{i}") for i in _free_items(prob.enable_correction, b.delta_lo, b.delta_hi)}
    w_vars = {e: reg.fresh(f"w{e}") for e in _free_items(prob.enable_traffic, b.w_lo, b.w_hi)}

    in_edges = [[] for _ in range(n)]
    for e, (src, dst, _) in enumerate(net.edges):
        in_edges[dst].append((e, src))

    # nominal values used wherever an item is not a variable
    beta_fix = b.beta_hi
    dhat_fix = cap - b.delta_lo
    w_fix = b.w_hi

    ineqs = []
    for i in range(n):
        terms = []
        for e, src in in_edges[i]:
            coeff = 1.0
            expo = {lam: -1.0, u[src]: 1.0, u[i]: -1.0}
            if i in beta_vars:
                expo[beta_vars[i]] = 1.0
            else:
                coeff *= beta_fix[i]
            if e in w_vars:
                expo[w_vars[e]] = 1.0
            else:
                coeff *= w_fix[e]
            terms.append(monomial(coeff, expo))
        if i in dhat_vars:
            terms.append(monomial(1.0, {lam: -1.0, dhat_vars[i]: 1.0}))
        else:
            terms.append(monomial(dhat_fix[i], {lam: -1.0}))
        ineqs.append(Posynomial(tuple(terms)))

    # budget row: sum of posynomial cost parts <= C + sum of offsets
    cost_terms = []
    const_cost = 0.0
    offset_total = 0.0
    if prob.enable_prevention:
        for i in range(n):
            term = prob.costs.prevention[i]
            offset_total += term.offset
            if i in beta_vars:
                cost_terms.extend(substitute_var(term.poly, COST_VAR, beta_vars[i]).terms)
            else:
                const_cost += evaluate(term.poly, np.array([beta_fix[i]]))
    if prob.enable_correction:
        for i in range(n):
            term = prob.costs.correction[i]
            offset_total += term.offset
            if i in dhat_vars:
                cost_terms.extend(substitute_var(term.poly, COST_VAR, dhat_vars[i]).terms)
            else:
                const_cost += evaluate(term.poly, np.array([dhat_fix[i]]))
    if prob.enable_traffic:
        for e in range(net.num_edges):
            term = prob.costs.traffic[e]
            offset_total += term.offset
            if e in w_vars:
                cost_terms.extend(substitute_var(term.poly, COST_VAR, w_vars[e]).terms)
            else:
                const_cost += evaluate(term.poly, np.array([w_fix[e]]))

    rhs = prob.budget + offset_total
    if cost_terms or const_cost:
        if rhs <= 0:
            raise InfeasibleError(
                f"budget {prob.budget} cannot cover mandatory costs (rhs {rhs} <= 0)"
            )
        room = rhs - const_cost
        if cost_terms:
            if room <= 0:
                raise InfeasibleError("fixed-item costs alone exceed the budget")
            scaled = [Monomial(t.coeff / room, t.exponents) for t in cost_terms]
            ineqs.append(Posynomial(tuple(scaled)))
        elif const_cost > rhs * (1 + 1e-12):
            raise InfeasibleError("fixed-item costs alone exceed the budget")
        # an all-constant satisfied budget row is dropped

    for vid, lo, hi in _box_rows(prob, beta_vars, dhat_vars, w_vars):
        ineqs.append(Posynomial((monomial(lo, {vid: -1.0}),)))
        ineqs.append(Posynomial((monomial(1.0 / hi, {vid: 1.0}),)))

    program = GpProgram(
        objective=Posynomial((monomial(1.0, {lam: 1.0}),)),
        inequalities=tuple(ineqs),
        equalities=(monomial(1.0, {u[0]: 1.0}),),  # gauge: u_0 == 1
        registry=reg,
    )
    return GpBuild(
        program=program, lam=lam, u=u, beta_vars=beta_vars,
        dhat_vars=dhat_vars, w_vars=w_vars, budget_rhs=rhs, delta_cap=cap,
    )


def _box_rows(prob, beta_vars, dhat_vars, w_vars):
    b = prob.bounds
    cap = prob.delta_cap
    for i, vid in beta_vars.items():
        yield vid, float(b.beta_lo[i]), float(b.beta_hi[i])
    for i, vid in dhat_vars.items():
        yield vid, float(cap - b.delta_hi[i]), float(cap - b.delta_lo[i])
    for e, vid in w_vars.items():
        yield vid, float(b.w_lo[e]), float(b.w_hi[e])


@dataclass(frozen=True)
class AllocationResult:
    """Optimal allocation with its certified decay rate and spend ledger.

    ``epsilon_star`` is the certified exponential decay rate (negative
    when the budget cannot stabilize the outbreak) and ``lambda_star =
    -epsilon_star`` the achieved spectral abscissa.  ``t_star`` carries
    the corrective slack at its saturated value ``delta_cap - dhat``,
    which coincides with ``delta_star``.
    """

    beta_star: np.ndarray
    delta_star: np.ndarray
    w_star: np.ndarray
    epsilon_star: float
    lambda_star: float
    spend: dict               # arrays: 'prevention', 'correction', 'traffic'
    total_spend: float
    perron_u: np.ndarray
    t_star: np.ndarray
    dhat_star: np.ndarray
    gp_objective: float       # shifted eigenvalue lambda_star + delta_cap


def _spend_arrays(prob, beta, delta, w):
    n, ne = prob.network.n, prob.network.num_edges
    sp = {
        "prevention": np.zeros(n),
        "correction": np.zeros(n),
        "traffic": np.zeros(ne),
    }
    if prob.enable_prevention:
        sp["prevention"] = np.array(
            [prob.costs.prevention_spend(i, beta[i]) for i in range(n)]
        )
    if prob.enable_correction:
        sp["correction"] = np.array(
            [prob.costs.correction_spend(i, delta[i]) for i in range(n)]
        )
    if prob.enable_traffic:
        sp["traffic"] = np.array(
            [prob.costs.traffic_spend(e, w[e]) for e in range(ne)]
        )
    return sp


def _result_from_point(prob, beta, delta, w, u, gp_objective, verify_tol=1e-6):
    cap = prob.delta_cap
    lam_star = gp_objective - cap
    eps_star = -lam_star
    spend = _spend_arrays(prob, beta, delta, w)
    total = float(sum(a.sum() for a in spend.values()))
    if total > prob.budget * (1 + 1e-6) + 1e-9:
        raise ConsistencyError(f"spend {total} exceeds budget {prob.budget}")
    recomputed = spectral_abscissa(reweight(prob.network, w), beta, delta)
    if recomputed > lam_star + verify_tol:
        raise ConsistencyError(
            f"recomputed abscissa {recomputed} exceeds reported {lam_star}"
        )
    dhat = cap - delta
    return AllocationResult(
        beta_star=beta, delta_star=delta, w_star=w,
        epsilon_star=float(eps_star), lambda_star=float(lam_star),
        spend=spend, total_spend=total, perron_u=u,
        t_star=cap - dhat, dhat_star=dhat, gp_objective=float(gp_objective),
    )


def nominal_allocation(prob):
    """The zero-spend point: beta_hi, delta_lo, w_hi, decay rate from spectral."""
    b = prob.bounds
    beta = b.beta_hi.copy()
    delta = b.delta_lo.copy()
    w = b.w_hi.copy()
    lam = spectral_abscissa(prob.network, beta, delta)
    # the eigenvector is shift-invariant, so any positive diagonal shift works
    M = beta[:, None] * adjacency(prob.network) + np.diag(prob.delta_cap - delta)
    u = perron(M).right
    return _result_from_point(prob, beta, delta, w, u / u[0], lam + prob.delta_cap)


def solve_allocation(prob, cfg=None):
    """Solve the allocation GP and recover the optimal resource mix.

    Falls back to the zero-spend allocation when the budget is (near)
    zero: the feasible set then has no interior for a barrier method,
    but the nominal point is provably the only affordable one.  Results
    are re-verified with an independent spectral computation before being
    returned.
    """
    cfg = cfg or gpsolve.SolverConfig()
    nominal_spend = _nominal_total_cost(prob)
    if prob.budget - nominal_spend <= 1e-12 * (1.0 + prob.costs.budget_offset):
        if nominal_spend <= prob.budget + 1e-9:
            return nominal_allocation(prob)
        raise InfeasibleError("budget below the cost of the cheapest allocation")

    built = build_gp(prob)
    sol = gpsolve.solve(built.program, cfg)
    if sol.status == gpsolve.INFEASIBLE:
        if nominal_spend <= prob.budget + 1e-9:
            return nominal_allocation(prob)
        raise InfeasibleError(f"GP infeasible (certificate {sol.gap})")
    if sol.status == gpsolve.ITERATION_LIMIT:
        raise IterationLimitError("GP solver hit its iteration cap")

    x = sol.x
    b = prob.bounds
    cap = prob.delta_cap
    beta = b.beta_hi.copy()
    for i, vid in built.beta_vars.items():
        beta[i] = np.clip(x[vid], b.beta_lo[i], b.beta_hi[i])
    delta = b.delta_lo.copy()
    for i, vid in built.dhat_vars.items():
        dhat = np.clip(x[vid], cap - b.delta_hi[i], cap - b.delta_lo[i])
        delta[i] = cap - dhat
    w = b.w_hi.copy()
    for e, vid in built.w_vars.items():
        w[e] = np.clip(x[vid], b.w_lo[e], b.w_hi[e])
    u = np.array([x[vid] for vid in built.u])
    return _result_from_point(prob, beta, delta, w, u, float(sol.objective))


def _nominal_total_cost(prob):
    b = prob.bounds
    sp = _spend_arrays(prob, b.beta_hi, b.delta_lo, b.w_hi)
    return float(sum(a.sum() for a in sp.values()))


def eigen_constraint_values(prob, result):
    """Left-hand sides of the per-node eigenvalue rows at a solution.

    At an optimum the largest of these equals 1 (otherwise the eigenvalue
    bound could still be tightened).
    """
    A = adjacency(reweight(prob.network, result.w_star))
    u = result.perron_u
    lam_shifted = result.gp_objective
    dhat = prob.delta_cap - result.delta_star
    lhs = (result.beta_star * (A @ u) + dhat * u) / (lam_shifted * u)
    return lhs


def brute_force_allocation(prob, grid_steps):
    """Exhaustive grid oracle over the enabled resource intervals.

    Grids every enabled, non-collapsed item over its box, drops the
    budget-infeasible combinations, and evaluates the spectral abscissa of
    the remaining candidates with dense eigensolves (a code path fully
    independent of the GP and of the power iteration).  Returns
    ``(lambda_best, {'beta': ..., 'delta': ..., 'w': ...})``.
    """
    if not (1 < grid_steps <= 200):
        raise ValueError("grid_steps must be in (1, 200]")
    b = prob.bounds
    net = prob.network
    dims = []  # (kind, index, values)
    for i in _free_items(prob.enable_prevention, b.beta_lo, b.beta_hi):
        dims.append(("beta", i, np.linspace(b.beta_lo[i], b.beta_hi[i], grid_steps)))
    for i in _free_items(prob.enable_correction, b.delta_lo, b.delta_hi):
        dims.append(("delta", i, np.linspace(b.delta_lo[i], b.delta_hi[i], grid_steps)))
    for e in _free_items(prob.enable_traffic, b.w_lo, b.w_hi):
        dims.append(("w", e, np.linspace(b.w_lo[e], b.w_hi[e], grid_steps)))
    if len(dims) > 4:
        raise ValueError(f"decision dimension {len(dims)} too large for the grid oracle")

    base_beta = b.beta_hi.copy()
    base_delta = b.delta_lo.copy()
    base_w = b.w_hi.copy()
    fixed_cost = _nominal_total_cost(prob)
    for kind, idx, _ in dims:
        # remove the no-op spend of gridded items from the fixed part
        if kind == "beta":
            fixed_cost -= prob.costs.prevention_spend(idx, base_beta[idx])
        elif kind == "delta":
            fixed_cost -= prob.costs.correction_spend(idx, base_delta[idx])
        else:
            fixed_cost -= prob.costs.traffic_spend(idx, base_w[idx])

    if not dims:
        lam = spectral_abscissa(net, base_beta, base_delta)
        return float(lam), {"beta": base_beta, "delta": base_delta, "w": base_w}

    cost_tables = []
    for kind, idx, vals in dims:
        if kind == "beta":
            tab = np.array([prob.costs.prevention_spend(idx, v) for v in vals])
        elif kind == "delta":
            tab = np.array([prob.costs.correction_spend(idx, v) for v in vals])
        else:
            tab = np.array([prob.costs.traffic_spend(idx, v) for v in vals])
        cost_tables.append(tab)

    A0 = adjacency(net)
    n = net.n
    sizes = [len(v) for _, _, v in dims]
    total = int(np.prod(sizes))
    best_lam = np.inf
    best_idx = None
    chunk = 200_000
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        coords = np.array(np.unravel_index(flat, sizes))  # (ndim, batch)
        cost = np.full(len(flat), fixed_cost)
        for d, tab in enumerate(cost_tables):
            cost += tab[coords[d]]
        keep = cost <= prob.budget + 1e-12
        if not np.any(keep):
            continue
        coords = coords[:, keep]
        flat = flat[keep]
        batch = coords.shape[1]
        beta = np.tile(base_beta, (batch, 1))
        delta = np.tile(base_delta, (batch, 1))
        M = np.tile(A0, (batch, 1, 1))
        for d, (kind, idx, vals) in enumerate(dims):
            v = vals[coords[d]]
            if kind == "beta":
                beta[:, idx] = v
            elif kind == "delta":
                delta[:, idx] = v
            else:
                src, dst, _ = net.edges[idx]
                M[:, dst, src] = v
        M = beta[:, :, None] * M
        M[:, np.arange(n), np.arange(n)] -= delta
        lam = np.max(np.linalg.eigvals(M).real, axis=1)
        k = int(np.argmin(lam))
        if lam[k] < best_lam:
            best_lam = float(lam[k])
            best_idx = np.unravel_index(flat[k], sizes)

    if best_idx is None:
        raise InfeasibleError("no grid point satisfies the budget")
    beta = base_beta.copy()
    delta = base_delta.copy()
    w = base_w.copy()
    for d, (kind, idx, vals) in enumerate(dims):
        v = float(vals[best_idx[d]])
        if kind == "beta":
            beta[idx] = v
        elif kind == "delta":
            delta[idx] = v
        else:
            w[idx] = v
    return best_lam, {"beta": beta, "delta": delta, "w": w}
