"""Command-line front end: generate networks, solve allocations, sweep
budgets, simulate outbreaks, and export analysis artifacts.

All commands are deterministic given the config file and seed; re-runs
produce byte-identical outputs.  A single JSON config document describes
a run (see README for the schema); scalar rate/bound entries broadcast
across nodes or edges.

Exit codes: 0 success, 2 validation/config error, 3 infeasible problem,
4 solver iteration limit, 5 I/O failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import analysis, dynamics, gpsolve, netgraph, spectral, svgfig
from .allocation import (
    BudgetProblem,
    ConsistencyError,
    InfeasibleError,
    IterationLimitError,
    ResourceBounds,
    default_cost_model,
    eigen_constraint_values,
    solve_allocation,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_SOLVER_LIMIT = 4
EXIT_IO = 5


def _broadcast(value, size, what):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(size, float(arr))
    if arr.shape == (size,):
        return arr
    raise ValueError(f"{what}: expected a scalar or {size} values, got shape {arr.shape}")


def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh), os.path.dirname(os.path.abspath(path))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc


def _load_problem(config, base_dir, budget, tol_override=None):
    net_path = config.get("network")
    if not net_path:
        raise ValueError("config needs a 'network' entry")
    if not os.path.isabs(net_path):
        net_path = os.path.join(base_dir, net_path)
    net = netgraph.load_edgelist(net_path)

    modes = config.get("modes", {})
    enable_traffic = bool(modes.get("traffic", True))
    enable_prevention = bool(modes.get("prevention", False))
    enable_correction = bool(modes.get("correction", False))

    rates = config.get("rates", {})
    beta = _broadcast(rates.get("beta", 0.1), net.n, "rates.beta")
    delta = _broadcast(rates.get("delta", 0.1), net.n, "rates.delta")

    bspec = config.get("bounds", {})
    beta_hi = beta
    beta_lo = (
        _broadcast(bspec["beta_lo"], net.n, "bounds.beta_lo")
        if enable_prevention
        else beta_hi
    )
    delta_lo = np.maximum(delta, 1e-9)
    delta_hi = (
        _broadcast(bspec["delta_hi"], net.n, "bounds.delta_hi")
        if enable_correction
        else delta_lo
    )
    w_hi = net.weights()
    w_lo = (
        w_hi * _broadcast(bspec.get("w_lo_frac", 0.2), net.num_edges, "bounds.w_lo_frac")
        if enable_traffic
        else w_hi
    )
    bounds = ResourceBounds(
        beta_lo=beta_lo, beta_hi=beta_hi,
        delta_lo=delta_lo, delta_hi=delta_hi,
        w_lo=w_lo, w_hi=w_hi,
    )

    cspec = config.get("costs", {})
    costs = default_cost_model(
        net,
        bounds,
        p_exp=float(cspec.get("traffic_p", 2.0)),
        prevention_coeff=float(cspec.get("prevention_coeff", 1.0)),
        correction_coeff=float(cspec.get("correction_coeff", 1.0)),
    )
    prob = BudgetProblem(
        network=net, bounds=bounds, costs=costs, budget=float(budget),
        enable_traffic=enable_traffic,
        enable_prevention=enable_prevention,
        enable_correction=enable_correction,
    )
    sspec = config.get("solver", {})
    cfg = gpsolve.SolverConfig(
        tol=float(tol_override if tol_override is not None else sspec.get("tol", 1e-8)),
        max_newton=int(sspec.get("max_newton", 200)),
        barrier_mu=float(sspec.get("barrier_mu", 10.0)),
    )
    return net, prob, cfg


def _outdir(args):
    out = args.out_dir or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_generate(args):
    if args.kind == "cycle":
        net = netgraph.generate_cycle_plus_random(
            args.n, args.extra, (args.w_lo, args.w_hi), args.seed
        )
    elif args.kind == "hub":
        net = netgraph.generate_hub_spoke(
            args.hubs, args.leaves, args.hub_weight, args.leaf_weight, args.seed
        )
    else:
        raise ValueError(f"unknown generator kind {args.kind!r}")
    out = _outdir(args)
    path = os.path.join(out, args.name)
    netgraph.save_edgelist(net, path)
    rho = spectral.perron(netgraph.adjacency(net)).rho
    print(f"wrote {path}: n={net.n} edges={net.num_edges} rho={rho:.6g}")
    return EXIT_OK


def _result_payload(prob, res, cfg, p0_level):
    net = prob.network
    traj = dynamics.integrate(
        np.full(net.n, p0_level), netgraph.reweight(net, res.w_star),
        res.beta_star, res.delta_star, t_end=40.0, dt=0.01,
    )
    fitted = dynamics.decay_rate(traj)
    recomputed = spectral.spectral_abscissa(
        netgraph.reweight(net, res.w_star), res.beta_star, res.delta_star
    )
    budget_residual = prob.budget - res.total_spend
    checks = {
        "abscissa_ok": bool(recomputed <= res.lambda_star + 1e-6),
        "budget_ok": bool(res.total_spend <= prob.budget * (1 + 1e-6) + 1e-9),
        "decay_ok": bool(fitted >= res.epsilon_star - 1e-3)
        if res.epsilon_star > 0
        else "skipped (epsilon_star <= 0)",
    }
    return {
        "budget": prob.budget,
        "epsilon_star": res.epsilon_star,
        "lambda_star": res.lambda_star,
        "total_spend": res.total_spend,
        "beta_star": res.beta_star.tolist(),
        "delta_star": res.delta_star.tolist(),
        "w_star": res.w_star.tolist(),
        "edges": [[s, d] for s, d, _ in net.edges],
        "spend": {k: v.tolist() for k, v in res.spend.items()},
        "solver_tol": cfg.tol,
        "verification": {
            "recomputed_abscissa": recomputed,
            "budget_residual": budget_residual,
            "fitted_decay_rate": fitted,
            "checks": checks,
        },
    }


def cmd_solve(args):
    config, base = _load_config(args.config)
    budget = config.get("budget")
    if budget is None:
        raise ValueError("config needs a 'budget' entry for solve")
    net, prob, cfg = _load_problem(config, base, budget, args.tol)
    res = solve_allocation(prob, cfg)
    out = _outdir(args)
    payload = _result_payload(prob, res, cfg, config.get("p0", 0.2))
    with open(os.path.join(out, "result.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(os.path.join(out, "nodes.csv"), "w", encoding="utf-8") as fh:
        fh.write("node,beta_star,delta_star,spend_prevention,spend_correction\n")
        for i in range(net.n):
            fh.write(
                f"{i},{res.beta_star[i]:.10g},{res.delta_star[i]:.10g},"
                f"{res.spend['prevention'][i]:.10g},{res.spend['correction'][i]:.10g}\n"
            )
    with open(os.path.join(out, "edges.csv"), "w", encoding="utf-8") as fh:
        fh.write("src,dst,w_star,spend_traffic\n")
        for e, (s, d, _) in enumerate(net.edges):
            fh.write(f"{s},{d},{res.w_star[e]:.10g},{res.spend['traffic'][e]:.10g}\n")
    checks = payload["verification"]["checks"]
    print(
        f"epsilon_star={res.epsilon_star:.6g} total_spend={res.total_spend:.6g} "
        f"checks={checks}"
    )
    return EXIT_OK


def cmd_sweep(args):
    config, base = _load_config(args.config)
    budgets = config.get("budgets")
    if not budgets:
        raise ValueError("config needs a nonempty 'budgets' list for sweep")
    if sorted(budgets) != list(budgets):
        raise ValueError("'budgets' must be sorted ascending")
    net, prob, cfg = _load_problem(config, base, budgets[0], args.tol)
    rows = analysis.budget_sweep(prob, budgets, cfg)
    out = _outdir(args)
    with open(os.path.join(out, "sweep.csv"), "w", encoding="utf-8") as fh:
        fh.write("budget,epsilon_star,lambda_star,total_spend,status\n")
        for r in rows:
            fh.write(
                f"{r.budget:.10g},{r.epsilon_star:.10g},{r.lambda_star:.10g},"
                f"{r.total_spend:.10g},{r.status}\n"
            )
    ok_rows = [r for r in rows if r.status == gpsolve.OPTIMAL]
    svgfig.line_chart(
        [r.budget for r in ok_rows],
        [r.epsilon_star for r in ok_rows],
        os.path.join(out, "sweep.svg"),
        title="containment rate vs budget",
        xlabel="budget",
        ylabel="epsilon_star",
    )
    eps_sat = analysis.saturation_epsilon(prob)
    print(f"wrote sweep.csv/sweep.svg ({len(rows)} rows); saturation epsilon={eps_sat:.6g}")
    return EXIT_OK


def _parse_p0(spec, n):
    if spec == "zero":
        return np.zeros(n)
    if spec.startswith("const:"):
        level = float(spec.split(":", 1)[1])
        if not 0 <= level <= 1:
            raise ValueError("p0 level must lie in [0, 1]")
        return np.full(n, level)
    raise ValueError(f"unsupported p0 spec {spec!r} (use 'zero' or 'const:LEVEL')")


def _allocation_from_file(path, net):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    beta = np.asarray(payload["beta_star"], dtype=float)
    delta = np.asarray(payload["delta_star"], dtype=float)
    w = np.asarray(payload["w_star"], dtype=float)
    if len(beta) != net.n or len(w) != net.num_edges:
        raise ValueError("allocation file does not match the network dimensions")
    return beta, delta, w, payload


def cmd_simulate(args):
    config, base = _load_config(args.config)
    net, prob, cfg = _load_problem(config, base, config.get("budget", 0.0), args.tol)
    if args.allocation:
        beta, delta, w, payload = _allocation_from_file(args.allocation, net)
        eps_claimed = payload.get("epsilon_star")
    else:
        beta, delta, w = prob.bounds.beta_hi, prob.bounds.delta_lo, prob.bounds.w_hi
        eps_claimed = None
    p0 = _parse_p0(args.p0, net.n)
    sim_net = netgraph.reweight(net, w)
    t_end = float(config.get("t_end", 40.0))
    dt = float(config.get("dt", 0.01))
    traj = dynamics.integrate(p0, sim_net, beta, delta, t_end=t_end, dt=dt)
    out = _outdir(args)
    dynamics.save_trajectory_csv(traj, os.path.join(out, "trajectory.csv"))
    norms = traj.norms()
    svgfig.line_chart(
        traj.times[:: max(1, len(traj.times) // 400)],
        norms[:: max(1, len(traj.times) // 400)],
        os.path.join(out, "trajectory.svg"),
        title="infection norm over time",
        xlabel="t",
        ylabel="||p(t)||",
    )
    if np.all(norms == 0):
        print("trajectory identically zero (p0 = 0)")
        return EXIT_OK
    fitted = dynamics.decay_rate(traj)
    line = f"fitted_decay_rate={fitted:.6g}"
    if eps_claimed is not None and eps_claimed > 0:
        verdict = "PASS" if fitted >= eps_claimed - 1e-3 else "FAIL"
        line += f" claimed={eps_claimed:.6g} {verdict}"
    print(line)
    if args.exact:
        if net.n > dynamics.EXACT_MAX_NODES:
            raise ValueError(
                f"--exact needs n <= {dynamics.EXACT_MAX_NODES}, network has {net.n}"
            )
        exact = dynamics.exact_marginals(p0, sim_net, beta, delta, t_end=t_end, dt=dt)
        dynamics.save_trajectory_csv(exact, os.path.join(out, "trajectory_exact.csv"))
        print(f"exact joint sum error={exact.meta['joint_sum_error']:.3g}")
    return EXIT_OK


def cmd_analyze(args):
    config, base = _load_config(args.config)
    net, prob, cfg = _load_problem(config, base, config.get("budget", 0.0), args.tol)
    if not args.allocation:
        raise ValueError("analyze needs --allocation pointing at a solve result")
    beta, delta, w, payload = _allocation_from_file(args.allocation, net)
    invest = np.asarray(payload["spend"]["traffic"], dtype=float)
    cents = analysis.edge_centralities(net)
    records = [
        (src, dst, float(invest[e]), vc, rc)
        for e, (src, dst, vc, rc) in enumerate(cents)
    ]
    records.sort(key=lambda rec: (-rec[3], rec[0], rec[1]))
    out = _outdir(args)
    with open(os.path.join(out, "scatter.csv"), "w", encoding="utf-8") as fh:
        fh.write("src,dst,investment,eig_centrality,pagerank_centrality\n")
        for s, d, inv, vc, rc in records:
            fh.write(f"{s},{d},{inv:.10g},{vc:.10g},{rc:.10g}\n")
    svgfig.scatter_chart(
        [r[3] for r in records], [r[2] for r in records],
        os.path.join(out, "scatter_eig.svg"),
        title="investment vs eigenvector edge centrality",
        xlabel="v_ij", ylabel="investment",
    )
    svgfig.scatter_chart(
        [r[4] for r in records], [r[2] for r in records],
        os.path.join(out, "scatter_pagerank.svg"),
        title="investment vs PageRank edge centrality",
        xlabel="r_ij", ylabel="investment",
    )
    print(f"wrote scatter.csv and 2 scatter SVGs ({len(records)} edges)")
    return EXIT_OK


def cmd_verify(args):
    config, base = _load_config(args.config)
    budget = config.get("budget", 0.0)
    net, prob, cfg = _load_problem(config, base, budget, args.tol)
    lines = []

    def check(name, ok, detail=""):
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}{(' ' + detail) if detail else ''}")
        return ok

    ok = True
    ok &= check("strongly_connected", netgraph.is_strongly_connected(net))
    A = netgraph.adjacency(net)
    pp = spectral.perron(A)
    ok &= check(
        "perron_residuals",
        pp.resid_right <= pp.tol and pp.resid_left <= pp.tol,
        f"(rr={pp.resid_right:.2e}, rl={pp.resid_left:.2e})",
    )
    rho_oracle = spectral.perron_oracle(A)
    ok &= check(
        "perron_vs_oracle",
        abs(pp.rho - rho_oracle) <= 1e-6 * rho_oracle,
        f"(rho={pp.rho:.8g}, oracle={rho_oracle:.8g})",
    )
    beta, delta = prob.bounds.beta_hi, prob.bounds.delta_lo
    cap = prob.delta_cap
    lam = spectral.spectral_abscissa(net, beta, delta)
    shifted = spectral.perron(beta[:, None] * A + np.diag(cap - delta)).rho
    ok &= check(
        "shift_identity",
        abs(shifted - (lam + cap)) <= 1e-8 * max(1.0, abs(shifted)),
        f"(lhs={shifted:.8g}, rhs={lam + cap:.8g})",
    )
    # sensitivity spot check against central differences at node 0
    h = 1e-6
    bp, bm = beta.copy(), beta.copy()
    bp[0] += h
    bm[0] -= h
    fd = (
        spectral.spectral_abscissa(net, bp, delta, tol=1e-12)
        - spectral.spectral_abscissa(net, bm, delta, tol=1e-12)
    ) / (2 * h)
    sens = spectral.sensitivity_beta(net, beta, delta, 0, tol=1e-12)
    ok &= check(
        "sensitivity_fd", abs(sens - fd) <= 1e-4 * max(abs(fd), 1e-12),
        f"(analytic={sens:.8g}, fd={fd:.8g})",
    )
    if budget:
        try:
            res = solve_allocation(prob, cfg)
            lhs = eigen_constraint_values(prob, res)
            ok &= check(
                "eigen_row_tightness", abs(float(np.max(lhs)) - 1.0) <= 1e-6,
                f"(max_lhs={float(np.max(lhs)):.8g})",
            )
            ok &= check(
                "budget_feasible",
                res.total_spend <= prob.budget * (1 + 1e-6) + 1e-9,
                f"(spend={res.total_spend:.8g}, budget={prob.budget:.8g})",
            )
            if res.epsilon_star > 0:
                traj = dynamics.integrate(
                    np.full(net.n, 0.2), netgraph.reweight(net, res.w_star),
                    res.beta_star, res.delta_star, t_end=40.0, dt=0.01,
                )
                fitted = dynamics.decay_rate(traj)
                ok &= check(
                    "ode_decay", fitted >= res.epsilon_star - 1e-3,
                    f"(fitted={fitted:.6g}, epsilon_star={res.epsilon_star:.6g})",
                )
                ok &= check(
                    "clamp_small", traj.meta["clamp_max"] <= 1e-9,
                    f"(clamp={traj.meta['clamp_max']:.2e})",
                )
        except (InfeasibleError, IterationLimitError) as exc:
            ok &= check("allocation_solve", False, f"({exc})")
    out = _outdir(args)
    report = "\n".join(lines) + "\n"
    with open(os.path.join(out, "verify.txt"), "w", encoding="utf-8") as fh:
        fh.write(report)
    print(report, end="")
    return EXIT_OK if ok else EXIT_VALIDATION


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="netcontain",
        description="Budget-optimal traffic/vaccine/antidote allocation on contact networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic network edge list")
    g.add_argument("kind", choices=["cycle", "hub"])
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--extra", type=int, default=0)
    g.add_argument("--w-lo", type=float, default=1.0)
    g.add_argument("--w-hi", type=float, default=1.0)
    g.add_argument("--hubs", type=int, default=8)
    g.add_argument("--leaves", type=int, default=48)
    g.add_argument("--hub-weight", type=float, default=1.3)
    g.add_argument("--leaf-weight", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--name", default="network.csv")
    g.add_argument("--out-dir", default=None)
    g.set_defaults(func=cmd_generate)

    for name, func, needs_alloc in (
        ("solve", cmd_solve, False),
        ("sweep", cmd_sweep, False),
        ("simulate", cmd_simulate, True),
        ("analyze", cmd_analyze, True),
        ("verify", cmd_verify, False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out-dir", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        if needs_alloc:
            p.add_argument("--allocation", default=None)
        if name == "simulate":
            p.add_argument("--p0", default="const:0.2")
            p.add_argument("--exact", action="store_true")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, ConsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except IterationLimitError as exc:
        print(f"solver limit: {exc}", file=sys.stderr)
        return EXIT_SOLVER_LIMIT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
