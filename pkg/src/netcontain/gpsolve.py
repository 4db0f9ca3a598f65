"""Interior-point solver for geometric programs in standard form.

The change of variables ``y = log x`` turns a program

    minimize    f(x)                      (posynomial)
    subject to  q_i(x) <= 1               (posynomials)
                h_j(x) == 1               (monomials)

into a smooth convex problem: the objective and inequality constraints
become log-sum-exp functions ``F(y) = log f(exp y)`` and
``Q_i(y) = log q_i(exp y) <= 0``, and each monomial equality becomes an
affine equality ``b_j . y + log d_j = 0``.  The solver eliminates the
equalities by projecting onto their affine solution set, finds a strictly
feasible start with a phase-I auxiliary program (minimize s subject to
``Q_i(y) <= s``), and then follows the classical log-barrier path with
damped Newton steps and backtracking line search.  Every optimum reported
is a global one, up to the duality-gap tolerance, because the transformed
problem is convex.

No randomness anywhere: identical inputs give identical outputs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .posy import GpProgram, compile_posynomial, evaluate

__all__ = [
    "SolverConfig",
    "Solution",
    "PhaseOneResult",
    "solve",
    "phase_one",
    "OPTIMAL",
    "INFEASIBLE",
    "ITERATION_LIMIT",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration_limit"

PHASE1_YBOX = 30.0  # phase-I search box in log space, x within e**+-30


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8            # duality-gap tolerance on the log-scale objective
    max_newton: int = 200        # Newton step cap per centering stage
    barrier_mu: float = 10.0     # outer-loop multiplier on the barrier parameter
    feas_margin: float = 1e-3    # phase-I early exit once q_i < 1 - feas_margin

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.barrier_mu <= 1:
            raise ValueError("barrier_mu must exceed 1")


@dataclass(frozen=True)
class Solution:
    x: np.ndarray
    objective: float
    status: str
    gap: float
    constraint_residuals: np.ndarray   # slack 1 - q_i(x) per inequality
    eq_residuals: np.ndarray           # |b.y + log d| per equality
    kkt_residual: float
    newton_iters: int
    outer_trace: tuple                 # objective after each centering stage


@dataclass(frozen=True)
class PhaseOneResult:
    feasible: bool
    x: np.ndarray          # strictly feasible point when feasible
    certificate: float     # phase-I optimum in log scale; > 0 proves infeasibility
    newton_iters: int


class _Infeasible(Exception):
    def __init__(self, certificate):
        self.certificate = certificate


def _safe_exp(v):
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def _equality_subspace(prog, nv):
    """Particular solution and null-space basis for the affine equalities."""
    eqs = prog.equalities
    if not eqs:
        return np.zeros(nv), np.eye(nv)
    E = np.zeros((len(eqs), nv))
    r = np.zeros(len(eqs))
    for row, h in enumerate(eqs):
        for v, a in h.exponents:
            E[row, v] = a
        r[row] = -np.log(h.coeff)
    y_p, *_ = np.linalg.lstsq(E, r, rcond=None)
    if np.max(np.abs(E @ y_p - r)) > 1e-9:
        raise _Infeasible(float(np.max(np.abs(E @ y_p - r))))
    U, s, Vt = np.linalg.svd(E)
    rank = int(np.sum(s > max(E.shape) * np.finfo(float).eps * (s[0] if len(s) else 1.0)))
    Z = Vt[rank:].T
    return y_p, Z


def _newton(feval, fgh, z0, max_iter, label="newton", stop_when=None):
    """Damped Newton with backtracking; returns (z, converged, iters).

    ``stop_when(z)`` allows early termination once an iterate satisfies an
    external goal; phase I uses it to quit as soon as strict feasibility
    is reached, since its auxiliary objective may be unbounded below.
    """
    z = z0.copy()
    f = feval(z)
    if not np.isfinite(f):
        raise RuntimeError(f"{label}: start point outside barrier domain")
    for it in range(max_iter):
        if stop_when is not None and stop_when(z):
            return z, True, it
        f, g, H = fgh(z)
        H = 0.5 * (H + H.T)
        reg = 0.0
        d = None
        for _ in range(12):
            try:
                d = np.linalg.solve(H + reg * np.eye(len(z)), -g)
            except np.linalg.LinAlgError:
                d = None
            if d is not None and np.all(np.isfinite(d)) and g @ d < 0:
                break
            reg = max(1e-12, reg * 100.0, 1e-12 * float(np.trace(H)))
        if d is None or g @ d >= 0:
            # no descent direction: converged iff the gradient itself vanished
            return z, bool(np.max(np.abs(g)) <= 1e-12), it
        decr = -0.5 * float(g @ d)
        if decr <= 1e-11 * (1.0 + abs(f)):
            return z, True, it
        # cap the log-space step: flat barrier directions can suggest
        # astronomical moves whose quadratic model is meaningless
        step = min(1.0, 10.0 / float(np.max(np.abs(d))))
        gd = float(g @ d)
        while step > 1e-14:
            f_new = feval(z + step * d)
            if np.isfinite(f_new) and f_new <= f + 0.25 * step * gd:
                break
            step *= 0.5
        else:
            # line search stalled; accept only if already near stationarity
            return z, decr <= 1e-6 * (1.0 + abs(f)), it
        z = z + step * d
        f = f_new
    return z, False, max_iter


class _Transformed:
    """Compiled log-scale view of a program restricted to the equality set."""

    def __init__(self, prog):
        self.nv = len(prog.registry)
        self.obj = compile_posynomial(prog.objective)
        self.cons = [compile_posynomial(q) for q in prog.inequalities]
        self.y_p, self.Z = _equality_subspace(prog, self.nv)
        self.nz = self.Z.shape[1]

    def y_at(self, z):
        return self.y_p + self.Z @ z

    def q_values(self, y):
        return np.array([c.value(y) for c in self.cons])

    def barrier(self, t):
        """Value/grad/Hess closures for t*F(y) + phi(y) in z coordinates."""

        def feval(z):
            y = self.y_at(z)
            qv = self.q_values(y)
            if np.any(qv >= 0):
                return np.inf
            return t * self.obj.value(y) - float(np.sum(np.log(-qv)))

        def fgh(z):
            y = self.y_at(z)
            G = np.zeros(self.nv)
            H = np.zeros((self.nv, self.nv))
            fval, g_s, H_s = self.obj.value_grad_hess(y)
            G[self.obj.support] += t * g_s
            H[np.ix_(self.obj.support, self.obj.support)] += t * H_s
            total = t * fval
            for c in self.cons:
                q, g_s, H_s = c.value_grad_hess(y)
                slack = -q
                total -= np.log(slack)
                G[c.support] += g_s / slack
                H[np.ix_(c.support, c.support)] += (
                    H_s / slack + np.outer(g_s, g_s) / slack**2
                )
            return total, self.Z.T @ G, self.Z.T @ H @ self.Z

        return feval, fgh

    def phase1_barrier(self, t):
        """Barrier for: minimize s subject to Q_i(y) <= s; state (z, s).

        The search is confined to ``|y_i| <= PHASE1_YBOX`` by extra barrier
        terms.  Without them the phase-I analytic center need not exist:
        constraints that become arbitrarily slack in log scale (an
        eigenvalue bound pushed to infinity, say) reward unbounded drift.
        The box is wide enough (x within e**+-30) to be inert for any
        realistically scaled program.
        """

        def feval(p):
            z, s = p[:-1], p[-1]
            y = self.y_at(z)
            if np.max(np.abs(y)) >= PHASE1_YBOX:
                return np.inf
            slack = s - self.q_values(y)
            if np.any(slack <= 0):
                return np.inf
            box = np.sum(np.log(PHASE1_YBOX - y) + np.log(PHASE1_YBOX + y))
            return t * s - float(np.sum(np.log(slack))) - float(box)

        def fgh(p):
            z, s = p[:-1], p[-1]
            y = self.y_at(z)
            G = np.zeros(self.nv)
            H = np.zeros((self.nv, self.nv))
            Gs_cross = np.zeros(self.nv)
            total = t * s
            grad_s = t
            hess_ss = 0.0
            for c in self.cons:
                q, g_s, H_s = c.value_grad_hess(y)
                r = 1.0 / (s - q)
                total -= np.log(s - q)
                G[c.support] += r * g_s
                grad_s -= r
                H[np.ix_(c.support, c.support)] += r * H_s + r**2 * np.outer(g_s, g_s)
                Gs_cross[c.support] -= r**2 * g_s
                hess_ss += r**2
            hi = PHASE1_YBOX - y
            lo = PHASE1_YBOX + y
            total -= float(np.sum(np.log(hi) + np.log(lo)))
            G += 1.0 / hi - 1.0 / lo
            H[np.diag_indices(self.nv)] += 1.0 / hi**2 + 1.0 / lo**2
            nz = self.nz
            g_full = np.empty(nz + 1)
            g_full[:nz] = self.Z.T @ G
            g_full[nz] = grad_s
            H_full = np.empty((nz + 1, nz + 1))
            H_full[:nz, :nz] = self.Z.T @ H @ self.Z
            cross = self.Z.T @ Gs_cross
            H_full[:nz, nz] = cross
            H_full[nz, :nz] = cross
            H_full[nz, nz] = hess_ss
            return total, g_full, H_full

        return feval, fgh


def _run_phase_one(tr, cfg):
    """Find a strictly feasible z or prove none exists.

    Returns (z, newton_iters) or raises _Infeasible with the certificate.
    Deterministic: starts from the projection of y = 0 onto the equality
    set with the auxiliary slack just above the worst constraint.
    """
    z = np.zeros(tr.nz)
    q0 = tr.q_values(tr.y_at(z))
    target = float(np.log1p(-cfg.feas_margin))
    if np.max(q0) < target:
        return z, 0
    s = float(np.max(q0)) + 1.0
    p = np.concatenate([z, [s]])
    t = 1.0
    iters = 0
    m = len(tr.cons)
    # stop as soon as strictly feasible: the auxiliary objective can be
    # unbounded below when the original interior is unbounded in log scale
    done = lambda p: p[-1] < target
    for _ in range(300):
        feval, fgh = tr.phase1_barrier(t)
        p, _, it = _newton(feval, fgh, p, cfg.max_newton, label="phase-1", stop_when=done)
        iters += it
        s = p[-1]
        if s < target:
            return p[:-1], iters
        if m / t <= max(cfg.tol, 1e-10):
            break
        t *= cfg.barrier_mu
    s = float(p[-1])
    if s < -1e-12:
        return p[:-1], iters
    raise _Infeasible(s)


def phase_one(prog, cfg=None):
    """Strictly feasible point for a program, or an infeasibility certificate."""
    cfg = cfg or SolverConfig()
    try:
        tr = _Transformed(prog)
        z, iters = _run_phase_one(tr, cfg)
    except _Infeasible as exc:
        return PhaseOneResult(
            feasible=False, x=None, certificate=float(exc.certificate), newton_iters=0
        )
    y = tr.y_at(z)
    return PhaseOneResult(
        feasible=True,
        x=np.exp(y),
        certificate=float(np.max(tr.q_values(y))),
        newton_iters=iters,
    )


def _polish(tr, t, z, max_steps=15):
    """Pure Newton steps on the final barrier until the stationarity
    residual (KKT gradient over t) stops improving or reaches 1e-8.

    The loose decrement test inside :func:`_newton` is enough for the
    duality gap but can leave the Lagrangian gradient around 1e-4 of a
    unit; a few undamped steps in the quadratic basin squeeze it to
    rounding level.
    """
    feval, fgh = tr.barrier(t)
    _, g, H = fgh(z)
    best = float(np.max(np.abs(g))) / t
    steps = 0
    for _ in range(max_steps):
        if best <= 1e-8:
            break
        H = 0.5 * (H + H.T)
        try:
            d = np.linalg.solve(H + 1e-14 * np.eye(len(z)), -g)
        except np.linalg.LinAlgError:
            break
        z_new = z + d
        if not np.isfinite(feval(z_new)):
            break
        _, g_new, H_new = fgh(z_new)
        res = float(np.max(np.abs(g_new))) / t
        if not np.isfinite(res) or res >= best:
            break
        z, g, H, best = z_new, g_new, H_new, res
        steps += 1
    return z, steps


def _finish(prog, tr, y, status, gap, t_final, newton_total, trace):
    x = np.exp(y)
    qv = tr.q_values(y)
    eq_res = np.array(
        [
            abs(sum(a * y[v] for v, a in h.exponents) + np.log(h.coeff))
            for h in prog.equalities
        ]
    )
    # KKT stationarity with multipliers recovered from the barrier.
    kkt = np.zeros(tr.nv)
    _, g_s, _ = tr.obj.value_grad_hess(y)
    kkt[tr.obj.support] += g_s
    if t_final > 0:
        for c, q in zip(tr.cons, qv):
            _, g_s, _ = c.value_grad_hess(y)
            kkt[c.support] += g_s / (t_final * (-q))
    kkt_res = float(np.max(np.abs(tr.Z.T @ kkt))) if tr.nz else 0.0
    return Solution(
        x=x,
        objective=float(evaluate(prog.objective, x)),
        status=status,
        gap=gap,
        constraint_residuals=1.0 - np.exp(qv) if len(qv) else np.zeros(0),
        eq_residuals=eq_res,
        kkt_residual=kkt_res,
        newton_iters=newton_total,
        outer_trace=tuple(trace),
    )


def solve(prog, cfg=None):
    """Globally minimize a GpProgram; see the module docstring for the method."""
    cfg = cfg or SolverConfig()
    if not isinstance(prog, GpProgram):
        raise TypeError("solve expects a GpProgram")
    try:
        tr = _Transformed(prog)
    except _Infeasible as exc:
        return Solution(
            x=None, objective=np.nan, status=INFEASIBLE, gap=float(exc.certificate),
            constraint_residuals=np.zeros(0), eq_residuals=np.zeros(0),
            kkt_residual=np.nan, newton_iters=0, outer_trace=(),
        )
    m = len(tr.cons)
    newton_total = 0
    trace = []

    if tr.nz == 0:
        # equalities pin the point; only feasibility is left to check
        y = tr.y_at(np.zeros(0))
        qv = tr.q_values(y) if m else np.zeros(0)
        if np.any(qv > 10 * cfg.tol):
            return _finish(prog, tr, y, INFEASIBLE, float(np.max(qv)), 0.0, 0, trace)
        return _finish(prog, tr, y, OPTIMAL, 0.0, 0.0, 0, trace)

    if m == 0:
        feval, fgh = tr.barrier(1.0)
        z, ok, it = _newton(feval, fgh, np.zeros(tr.nz), cfg.max_newton)
        z, extra = _polish(tr, 1.0, z)
        status = OPTIMAL if ok else ITERATION_LIMIT
        trace.append(_safe_exp(tr.obj.value(tr.y_at(z))))
        return _finish(prog, tr, tr.y_at(z), status, 0.0, 0.0, it + extra, trace)

    try:
        z, it1 = _run_phase_one(tr, cfg)
    except _Infeasible as exc:
        return Solution(
            x=None, objective=np.nan, status=INFEASIBLE, gap=float(exc.certificate),
            constraint_residuals=np.zeros(0), eq_residuals=np.zeros(0),
            kkt_residual=np.nan, newton_iters=0, outer_trace=(),
        )
    newton_total += it1

    t = 1.0
    status = OPTIMAL
    for _ in range(300):
        feval, fgh = tr.barrier(t)
        z, ok, it = _newton(feval, fgh, z, cfg.max_newton)
        newton_total += it
        trace.append(_safe_exp(tr.obj.value(tr.y_at(z))))
        if not ok:
            status = ITERATION_LIMIT
            break
        if m / t <= cfg.tol:
            break
        t *= cfg.barrier_mu
    else:
        status = ITERATION_LIMIT
    if status == OPTIMAL:
        z, extra = _polish(tr, t, z)
        newton_total += extra
        trace[-1] = _safe_exp(tr.obj.value(tr.y_at(z)))
    return _finish(prog, tr, tr.y_at(z), status, m / t, t, newton_total, trace)
