"""Networked SIS dynamics: mean-field ODE, linear bound, exact and
stochastic desk-scale oracles.

The mean-field model tracks the marginal infection probabilities
``p_i(t)`` of every node:

    dp_i/dt = (1 - p_i) * beta_i * sum_j w_ij p_j - delta_i * p_i

with ``w_ij`` the weight of edge ``j -> i``.  The linear system
``dp/dt = (B A - D) p`` dominates the mean-field trajectory component-wise
and decays at the spectral abscissa, which is what the allocator
optimizes; :func:`decay_rate` fits the realized rate from a trajectory so
the optimizer's certificate can be checked empirically.

For small n the module also integrates the exact 2**n master equation of
the underlying Markov process and runs an event-driven stochastic
simulation, giving two independent cross-checks of the mean-field
picture.
"""

from dataclasses import dataclass

import numpy as np

from .netgraph import adjacency

__all__ = [
    "EpidemicState",
    "TrajectorySeries",
    "meanfield_rhs",
    "integrate",
    "linear_bound_trajectory",
    "decay_rate",
    "exact_marginals",
    "product_distribution",
    "gillespie",
    "save_trajectory_csv",
]

DEFAULT_DT = 1e-2
DEFAULT_T_END = 50.0
EXACT_MAX_NODES = 10


@dataclass(frozen=True)
class EpidemicState:
    """Marginal infection probabilities at one instant."""

    p: np.ndarray
    t: float

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class TrajectorySeries:
    """Time-stamped state vectors plus integrator metadata."""

    times: np.ndarray
    states: np.ndarray    # shape (len(times), n)
    meta: dict

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(states)):
            raise ValueError("states must be finite")
        if states.shape[0] != times.shape[0]:
            raise ValueError("times/states length mismatch")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def norms(self):
        return np.linalg.norm(self.states, axis=1)


def _check_rates(net, beta, delta):
    beta = np.asarray(beta, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if beta.shape != (net.n,) or delta.shape != (net.n,):
        raise ValueError("beta and delta must have one entry per node")
    if np.any(beta < 0) or np.any(delta < 0):
        raise ValueError("rates must be nonnegative")
    return beta, delta


def meanfield_rhs(p, net, beta, delta):
    """Right-hand side of the mean-field infection ODE."""
    beta, delta = _check_rates(net, beta, delta)
    p = np.asarray(p, dtype=float)
    A = adjacency(net)
    return (1.0 - p) * beta * (A @ p) - delta * p


def _rk4(f, p0, t_end, dt, clamp):
    steps = int(round(t_end / dt))
    if steps < 1:
        raise ValueError("t_end must cover at least one step")
    n = len(p0)
    out = np.empty((steps + 1, n))
    out[0] = p0
    p = np.array(p0, dtype=float)
    clamp_max = 0.0
    for k in range(steps):
        k1 = f(p)
        k2 = f(p + 0.5 * dt * k1)
        k3 = f(p + 0.5 * dt * k2)
        k4 = f(p + dt * k3)
        p = p + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(p)):
            raise RuntimeError(f"integration became non-finite at step {k + 1}")
        if clamp:
            clipped = np.clip(p, 0.0, 1.0)
            clamp_max = max(clamp_max, float(np.max(np.abs(clipped - p))))
            p = clipped
        out[k + 1] = p
    times = dt * np.arange(steps + 1)
    times[0] = 0.0
    return times, out, clamp_max


def integrate(p0, net, beta, delta, t_end=DEFAULT_T_END, dt=DEFAULT_DT):
    """Fixed-step 4th-order Runge-Kutta trajectory of the mean-field ODE.

    States are clipped to [0, 1] after every step; the largest clip
    applied is recorded in ``meta['clamp_max']`` and should remain at
    rounding scale (<= 1e-9) for a trustworthy run.
    """
    p0 = np.asarray(p0, dtype=float)
    if np.any(p0 < 0) or np.any(p0 > 1):
        raise ValueError("p0 must lie in [0, 1]^n")
    if dt <= 0:
        raise ValueError("dt must be positive")
    beta, delta = _check_rates(net, beta, delta)
    A = adjacency(net)

    def f(p):
        return (1.0 - p) * beta * (A @ p) - delta * p

    times, states, clamp_max = _rk4(f, p0, t_end, dt, clamp=True)
    meta = {"integrator": "rk4", "dt": dt, "clamp_max": clamp_max, "model": "meanfield"}
    return TrajectorySeries(times=times, states=states, meta=meta)


def linear_bound_trajectory(p0, net, beta, delta, t_end=DEFAULT_T_END, dt=DEFAULT_DT):
    """Trajectory of ``dp/dt = (B A - D) p``, the mean-field upper bound."""
    p0 = np.asarray(p0, dtype=float)
    if np.any(p0 < 0) or np.any(p0 > 1):
        raise ValueError("p0 must lie in [0, 1]^n")
    if dt <= 0:
        raise ValueError("dt must be positive")
    beta, delta = _check_rates(net, beta, delta)
    M = beta[:, None] * adjacency(net) - np.diag(delta)

    def f(p):
        return M @ p

    times, states, _ = _rk4(f, p0, t_end, dt, clamp=False)
    meta = {"integrator": "rk4", "dt": dt, "clamp_max": 0.0, "model": "linear"}
    return TrajectorySeries(times=times, states=states, meta=meta)


def decay_rate(traj, window=None):
    """Exponential decay rate fitted on ``-log ||p(t)||_2`` over a window.

    ``window`` is a ``(t_start, t_end)`` pair; by default the last half of
    the trajectory is used so that transients do not bias the fit.
    """
    norms = traj.norms()
    t = traj.times
    if window is None:
        window = (t[0] + 0.5 * (t[-1] - t[0]), t[-1])
    t_start, t_end = window
    mask = (t >= t_start) & (t <= t_end)
    if mask.sum() < 2:
        raise ValueError("window must contain at least two samples")
    if np.any(norms[mask] <= 0):
        raise ValueError("trajectory norm reached numerical zero inside the window")
    slope = np.polyfit(t[mask], np.log(norms[mask]), 1)[0]
    return float(-slope)


def product_distribution(p0):
    """Joint distribution of independent node marginals, indexed by bitmask."""
    p0 = np.asarray(p0, dtype=float)
    n = len(p0)
    dist = np.ones(1)
    for i in range(n):
        # bit i of the state index is node i's infection indicator
        dist = np.concatenate([dist * (1 - p0[i]), dist * p0[i]])
    return dist


def _masks(n):
    states = np.arange(2**n)
    return ((states[:, None] >> np.arange(n)) & 1).astype(float)  # (2^n, n)


def _generator(net, beta, delta):
    """Dense transition-rate matrix of the 2^n Markov process.

    ``Q[s, s2]`` is the jump rate from joint state s to s2; rows sum to
    zero.  A susceptible node i gets infected at rate
    ``beta_i * sum_j w_ij X_j``; an infected node recovers at rate
    ``delta_i``.
    """
    n = net.n
    A = adjacency(net)
    X = _masks(n)
    size = 2**n
    Q = np.zeros((size, size))
    pressure = X @ A.T  # pressure[s, i] = sum_j w_ij X_j(s)
    for s in range(size):
        for i in range(n):
            if X[s, i] == 1:
                Q[s, s ^ (1 << i)] += delta[i]
            else:
                rate = beta[i] * pressure[s, i]
                if rate > 0:
                    Q[s, s ^ (1 << i)] += rate
    Q[np.arange(size), np.arange(size)] = -Q.sum(axis=1)
    return Q


def exact_marginals(p0_config, net, beta, delta, t_end=DEFAULT_T_END, dt=DEFAULT_DT):
    """Exact node marginals from the 2^n master equation (n <= 10).

    ``p0_config`` is either a length-2^n joint distribution over bitmask
    states or a length-n vector of independent initial marginals.  The
    forward equations are integrated with the same fixed-step RK4 scheme
    as the mean-field model; ``meta['joint_sum_error']`` records the worst
    drift of the total probability mass.
    """
    n = net.n
    if n > EXACT_MAX_NODES:
        raise ValueError(f"exact model limited to n <= {EXACT_MAX_NODES}, got {n}")
    beta, delta = _check_rates(net, beta, delta)
    p0_config = np.asarray(p0_config, dtype=float)
    if p0_config.shape == (n,):
        dist0 = product_distribution(p0_config)
    elif p0_config.shape == (2**n,):
        dist0 = p0_config.copy()
    else:
        raise ValueError("p0_config must have length n or 2^n")
    if np.any(dist0 < 0) or abs(dist0.sum() - 1.0) > 1e-9:
        raise ValueError("initial joint distribution must be a probability vector")

    Q = _generator(net, beta, delta)
    QT = Q.T

    def f(pi):
        return QT @ pi

    times, dists, _ = _rk4(f, dist0, t_end, dt, clamp=False)
    X = _masks(n)
    marginals = dists @ X
    meta = {
        "integrator": "rk4",
        "dt": dt,
        "model": "exact",
        "joint_sum_error": float(np.max(np.abs(dists.sum(axis=1) - 1.0))),
    }
    return TrajectorySeries(times=times, states=marginals, meta=meta)


def gillespie(p0_sample, net, beta, delta, t_end, seed, n_runs, n_samples=101):
    """Run-averaged occupancy from event-driven stochastic simulation.

    Each run starts from the binary state ``p0_sample`` and evolves with
    exponential clocks (susceptible i infected at rate
    ``beta_i * sum_j w_ij X_j``, infected i recovering at rate
    ``delta_i``).  Run seeds are spawned deterministically from the master
    seed, so results are reproducible.  ``meta['stderr']`` holds the
    per-sample standard error of the averaged occupancy.
    """
    beta, delta = _check_rates(net, beta, delta)
    x0 = np.asarray(p0_sample, dtype=float)
    if x0.shape != (net.n,) or not np.all(np.isin(x0, (0.0, 1.0))):
        raise ValueError("p0_sample must be a binary vector of length n")
    A = adjacency(net)
    sample_times = np.linspace(0.0, t_end, n_samples)
    seeds = np.random.SeedSequence(seed).spawn(n_runs)
    acc = np.zeros((n_samples, net.n))
    acc2 = np.zeros((n_samples, net.n))
    for run_seq in seeds:
        rng = np.random.default_rng(run_seq)
        series = _gillespie_run(x0, A, beta, delta, t_end, sample_times, rng)
        acc += series
        acc2 += series**2
    mean = acc / n_runs
    var = np.maximum(acc2 / n_runs - mean**2, 0.0)
    meta = {
        "model": "gillespie",
        "n_runs": n_runs,
        "stderr": np.sqrt(var / n_runs),
    }
    # sample_times[0] == 0, strictly increasing by construction
    return TrajectorySeries(times=sample_times, states=mean, meta=meta)


def _gillespie_run(x0, A, beta, delta, t_end, sample_times, rng):
    x = x0.copy()
    t = 0.0
    out = np.empty((len(sample_times), len(x)))
    next_sample = 0
    while True:
        rates = np.where(x == 1, delta, beta * (A @ x))
        total = rates.sum()
        t_next = t + rng.exponential(1.0 / total) if total > 0 else np.inf
        while next_sample < len(sample_times) and sample_times[next_sample] <= t_next:
            out[next_sample] = x
            next_sample += 1
        if next_sample >= len(sample_times):
            break
        if not np.isfinite(t_next):
            # absorbed (all susceptible with no pressure, or frozen state)
            out[next_sample:] = x
            break
        t = t_next
        i = rng.choice(len(x), p=rates / total)
        x[i] = 1.0 - x[i]
    return out


def save_trajectory_csv(traj, path):
    """Write ``t,p_0,...,p_{n-1}`` rows."""
    n = traj.states.shape[1]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t," + ",".join(f"p_{i}" for i in range(n)) + "\n")
        for t, row in zip(traj.times, traj.states):
            fh.write(f"{t:.10g}," + ",".join(f"{v:.10g}" for v in row) + "\n")
