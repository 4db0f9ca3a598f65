"""Dominant-eigenvalue machinery for nonnegative irreducible matrices.

For a strongly connected weighted digraph the dominant eigenvalue of any
nonnegative matrix built on it is real, simple and equal to the spectral
radius, with strictly positive left and right eigenvectors.  This module
computes that eigentriple by shifted power iteration, derives from it the
spectral abscissa of ``diag(beta) @ A - diag(delta)`` (the linear growth
rate of a networked SIS outbreak), and exposes the first-order eigenvalue
sensitivities

    d(lambda1)/d(beta_k) =  w_k * (A[k, :] @ v)   > 0
    d(lambda1)/d(delta_k) = -w_k * v_k            < 0

where v, w are the right/left dominant eigenvectors normalized so that
``w @ v = 1``.
"""

from dataclasses import dataclass

import numpy as np

from .netgraph import adjacency, support_is_strongly_connected

__all__ = [
    "PerronPair",
    "perron",
    "perron_oracle",
    "spectral_abscissa",
    "sensitivity_beta",
    "sensitivity_delta",
]

DEFAULT_TOL = 1e-10
MAX_ITER = 100_000


@dataclass(frozen=True)
class PerronPair:
    """Spectral radius with positive right/left eigenvectors.

    Normalization: ``norm(right) == 1`` and ``left @ right == 1``.  The
    residuals recorded at construction are relative infinity norms of
    ``M v - rho v`` and ``w M - rho w``.
    """

    rho: float
    right: np.ndarray
    left: np.ndarray
    resid_right: float
    resid_left: float
    tol: float


def _validate_square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if np.any(M < 0) or not np.all(np.isfinite(M)):
        raise ValueError("matrix must be nonnegative and finite")
    return M


def perron(M, tol=DEFAULT_TOL):
    """Dominant eigentriple of a nonnegative irreducible matrix.

    Power iteration is run on ``M + s I`` (and its transpose for the left
    vector) with ``s`` the maximum row sum; the positive diagonal makes the
    iteration matrix primitive, so plain power iteration converges even on
    periodic structures such as bipartite cycles.  The shift cancels in the
    residuals, which are tested against the unshifted matrix:
    ``max|M v - rho v| / rho <= tol`` and likewise on the left.

    Raises
    ------
    ValueError
        If M is not nonnegative or its support digraph is not strongly
        connected (irreducibility violated).
    RuntimeError
        If the residual test is not met within the iteration cap.
    """
    M = _validate_square(M)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not support_is_strongly_connected(M):
        raise ValueError("matrix is reducible: support digraph not strongly connected")
    n = M.shape[0]
    s = float(np.max(M.sum(axis=1)))
    Ms = M + s * np.eye(n)
    v = np.full(n, 1.0 / np.sqrt(n))
    w = np.full(n, 1.0 / np.sqrt(n))
    rho = 0.0
    for _ in range(MAX_ITER):
        Mv = Ms @ v
        wM = w @ Ms
        # Rayleigh-like quotient for the shifted matrix, then unshift.
        rho_s = float(w @ Mv) / float(w @ v)
        rho = rho_s - s
        if rho > 0:
            # residuals measured in the reported normalization:
            # unit right vector, left vector rescaled so that w.v = 1
            rr = float(np.max(np.abs(Mv - rho_s * v))) / rho
            rl = float(np.max(np.abs(wM - rho_s * w))) / (rho * float(w @ v))
            if rr <= tol and rl <= tol:
                break
        v = Mv / np.linalg.norm(Mv)
        w = wM / np.linalg.norm(wM)
    else:
        raise RuntimeError(f"power iteration did not converge within {MAX_ITER} iterations")
    v = v / np.linalg.norm(v)
    w = w / float(w @ v)
    Mv = M @ v
    wM = w @ M
    rr = float(np.max(np.abs(Mv - rho * v))) / rho
    rl = float(np.max(np.abs(wM - rho * w))) / rho
    v.setflags(write=False)
    w.setflags(write=False)
    return PerronPair(rho=rho, right=v, left=w, resid_right=rr, resid_left=rl, tol=tol)


def perron_oracle(M, k_max=20):
    """Spectral radius estimate ``norm(M^k)**(1/k)`` with ``k = 2**k_max``.

    Independent cross-check for :func:`perron`: repeated squaring with
    per-step normalization to avoid overflow; the divided-out scale is
    accumulated in log space.  The operator 2-norm keeps the constant in
    ``norm(M^k) ~ C rho^k`` close to 1, so k = 2**20 already puts the
    relative error below 1e-6.  Intended for tests only.
    """
    M = _validate_square(M)
    N = M.copy()
    log_scale = 0.0  # N == M^(2^t) * exp(-log_scale)
    for _ in range(k_max):
        s = float(np.linalg.norm(N, 2))
        if s == 0.0:
            raise ValueError("matrix is nilpotent; no positive spectral radius")
        N = (N / s) @ (N / s)
        log_scale = 2.0 * (log_scale + np.log(s))
    k = 2.0 ** k_max
    return float(np.exp((np.log(np.linalg.norm(N, 2)) + log_scale) / k))


def _rate_vectors(net, beta, delta):
    beta = np.asarray(beta, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if beta.shape != (net.n,) or delta.shape != (net.n,):
        raise ValueError("beta and delta must have one entry per node")
    if np.any(beta <= 0) or np.any(delta <= 0):
        raise ValueError("beta and delta must be strictly positive")
    return beta, delta


def _shifted_matrix(net, beta, delta):
    """Nonnegative irreducible ``B A + (max(delta)+1) I - D`` and its shift."""
    A = adjacency(net)
    shift = float(np.max(delta)) + 1.0
    M = beta[:, None] * A + np.diag(shift - delta)
    return M, shift


def spectral_abscissa(net, beta, delta, tol=DEFAULT_TOL):
    """Largest eigenvalue real part of ``diag(beta) @ A - diag(delta)``.

    Computed as the Perron root of the shifted nonnegative matrix
    ``B A + (max(delta)+1) I - D`` minus the shift; the +1 keeps the
    diagonal strictly positive so the power iteration always converges.
    Negative return values certify exponential die-out of an outbreak at
    that rate.
    """
    beta, delta = _rate_vectors(net, beta, delta)
    M, shift = _shifted_matrix(net, beta, delta)
    return perron(M, tol=tol).rho - shift


def sensitivity_beta(net, beta, delta, k, tol=DEFAULT_TOL):
    """First-order response of the abscissa to the infection rate at node k.

    Always strictly positive: raising any infection rate raises the growth
    rate of the outbreak.
    """
    beta, delta = _rate_vectors(net, beta, delta)
    M, _ = _shifted_matrix(net, beta, delta)
    pp = perron(M, tol=tol)
    a_k = adjacency(net)[k, :]
    return float(pp.left[k] * (a_k @ pp.right))


def sensitivity_delta(net, beta, delta, k, tol=DEFAULT_TOL):
    """First-order response of the abscissa to the recovery rate at node k.

    Always strictly negative: raising any recovery rate lowers the growth
    rate.
    """
    beta, delta = _rate_vectors(net, beta, delta)
    M, _ = _shifted_matrix(net, beta, delta)
    pp = perron(M, tol=tol)
    return float(-pp.left[k] * pp.right[k])
