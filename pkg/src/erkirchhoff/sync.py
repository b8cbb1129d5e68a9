"""Synchronization of translations and its Cramer-Rao bound.

Model: for each edge ``(i, j)``, ``i < j``, of a connected graph we observe
``h_ij = x_i - x_j + noise`` with isotropic Gaussian noise of variance
``sigma2`` per axis. Positions are only identifiable up to a global shift,
so both truth and estimates are centered. The least-squares estimate
``L^+ B^T h`` (``B`` the signed edge-node incidence matrix) is the maximum
likelihood estimator and meets the bound ``d * sigma2 * trace(L^+)`` with
equality.

Random streams come from ``numpy.random.SeedSequence(seed, spawn_key=k)``:
``k = (0,)`` for the truth, ``(1,)`` for a single problem's noise and
``(1, b)`` for block ``b`` of a Monte Carlo run.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._validation import ContractError, check_nonnegative, check_seed
from .graph import build_laplacian, is_connected
from .spectral import pseudo_inverse
from .theory import crb_lower_bound

TRIAL_BLOCK = 1000


def _rng(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def incidence_matrix(g):
    """Signed ``(m, n)`` incidence: row ``e = (i, j)`` has +1 at ``i`` and -1 at ``j``."""
    edges = g.edges()
    b = np.zeros((len(edges), g.n))
    rows = np.arange(len(edges))
    b[rows, edges[:, 0]] = 1.0
    b[rows, edges[:, 1]] = -1.0
    return b


def _check_problem_inputs(g, d, sigma2, seed):
    if not is_connected(g):
        raise ContractError("synchronization needs a connected measurement graph")
    if int(d) != d or d < 1:
        raise ContractError(f"dimension d must be a positive integer, got {d!r}")
    return int(d), check_nonnegative(sigma2, "sigma2"), check_seed(seed)


def _centered(x):
    return x - x.mean(axis=0, keepdims=True)


@dataclass(frozen=True)
class SyncProblem:
    graph: object
    d: int
    truth: np.ndarray
    sigma2: float
    edges: np.ndarray
    measurements: np.ndarray

    def measurement(self, i, j):
        """``h_ij``; the reversed pair returns ``-h_ji``."""
        for k, (a, b) in enumerate(self.edges):
            if (a, b) == (i, j):
                return self.measurements[k]
            if (a, b) == (j, i):
                return -self.measurements[k]
        raise KeyError((i, j))


@dataclass(frozen=True)
class SyncEstimate:
    estimates: np.ndarray
    residual_sq: float


def sample_sync_problem(g, d, sigma2, seed=0):
    """Draw centered standard-normal positions and one noisy measurement per edge."""
    d, sigma2, seed = _check_problem_inputs(g, d, sigma2, seed)
    truth = _centered(_rng(seed, 0).standard_normal((g.n, d)))
    edges = g.edges()
    noise = math.sqrt(sigma2) * _rng(seed, 1).standard_normal((len(edges), d))
    h = truth[edges[:, 0]] - truth[edges[:, 1]] + noise
    return SyncProblem(graph=g, d=d, truth=truth, sigma2=sigma2, edges=edges, measurements=h)


def mle_estimate(problem, pinv=None):
    """Least-squares positions ``L^+ B^T h``, centered."""
    if pinv is None:
        pinv = pseudo_inverse(build_laplacian(problem.graph))
    b = incidence_matrix(problem.graph).T @ problem.measurements
    est = _centered(pinv @ b)
    return SyncEstimate(estimates=est, residual_sq=float(np.sum((problem.truth - est) ** 2)))


@dataclass(frozen=True)
class CrbReport:
    empirical_mse: float
    crb: float
    ratio: float
    trials: int
    mse_se: float
    mean_error: np.ndarray
    error_se: np.ndarray

    def __iter__(self):
        return iter((self.empirical_mse, self.crb, self.ratio))


def _run_block(gain, truth_diff, truth, sigma2, seed, block, size):
    m, d = truth_diff.shape
    noise = math.sqrt(sigma2) * _rng(seed, 1, block).standard_normal((size, m, d))
    est = np.einsum("nm,tmd->tnd", gain, truth_diff[None] + noise)
    est -= est.mean(axis=1, keepdims=True)
    err = est - truth[None]
    sq = np.sum(err**2, axis=(1, 2))
    return sq.sum(), np.sum(sq**2), err.sum(axis=0), np.sum(err**2, axis=0)


def crb_experiment(g, d, sigma2, trials, seed=0, threads=1):
    """Monte Carlo mean of ``sum_i ||x_i - xhat_i||^2`` against the Cramer-Rao bound.

    Truth is drawn once; trials are split into blocks of ``TRIAL_BLOCK``
    with independent noise streams, and block results are combined in
    block order so the report is identical for any ``threads``.
    ``ratio`` is 1 by convention when the bound is 0.
    """
    d, sigma2, seed = _check_problem_inputs(g, d, sigma2, seed)
    trials = int(trials)
    if trials < 1:
        raise ContractError(f"trials must be >= 1, got {trials}")
    lap = build_laplacian(g)
    pinv = pseudo_inverse(lap)
    crb = crb_lower_bound(d * sigma2, float(np.trace(pinv)))
    truth = _centered(_rng(seed, 0).standard_normal((g.n, d)))
    edges = g.edges()
    truth_diff = truth[edges[:, 0]] - truth[edges[:, 1]]
    gain = pinv @ incidence_matrix(g).T

    sizes = [min(TRIAL_BLOCK, trials - start) for start in range(0, trials, TRIAL_BLOCK)]
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        parts = list(pool.map(
            lambda bs: _run_block(gain, truth_diff, truth, sigma2, seed, bs[0], bs[1]),
            enumerate(sizes),
        ))
    sq_sum = sum(p[0] for p in parts)
    sq_sq_sum = sum(p[1] for p in parts)
    err_sum = sum(p[2] for p in parts)
    err_sq_sum = sum(p[3] for p in parts)

    mse = sq_sum / trials
    mean_err = err_sum / trials
    if trials > 1:
        mse_var = max(sq_sq_sum / trials - mse**2, 0.0) * trials / (trials - 1)
        err_var = np.maximum(err_sq_sum / trials - mean_err**2, 0.0) * trials / (trials - 1)
    else:
        mse_var, err_var = math.nan, np.full_like(mean_err, math.nan)
    ratio = 1.0 if crb == 0 else mse / crb
    return CrbReport(
        empirical_mse=float(mse),
        crb=crb,
        ratio=float(ratio),
        trials=trials,
        mse_se=math.sqrt(mse_var / trials),
        mean_error=mean_err,
        error_se=np.sqrt(err_var / trials),
    )
