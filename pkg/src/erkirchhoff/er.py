"""Erdos-Renyi sampling and the statistics built on the centered Laplacian.

``sample_er`` draws one uniform variate per node pair from a PCG64
generator seeded with the given 64-bit seed, visiting pairs ``(i, j)``,
``i < j``, in lexicographic order. The pair is an edge iff its variate is
below ``p``. This makes the seed-to-graph map reproducible across
platforms and numpy versions that keep the PCG64 stream stable.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import ContractError, check_node_count, check_probability, check_seed
from .graph import Graph, build_laplacian
from .spectral import operator_norm, symmetric_eigen, trace_pinv

SAMPLER_VERSION = "pcg64-uniform-lex/1"


@dataclass(frozen=True)
class ErParams:
    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n", check_node_count(self.n))
        object.__setattr__(self, "p", check_probability(self.p))
        object.__setattr__(self, "seed", check_seed(self.seed))

    @property
    def sigma2(self):
        """Edge-indicator variance ``p (1 - p)``."""
        return self.p * (1.0 - self.p)


def sample_er(params):
    """Draw a G(n, p) graph deterministically from ``params.seed``."""
    n, p = params.n, params.p
    rng = np.random.Generator(np.random.PCG64(params.seed))
    rows, cols = np.triu_indices(n, 1)
    present = rng.random(rows.size) < p
    a = np.zeros((n, n), dtype=bool)
    a[rows[present], cols[present]] = True
    a |= a.T
    return Graph(a)


def expected_laplacian(n, p):
    """``p (n I - 11^T)``, the mean Laplacian of G(n, p)."""
    l0 = np.full((n, n), -p)
    np.fill_diagonal(l0, p * (n - 1))
    return l0


def centered_laplacian(g, p):
    """``L - p (n I - 11^T)``; off-diagonal entries are ``-(A_ij - p)``."""
    p = check_probability(p)
    return build_laplacian(g) - expected_laplacian(g.n, p)


def xn_statistic(g, p):
    """``p * trace(L^+)``, finite even for disconnected graphs."""
    return check_probability(p) * trace_pinv(build_laplacian(g))


def en_threshold(n, p):
    """Spectral-norm threshold ``5 sqrt(n p ln n)`` of the event E_n."""
    return 5.0 * math.sqrt(n * p * math.log(n))


def check_event_en(l1, n, p):
    """True iff ``||L1||_op <= 5 sqrt(n p ln n)``."""
    n = check_node_count(n)
    return operator_norm(l1) <= en_threshold(n, p)


def l1_norm_from_laplacian_eigenvalues(eigenvalues, n, p):
    """Spectral norm of the centered Laplacian, from the spectrum of ``L``.

    ``L`` and ``p (n I - 11^T)`` commute and share the eigenvector ``1``,
    so the centered matrix has eigenvalue 0 on ``1`` and ``lambda_i - n p``
    on the rest. The smallest eigenvalue of ``L`` belongs to ``1``.
    """
    w = np.sort(np.asarray(eigenvalues, dtype=np.float64))
    if w.size <= 1:
        return 0.0
    return float(np.max(np.abs(w[1:] - n * p)))


def l1_trace_power(l1, k):
    """``trace(L1^k)`` for ``k`` in 1..4, as a power sum of eigenvalues."""
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= 4:
        raise ContractError(f"k must be one of 1, 2, 3, 4; got {k!r}")
    w = symmetric_eigen(l1).eigenvalues
    return float(np.sum(w ** int(k)))


def truncated_xn_series(l1, n, p, order):
    """Partial sum ``(1/n) [(n-1) + sum_{k<=order} (-1/(np))^k trace(L1^k)]``.

    Valid as an approximation of ``X_n`` only when ``||L1|| < n p``.
    """
    w = symmetric_eigen(l1).eigenvalues
    total = float(n - 1)
    for k in range(1, order + 1):
        total += (-1.0 / (n * p)) ** k * float(np.sum(w**k))
    return total / n
