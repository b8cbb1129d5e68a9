"""Symmetric eigendecomposition, Laplacian pseudoinverse and resistance distances.

Eigenvalues below ``n * eps * max(|lambda|_max, 1)`` in magnitude are
treated as exact zeros. The pseudoinverse inverts every other eigenvalue
and drops the zero modes.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import ContractError, check_symmetric
from .graph import INF, build_laplacian, is_connected


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    zero_count: int
    zero_threshold: float
    eigenvectors: Optional[np.ndarray] = None

    @property
    def nonzero(self):
        """Boolean mask of eigenvalues classified as nonzero."""
        return np.abs(self.eigenvalues) > self.zero_threshold

    def pinv_trace(self):
        """Sum of reciprocals of the nonzero eigenvalues."""
        return float(np.sum(1.0 / self.eigenvalues[self.nonzero]))


def zero_threshold(eigenvalues):
    """Numerical-rank cutoff ``n * eps * max(|lambda|_max, 1)``."""
    eigenvalues = np.asarray(eigenvalues)
    n = eigenvalues.shape[-1]
    scale = max(float(np.max(np.abs(eigenvalues))) if n else 0.0, 1.0)
    return n * np.finfo(np.float64).eps * scale


def summarize_eigenvalues(eigenvalues, eigenvectors=None):
    w = np.asarray(eigenvalues, dtype=np.float64)
    thr = zero_threshold(w)
    return SpectralSummary(
        eigenvalues=w,
        zero_count=int(np.count_nonzero(np.abs(w) <= thr)),
        zero_threshold=thr,
        eigenvectors=eigenvectors,
    )


def symmetric_eigen(m, eigenvectors=False):
    """Eigenvalues of a symmetric matrix in ascending order.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Symmetric to relative tolerance 1e-12; anything else raises
        :class:`ContractError`.
    eigenvectors : bool
        Also return orthonormal eigenvectors (columns) on the summary.
    """
    m = check_symmetric(m)
    if eigenvectors:
        w, u = np.linalg.eigh(m)
        return summarize_eigenvalues(w, u)
    return summarize_eigenvalues(np.linalg.eigvalsh(m))


def trace_pinv(laplacian):
    """``trace(L^+)`` without forming the pseudoinverse.

    Finite for every Laplacian: on a disconnected graph this is the sum of
    the per-component traces.
    """
    return symmetric_eigen(laplacian).pinv_trace()


def pseudo_inverse(laplacian):
    """Moore-Penrose pseudoinverse ``U diag(1/lambda) U^T`` over the nonzero modes."""
    s = symmetric_eigen(laplacian, eigenvectors=True)
    keep = s.nonzero
    u = s.eigenvectors[:, keep]
    pinv = (u / s.eigenvalues[keep]) @ u.T
    return 0.5 * (pinv + pinv.T)


def resistance_distance(pinv, i, j):
    """Effective resistance ``L+_ii + L+_jj - 2 L+_ij`` between nodes ``i`` and ``j``.

    Only meaningful when ``i`` and ``j`` lie in the same connected
    component; the caller is responsible for that check. ``i == j`` gives 0.
    """
    n = pinv.shape[0]
    i, j = int(i), int(j)
    if not (0 <= i < n and 0 <= j < n):
        raise ContractError(f"node pair ({i}, {j}) out of range for n={n}")
    if i == j:
        return 0.0
    return float(pinv[i, i] + pinv[j, j] - 2.0 * pinv[i, j])


def resistance_matrix(pinv):
    """All pairwise resistance distances, with an exactly zero diagonal."""
    d = np.diag(pinv)
    r = d[:, None] + d[None, :] - 2.0 * pinv
    np.fill_diagonal(r, 0.0)
    return r


def kirchhoff_index(g):
    """``n * trace(L^+)`` for a connected graph, :data:`INF` otherwise."""
    if not is_connected(g):
        return INF
    return g.n * trace_pinv(build_laplacian(g))


def operator_norm(m):
    """Spectral norm of a symmetric matrix, i.e. its largest absolute eigenvalue."""
    w = np.linalg.eigvalsh(check_symmetric(m))
    return float(np.max(np.abs(w)))
