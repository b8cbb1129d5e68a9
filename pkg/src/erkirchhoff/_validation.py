"""Input validation helpers shared by the functional API and the estimators."""

import math
import numbers

import numpy as np

# Seeds are unsigned 64-bit integers.
SEED_MAX = 2**64 - 1


class ContractError(ValueError):
    """An argument violates the documented precondition of an operation."""


def check_probability(p, name="p"):
    """Return ``p`` as a float, requiring 0 < p < 1."""
    if isinstance(p, bool) or not isinstance(p, numbers.Real):
        raise ContractError(f"{name} must be a real number, got {p!r}")
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ContractError(f"{name} must lie in the open interval (0, 1), got {p}")
    return p


def check_node_count(n, name="n", minimum=2):
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise ContractError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise ContractError(f"{name} must be >= {minimum}, got {n}")
    return n


def check_seed(seed, name="seed"):
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise ContractError(f"{name} must be an integer, got {seed!r}")
    seed = int(seed)
    if not (0 <= seed <= SEED_MAX):
        raise ContractError(f"{name} must fit in an unsigned 64-bit integer, got {seed}")
    return seed


def check_nonnegative(x, name):
    x = float(x)
    if not (x >= 0.0) or math.isinf(x):
        raise ContractError(f"{name} must be a finite nonnegative number, got {x}")
    return x


def check_symmetric(m, rtol=1e-12, name="matrix"):
    """Return ``m`` as a float64 square array, raising if it is not symmetric.

    Symmetry is judged relative to the largest entry magnitude, so an
    all-zero matrix passes.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"{name} must be a square 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractError(f"{name} contains non-finite entries")
    scale = np.max(np.abs(m)) if m.size else 0.0
    if m.size and np.max(np.abs(m - m.T)) > rtol * max(scale, np.finfo(float).tiny):
        raise ContractError(f"{name} is not symmetric to relative tolerance {rtol:g}")
    return m


def check_adjacency(adjacency):
    """Validate a 0/1 adjacency matrix and return it as a boolean array.

    The matrix must be square with at least two nodes, symmetric, have a
    zero diagonal, and contain only the values 0 and 1.
    """
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"adjacency must be a square 2-D array, got shape {a.shape}")
    if a.shape[0] < 2:
        raise ContractError("a graph needs at least 2 nodes")
    if a.dtype != np.bool_:
        if not np.all((a == 0) | (a == 1)):
            raise ContractError("adjacency entries must be 0 or 1 (unweighted graphs only)")
        a = a.astype(bool)
    if np.any(np.diagonal(a)):
        raise ContractError("adjacency diagonal must be zero (no self-loops)")
    if not np.array_equal(a, a.T):
        raise ContractError("adjacency must be symmetric (undirected graphs only)")
    return a
