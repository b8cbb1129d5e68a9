"""Closed-form predictions for X_n = p * trace(L^+) on G(n, p).

Every evaluator returns the leading terms only; the big-O remainders are
dropped, never estimated. Logarithms are natural.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from ._validation import ContractError, check_node_count, check_nonnegative, check_probability

# Finite-n constant in front of the fluctuation band.
FLUCTUATION_CONSTANT = 2.02
# Failure-probability constants attached to the E_n and band statements.
EN_FAILURE_CONSTANT = 3.01


def expected_xn(n, p):
    """``1 + (2 (1-p)/p - 1) / n``; dropped remainder is O(log^2 n / (np)^2)."""
    n = check_node_count(n)
    p = check_probability(p)
    return 1.0 + (2.0 * (1.0 - p) / p - 1.0) / n


def expected_xn_vanishing(n, gamma, alpha):
    """Mean of X_n when ``p = gamma * n**(alpha - 1)``.

    Returns ``1 + 2/(gamma n^alpha) - 3/n``; dropped remainder is
    O(log^2 n / n^(2 alpha)). Requires ``gamma > 0``, ``0 < alpha <= 1``
    and ``gamma < 1`` when ``alpha == 1``.
    """
    n = check_node_count(n)
    gamma, alpha = float(gamma), float(alpha)
    if not gamma > 0:
        raise ContractError(f"gamma must be positive, got {gamma}")
    if not 0 < alpha <= 1:
        raise ContractError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1 and gamma >= 1:
        raise ContractError("gamma must be < 1 when alpha == 1")
    return 1.0 + 2.0 / (gamma * n**alpha) - 3.0 / n


def power_law_p(n, gamma, alpha):
    return gamma * n ** (alpha - 1.0)


def _check_epsilon(epsilon):
    epsilon = float(epsilon)
    if not 0 < epsilon <= 0.5:
        raise ContractError(f"epsilon must lie in (0, 1/2], got {epsilon}")
    return epsilon


def fluctuation_bound(n, p, epsilon):
    """Half-width ``2.02 sqrt(ln(1/eps)) / (n p)`` of the high-probability band."""
    n = check_node_count(n)
    p = check_probability(p)
    epsilon = _check_epsilon(epsilon)
    return FLUCTUATION_CONSTANT * math.sqrt(math.log(1.0 / epsilon)) / (n * p)


def band_probability(n, epsilon):
    """``1 - 2 eps - 3.01/n^4`` clamped to [0, 1]."""
    n = check_node_count(n)
    epsilon = _check_epsilon(epsilon)
    return min(1.0, max(0.0, 1.0 - 2.0 * epsilon - EN_FAILURE_CONSTANT / n**4))


def max_trace_pinv_bound(n):
    """Largest ``trace(L^+)`` over all graphs on ``n`` nodes: ``(n^2 - 1)/6``."""
    n = check_node_count(n)
    return (n * n - 1) / 6.0


def expected_kirchhoff(n, p):
    """``n/p + 2/p^2 - 3/p``; dropped remainder is O(log^2 n / (n p^3))."""
    n = check_node_count(n)
    p = check_probability(p)
    return n / p + 2.0 / p**2 - 3.0 / p


class AssumptionDiagnostic(NamedTuple):
    cn: float
    ratio: float
    en_prob_floor: float


def assumption_diagnostic(n, p):
    """How deep ``(n, p)`` sits in the asymptotic regime.

    Returns ``cn = 5 sqrt(ln n / (n p))`` (the series needs cn < 1), the
    ratio ``n p / ln^6 n`` (which the asymptotics want large), and the
    floor ``1 - 3.01/n^11`` on the probability of E_n.
    """
    n = check_node_count(n)
    p = check_probability(p)
    log_n = math.log(n)
    return AssumptionDiagnostic(
        cn=5.0 * math.sqrt(log_n / (n * p)),
        ratio=n * p / log_n**6,
        en_prob_floor=max(0.0, 1.0 - EN_FAILURE_CONSTANT / float(n) ** 11),
    )


def crb_lower_bound(sigma_trace, trace_pinv_val):
    """Cramer-Rao bound ``trace(Sigma) * trace(L^+)`` for translation synchronization."""
    return check_nonnegative(sigma_trace, "sigma_trace") * check_nonnegative(trace_pinv_val, "trace_pinv_val")


@dataclass(frozen=True)
class TheoryPrediction:
    n: int
    p: float
    mean_xn: float
    band_halfwidth: float
    epsilon: float
    band_probability: float
    cn: float
    assumption_ratio: float
    expected_kirchhoff: float
    max_trace_pinv: float


def predict(n, p, epsilon=0.004):
    diag = assumption_diagnostic(n, p)
    return TheoryPrediction(
        n=int(n),
        p=float(p),
        mean_xn=expected_xn(n, p),
        band_halfwidth=fluctuation_bound(n, p, epsilon),
        epsilon=float(epsilon),
        band_probability=band_probability(n, epsilon),
        cn=diag.cn,
        assumption_ratio=diag.ratio,
        expected_kirchhoff=expected_kirchhoff(n, p),
        max_trace_pinv=max_trace_pinv_bound(n),
    )
