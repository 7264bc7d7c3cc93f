"""Moments and free cumulants of the limit law ``mu_q``, each by two independent routes.

``mu_q`` is the free convolution of ``sqrt(q) mu_1`` with ``sqrt(1-q)`` times the
standard semicircle, where ``mu_1`` is the classical convolution of two
semicircles scaled by ``1/sqrt(2)``.  ``q = 0`` is the semicircle itself.

Routes:

* moments, direct: sum over bipartite pair partitions of
  ``2^{cc - p} q^{cr}``;
* moments, fast: free moment-cumulant recursion fed with the cumulants;
* cumulants, counting: ``2 (q/2)^{n/2} |bipartite connected pairings of [n]|``;
* cumulants, additive: ``q^{n/2} k_n(mu_1) + (1-q)^{n/2} k_n(semicircle)``
  with ``k_n(mu_1)`` obtained by inverting the binomial-Catalan moments of
  ``mu_1`` (no partition counting involved).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from tensorclt.errors import DomainError
from tensorclt.free_moments import (
    CumulantSpec,
    MomentTable,
    catalan,
    free_cumulants_from_moments,
    moments_from_free_cumulants,
    mu1_moments,
    to_fraction,
)
from tensorclt.partitions import PAIR_CAP, bipartite_profile, count_bipartite_connected


def check_q(q) -> Fraction:
    q = to_fraction(q)
    if not 0 <= q <= 1:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    return q


def q_from_params(lam, sigma2) -> Fraction:
    """``q = 2 lam^2 / (sigma2 + 2 lam^2)``."""
    lam, sigma2 = to_fraction(lam), to_fraction(sigma2)
    if sigma2 <= 0:
        raise DomainError(f"variance must be positive, got {sigma2}")
    return 2 * lam**2 / (sigma2 + 2 * lam**2)


def _check_order(n: int) -> None:
    if n < 0:
        raise DomainError(f"order must be >= 0, got {n}")


def mu_q_moment_direct(order: int, q, cap: int = PAIR_CAP) -> Fraction:
    _check_order(order)
    q = check_q(q)
    if order % 2:
        return Fraction(0)
    p = order // 2
    profile = bipartite_profile(order, cap=cap)
    return sum(
        (count * Fraction(2) ** (cc - p) * q**cr for (cc, cr), count in profile.items()),
        Fraction(0),
    )


def mu_q_cumulant(n: int, q, cap: int = PAIR_CAP) -> Fraction:
    if n < 1:
        raise DomainError(f"cumulant order must be >= 1, got {n}")
    q = check_q(q)
    if n % 2:
        return Fraction(0)
    if n == 2:
        return Fraction(1)
    return 2 * (q / 2) ** (n // 2) * count_bipartite_connected(n, cap=cap)


@lru_cache(maxsize=None)
def mu1_cumulants(N: int) -> CumulantSpec:
    """Free cumulants of ``mu_1`` from its binomial-Catalan moment sequence."""
    return free_cumulants_from_moments(mu1_moments(max(N, 2)), max(N, 2))


def mu_q_cumulant_additive(n: int, q) -> Fraction:
    if n < 1:
        raise DomainError(f"cumulant order must be >= 1, got {n}")
    q = check_q(q)
    if n % 2:
        return Fraction(0)
    half = n // 2
    semicircle = Fraction(1) if n == 2 else Fraction(0)
    return q**half * mu1_cumulants(n).kappa(n) + (1 - q) ** half * semicircle


def mu_q_cumulants(N: int, q, cap: int = PAIR_CAP) -> CumulantSpec:
    return CumulantSpec(tuple(mu_q_cumulant(n, q, cap) for n in range(1, max(N, 2) + 1)))


def mu_q_moments_fast(N: int, q, cap: int = PAIR_CAP) -> MomentTable:
    return moments_from_free_cumulants(mu_q_cumulants(N, q, cap), N)


def mu_q_moment_fast(order: int, q, cap: int = PAIR_CAP) -> Fraction:
    _check_order(order)
    return mu_q_moments_fast(order, q, cap)[order]


def catalan_product_identity(pmax: int) -> bool:
    """``sum_l binom(2p, 2l) C_l C_{p-l} == C_p C_{p+1}`` for ``1 <= p <= pmax``."""
    return all(
        sum(comb(2 * p, 2 * l) * catalan(l) * catalan(p - l) for l in range(p + 1))
        == catalan(p) * catalan(p + 1)
        for p in range(1, pmax + 1)
    )


def hankel_validity(moments: MomentTable, K: int) -> bool:
    """Exact positive-semidefiniteness test of the Hankel matrix ``(m_{i+j})_{0<=i,j<=K}``.

    Symmetric Gaussian elimination over the rationals: negative pivots fail;
    a zero pivot is allowed only if the rest of its row is zero.
    """
    if moments.order < 2 * K:
        raise DomainError(f"Hankel check to K={K} needs moments to order {2 * K}")
    H = [[moments[i + j] for j in range(K + 1)] for i in range(K + 1)]
    n = K + 1
    for k in range(n):
        pivot = H[k][k]
        if pivot < 0:
            return False
        if pivot == 0:
            if any(H[k][j] for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            factor = H[i][k] / pivot
            if not factor:
                continue
            for j in range(k, n):
                H[i][j] -= factor * H[k][j]
    return True


@dataclass(frozen=True)
class LimitLawTable:
    q: Fraction
    moments: MomentTable
    cumulants: CumulantSpec


def limit_law_table(q, N: int, cap: int = PAIR_CAP) -> LimitLawTable:
    q = check_q(q)
    cumulants = mu_q_cumulants(N, q, cap)
    return LimitLawTable(q, moments_from_free_cumulants(cumulants, N), cumulants)
