"""Exact finite-``n`` moments of the normalised tensor sum and their convergence.

``S_n = (delta sqrt(n))^{-1} sum_{k<=n} (a_k x a_k - lam^2)``.  Expanding the
``p``-th power and grouping index sequences by kernel gives

    tau x tau(S_n^p) = n^{-p/2} sum_pi tau x tau(pi) n (n-1) ... (n-|pi|+1),

where partitions with a singleton block contribute nothing, so only
partitions with all blocks of size >= 2 are visited.  The cost depends on
``p`` only, never on ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from tensorclt.errors import DomainError
from tensorclt.free_moments import CumulantSpec
from tensorclt.limit_law import mu_q_moment_fast
from tensorclt.partitions import SET_CAP, enumerate_set_partitions
from tensorclt.tensor_trace import TensorParams, exact_sqrt, tau_oracle_unscaled


def falling_factorial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def falling_factorial_coefficients(p: int, spec: CumulantSpec, cap: int = SET_CAP) -> dict[int, Fraction]:
    """``{k: sum over no-singleton pi with |pi| = k of delta^p tau x tau(pi)}``.

    ``delta^p n^{p/2} tau x tau(S_n^p) = sum_k coeff[k] * n^(k)`` with ``n^(k)``
    the falling factorial.  The top coefficient ``k = p/2`` is the pair-partition
    sum, i.e. ``delta^p`` times the limiting moment.
    """
    if p < 0:
        raise DomainError(f"p must be >= 0, got {p}")
    coeffs: dict[int, Fraction] = {}
    for pi in enumerate_set_partitions(p, min_block_size=2, cap=cap):
        coeffs[len(pi)] = coeffs.get(len(pi), Fraction(0)) + tau_oracle_unscaled(pi, spec)
    return coeffs


def unnormalized_moment(p: int, n: int, spec: CumulantSpec, cap: int = SET_CAP) -> Fraction:
    """``tau x tau((sum_k (a_k x a_k - lam^2))^p)``, exact for every ``p``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    coeffs = falling_factorial_coefficients(p, spec, cap)
    return sum((c * falling_factorial(n, k) for k, c in coeffs.items()), Fraction(0))


def s_n_moment(p: int, n: int, spec: CumulantSpec, cap: int = SET_CAP) -> Fraction:
    """``tau x tau(S_n^p)`` as an exact rational.

    For odd ``p`` the normalisation ``(delta^2 n)^{-p/2}`` is irrational unless
    ``delta^2 n`` is a perfect square; in that case a nonzero value raises
    :class:`DomainError` and :func:`unnormalized_moment` gives the exact data.
    """
    params = TensorParams.from_spec(spec)
    raw = unnormalized_moment(p, n, spec, cap)
    if not raw:
        return Fraction(0)
    scale2 = params.delta2 * n
    if p % 2 == 0:
        return raw / scale2 ** (p // 2)
    root = exact_sqrt(scale2)
    if root is None:
        raise DomainError(
            f"odd moment p={p} at n={n} is irrational (delta^2 n = {scale2}); "
            "use unnormalized_moment for the exact value"
        )
    return raw / root**p


def limit_moment(p: int, spec: CumulantSpec, cap: int = SET_CAP) -> Fraction:
    """``lim_n tau x tau(S_n^p)`` read off the top falling-factorial coefficient."""
    if p % 2:
        return Fraction(0)
    params = TensorParams.from_spec(spec)
    top = falling_factorial_coefficients(p, spec, cap).get(p // 2, Fraction(0))
    return top / params.delta2 ** (p // 2)


@dataclass(frozen=True)
class FiniteNMoment:
    p: int
    n: int
    value: Fraction
    limit: Fraction

    @property
    def gap(self) -> Fraction:
        return self.value - self.limit


def convergence_table(pmax: int, n_list, spec: CumulantSpec, cap: int = SET_CAP) -> list[FiniteNMoment]:
    """Rows ``(p, n, value, limit)`` for every even ``2 <= p <= pmax`` and ``n`` in ``n_list``.

    The limit column comes from the limit law at ``q`` determined by the
    spec's mean and variance, not from the finite-``n`` expansion.
    """
    q = TensorParams.from_spec(spec).q
    rows = []
    for p in range(2, pmax + 1, 2):
        limit = mu_q_moment_fast(p, q)
        coeffs = falling_factorial_coefficients(p, spec, cap)
        delta_p = TensorParams.from_spec(spec).delta2 ** (p // 2)
        for n in n_list:
            if n < 1:
                raise DomainError(f"n must be >= 1, got {n}")
            raw = sum((c * falling_factorial(n, k) for k, c in coeffs.items()), Fraction(0))
            rows.append(FiniteNMoment(p, n, raw / (delta_p * Fraction(n) ** (p // 2)), limit))
    return rows
