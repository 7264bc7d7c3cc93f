"""Mixed traces ``tau x tau(pi)`` of normalised tensor variables.

For free copies ``a_k`` of ``a`` with mean ``lam`` and variance ``sigma2`` put
``b_k = (a_k x a_k - lam^2) / delta`` with ``delta^2 = sigma2 (sigma2 + 2 lam^2)``.
``tau x tau(pi)`` is the trace of ``b_{i_1} ... b_{i_p}`` for any index
sequence whose kernel is ``pi``.  Three evaluators are provided:

* :func:`tau_closed_form` - product over crossing components, each component
  contributing 1 (a lone pair), ``2 (q/2)^{|T|/2}`` (bipartite) or 0;
* :func:`tau_reduce` - interval-block stripping and nested-block factoring,
  with the irreducible remainder handed to the closed form;
* :func:`tau_oracle` - the defining subset expansion over free mixed moments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from tensorclt.errors import CapExceededError, DomainError
from tensorclt.free_moments import CumulantSpec, mixed_moment, to_fraction
from tensorclt.partitions import (
    PAIR_CAP,
    PairPartition,
    Partition,
    as_pairing,
    enumerate_pair_partitions,
    is_bipartite,
    noncrossing_closure,
)

ORACLE_CAP = 16


@dataclass(frozen=True)
class TensorParams:
    lam: Fraction
    sigma2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", to_fraction(self.lam))
        object.__setattr__(self, "sigma2", to_fraction(self.sigma2))
        if self.sigma2 <= 0:
            raise DomainError(f"variance must be positive, got {self.sigma2}")

    @classmethod
    def from_spec(cls, spec: CumulantSpec) -> "TensorParams":
        return cls(spec.mean, spec.variance)

    @property
    def delta2(self) -> Fraction:
        return self.sigma2 * (self.sigma2 + 2 * self.lam**2)

    @property
    def q(self) -> Fraction:
        return 2 * self.lam**2 / (self.sigma2 + 2 * self.lam**2)


def component_factor(component: Partition, q: Fraction) -> Fraction:
    """Contribution of one crossing-connected pairing."""
    size = component.p
    if size == 2:
        return Fraction(1)
    if not is_bipartite(component):
        return Fraction(0)
    return 2 * (q / 2) ** (size // 2)


def _q_of(params) -> Fraction:
    return params.q if isinstance(params, TensorParams) else to_fraction(params)


def tau_closed_form(pi: Partition, params: TensorParams | Fraction) -> Fraction:
    """Closed-form ``tau x tau(pi)`` for a pair partition.

    ``params`` may be :class:`TensorParams` or the interpolation parameter ``q``.
    """
    pi = as_pairing(pi)
    q = _q_of(params)
    value = Fraction(1)
    for component in noncrossing_closure(pi).components.values():
        value *= component_factor(component, q)
        if not value:
            break
    return value


# ---------------------------------------------------------------------------
# reduction pass
# ---------------------------------------------------------------------------


def _strip_cyclic_intervals(pairs: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Remove blocks of cyclically adjacent points until none is left."""
    pairs = list(pairs)
    changed = True
    while changed and pairs:
        changed = False
        order = sorted(x for pr in pairs for x in pr)
        rank = {x: i for i, x in enumerate(order)}
        n = len(order)
        for pr in pairs:
            i, j = rank[pr[0]], rank[pr[1]]
            if j - i == 1 or (i == 0 and j == n - 1):
                pairs.remove(pr)
                changed = True
                break
    return pairs


def _find_nested_block(pairs: list[tuple[int, int]]):
    """A block ``(r, s)`` such that every point strictly inside is matched inside."""
    for r, s in pairs:
        inside = [pr for pr in pairs if r < pr[0] < s or r < pr[1] < s]
        if inside and all(r < x < s for pr in inside for x in pr):
            rest = [pr for pr in pairs if pr != (r, s) and pr not in inside]
            return inside, rest
    return None


def reduce_pairing(pi: Partition) -> list[PairPartition]:
    """Irreducible pieces left after interval stripping and nested-block factoring.

    ``tau x tau(pi)`` is the product of the values of the returned pieces; the
    empty list stands for the value 1.
    """
    pi = as_pairing(pi)
    pending = [list(pi.blocks)]
    done: list[PairPartition] = []
    while pending:
        pairs = _strip_cyclic_intervals(pending.pop())
        if not pairs:
            continue
        split = _find_nested_block(pairs)
        if split is not None:
            pending.extend(part for part in split if part)
            continue
        support = sorted(x for pr in pairs for x in pr)
        pos = {x: i + 1 for i, x in enumerate(support)}
        done.append(
            PairPartition.from_blocks([[pos[a], pos[b]] for a, b in pairs], len(support))
        )
    return done


def tau_reduce(pi: Partition, params: TensorParams | Fraction) -> Fraction:
    value = Fraction(1)
    for piece in reduce_pairing(pi):
        value *= tau_closed_form(piece, params)
    return value


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------


def tau_oracle_unscaled(pi: Partition, spec: CumulantSpec, cap: int = ORACLE_CAP) -> Fraction:
    """``delta^p * tau x tau(pi)``, exact for every ``p`` including odd ones.

    ``sum_{I subset [p]} (-lam^2)^{|I|} tau(prod_{l not in I} a_{i_l})^2`` where
    the letters ``i_l`` follow the blocks of ``pi``.  Cost is ``2^p`` free
    mixed moments (memoised by word kernel); zero moments are skipped.
    """
    if pi.p > cap:
        raise CapExceededError(f"oracle expansion of p={pi.p} exceeds cap {cap}")
    lam2 = spec.mean**2
    return _expansion(tuple(pi.block_of()), spec, lam2)


@lru_cache(maxsize=1 << 14)
def _expansion(word: tuple[int, ...], spec: CumulantSpec, lam2: Fraction) -> Fraction:
    p = len(word)
    total = Fraction(0)
    for mask in range(1 << p):
        kept = [word[l] + 1 for l in range(p) if not mask >> l & 1]
        moment = mixed_moment(kept, spec) if kept else Fraction(1)
        if not moment:
            continue
        total += (-lam2) ** (p - len(kept)) * moment * moment
    return total


def tau_oracle(pi: Partition, spec: CumulantSpec, cap: int = ORACLE_CAP) -> Fraction:
    """Evaluate ``tau x tau(pi)`` from its definition, for any partition ``pi``.

    Raises :class:`DomainError` when ``p`` is odd and ``delta`` is irrational
    and the expansion is nonzero; use :func:`tau_oracle_unscaled` then.
    """
    params = TensorParams.from_spec(spec)
    raw = tau_oracle_unscaled(pi, spec, cap)
    if not raw:
        return Fraction(0)
    return raw / delta_power(params.delta2, pi.p)


def delta_power(delta2: Fraction, p: int) -> Fraction:
    """``(delta^2)^{p/2}`` as an exact rational, when it is one."""
    if p % 2 == 0:
        return delta2 ** (p // 2)
    root = exact_sqrt(delta2)
    if root is None:
        raise DomainError(f"(delta^2)^({p}/2) is irrational for delta^2 = {delta2}")
    return root**p


def exact_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def pairing_sum(p: int, spec: CumulantSpec, cap: int = PAIR_CAP) -> Fraction:
    """``sum_{pi in P_2(p)} tau_oracle(pi, spec)``: the limiting ``p``-th moment."""
    if p % 2:
        return Fraction(0)
    return sum((tau_oracle(pi, spec) for pi in enumerate_pair_partitions(p, cap)), Fraction(0))


def universality_check(p: int, spec_a: CumulantSpec, spec_b: CumulantSpec) -> bool:
    """Do two specs with equal mean and variance give the same pairing sum at order ``p``?"""
    if spec_a.mean != spec_b.mean or spec_a.variance != spec_b.variance:
        raise DomainError("universality compares specs with equal k_1 and k_2")
    if p % 2:
        raise DomainError(f"p must be even, got {p}")
    return pairing_sum(p, spec_a) == pairing_sum(p, spec_b)
