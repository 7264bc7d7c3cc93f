"""Exact moment / free-cumulant transforms and mixed moments of free i.i.d. families.

Everything here works over :class:`fractions.Fraction`.  Higher cumulants
that were not supplied are an error, never an implicit zero: finite-order
quantities genuinely depend on them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from tensorclt.errors import DomainError, TruncationError
from tensorclt.partitions import enumerate_noncrossing_partitions


def to_fraction(x) -> Fraction:
    """Exact conversion; floats go through their shortest repr so ``0.1 -> 1/10``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class CumulantSpec:
    """Free cumulants ``(k_1, ..., k_K)`` of a single scalar variable."""

    kappas: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "kappas", tuple(to_fraction(k) for k in self.kappas))
        if len(self.kappas) < 2:
            raise DomainError("a cumulant spec needs at least k_1 and k_2")

    @classmethod
    def of(cls, *kappas) -> "CumulantSpec":
        return cls(tuple(kappas))

    @property
    def order(self) -> int:
        return len(self.kappas)

    @property
    def mean(self) -> Fraction:
        return self.kappas[0]

    @property
    def variance(self) -> Fraction:
        return self.kappas[1]

    def kappa(self, n: int) -> Fraction:
        if n < 1:
            raise DomainError(f"cumulant order must be >= 1, got {n}")
        if n > len(self.kappas):
            raise TruncationError(n, len(self.kappas))
        return self.kappas[n - 1]

    def padded(self, order: int) -> "CumulantSpec":
        """Explicitly extend with zero cumulants up to ``order``."""
        extra = max(0, order - len(self.kappas))
        return CumulantSpec(self.kappas + (Fraction(0),) * extra)


@dataclass(frozen=True)
class MomentTable:
    """Moments ``(m_0 = 1, m_1, ..., m_N)``."""

    moments: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(to_fraction(m) for m in self.moments))
        if not self.moments or self.moments[0] != 1:
            raise DomainError("moment tables must start with m_0 = 1")

    def __getitem__(self, n: int) -> Fraction:
        return self.moments[n]

    def __len__(self) -> int:
        return len(self.moments)

    @property
    def order(self) -> int:
        return len(self.moments) - 1


def _composition_table(moments: Sequence[Fraction], smax: int, tmax: int):
    """``P[s][t]``: sum over compositions ``i_1 + ... + i_s = t`` of ``prod m_{i_j}``."""
    P = [[Fraction(0)] * (tmax + 1) for _ in range(smax + 1)]
    P[0][0] = Fraction(1)
    for s in range(1, smax + 1):
        row, prev = P[s], P[s - 1]
        for t in range(tmax + 1):
            row[t] = sum((moments[i] * prev[t - i] for i in range(t + 1)), Fraction(0))
    return P


def moments_from_free_cumulants(spec: CumulantSpec, N: int) -> MomentTable:
    """Moments up to order ``N`` by the first-block recursion.

    ``m_n = sum_{s=1}^{n} k_s * sum_{i_1+...+i_s = n-s} m_{i_1} ... m_{i_s}``,
    i.e. the block containing 1 has ``s`` elements and the gaps after each of
    them carry independent noncrossing partitions.
    """
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    if N > spec.order:
        raise TruncationError(N, spec.order)
    m = [Fraction(1)]
    # P[s][t] is filled column by column as new moments appear.
    P = [[Fraction(0)] * (N + 1) for _ in range(N + 1)]
    P[0][0] = Fraction(1)
    for n in range(1, N + 1):
        t_new = n - 1
        for s in range(1, N + 1):
            P[s][t_new] = sum((m[i] * P[s - 1][t_new - i] for i in range(t_new + 1)), Fraction(0))
        m.append(sum((spec.kappa(s) * P[s][n - s] for s in range(1, n + 1)), Fraction(0)))
    return MomentTable(tuple(m))


def free_cumulants_from_moments(moments: MomentTable | Sequence, N: int | None = None) -> CumulantSpec:
    """Invert :func:`moments_from_free_cumulants` (triangular, always solvable)."""
    if not isinstance(moments, MomentTable):
        moments = MomentTable(tuple(moments))
    if N is None:
        N = moments.order
    if N > moments.order:
        raise DomainError(f"moments known to order {moments.order}, need {N}")
    if N < 2:
        raise DomainError("need at least two cumulants")
    m = moments.moments[: N + 1]
    P = _composition_table(m, N, N)
    kappas: list[Fraction] = []
    for n in range(1, N + 1):
        rest = sum((kappas[s - 1] * P[s][n - s] for s in range(1, n)), Fraction(0))
        kappas.append(m[n] - rest)
    return CumulantSpec(tuple(kappas))


def canonical_word(word: Iterable[int]) -> tuple[int, ...]:
    """Relabel letters by first occurrence; only the kernel matters for free i.i.d. families."""
    seen: dict[int, int] = {}
    out = []
    for letter in word:
        if letter < 1:
            raise DomainError(f"word letters must be positive, got {letter}")
        out.append(seen.setdefault(letter, len(seen) + 1))
    return tuple(out)


def mixed_moment(word: Sequence[int], spec: CumulantSpec) -> Fraction:
    """``tau(a_{i_1} ... a_{i_m})`` for free copies ``a_i`` with common cumulants ``spec``.

    Sum over noncrossing partitions with monochromatic blocks of the product
    of cumulants, evaluated by interval dynamic programming in ``O(m^4)``.
    """
    return _mixed_moment(canonical_word(word), spec.kappas)


@lru_cache(maxsize=1 << 16)
def _mixed_moment(word: tuple[int, ...], kappas: tuple[Fraction, ...]) -> Fraction:
    m = len(word)
    K = len(kappas)

    def kappa(s: int) -> Fraction:
        if s > K:
            raise TruncationError(s, K)
        return kappas[s - 1]

    # F[i][j]: sum over admissible NC partitions of positions i..j-1.
    F = [[Fraction(0)] * (m + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        F[i][i] = Fraction(1)
    # D[v][t]: the block reached position v and still takes t more elements in (v, j).
    for length in range(1, m + 1):
        for i in range(0, m - length + 1):
            j = i + length
            c = word[i]
            # chains[v] = {t: weight} for a block ending (so far) at v
            total = Fraction(0)
            # walk the block of i from right to left: E[v][t] = ways to place t more
            # same-letter elements after v inside (v, j), gaps filled by F
            E: dict[int, dict[int, Fraction]] = {}
            for v in range(j - 1, i - 1, -1):
                if word[v] != c:
                    continue
                ways = {0: F[v + 1][j]}
                for u, tail in E.items():
                    gap = F[v + 1][u]
                    if not gap:
                        continue
                    for t, w in tail.items():
                        ways[t + 1] = ways.get(t + 1, Fraction(0)) + gap * w
                E[v] = ways
            for t, w in E[i].items():
                if w:
                    total += kappa(t + 1) * w
            F[i][j] = total
    return F[0][m]


def mixed_moment_bruteforce(word: Sequence[int], spec: CumulantSpec) -> Fraction:
    """Reference path: explicit sum over NC(m) (use for m <= 10 or so)."""
    word = canonical_word(word)
    total = Fraction(0)
    for pi in enumerate_noncrossing_partitions(len(word)):
        if all(len({word[x - 1] for x in b}) == 1 for b in pi.blocks):
            term = Fraction(1)
            for b in pi.blocks:
                term *= spec.kappa(len(b))
            total += term
    return total


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def mu1_moments(N: int) -> MomentTable:
    """Moments of the classical convolution of two semicircles scaled by ``1/sqrt(2)``.

    ``m_{2p} = 2^{-p} sum_l binom(2p, 2l) C_l C_{p-l}``; odd moments vanish.
    """
    out = [Fraction(1)]
    for n in range(1, N + 1):
        if n % 2:
            out.append(Fraction(0))
            continue
        p = n // 2
        s = sum(comb(2 * p, 2 * l) * catalan(l) * catalan(p - l) for l in range(p + 1))
        out.append(Fraction(s, 2**p))
    return MomentTable(tuple(out))


def two_point_moments(mean, sd, N: int) -> MomentTable:
    """Moments of the law putting mass 1/2 on ``mean - sd`` and ``mean + sd``."""
    mean, sd = to_fraction(mean), to_fraction(sd)
    return MomentTable(
        tuple(((mean + sd) ** k + (mean - sd) ** k) / 2 for k in range(N + 1))
    )


def semicircle_spec(mean=0, variance=1, order: int = 2) -> CumulantSpec:
    """Shifted, scaled semicircle: only ``k_1`` and ``k_2`` nonzero, padded to ``order``."""
    return CumulantSpec((to_fraction(mean), to_fraction(variance))).padded(order)
