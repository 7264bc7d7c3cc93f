"""Self-check suites: the cross-route agreement invariants, runnable from the CLI.

``quick`` runs every check at reduced sizes (seconds); ``full`` runs them at
the sizes the test-suite uses (about a minute).  No Monte Carlo here.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from tensorclt import clt, free_moments as fm, limit_law as ll, partitions as pt, tensor_trace as tt


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


def double_factorial(n: int) -> int:
    return prod(range(n, 0, -2)) if n > 0 else 1


def random_spec(rng: random.Random, order: int, lam=None, var=None) -> fm.CumulantSpec:
    def r():
        return Fraction(rng.randint(-9, 9), rng.randint(1, 9))

    kappas = [Fraction(lam) if lam is not None else r(),
              Fraction(var) if var is not None else Fraction(rng.randint(1, 9), rng.randint(1, 9))]
    kappas += [r() for _ in range(order - 2)]
    return fm.CumulantSpec(tuple(kappas))


Q_GRID = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]


def _pair_counts(pmax):
    for p in range(0, pmax + 1, 2):
        pis = list(pt.enumerate_pair_partitions(p))
        if len(pis) != double_factorial(p - 1):
            return f"p={p}: {len(pis)} pairings"
        nc = sum(1 for pi in pis if pt.stats(pi).cr == 0)
        if nc != fm.catalan(p // 2):
            return f"p={p}: {nc} noncrossing"
    return None


def _closure_roundtrip(pmax):
    for p in range(2, pmax + 1, 2):
        for pi in pt.enumerate_pair_partitions(p):
            dec = pt.noncrossing_closure(pi)
            if dec.reassemble() != pi or len(dec.closure) != pt.stats(pi).cc:
                return f"round trip fails on {pi}"
            if not pt.is_noncrossing(dec.closure):
                return f"closure of {pi} crosses"
    return None


def _connected_definitions(pmax):
    for p in range(2, pmax + 1, 2):
        for pi in pt.enumerate_pair_partitions(p):
            if pt.is_connected(pi) != pt.is_connected_by_intervals(pi):
                return f"definitions disagree on {pi}"
    return None


def _dp_vs_nc(nmax, trials):
    rng = random.Random(7)
    for _ in range(trials):
        spec = random_spec(rng, nmax)
        dp = fm.moments_from_free_cumulants(spec, nmax).moments
        for n in range(nmax + 1):
            if fm.mixed_moment_bruteforce([1] * n, spec) != dp[n]:
                return f"order {n} differs for {spec.kappas}"
    return None


def _inversion_roundtrip(N, trials):
    rng = random.Random(11)
    for _ in range(trials):
        spec = random_spec(rng, N)
        back = fm.free_cumulants_from_moments(fm.moments_from_free_cumulants(spec, N), N)
        if back != spec:
            return f"round trip fails for {spec.kappas}"
    return None


def _trace_evaluators(pmax):
    spec = fm.CumulantSpec.of(1, 1, 0, 0)
    params = tt.TensorParams.from_spec(spec)
    for p in range(2, pmax + 1, 2):
        for pi in pt.enumerate_pair_partitions(p):
            a, b, c = tt.tau_closed_form(pi, params), tt.tau_reduce(pi, params), tt.tau_oracle(pi, spec)
            if not a == b == c:
                return f"{pi}: closed={a} reduce={b} oracle={c}"
            if not 0 <= a <= 1:
                return f"{pi}: value {a} outside [0, 1]"
    return None


def _multiplicativity(pmax):
    spec = fm.CumulantSpec.of(1, 1, 0, 0)
    for p in range(2, pmax + 1, 2):
        for pi in pt.enumerate_pair_partitions(p):
            parts = pt.noncrossing_closure(pi).components.values()
            rhs = prod((tt.tau_oracle(c, spec) for c in parts), start=Fraction(1))
            if tt.tau_oracle(pi, spec) != rhs:
                return f"not multiplicative on {pi}"
    return None


def _cyclic_invariance(pmax):
    spec = fm.CumulantSpec.of(Fraction(1, 2), 2, Fraction(1, 3), -1, 1, 0, 2, 1)
    for p in range(1, pmax + 1):
        for pi in pt.enumerate_set_partitions(p, 2):
            base = tt.tau_oracle_unscaled(pi, spec)
            if tt.tau_oracle_unscaled(pi.rotate(1), spec) != base:
                return f"rotation changes value on {pi}"
    return None


def _interval_insertion(pmax):
    spec = fm.CumulantSpec.of(Fraction(2, 3), Fraction(1, 2), 1, -1, 0, 1, 2, 1)
    for p in range(2, pmax + 1, 2):
        for pi in pt.enumerate_pair_partitions(p):
            base = tt.tau_oracle(pi, spec)
            for l in range(1, p + 2):
                # insert a new adjacent pair {l, l+1}, shifting later points by 2
                shifted = [[x + 2 if x >= l else x for x in b] for b in pi.blocks]
                bigger = pt.Partition.from_blocks(shifted + [[l, l + 1]], p + 2)
                if tt.tau_oracle(bigger, spec) != base:
                    return f"inserting {{{l},{l + 1}}} into {pi} changes the value"
    return None


def _singleton_vanishing(pmax):
    spec = fm.CumulantSpec.of(1, 2, 1, 1, 1, 1, 1)
    for p in range(1, pmax + 1):
        for pi in pt.enumerate_set_partitions(p):
            if any(len(b) == 1 for b in pi.blocks) and tt.tau_oracle_unscaled(pi, spec) != 0:
                return f"{pi} has a singleton but nonzero value"
    return None


def _moment_routes(order_max):
    for q in Q_GRID:
        for o in range(0, order_max + 1, 2):
            if ll.mu_q_moment_direct(o, q) != ll.mu_q_moment_fast(o, q):
                return f"moments differ at order {o}, q={q}"
        for n in range(1, order_max + 1):
            if ll.mu_q_cumulant(n, q) != ll.mu_q_cumulant_additive(n, q):
                return f"cumulants differ at order {n}, q={q}"
    return None


def _endpoints(order_max):
    mu1 = fm.mu1_moments(order_max)
    for o in range(0, order_max + 1, 2):
        p = o // 2
        if ll.mu_q_moment_fast(o, 0) != fm.catalan(p):
            return f"q=0 order {o} is not Catalan"
        if ll.mu_q_moment_fast(o, 1) != mu1[o]:
            return f"q=1 order {o} differs from the binomial formula"
        if p and mu1[o] != Fraction(fm.catalan(p) * fm.catalan(p + 1), 2**p):
            return f"mu_1 order {o} differs from C_p C_(p+1) / 2^p"
    return None


def _hankel(K):
    for k in range(11):
        if not ll.hankel_validity(ll.mu_q_moments_fast(2 * K, Fraction(k, 10)), K):
            return f"Hankel fails at q={k}/10"
    return None


def _limit_recovery(pmax):
    spec = fm.CumulantSpec.of(1, 1).padded(pmax)
    for p in range(2, pmax + 1, 2):
        if clt.limit_moment(p, spec) != ll.mu_q_moment_fast(p, Fraction(2, 3)):
            return f"limit mismatch at p={p}"
    return None


def _universality(pmax):
    base = fm.CumulantSpec.of(0, 1).padded(pmax)
    others = [fm.CumulantSpec.of(0, 1, 0, -1).padded(pmax), fm.CumulantSpec.of(0, 1, 0, 2).padded(pmax)]
    for p in range(2, pmax + 1, 2):
        for other in others:
            if not tt.universality_check(p, base, other):
                return f"pairing sums differ at p={p} for {other.kappas}"
    return None


def _finite_n(_):
    spec = fm.CumulantSpec.of(0, 1, 0, 0)
    for n in (1, 10, 100):
        if clt.s_n_moment(4, n, spec) != 2 + Fraction(2, n):
            return f"s_n_moment(4, {n}) != 2 + 2/n"
    return None


def _catalan_identity(pmax):
    return None if ll.catalan_product_identity(pmax) else "identity fails"


SUITES = {
    # name: (function, quick size, full size)
    "pair counts and Catalan": (_pair_counts, 8, 12),
    "closure round trip": (_closure_roundtrip, 8, 10),
    "connectedness definitions agree": (_connected_definitions, 8, 10),
    "moment DP equals NC enumeration": (lambda n: _dp_vs_nc(n, 3 if n < 8 else 10), 6, 8),
    "cumulant inversion round trip": (lambda n: _inversion_roundtrip(n, 5), 8, 10),
    "closed form = reduction = oracle": (_trace_evaluators, 6, 8),
    "multiplicativity over components": (_multiplicativity, 6, 8),
    "cyclic invariance": (_cyclic_invariance, 6, 8),
    "interval-block insertion": (_interval_insertion, 4, 6),
    "singleton blocks vanish": (_singleton_vanishing, 5, 7),
    "mu_q moment and cumulant routes": (_moment_routes, 8, 12),
    "mu_q endpoints": (_endpoints, 10, 14),
    "Hankel positivity": (_hankel, 4, 5),
    "finite-n limit recovery": (_limit_recovery, 6, 8),
    "universality": (_universality, 6, 8),
    "finite-n closed form": (_finite_n, 0, 0),
    "Catalan product identity": (_catalan_identity, 7, 7),
}


def run_checks(level: str = "quick") -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level {level!r}")
    results = []
    for name, (fn, quick, full) in SUITES.items():
        start = time.perf_counter()
        try:
            failure = fn(quick if level == "quick" else full)
        except Exception as exc:  # a crashing check is a failing check
            failure = f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, failure is None, failure or "", time.perf_counter() - start))
    return results
