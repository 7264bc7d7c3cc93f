from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorclt import clt
from tensorclt.errors import DomainError
from tensorclt.free_moments import CumulantSpec
from tensorclt.limit_law import mu_q_moment_fast
from tensorclt.partitions import Partition
from tensorclt.tensor_trace import TensorParams, tau_oracle_unscaled

from strategies import specs

F = Fraction


def kernel(seq):
    groups = {}
    for pos, k in enumerate(seq, start=1):
        groups.setdefault(k, []).append(pos)
    return Partition.from_blocks(groups.values(), len(seq))


def brute_unnormalized(p, n, spec):
    """Sum over every index sequence in [n]^p, no partition bookkeeping."""
    return sum((tau_oracle_unscaled(kernel(s), spec) for s in product(range(n), repeat=p)), F(0))


def test_falling_factorial():
    assert clt.falling_factorial(5, 2) == 20
    assert clt.falling_factorial(2, 3) == 0
    assert clt.falling_factorial(7, 0) == 1


@pytest.mark.parametrize("n", [1, 10, 100])
def test_fourth_moment_closed_form(n):
    assert clt.s_n_moment(4, n, CumulantSpec.of(0, 1, 0, 0)) == 2 + F(2, n)


@settings(max_examples=15)
@given(specs(order=5), st.integers(1, 3), st.integers(1, 5))
def test_matches_sequence_sum(spec, n, p):
    assert clt.unnormalized_moment(p, n, spec) == brute_unnormalized(p, n, spec)


@given(specs(order=4), st.integers(1, 50))
def test_variance_is_normalized(spec, n):
    assert clt.s_n_moment(2, n, spec) == 1


def test_first_moment_vanishes():
    assert clt.s_n_moment(1, 7, CumulantSpec.of(1, 1)) == 0


def test_odd_moment_irrational_raises():
    spec = CumulantSpec.of(1, 1, 1, 0)
    assert clt.unnormalized_moment(3, 2, spec) != 0
    with pytest.raises(DomainError):
        clt.s_n_moment(3, 2, spec)
    # delta^2 n = 3 * 3 is a perfect square
    assert clt.s_n_moment(3, 3, spec) == clt.unnormalized_moment(3, 3, spec) / 27


@pytest.mark.parametrize("spec", [CumulantSpec.of(1, 1), CumulantSpec.of(F(1, 2), 2, 1, -1), CumulantSpec.of(0, 3, 2)])
def test_limit_recovers_mu_q(spec):
    spec = spec.padded(8)
    q = TensorParams.from_spec(spec).q
    for p in (2, 4, 6, 8):
        assert clt.limit_moment(p, spec) == mu_q_moment_fast(p, q)


def test_limit_values_at_two_thirds():
    spec = CumulantSpec.of(1, 1).padded(8)
    assert [clt.limit_moment(p, spec) for p in (2, 4, 6, 8)] == [1, F(20, 9), F(59, 9), F(1826, 81)]


def test_convergence_table_gap():
    rows = clt.convergence_table(4, [10, 20, 40], CumulantSpec.of(0, 1).padded(4))
    fourth = [r for r in rows if r.p == 4]
    assert [r.gap for r in fourth] == [F(1, 5), F(1, 10), F(1, 20)]
    assert all(r.gap == 0 for r in rows if r.p == 2)


def test_gap_shrinks_like_one_over_n():
    rows = clt.convergence_table(6, [10, 100, 1000], CumulantSpec.of(1, 1).padded(6))
    gaps = [abs(r.gap) for r in rows if r.p == 6]
    assert gaps[0] > gaps[1] > gaps[2] > 0
    assert 5 < gaps[1] / gaps[2] < 15


@given(specs(order=5), st.integers(1, 30))
def test_odd_moments_of_even_laws_vanish(spec, n):
    even = CumulantSpec(tuple(k if i % 2 else 0 for i, k in enumerate(spec.kappas)))
    for p in (1, 3, 5):
        assert clt.unnormalized_moment(p, n, even) == 0
        assert clt.s_n_moment(p, n, even) == 0


def test_leading_term_universal_corrections_not():
    a = CumulantSpec.of(0, 1, 0, 0).padded(6)
    b = CumulantSpec.of(0, 1, 0, 2).padded(6)
    for p in (4, 6):
        ca, cb = clt.falling_factorial_coefficients(p, a), clt.falling_factorial_coefficients(p, b)
        assert ca[p // 2] == cb[p // 2]
    assert clt.s_n_moment(4, 10, a) != clt.s_n_moment(4, 10, b)


def test_sixth_moment_gap_halves():
    rows = clt.convergence_table(6, [8, 16, 32], CumulantSpec.of(1, 1).padded(6))
    gaps = [abs(r.gap) for r in rows if r.p == 6]
    for big, small in zip(gaps, gaps[1:]):
        assert 2 / 1.5 <= big / small <= 2 * 1.5
