from fractions import Fraction

import pytest
from hypothesis import given

from tensorclt import limit_law as ll
from tensorclt.errors import CapExceededError, DomainError
from tensorclt.free_moments import MomentTable, catalan, mu1_moments

from strategies import unit_q

F = Fraction
GRID = [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]


def test_q_from_params():
    assert ll.q_from_params(1, 1) == F(2, 3)
    assert ll.q_from_params(0, 5) == 0
    with pytest.raises(DomainError):
        ll.q_from_params(1, 0)
    with pytest.raises(DomainError):
        ll.check_q(F(3, 2))


def test_mu1_moment_values():
    expected = [1, F(5, 2), F(35, 4), F(147, 4), F(1386, 8), F(14157, 16), F(306735, 64)]
    got = [ll.mu_q_moment_direct(2 * p, 1) for p in range(1, 8)]
    assert got == expected
    assert [mu1_moments(14)[2 * p] for p in range(1, 8)] == expected
    for p in range(1, 8):
        assert expected[p - 1] == F(catalan(p) * catalan(p + 1), 2**p)


def test_second_and_fourth_moment_formula():
    for q in GRID:
        assert ll.mu_q_moment_fast(2, q) == 1
        assert ll.mu_q_moment_fast(4, q) == 2 + q**2 / 2


@given(unit_q)
def test_sixth_moment_polynomial(q):
    assert ll.mu_q_moment_direct(6, q) == 5 + 3 * q**2 + F(3, 4) * q**3


def test_fourth_moment_increasing_in_q():
    values = [ll.mu_q_moment_fast(4, F(k, 10)) for k in range(11)]
    assert all(a < b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("q", GRID)
def test_routes_agree(q):
    for order in range(0, 13):
        assert ll.mu_q_moment_direct(order, q) == ll.mu_q_moment_fast(order, q)
    for n in range(1, 13):
        assert ll.mu_q_cumulant(n, q) == ll.mu_q_cumulant_additive(n, q)


@given(unit_q)
def test_routes_agree_random_q(q):
    for n in (4, 6, 8, 10):
        assert ll.mu_q_cumulant(n, q) == ll.mu_q_cumulant_additive(n, q)


def test_cumulant_values_at_one():
    assert [ll.mu_q_cumulant(n, 1) for n in range(1, 9)] == [0, 1, 0, F(1, 2), 0, F(3, 4), 0, F(14, 8)]


def test_semicircle_endpoint():
    assert [ll.mu_q_moment_fast(2 * p, 0) for p in range(7)] == [catalan(p) for p in range(7)]
    assert all(ll.mu_q_cumulant(n, 0) == (1 if n == 2 else 0) for n in range(1, 13))


def test_odd_orders_vanish():
    for q in GRID:
        assert all(ll.mu_q_moment_direct(o, q) == 0 for o in (1, 3, 5, 7))
        assert all(ll.mu_q_cumulant_additive(o, q) == 0 for o in (1, 3, 5, 7))


def test_hankel_grid():
    for k in range(11):
        assert ll.hankel_validity(ll.mu_q_moments_fast(10, F(k, 10)), 5)


def test_hankel_rejects_invalid_sequences():
    # variance -1
    assert not ll.hankel_validity(MomentTable((1, 0, -1, 0, 1)), 2)
    # m4 < m2^2
    assert not ll.hankel_validity(MomentTable((1, 0, 1, 0, F(1, 2))), 2)
    # two-point law is PSD but singular at K = 2
    assert ll.hankel_validity(MomentTable((1, 0, 1, 0, 1)), 2)
    with pytest.raises(DomainError):
        ll.hankel_validity(MomentTable((1, 0, 1)), 2)


def test_catalan_product_identity():
    assert ll.catalan_product_identity(7)
    assert ll.catalan_product_identity(15)


def test_cap_is_enforced():
    with pytest.raises(CapExceededError):
        ll.mu_q_moment_direct(18, F(1, 2))
    with pytest.raises(CapExceededError):
        ll.mu_q_moment_direct(10, F(1, 2), cap=8)


def test_table():
    table = ll.limit_law_table(F(1, 2), 6)
    assert table.moments[4] == 2 + F(1, 8)
    assert table.cumulants.kappa(4) == F(1, 8)
