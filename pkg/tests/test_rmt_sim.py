import json
import math
from fractions import Fraction

import numpy as np
import pytest

from tensorclt import rmt_sim as rs
from tensorclt.errors import CapExceededError, DomainError
from tensorclt.free_moments import catalan


def test_config_validation():
    with pytest.raises(DomainError):
        rs.SimConfig(d=1)
    with pytest.raises(DomainError):
        rs.SimConfig(pmax=3)
    with pytest.raises(DomainError):
        rs.SimConfig(sigma=0)
    with pytest.raises(DomainError):
        rs.SimConfig(centering="median")
    with pytest.raises(CapExceededError):
        rs.SimConfig(d=65)
    assert rs.SimConfig(d=80, dim_cap=80).d == 80


def test_q_and_reference():
    assert rs.SimConfig().q == Fraction(2, 3)
    assert rs.SimConfig(lam=0.0).q == 0


class TestWigner:
    def test_deterministic_and_symmetric(self):
        a = rs.sample_wigner(2, rs.trial_generators(5, 1)[0])
        b = rs.sample_wigner(2, rs.trial_generators(5, 1)[0])
        assert np.array_equal(a, b)
        assert np.array_equal(a, a.T)

    def test_semicircle_normalization(self):
        rng = rs.trial_generators(1, 1)[0]
        ws = rs.sample_wigner(50, rng, count=100)
        second = np.mean([np.trace(w @ w) / 50 for w in ws])
        first = np.mean([np.trace(w) / 50 for w in ws])
        assert abs(second - 1) < 0.05
        assert abs(first) < 0.05

    def test_tensor_expectation_matches_average(self):
        d = 3
        rng = rs.trial_generators(2, 1)[0]
        ws = rs.sample_wigner(d, rng, count=20000)
        empirical = rs.kron_square_sum(ws) / len(ws)
        assert np.max(np.abs(empirical - rs.wigner_tensor_expectation(d))) < 0.03


def test_kron_square_sum_matches_numpy():
    rng = np.random.default_rng(0)
    ms = rng.standard_normal((4, 3, 3))
    expected = sum(np.kron(m, m) for m in ms)
    assert np.allclose(rs.kron_square_sum(ms), expected, atol=1e-12)


class TestBuildDelta:
    def test_single_term_is_plain_kronecker(self):
        cfg = rs.SimConfig(d=4, n=1, lam=0.0, sigma=1.0, centering="limit", normalization="limit")
        w = rs.sample_wigner(4, rs.trial_generators(3, 1)[0], count=1)
        delta = rs.build_delta(cfg, wigners=w)
        assert np.allclose(delta, np.kron(w[0], w[0]), rtol=0, atol=1e-15)

    def test_reproducible_and_symmetric(self):
        cfg = rs.SimConfig(d=2, n=2, seed=9)
        a = rs.build_delta(cfg, rs.trial_generators(9, 1)[0])
        b = rs.build_delta(cfg, rs.trial_generators(9, 1)[0])
        assert a.shape == (4, 4)
        assert np.array_equal(a, b)
        assert np.array_equal(a, a.T)

    def test_exact_centering_is_unbiased(self):
        cfg = rs.SimConfig(d=3, n=4000, lam=1.0)
        delta = rs.build_delta(cfg, rs.trial_generators(4, 1)[0])
        # each entry is a normalized sum of centered terms: O(1), no sqrt(n) drift
        assert np.max(np.abs(delta)) < 6


def test_normalized_traces_match_eigenvalues():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((6, 6))
    a = a + a.T
    eig = np.linalg.eigvalsh(a)
    got = rs.normalized_traces(a, 6)
    expected = [np.mean(eig**p) for p in range(7)]
    assert np.allclose(got, expected, rtol=1e-10)


class TestEmpiricalMoments:
    def test_determinism(self):
        cfg = rs.SimConfig(d=6, n=10, trials=4, seed=123)
        a, b = rs.empirical_moments(cfg), rs.empirical_moments(cfg)
        assert a.means == b.means and a.std_errors == b.std_errors

    def test_threads_do_not_change_result(self):
        cfg = rs.SimConfig(d=6, n=10, trials=4, seed=7)
        assert rs.empirical_moments(cfg, workers=1).means == rs.empirical_moments(cfg, workers=3).means

    def test_result_invariants(self):
        res = rs.empirical_moments(rs.SimConfig(d=6, n=10, trials=3))
        assert res.means[0] == 1.0 and res.std_errors[0] == 0.0
        assert all(s >= 0 for s in res.std_errors)
        assert res.reference[4] == Fraction(20, 9)
        assert "Philox" in res.generator

    def test_semicircle_reference_when_lambda_zero(self):
        res = rs.empirical_moments(rs.SimConfig(d=6, n=10, lam=0.0, trials=2, pmax=6))
        assert [res.reference[p] for p in (0, 2, 4, 6)] == [catalan(k) for k in range(4)]

    def test_odd_moments_symmetric_when_lambda_zero(self):
        res = rs.empirical_moments(rs.SimConfig(d=20, n=50, lam=0.0, trials=20, pmax=6))
        for p in (1, 3, 5):
            assert abs(res.z_scores[p]) < 3

    def test_scale_equivariance(self):
        a = rs.empirical_moments(rs.SimConfig(d=8, n=20, lam=1.0, sigma=1.0, trials=3))
        b = rs.empirical_moments(rs.SimConfig(d=8, n=20, lam=2.0, sigma=2.0, trials=3))
        assert a.reference == b.reference
        assert np.allclose(a.means, b.means, rtol=1e-9)

    def test_serialization(self):
        res = rs.empirical_moments(rs.SimConfig(d=4, n=5, trials=2))
        lines = res.to_csv().strip().split("\r\n")
        assert lines[0] == "p,empirical_mean,std_error,reference,z_score"
        assert len(lines) == 1 + 5
        payload = json.loads(res.to_json())
        assert payload["q"] == "2/3"
        assert Fraction(payload["rows"][4]["reference"]) == Fraction(20, 9)


@pytest.mark.slow
def test_fourth_moment_trend_in_n():
    errors = []
    for n in (10, 50, 200):
        res = rs.empirical_moments(rs.SimConfig(d=50, n=n, trials=20))
        errors.append(abs(res.means[4] - float(res.reference[4])))
    inversions = sum(1 for a, b in zip(errors, errors[1:]) if b > a)
    assert inversions <= 1
    assert errors[-1] < errors[0]
