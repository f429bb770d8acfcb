from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gapforge.budget import BudgetExceeded
from gapforge.gadget import (
    RademacherGadget,
    balanced_sum_probability,
    boolean_slice_kernel,
    certify_gadget,
    exact_d2_real,
    exact_min_distance_real,
    gadget_params,
    handcrafted_gadget,
    sample_gadget,
    sample_projection,
    sample_rademacher,
    slice_expectation,
    small_ball_estimate,
    verify_weak_local_density,
    width_ratio,
)
from gapforge.matrix import MatZ

R4 = MatZ([[1, 1, -1, -1], [1, -1, 1, -1]])


def test_params_worked_example():
    p = gadget_params(2, Fraction(1, 2), 1)
    assert (p.delta, p.h, p.d, p.k, p.N) == (Fraction(1, 6), 8, 2, 3, 8)
    # N = 9 would need 2^(8/2) >= (9/2)^2
    assert 9 ** (2 * p.d) > p.d ** (p.h + 2 * p.d)


def test_params_k_rounds_up():
    p = gadget_params(3, Fraction(1, 3), 1)
    assert p.d == math.ceil(Fraction(1, 9) * 27)
    assert p.k == math.ceil(p.d * Fraction(4, 3))


@pytest.mark.parametrize("eps,C2", [(0, 1), (1, 1), (Fraction(1, 2), 0)])
def test_params_rejects(eps, C2):
    with pytest.raises(ValueError):
        gadget_params(2, eps, C2)


def test_rademacher_deterministic_and_balanced():
    a = sample_rademacher(5, 7, 11)
    assert a == sample_rademacher(5, 7, 11)
    assert a != sample_rademacher(5, 7, 12)
    big = np.array(sample_rademacher(100, 100, 3).tolist())
    assert set(np.unique(big)) <= {-1, 1}
    assert abs(big.mean()) <= 0.05


def test_projection_density():
    n, N, k = 4, 5000, 2
    T = np.array(sample_projection(n, N, k, 9).tolist())
    p = 1 / (4 * k * n)
    sigma = math.sqrt(p * (1 - p) / T.size)
    assert set(np.unique(T)) <= {0, 1}
    assert abs(T.mean() - p) <= 3 * sigma
    assert sample_projection(n, 10, k, 9) == sample_projection(n, 10, k, 9)


def test_slice_worked_examples():
    assert boolean_slice_kernel(R4, 2) == [(0, 1, 1, 0), (1, 0, 0, 1)]
    assert boolean_slice_kernel(R4, 1) == []
    assert boolean_slice_kernel(R4, 4) == [(1, 1, 1, 1)]
    assert len(boolean_slice_kernel(R4, 4, at_most=True)) == 3


@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(2, 9), st.integers(1, 5))
def test_slice_matches_naive(seed, h, N, k):
    k = min(k, N)
    R = sample_rademacher(h, N, seed)
    A = np.array(R.tolist()).reshape(h, N)
    want = []
    for S in itertools.combinations(range(N), k):
        u = np.zeros(N, dtype=np.int64)
        u[list(S)] = 1
        if not (A @ u).any():
            want.append(tuple(int(v) for v in u))
    got = boolean_slice_kernel(R, k)
    assert got == sorted(want)
    for u in got:
        assert sum(u) == k


def test_slice_budget():
    with pytest.raises(BudgetExceeded):
        boolean_slice_kernel(sample_rademacher(3, 40, 0), 6, budget=1000)


def test_expectation_formula():
    assert slice_expectation(12, 2, 3) == Fraction(33, 4)
    assert balanced_sum_probability(4) == Fraction(6, 16)
    assert balanced_sum_probability(3) == 0


def test_real_distances_worked():
    r = exact_min_distance_real(R4)
    assert r.size == 2 and r.support == (0, 3)
    assert exact_d2_real(R4).size == 4


def test_distance_bound_contract():
    # full column rank: nothing up to the bound
    R = MatZ([[1, 1], [1, -1]])
    r = exact_min_distance_real(R, bound=2)
    assert r.size is None and r.floor == 3


@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(3, 8))
def test_d2_at_least_d(seed, h, N):
    R = sample_rademacher(h, N, seed)
    d = exact_min_distance_real(R).size
    assert d is None or d >= 2
    if d is not None:
        d2 = exact_d2_real(R).size
        assert d2 is None or d2 >= d


def test_weak_local_density():
    ok, missing = verify_weak_local_density(handcrafted_gadget())
    assert ok and missing == []
    g = RademacherGadget(R4, MatZ([[0, 0, 0, 0]]), 2)
    ok, missing = verify_weak_local_density(g)
    assert not ok and missing == [(1,)]
    g0 = RademacherGadget(R4, MatZ([], shape=(0, 4)), 2)
    assert verify_weak_local_density(g0) == (True, [])


def test_width_ratio():
    assert width_ratio([1, 0, 0, 1]).ratio_sq == 2
    e1 = width_ratio([1, 0, 0, 0], rho=0, delta=1, d=1)
    assert e1.ratio_sq == 1 and e1.compressible
    ones = width_ratio([1, 1, 1, 1], rho=Fraction(1, 2), delta=Fraction(1, 4), d=4)
    assert ones.ratio_sq == 4 and ones.compressible is False
    with pytest.raises(ValueError):
        width_ratio([0, 0])


def test_small_ball():
    s = 1 / math.sqrt(2)
    u1, u2 = [s, s, 0, 0], [0, 0, s, s]
    assert small_ball_estimate(u1, u2, 0.1) == Fraction(1, 4)
    assert small_ball_estimate(u1, u2, 2.0) == 1
    with pytest.raises(ValueError):
        small_ball_estimate([1, 0], [1, 0], 0.1)
    mc = small_ball_estimate(u1, u2, 0.1, trials=20_000, seed=5, mode="montecarlo")
    assert abs(mc - 0.25) <= 3 * math.sqrt(0.25 * 0.75 / 20_000)


def test_certificate_fixture():
    c = certify_gadget(handcrafted_gadget())
    assert c.summary() == {"d": 2, "d2": 4, "rho": 1, "alpha": 2, "wld": True, "slice_count": 2}
    assert c.complete


def test_certificate_partial_under_budget():
    g = sample_gadget(2, Fraction(1, 2), seed=1)
    c = certify_gadget(g, budget=10)
    assert not c.complete
    assert "d" in c.unverified


def test_gadget_json_roundtrip():
    g = sample_gadget(2, Fraction(1, 2), seed=4)
    assert RademacherGadget.from_dict(g.to_dict()) == g
    bad = g.to_dict()
    bad["R"]["entries"][0][0] = 3
    with pytest.raises(ValueError):
        RademacherGadget.from_dict(bad)
