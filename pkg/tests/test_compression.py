import math
from fractions import Fraction
from math import comb

import pytest

from matslocc.compression import (
    CompressionParams,
    asymptotic_profile,
    binomial_tail_bounds,
    binomial_tail_exact,
    build_compression_space,
    compression_mrk,
    kl_divergence,
    mrk_inf_upper,
    mrk_tensor_pair,
    mrk_tensor_power,
)
from matslocc.errors import DomainError, InvalidParams, NotMaximalCompression, ZeroPQ
from matslocc.matspace import tensor, tensor_power
from matslocc.rank import max_rank_randomized


def params(p, q, m, n=None):
    return CompressionParams(p, q, m, m if n is None else n)


def power_by_hand(p, q, d, copies):
    N = copies - 1
    return sum(
        comb(N, k)
        * (
            min(p ** (N - k + 1) * (d - p) ** k, q**k * (d - q) ** (N - k + 1))
            + min(q ** (k + 1) * (d - q) ** (N - k), p ** (N - k) * (d - p) ** (k + 1))
        )
        for k in range(N + 1)
    )


def test_build_examples():
    S = build_compression_space(params(1, 1, 3))
    assert S.dim == 5 and max_rank_randomized(S).rank == 2
    Z = build_compression_space(params(0, 0, 3))
    assert Z.dim == 0 and max_rank_randomized(Z).rank == 0
    assert max_rank_randomized(build_compression_space(params(2, 1, 5))).rank == 3 == compression_mrk(params(2, 1, 5))


def test_param_validation():
    with pytest.raises(InvalidParams):
        CompressionParams(4, 0, 3, 3)
    with pytest.raises(InvalidParams):
        CompressionParams(-1, 0, 3, 3)
    assert not params(1, 2, 3).is_maximal
    with pytest.raises(NotMaximalCompression):
        mrk_tensor_pair(params(1, 2, 3), params(1, 1, 3))


@pytest.mark.parametrize(
    "a, b, value",
    [((1, 1, 3), (1, 1, 3), 6), ((1, 2, 5), (2, 1, 6), 15), ((1, 1, 4), (1, 1, 4), 8)],
)
def test_pair_formula(a, b, value):
    pa, pb = params(*a), params(*b)
    assert mrk_tensor_pair(pa, pb) == value
    S = tensor(build_compression_space(pa), build_compression_space(pb))
    assert max_rank_randomized(S).rank == value


def test_power_examples():
    assert mrk_tensor_power(1, 1, 3, 1) == 2
    assert mrk_tensor_power(1, 1, 3, 2) == 6
    assert mrk_tensor_power(1, 1, 3, 3) == 14
    with pytest.raises(NotMaximalCompression):
        mrk_tensor_power(1, 2, 3, 2)


def test_power_matches_hand_expansion():
    for d in range(3, 9):
        for p in range(0, d):
            for q in range(0, d - p):
                for n in range(1, 6):
                    assert mrk_tensor_power(p, q, d, n) == power_by_hand(p, q, d, n)


def test_power_two_equals_pair():
    for d in range(3, 9):
        for p in range(0, d):
            for q in range(0, d - p):
                a = params(p, q, d)
                assert mrk_tensor_power(p, q, d, 2) == mrk_tensor_pair(a, a)


@pytest.mark.parametrize("p, q, d", [(1, 1, 3), (1, 1, 4), (1, 2, 4), (2, 1, 5)])
def test_power_matches_oracle(p, q, d):
    A = build_compression_space(params(p, q, d))
    for n in (1, 2, 3):
        assert max_rank_randomized(tensor_power(A, n)).rank == mrk_tensor_power(p, q, d, n)


def test_profile_examples():
    prof = asymptotic_profile(1, 1, 3)
    assert prof.alpha == pytest.approx(0.5, abs=1e-15)
    assert abs(prof.mrk_inf - 2 * math.sqrt(2)) < 1e-9
    prof = asymptotic_profile(1, 2, 4)
    assert prof.lam == pytest.approx(math.log2(1.5)) and prof.mu == pytest.approx(1.0)
    assert prof.alpha == pytest.approx(0.63093, abs=1e-5)
    # 40-digit mpmath evaluation of the closed form, frozen
    assert abs(prof.mrk_inf - 3.863626212933750894) < 1e-9
    assert prof.mrk_inf == pytest.approx(3.8638, abs=5e-4)
    assert prof.p_frac == Fraction(1, 4) and prof.q_frac == Fraction(1, 2)


def test_profile_rejects():
    with pytest.raises(ZeroPQ):
        asymptotic_profile(0, 1, 3)
    with pytest.raises(NotMaximalCompression):
        asymptotic_profile(1, 2, 3)
    assert mrk_inf_upper(0, 2, 4) == 2.0
    assert mrk_inf_upper(1, 1, 3) == asymptotic_profile(1, 1, 3).mrk_inf


def test_profile_invariants_up_to_30():
    for d in range(3, 31):
        for p in range(1, d):
            for q in range(1, d - p):
                prof = asymptotic_profile(p, q, d)
                assert prof.q_frac < prof.alpha < 1 - prof.p_frac
                assert abs(prof.div_p - prof.div_q) < 1e-12
                assert p + q <= prof.mrk_inf + 1e-9
                assert prof.mrk_inf < d


def test_profile_agrees_with_growth():
    # the n-th roots approach the limit from below
    for p, q, d in [(1, 2, 4), (1, 1, 3), (2, 1, 5)]:
        lim = asymptotic_profile(p, q, d).mrk_inf
        roots = [mrk_tensor_power(p, q, d, n) ** (1 / n) for n in range(1, 21)]
        assert max(roots) <= lim + 1e-9
        assert roots[-1] > roots[0]


def test_fekete():
    c = [None] + [math.log2(mrk_tensor_power(1, 1, 3, n)) for n in range(1, 13)]
    for m in range(1, 12):
        for n in range(1, 13 - m):
            assert c[m + n] >= c[m] + c[n] - 1e-12


def test_convergence_doubling():
    lim = 2 * math.sqrt(2)
    vals = {n: mrk_tensor_power(1, 1, 3, n) ** (1 / n) for n in range(1, 31)}
    assert all(v <= lim + 1e-9 for v in vals.values())
    chain = [vals[n] for n in (1, 2, 4, 8, 16)]
    assert chain == sorted(chain)


def test_kl_examples():
    assert kl_divergence(1 / 3, 1 / 3) == 0
    assert kl_divergence(0.5, 1 / 3) == pytest.approx(0.5 * math.log2(9 / 8), abs=1e-12)
    assert kl_divergence(0.7, 0.2) > 0
    for bad in [(0, 0.5), (0.5, 1), (1.2, 0.3)]:
        with pytest.raises(DomainError):
            kl_divergence(*bad)


def test_binomial_examples():
    exact = binomial_tail_exact(20, 5, Fraction(1, 2))
    assert exact == Fraction(sum(comb(20, k) for k in range(6)), 2**20)
    assert float(exact) == pytest.approx(0.0206947, abs=1e-7)
    lo, hi = binomial_tail_bounds(20, 5, 0.5)
    assert hi == pytest.approx(2 ** (-20 * kl_divergence(0.25, 0.5)))
    assert lo == pytest.approx(hi / math.sqrt(40))
    assert lo <= float(exact) <= hi
    lo, hi = binomial_tail_bounds(10, 2, 0.4)
    assert lo <= float(binomial_tail_exact(10, 2, Fraction(2, 5))) <= hi
    with pytest.raises(DomainError):
        binomial_tail_bounds(10, 5, 0.5)


def test_binomial_sandwich_grid():
    for N in range(1, 41):
        for prob in (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            for Np in range(0, N):
                if Np >= N * prob:
                    break
                exact = float(binomial_tail_exact(N, Np, prob))
                lo, hi = binomial_tail_bounds(N, Np, prob)
                # 1e-12 relative slack absorbs rounding in the float exponentials
                assert lo * (1 - 1e-12) <= exact <= hi * (1 + 1e-12)
