from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from matslocc.arith import (
    DEFAULT_PRIME,
    GaussianRational,
    I,
    PrimeField,
    default_field,
    format_scalar,
    next_field_below,
    parse_scalar,
    random_field_element,
    reduce_mod,
    trial_stream,
)
from matslocc.errors import ConfigError, DenominatorDivisibleByP, ParseError

F13 = PrimeField.for_prime(13)

rationals = st.fractions(max_denominator=50).filter(lambda x: abs(x.numerator) < 10**6)
gaussians = st.builds(GaussianRational, rationals, rationals)
nonzero = gaussians.filter(bool)


def test_reduce_examples():
    assert reduce_mod(GaussianRational(0), F13) == 0
    assert reduce_mod(I, F13) == 5
    assert reduce_mod(GaussianRational(Fraction(1, 2)), F13) == 7


def test_reduce_rejects_bad_denominator():
    with pytest.raises(DenominatorDivisibleByP):
        reduce_mod(GaussianRational(Fraction(1, 13)), F13)
    with pytest.raises(DenominatorDivisibleByP):
        reduce_mod(GaussianRational(0, Fraction(2, 26)), F13)


def test_default_field():
    F = default_field()
    assert F.modulus == DEFAULT_PRIME < 2**31
    assert F.modulus % 4 == 1
    assert (F.sqrt_minus_one**2 + 1) % F.modulus == 0


def test_field_validation():
    with pytest.raises(ConfigError):
        PrimeField.for_prime(2**31 - 1)  # 3 mod 4
    with pytest.raises(ConfigError):
        PrimeField.for_prime(21)
    with pytest.raises(ConfigError):
        PrimeField(13, 4)
    assert next_field_below(F13).modulus == 5


def test_golden_first_draw():
    # frozen from the PCG64 stream for seed 0, trial 0
    assert random_field_element(default_field(), trial_stream(0, 0)) == 1722792807


def test_draws_in_range_and_streams_distinct():
    F = default_field()
    a = [random_field_element(F, trial_stream(7, 0)) for _ in range(1)]
    xs = trial_stream(7, 0).integers(0, F.modulus, size=200)
    ys = trial_stream(7, 1).integers(0, F.modulus, size=200)
    assert a[0] == xs[0]
    assert all(0 <= x < F.modulus for x in xs)
    assert list(xs) != list(ys)


def test_negative_seed_rejected():
    with pytest.raises(ConfigError):
        trial_stream(-1, 0)


@pytest.mark.parametrize(
    "text, value",
    [
        ("3", GaussianRational(3)),
        ("-1/2", GaussianRational(Fraction(-1, 2))),
        ("1/2+3/4*i", GaussianRational(Fraction(1, 2), Fraction(3, 4))),
        ("1/2-3/4*i", GaussianRational(Fraction(1, 2), Fraction(-3, 4))),
        ("i", I),
        ("-i", -I),
        ("2+i", GaussianRational(2, 1)),
        ("5/3*i", GaussianRational(0, Fraction(5, 3))),
    ],
)
def test_parse(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1/0", "1/2+i*3", "1..2", "*i"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_scalar(text)


def test_format_canonical():
    assert format_scalar(I) == "0+1*i"
    assert format_scalar(GaussianRational(Fraction(2, 4), -1)) == "1/2-1*i"
    assert format_scalar(GaussianRational(-4)) == "-4"


@given(gaussians)
def test_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x


@given(gaussians, gaussians, gaussians)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0


@given(nonzero)
def test_inverse_and_conjugate(a):
    assert a * a.inverse() == 1
    assert a.conjugate().conjugate() == a
    assert a * a.conjugate() == GaussianRational(a.norm())


@given(gaussians, gaussians)
def test_reduction_is_a_ring_map(a, b):
    F = PrimeField.for_prime(1000037)
    p = F.modulus
    assert reduce_mod(a * b, F) == reduce_mod(a, F) * reduce_mod(b, F) % p
    assert reduce_mod(a + b, F) == (reduce_mod(a, F) + reduce_mod(b, F)) % p


def test_immutable_and_hash():
    x = GaussianRational(1, 2)
    with pytest.raises(AttributeError):
        x.re = Fraction(3)
    assert hash(GaussianRational(3)) == hash(Fraction(3))
    assert {GaussianRational(1, 2): 1}[parse_scalar("1+2*i")] == 1
