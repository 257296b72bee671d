"""Maximal-compression spaces A(p, q, m, n) and their closed-form rank formulas.

``A(p, q, m, n)`` is spanned by the elementary matrices lying in the first ``p``
rows or the first ``q`` columns.  It is *maximal-compression* when
``p + q < min(m, n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from matslocc.arith import GaussianRational
from matslocc.errors import DomainError, InvalidParams, NotMaximalCompression, ZeroPQ
from matslocc.matspace import MatrixSpace


@dataclass(frozen=True)
class CompressionParams:
    p: int
    q: int
    m: int
    n: int

    def __post_init__(self):
        if min(self.p, self.q) < 0 or min(self.m, self.n) < 1:
            raise InvalidParams(f"invalid compression parameters {self}")
        if self.p > self.m or self.q > self.n:
            raise InvalidParams(f"need p <= m and q <= n, got {self}")

    @classmethod
    def square(cls, p: int, q: int, d: int) -> CompressionParams:
        return cls(p, q, d, d)

    @property
    def is_maximal(self) -> bool:
        return self.p + self.q < min(self.m, self.n)

    def require_maximal(self) -> None:
        if not self.is_maximal:
            raise NotMaximalCompression(
                f"A({self.p},{self.q},{self.m},{self.n}) needs p + q < min(m, n)"
            )


def build_compression_space(params: CompressionParams) -> MatrixSpace:
    p, q, m, n = params.p, params.q, params.m, params.n
    one = GaussianRational(1)
    gens = [{i * n + j: one} for i in range(m) for j in range(n) if i < p or j < q]
    return MatrixSpace(m, n, gens or [{}])


def compression_mrk(params: CompressionParams) -> int:
    return min(params.p + params.q, params.m, params.n)


def mrk_tensor_pair(a: CompressionParams, b: CompressionParams) -> int:
    """Maximal rank of ``A(p1,q1,m1,n1) (x) A(p2,q2,m2,n2)``."""
    a.require_maximal()
    b.require_maximal()
    return (
        a.p * b.p
        + min((a.n - a.q) * b.q, a.p * (b.m - b.p))
        + min((a.m - a.p) * b.p, a.q * (b.n - b.q))
        + a.q * b.q
    )


def mrk_tensor_power(p: int, q: int, d: int, copies: int) -> int:
    """Maximal rank of ``A(p, q, d)`` tensored ``copies`` times (exact integer)."""
    CompressionParams.square(p, q, d).require_maximal()
    if copies < 1:
        raise InvalidParams("copies must be >= 1")
    N = copies - 1
    total = 0
    for k in range(N + 1):
        total += comb(N, k) * (
            min(p ** (N - k + 1) * (d - p) ** k, q**k * (d - q) ** (N - k + 1))
            + min(q ** (k + 1) * (d - q) ** (N - k), p ** (N - k) * (d - p) ** (k + 1))
        )
    return total


def kl_divergence(a: float, b: float) -> float:
    """Binary relative entropy ``D(a||b)`` in bits, for ``a, b`` in ``(0, 1)``."""
    if not (0 < a < 1 and 0 < b < 1):
        raise DomainError(f"D({a}||{b}) needs both arguments in (0, 1)")
    return _kl(a, b)


def _kl(a: float, b: float) -> float:
    # continuous extension 0*log(0) = 0 at a in {0, 1}
    out = 0.0
    if a > 0:
        out += a * math.log2(a / b)
    if a < 1:
        out += (1 - a) * math.log2((1 - a) / (1 - b))
    return out


@dataclass(frozen=True)
class AsymptoticProfile:
    p: int
    q: int
    d: int
    p_frac: Fraction
    q_frac: Fraction
    lam: float
    mu: float
    alpha: float
    div_p: float  # D(1 - alpha || p/d)
    div_q: float  # D(alpha || q/d)
    mrk_inf: float

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "d": self.d,
            "p_frac": str(self.p_frac),
            "q_frac": str(self.q_frac),
            "lambda": self.lam,
            "mu": self.mu,
            "alpha": self.alpha,
            "div_one_minus_alpha_p": self.div_p,
            "div_alpha_q": self.div_q,
            "mrk_inf": self.mrk_inf,
        }


def asymptotic_profile(p: int, q: int, d: int) -> AsymptoticProfile:
    """Limit of ``mrk(A(p,q,d)^{(x)n})^(1/n)`` and the quantities it is built from."""
    CompressionParams.square(p, q, d).require_maximal()
    if p == 0 or q == 0:
        raise ZeroPQ("the asymptotic formula needs p >= 1 and q >= 1")
    lam = math.log2((d - p) / q)
    mu = math.log2((d - q) / p)
    alpha = mu / (lam + mu)
    pf, qf = Fraction(p, d), Fraction(q, d)
    div_p = kl_divergence(1 - alpha, float(pf))
    div_q = kl_divergence(alpha, float(qf))
    mrk_inf = d * max(2.0**-div_p, 2.0**-div_q)
    return AsymptoticProfile(p, q, d, pf, qf, lam, mu, alpha, div_p, div_q, mrk_inf)


def mrk_inf_upper(p: int, q: int, d: int) -> float:
    """Asymptotic maximal rank of ``A(p, q, d)``, including the degenerate bands.

    With ``p = 0`` every element lives in ``q`` columns, with ``q = 0`` in ``p``
    rows, so the asymptotic rank is ``q`` resp. ``p``.
    """
    if p == 0 or q == 0:
        CompressionParams.square(p, q, d)
        return float(max(p, q))
    return asymptotic_profile(p, q, d).mrk_inf


def binomial_tail_exact(N: int, Nprime: int, prob) -> Fraction:
    """``sum_{k <= N'} C(N, k) prob^k (1 - prob)^(N - k)`` as an exact rational."""
    pr = _as_fraction(prob)
    return sum(
        (comb(N, k) * pr**k * (1 - pr) ** (N - k) for k in range(Nprime + 1)), Fraction(0)
    )


def binomial_tail_bounds(N: int, Nprime: int, prob) -> tuple[float, float]:
    """Bounds ``2^{-N D(N'/N || p)} / sqrt(2N)`` and ``2^{-N D(N'/N || p)}`` on the lower tail."""
    pr = float(_as_fraction(prob))
    if not 0 < pr < 1:
        raise DomainError("prob must lie in (0, 1)")
    if N < 1 or Nprime < 0 or not Nprime < N * _as_fraction(prob):
        raise DomainError(f"need 0 <= N' < N*prob, got N={N}, N'={Nprime}, prob={prob}")
    upper = 2.0 ** (-N * _kl(Nprime / N, pr))
    return upper / math.sqrt(2 * N), upper


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)
