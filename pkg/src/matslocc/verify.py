"""Reproducible check suites: published values, closed forms against the oracle, invariants.

Each suite returns a JSON-ready dict with one entry per check.  Nothing
time-dependent goes into the output, so a fixed configuration always yields
the same bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from matslocc.arith import PrimeField
from matslocc.compression import (
    CompressionParams,
    asymptotic_profile,
    binomial_tail_bounds,
    binomial_tail_exact,
    build_compression_space,
    kl_divergence,
    mrk_tensor_pair,
    mrk_tensor_power,
)
from matslocc.errors import SizeGuardExceeded, UnknownSuite
from matslocc.matspace import DEFAULT_SIZE_GUARD, identity_space, skew_space, tensor, tensor_power
from matslocc.rank import DEFAULT_TRIALS, certify, estimate_max_rank, max_rank_greedy, rank_exact
from matslocc.shrunk import has_shrunk_subspace, ncrk_bounds
from matslocc.slocc import build_skew_state, compression_state, msrk, rate_bounds, skew_tensor_square_witness, vec_support

SUITES = ("paper-values", "formulas-vs-oracle", "invariants")

COMPRESSION_TRIPLES = ((1, 1, 3), (1, 1, 4), (1, 2, 4), (2, 1, 5))


@dataclass(frozen=True)
class CheckConfig:
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    field: PrimeField | None = None
    size_guard: int = DEFAULT_SIZE_GUARD
    jobs: int = 1


def _check(name, ok, observed, expected) -> dict:
    return {"name": name, "pass": bool(ok), "observed": observed, "expected": expected}


def _mrk(S, cfg: CheckConfig, stream=()) -> int:
    return estimate_max_rank(S, cfg.trials, cfg.seed, cfg.field, cfg.jobs, stream).rank


def published_values(cfg: CheckConfig) -> list[dict]:
    out = []
    a = CompressionParams.square(1, 1, 3)
    A = build_compression_space(a)
    sq = tensor(A, A, cfg.size_guard)
    three = [mrk_tensor_power(1, 1, 3, 2), mrk_tensor_pair(a, a), _mrk(sq, cfg)]
    out.append(_check("A(1,1,3) squared: power formula, pair formula, randomized", three == [6, 6, 6], three, [6, 6, 6]))

    for d in (3, 5, 7):
        st = build_skew_state(d)
        S = vec_support(st)
        rep = msrk(st, 1, cfg.trials, cfg.seed, cfg.field, cfg.size_guard, cfg.jobs)
        greedy = rank_exact(max_rank_greedy(S))
        out.append(_check(f"skew d={d}: msrk randomized and greedy", [rep.rank, greedy] == [d - 1] * 2,
                          [rep.rank, greedy], [d - 1, d - 1]))
        w = rank_exact(skew_tensor_square_witness(d))
        out.append(_check(f"skew d={d}: two-copy witness rank", w == d * d, w, d * d))

    two = msrk(build_skew_state(3), 2, cfg.trials, cfg.seed, cfg.field, cfg.size_guard, cfg.jobs).rank
    out.append(_check("skew d=3: msrk of two copies", two == 9, two, 9))

    dec = has_shrunk_subspace(skew_space(3), cfg.trials, cfg.seed, cfg.field, size_guard=cfg.size_guard, jobs=cfg.jobs)
    cert = dec.certificate or {}
    obs = [dec.decision, cert.get("k"), cert.get("exact_verified")]
    out.append(_check("skew(3): no shrunk subspace, certificate at k=2", obs == ["no-shrunk", 2, True], obs,
                      ["no-shrunk", 2, True]))
    nb = ncrk_bounds(skew_space(3), (), cfg.trials, cfg.seed, cfg.field, cfg.size_guard, cfg.jobs)
    out.append(_check("skew(3): ncrk bounds", [nb.lower, nb.upper] == [3, 3], [nb.lower, nb.upper], [3, 3]))

    rb = rate_bounds(build_skew_state(3), 3, None, cfg.trials, cfg.seed, cfg.field, size_guard=cfg.size_guard, jobs=cfg.jobs)
    obs = [rb.lower, rb.upper, rb.exact]
    out.append(_check("skew d=3 to rank-3 target: rate", obs == [1.0, 1.0, True], obs, [1.0, 1.0, True]))

    prof = asymptotic_profile(1, 1, 3)
    out.append(_check("A(1,1,3): asymptotic maximal rank", abs(prof.mrk_inf - 2 * math.sqrt(2)) < 1e-9,
                      prof.mrk_inf, 2 * math.sqrt(2)))
    rb = rate_bounds(compression_state(1, 1, 3), 2, None, cfg.trials, cfg.seed, cfg.field, size_guard=cfg.size_guard,
                     jobs=cfg.jobs)
    low = math.log2(6) / 2
    ok = rb.lower >= low - 1e-12 and rb.upper == 1.5
    out.append(_check("A(1,1,3) state to rank-2 target: rate bounds", ok, [rb.lower, rb.upper], [low, 1.5]))
    return out


def formulas_vs_oracle(cfg: CheckConfig) -> list[dict]:
    out = []
    for p, q, d in COMPRESSION_TRIPLES:
        A = build_compression_space(CompressionParams.square(p, q, d))
        for n in (1, 2, 3):
            try:
                S = tensor_power(A, n, cfg.size_guard)
            except SizeGuardExceeded:
                continue
            f = mrk_tensor_power(p, q, d, n)
            r = _mrk(S, cfg, (n,))
            out.append(_check(f"A({p},{q},{d}) power {n}", f == r, r, f))
    for a, b in (((1, 1, 3), (1, 2, 4)), ((2, 1, 5), (1, 1, 3))):
        pa, pb = CompressionParams.square(*a), CompressionParams.square(*b)
        S = tensor(build_compression_space(pa), build_compression_space(pb), cfg.size_guard)
        f, r = mrk_tensor_pair(pa, pb), _mrk(S, cfg)
        out.append(_check(f"A{a} tensor A{b}", f == r, r, f))
    return out


def invariants(cfg: CheckConfig) -> list[dict]:
    out = []
    worst_gap, strict = 0.0, True
    for d in range(3, 31):
        for p in range(1, d):
            for q in range(1, d - p):
                prof = asymptotic_profile(p, q, d)
                a = prof.alpha
                worst_gap = max(worst_gap, abs(kl_divergence(1 - a, prof.p_frac) - kl_divergence(a, prof.q_frac)))
                strict = strict and prof.q_frac < a < 1 - prof.p_frac
    out.append(_check("divergence identity at alpha, d <= 30", worst_gap < 1e-12, worst_gap, "< 1e-12"))
    out.append(_check("alpha strictly between q' and 1 - p'", strict, strict, True))

    limit = asymptotic_profile(1, 1, 3).mrk_inf
    roots = [mrk_tensor_power(1, 1, 3, n) ** (1 / n) for n in range(1, 31)]
    out.append(_check("A(1,1,3): n-th roots stay below the limit", max(roots) <= limit + 1e-9, max(roots), limit))
    chain = [roots[n - 1] for n in (1, 2, 4, 8, 16)]
    out.append(_check("A(1,1,3): n-th roots nondecreasing on doublings",
                      all(x <= y + 1e-12 for x, y in zip(chain, chain[1:])), chain, "nondecreasing"))
    fails = [
        [m, n]
        for m in range(1, 12)
        for n in range(1, 12 - m + 1)
        if mrk_tensor_power(1, 1, 3, m + n) < mrk_tensor_power(1, 1, 3, m) * mrk_tensor_power(1, 1, 3, n)
    ]
    out.append(_check("A(1,1,3): supermultiplicative for m + n <= 12", not fails, fails, []))

    bad = []
    for N in range(1, 41):
        for prob in (Fraction(1, 5), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)):
            for Np in range(0, N):
                if Np >= N * prob:
                    break
                exact = float(binomial_tail_exact(N, Np, prob))
                lo, hi = binomial_tail_bounds(N, Np, prob)
                # relative slack covers float rounding of the exponential bounds
                if not (lo * (1 - 1e-12) <= exact <= hi * (1 + 1e-12)):
                    bad.append([N, Np, str(prob)])
    out.append(_check("binomial tail within exponential bounds, N <= 40", not bad, bad, []))

    dec = has_shrunk_subspace(identity_space(3), cfg.trials, cfg.seed, cfg.field, size_guard=cfg.size_guard)
    obs = [dec.decision, dec.k_tested]
    out.append(_check("span{I}: no shrunk subspace at k=1", obs == ["no-shrunk", 1], obs, ["no-shrunk", 1]))
    rep = certify(skew_space(3), estimate_max_rank(skew_space(3), cfg.trials, cfg.seed, cfg.field))
    out.append(_check("lifted witness keeps its rank", rep.certified_rank >= rep.rank,
                      [rep.rank, rep.certified_rank], "exact >= modular"))
    return out


_RUNNERS = {"paper-values": published_values, "formulas-vs-oracle": formulas_vs_oracle, "invariants": invariants}


def run_suite(name: str, cfg: CheckConfig | None = None) -> dict:
    if name not in _RUNNERS:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    cfg = cfg or CheckConfig()
    checks = _RUNNERS[name](cfg)
    return {
        "suite": name,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "passed": all(c["pass"] for c in checks),
        "checks": checks,
    }
