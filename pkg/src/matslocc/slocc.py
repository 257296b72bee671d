"""Tripartite states, their matrix spaces, and SLOCC convertibility.

The matrix space of a state is the span of its C-slices ``M_c[a][b] = psi(a, b, c)``,
which equals the vectorized support of the reduced AB state.  Maximal Schmidt
rank of the state is the maximal rank of that space, so every finite-copy and
asymptotic question reduces to the rank machinery in :mod:`matslocc.rank` and
:mod:`matslocc.shrunk`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from matslocc.arith import GaussianRational, PrimeField
from matslocc.compression import CompressionParams, mrk_inf_upper
from matslocc.errors import EvenD, InvalidParams, NonSquare, SizeGuardExceeded
from matslocc.matspace import (
    DEFAULT_SIZE_GUARD,
    Matrix,
    MatrixSpace,
    Subspace,
    image,
    kernel,
    kron_sparse,
    tensor_power,
)
from matslocc.rank import DEFAULT_TRIALS, MaxRankReport, certify, estimate_max_rank
from matslocc.shrunk import (
    ShrunkDecision,
    ShrunkWitness,
    canonical_witnesses,
    has_shrunk_subspace,
    verify_shrunk,
)

# default tensor-power budget for rate lower bounds, in matrix entries
RATE_ENTRY_BUDGET = 2**12


class TripartiteState:
    """Sparse amplitude tensor on ``H_A (x) H_B (x) H_C``; normalization is not enforced.

    ``norm_sq`` optionally records the square of a global normalization factor,
    kept out of the exact arithmetic since it may be irrational.
    """

    def __init__(self, dims, amplitudes, norm_sq: Fraction | None = None):
        dA, dB, dC = (int(x) for x in dims)
        if min(dA, dB, dC) < 1:
            raise InvalidParams("state dimensions must be positive")
        self.dims = (dA, dB, dC)
        amps: dict[tuple[int, int, int], GaussianRational] = {}
        items = amplitudes.items() if isinstance(amplitudes, dict) else amplitudes
        for idx, value in items:
            a, b, c = (int(x) for x in idx)
            if not (0 <= a < dA and 0 <= b < dB and 0 <= c < dC):
                raise InvalidParams(f"amplitude index {(a, b, c)} outside dims {self.dims}")
            if (a, b, c) in amps:
                raise InvalidParams(f"duplicate amplitude index {(a, b, c)}")
            amps[(a, b, c)] = GaussianRational.coerce(value)
        amps = {k: v for k, v in amps.items() if v}
        if not amps:
            raise InvalidParams("state has no nonzero amplitude")
        self.amplitudes = dict(sorted(amps.items()))
        self.norm_sq = None if norm_sq is None else Fraction(norm_sq)

    def scaled(self, c) -> TripartiteState:
        c = GaussianRational.coerce(c)
        return TripartiteState(self.dims, {k: c * v for k, v in self.amplitudes.items()})

    def permute_c(self, perm: list[int]) -> TripartiteState:
        return TripartiteState(
            self.dims, {(a, b, perm[c]): v for (a, b, c), v in self.amplitudes.items()}, self.norm_sq
        )

    @property
    def is_square(self) -> bool:
        return self.dims[0] == self.dims[1]

    def to_json(self) -> dict:
        out = {
            "dims": list(self.dims),
            "amplitudes": [
                {"a": a, "b": b, "c": c, "value": str(v)} for (a, b, c), v in self.amplitudes.items()
            ],
        }
        if self.norm_sq is not None:
            out["norm_sq"] = str(self.norm_sq)
        return out

    def __repr__(self):
        return f"TripartiteState(dims={self.dims}, nnz={len(self.amplitudes)})"


def vec_support(state: TripartiteState) -> MatrixSpace:
    dA, dB, dC = state.dims
    slices: dict[int, dict[int, GaussianRational]] = {}
    for (a, b, c), v in state.amplitudes.items():
        slices.setdefault(c, {})[a * dB + b] = v
    return MatrixSpace(dA, dB, [slices[c] for c in sorted(slices)])


def msrk(
    state: TripartiteState,
    copies: int = 1,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    F: PrimeField | None = None,
    size_guard: int = DEFAULT_SIZE_GUARD,
    jobs: int = 1,
) -> MaxRankReport:
    """Randomized maximal Schmidt rank of ``state`` tensored ``copies`` times."""
    S = tensor_power(vec_support(state), copies, size_guard)
    return estimate_max_rank(S, trials, seed, F, jobs)


def _max_power_below(base: int, value: int) -> int:
    m = 0
    while base ** (m + 1) <= value:
        m += 1
    return m


@dataclass
class ConvertibilityVerdict:
    copies: int
    target: int
    report: MaxRankReport
    verdict: bool
    max_copies: int | None

    def to_json(self) -> dict:
        return {
            "copies": self.copies,
            "target_schmidt_rank": self.target,
            "msrk_estimate": self.report.rank,
            "failure_bound": str(self.report.failure_bound),
            "verdict": "yes" if self.verdict else "no",
            "max_target_copies": self.max_copies,
            "certificate": self.report.witness_json() if self.verdict else None,
            "certified_rank": self.report.certified_rank,
        }


def can_convert(
    state: TripartiteState,
    copies: int,
    target: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    F: PrimeField | None = None,
    size_guard: int = DEFAULT_SIZE_GUARD,
    certify_witness: bool = False,
    jobs: int = 1,
) -> ConvertibilityVerdict:
    """Can ``copies`` copies reach a bipartite state of Schmidt rank ``target`` by SLOCC?"""
    if target < 1:
        raise InvalidParams("target Schmidt rank must be >= 1")
    S = tensor_power(vec_support(state), copies, size_guard)
    rep = estimate_max_rank(S, trials, seed, F, jobs)
    if certify_witness:
        rep = certify(S, rep)
    best = rep.certified_rank if rep.certified_rank is not None else rep.rank
    m = None if target == 1 else _max_power_below(target, best)
    return ConvertibilityVerdict(copies, target, rep, best >= target, m)


@dataclass
class SupermultiplicativityResult:
    value: bool
    evidence: dict

    def to_json(self) -> dict:
        return {"strictly_supermultiplicative": self.value, "evidence": self.evidence}


def strictly_supermultiplicative(
    state: TripartiteState,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    F: PrimeField | None = None,
) -> SupermultiplicativityResult:
    """Two-copy strict gain test: ``mrk < dim Im`` and ``mrk < cols - dim Ker``.

    Conditions are applied as stated, on ``rows x cols`` with rows indexed by A;
    the evidence flags inputs with more rows than columns.
    """
    S = vec_support(state)
    rep = estimate_max_rank(S, trials, seed, F)
    d1, d2 = S.shape
    im, ker = image(S).dim, kernel(S).dim
    c1 = rep.rank < im
    c2 = rep.rank < d2 - ker
    evidence = {
        "mrk": rep.rank,
        "dim_image": im,
        "dim_kernel": ker,
        "rows": d1,
        "cols": d2,
        "image_condition": c1,
        "kernel_condition": c2,
        "rows_exceed_cols": d1 > d2,
    }
    return SupermultiplicativityResult(c1 and c2, evidence)


@dataclass
class Reachability:
    reachable: bool
    decision: ShrunkDecision

    def to_json(self) -> dict:
        return {
            "reachable": self.reachable,
            "rate_one": self.reachable,
            "shrunk_decision": self.decision.to_json(),
        }


def _witness_list(S: MatrixSpace, supplied: Iterable[Subspace]) -> list[ShrunkWitness]:
    out = [w for w in (verify_shrunk(S, U) for U in supplied) if w is not None]
    out += canonical_witnesses(S)
    return out


def asymptotic_reachability(
    state: TripartiteState,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    F: PrimeField | None = None,
    witnesses: Iterable[Subspace] = (),
    size_guard: int = DEFAULT_SIZE_GUARD,
    jobs: int = 1,
) -> Reachability:
    """Rate-1 convertibility to the ``d x d`` maximally entangled state (square case)."""
    if not state.is_square:
        raise NonSquare(f"need dA == dB, got {state.dims[:2]}")
    S = vec_support(state)
    dec = has_shrunk_subspace(S, trials, seed, F, _witness_list(S, witnesses), size_guard, jobs)
    return Reachability(not dec.has_shrunk, dec)


@dataclass
class RateBounds:
    target: int
    lower: float
    upper: float
    exact: bool
    provenance: str  # "shrunk-free" | "compression-embedding" | "trivial"
    upper_is_rate: bool
    per_copy: list = field(default_factory=list)
    decision: ShrunkDecision | None = None
    embedding: dict | None = None

    def to_json(self) -> dict:
        return {
            "target_schmidt_rank": self.target,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "upper_provenance": self.provenance,
            "upper_is_rate": self.upper_is_rate,
            "per_copy": self.per_copy,
            "shrunk_decision": None if self.decision is None else self.decision.to_json(),
            "embedding": self.embedding,
        }


def default_rate_copies(state: TripartiteState, size_guard: int = DEFAULT_SIZE_GUARD) -> int:
    dA, dB, _ = state.dims
    budget = min(size_guard, RATE_ENTRY_BUDGET)
    if dA * dB == 1:
        return 1
    n = 1
    while (dA * dB) ** (n + 1) <= budget:
        n += 1
    return n


def rate_bounds(
    state: TripartiteState,
    target: int,
    max_copies: int | None = None,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    F: PrimeField | None = None,
    witnesses: Iterable[Subspace] = (),
    size_guard: int = DEFAULT_SIZE_GUARD,
    jobs: int = 1,
) -> RateBounds:
    """Bounds on the SLOCC transformation rate to a target of Schmidt rank ``target``.

    Lower bound: best ``log_target(msrk_n) / n`` over computed tensor powers.
    Upper bound: ``log_target`` of an upper bound on the asymptotic maximal
    Schmidt rank.  That bound is ``d`` when no shrunk subspace exists (then the
    rate is exact), the compression-space value for a verified shrunk witness,
    or else the image and kernel bound on ``min(dA, dB)``.
    """
    if target < 2:
        raise InvalidParams("target Schmidt rank must be >= 2")
    if max_copies is None:
        max_copies = default_rate_copies(state, size_guard)
    log_r = math.log2(target)
    S = vec_support(state)
    per_copy = []
    lower = 0.0
    for n in range(1, max_copies + 1):
        try:
            rep = msrk(state, n, trials, seed, F, size_guard, jobs)
        except SizeGuardExceeded:
            break
        val = math.log2(rep.rank) / (n * log_r) if rep.rank > 0 else float("-inf")
        per_copy.append({"copies": n, "msrk": rep.rank, "rate": val})
        lower = max(lower, val)
    dA, dB, _ = state.dims
    d = min(dA, dB)
    upper_rank = float(min(d, image(S).dim, dB - kernel(S).dim))
    provenance, exact, tight = "trivial", False, False
    decision = embedding = None
    if state.is_square:
        found = _witness_list(S, witnesses)
        decision = has_shrunk_subspace(S, trials, seed, F, found, size_guard, jobs)
        if not decision.has_shrunk:
            provenance, exact, tight, upper_rank = "shrunk-free", True, True, float(d)
        else:
            best = None
            for w in found:
                val = mrk_inf_upper(w.p, w.q, d)
                if best is None or val < best[0]:
                    best = (val, w)
            if best is not None and best[0] <= upper_rank:
                upper_rank, w = best
                provenance = "compression-embedding"
                a_dim = w.p * d + (d - w.p) * w.q
                tight = S.dim == a_dim and w.p >= 1 and w.q >= 1
                embedding = {"p": w.p, "q": w.q, "d": d, "source": w.source, "mrk_inf": upper_rank}
    upper = math.log2(upper_rank) / log_r if upper_rank > 0 else float("-inf")
    if exact:
        lower = upper
    # lower <= upper mathematically; only rounding can break it
    lower = min(lower, upper)
    return RateBounds(target, lower, upper, exact, provenance, tight, per_copy, decision, embedding)


# -- constructions -------------------------------------------------------------


def build_skew_state(d: int) -> TripartiteState:
    """``sum_{i<j} (|i>|j> - |j>|i>) |ij>`` with one C-basis vector per pair."""
    _require_odd(d)
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    amps = {}
    for c, (i, j) in enumerate(pairs):
        amps[(i, j, c)] = GaussianRational(1)
        amps[(j, i, c)] = GaussianRational(-1)
    return TripartiteState((d, d, len(pairs)), amps, Fraction(2, d * (d - 1)))


def skew_tensor_square_witness(d: int) -> Matrix:
    """``P = sum_{i<j} E_ij (x) E_ij`` with ``E_ij = |i><j| - |j><i|``; rank ``d^2`` for odd ``d``."""
    _require_odd(d)
    acc: dict[int, GaussianRational] = {}
    for i in range(d):
        for j in range(i + 1, d):
            E = {i * d + j: GaussianRational(1), j * d + i: GaussianRational(-1)}
            for k, v in kron_sparse(E, (d, d), E, (d, d)).items():
                acc[k] = acc.get(k, GaussianRational(0)) + v
    return Matrix.from_sparse(d * d, d * d, {k: v for k, v in acc.items() if v})


def _require_odd(d: int) -> None:
    if d % 2 == 0:
        raise EvenD(f"d must be odd, got {d}")
    if d < 3:
        raise InvalidParams(f"d must be at least 3, got {d}")


def ghz_state(d: int = 2) -> TripartiteState:
    return TripartiteState((d, d, d), {(i, i, i): 1 for i in range(d)}, Fraction(1, d))


def w_state() -> TripartiteState:
    return TripartiteState((2, 2, 2), {(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1}, Fraction(1, 3))


def product_state(d: int = 2) -> TripartiteState:
    return TripartiteState((d, d, 1), {(0, 0, 0): 1})


def full_space_state(d: int = 2) -> TripartiteState:
    """State whose matrix space is all of ``M(d)``."""
    return TripartiteState(
        (d, d, d * d), {(a, b, a * d + b): 1 for a in range(d) for b in range(d)}, Fraction(1, d * d)
    )


def compression_state(p: int, q: int, d: int) -> TripartiteState:
    """State whose matrix space is ``A(p, q, d)``: one C-basis vector per elementary generator."""
    CompressionParams.square(p, q, d)
    cells = [(a, b) for a in range(d) for b in range(d) if a < p or b < q]
    if not cells:
        raise InvalidParams("A(0, 0, d) is the zero space and has no state")
    return TripartiteState(
        (d, d, len(cells)), {(a, b, c): 1 for c, (a, b) in enumerate(cells)}, Fraction(1, len(cells))
    )
