"""Shrunk subspaces, blow-up decisions, and non-commutative rank bounds.

A subspace ``U`` of the column space is *shrunk* for ``S`` when
``dim S(U) < dim U``; its shrinkage ``c = dim U - dim S(U)`` caps every rank in
``S`` at ``d - c``.  Conversely, a full-rank element in some blow-up
``S (x) M(k)`` with ``k <= d - 1`` rules shrunk subspaces out.  The decision
here sweeps ``k`` with randomized ranks: a NO answer carries an exactly
re-verified full-rank witness, a YES answer carries a failure bound (or a
verified witness subspace, in which case it is certain).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from matslocc.arith import GaussianRational, PrimeField, default_field, parse_scalar
from matslocc.compression import CompressionParams, build_compression_space
from matslocc.errors import (
    AmbientMismatch,
    InconsistentEvidence,
    NonSquare,
    NotMaximalCompression,
    SizeGuardExceeded,
)
from matslocc.matspace import (
    DEFAULT_SIZE_GUARD,
    MatrixSpace,
    Subspace,
    apply_space,
    evaluate,
    full_space,
    image,
    kernel,
    tensor,
)
from matslocc.rank import DEFAULT_TRIALS, MaxRankReport, certify, estimate_max_rank


@dataclass(frozen=True)
class ShrunkWitness:
    U: Subspace
    SU: Subspace
    source: str = "supplied"

    @property
    def shrinkage(self) -> int:
        return self.U.dim - self.SU.dim

    @property
    def p(self) -> int:
        """Dimension of ``S(U)``."""
        return self.SU.dim

    @property
    def q(self) -> int:
        """Codimension of ``U``."""
        return self.U.ambient - self.U.dim

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "dim_U": self.U.dim,
            "dim_SU": self.SU.dim,
            "shrinkage": self.shrinkage,
            "U": [[str(x) for x in v] for v in self.U.dense_basis()],
            "SU": [[str(x) for x in v] for v in self.SU.dense_basis()],
        }


def verify_shrunk(S: MatrixSpace, U: Subspace, source: str = "supplied") -> ShrunkWitness | None:
    if U.ambient != S.cols:
        raise AmbientMismatch(f"U lives in C^{U.ambient}, expected C^{S.cols}")
    SU = apply_space(S, U)
    if SU.dim < U.dim:
        return ShrunkWitness(U, SU, source)
    return None


def canonical_shrunk_of_compression(p: int, q: int, d: int) -> ShrunkWitness:
    params = CompressionParams.square(p, q, d)
    if not params.is_maximal:
        raise NotMaximalCompression(f"A({p},{q},{d}) needs p + q < d")
    S = build_compression_space(params)
    w = verify_shrunk(S, Subspace.coordinate(d, range(q, d)), source="compression")
    assert w is not None
    return w


def coordinate_witness(S: MatrixSpace) -> ShrunkWitness | None:
    """Shrunk subspace spanned by standard basis vectors, found via Hall deficiency.

    Columns ``J`` whose entries only reach rows ``N(J)`` give
    ``dim S(span e_J) <= |N(J)|``; the set maximizing ``|J| - |N(J)|`` is read
    off a maximum matching of the support graph.
    """
    supp = S.support()
    if not supp:
        return None
    rows, cols = zip(*supp)
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (np.array(cols), np.array(rows))),
        shape=(S.cols, S.rows),
    )
    match = maximum_bipartite_matching(graph, perm_type="column")  # column j -> row or -1
    adj: dict[int, list[int]] = {}
    for i, j in supp:
        adj.setdefault(j, []).append(i)
    row_to_col = {int(r): j for j, r in enumerate(match) if r >= 0}
    frontier = [j for j in range(S.cols) if match[j] < 0]
    J = set(frontier)
    while frontier:
        nxt = []
        for j in frontier:
            for i in adj.get(j, ()):
                j2 = row_to_col.get(i)
                if j2 is not None and j2 not in J:
                    J.add(j2)
                    nxt.append(j2)
        frontier = nxt
    if not J:
        return None
    return verify_shrunk(S, Subspace.coordinate(S.cols, sorted(J)), source="coordinate")


def canonical_witnesses(S: MatrixSpace) -> list[ShrunkWitness]:
    """Witnesses found without search: image deficiency, common kernel, coordinate Hall set."""
    out = []
    im = image(S)
    if im.dim < S.cols:
        w = verify_shrunk(S, Subspace.coordinate(S.cols, range(S.cols)), source="image")
        if w:
            out.append(w)
    ker = kernel(S)
    if ker.dim:
        out.append(ShrunkWitness(ker, Subspace(S.rows), source="kernel"))
    w = coordinate_witness(S)
    if w:
        out.append(w)
    return sorted(out, key=lambda w: (-w.shrinkage, w.source))


def blowup(S: MatrixSpace, k: int, size_guard: int = DEFAULT_SIZE_GUARD) -> MatrixSpace:
    """``S (x) M(k)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return S
    return tensor(S, full_space(k), size_guard)


def _require_square(S: MatrixSpace) -> int:
    if S.rows != S.cols:
        raise NonSquare(f"expected a square matrix space, got {S.rows}x{S.cols}")
    return S.rows


def _blowup_range(d: int) -> range:
    return range(1, max(d - 1, 1) + 1)


@dataclass
class ShrunkDecision:
    decision: str  # "no-shrunk" | "shrunk"
    certificate: dict | None
    failure_bound: Fraction
    k_tested: int = 0
    witness: ShrunkWitness | None = None
    blowup_ranks: dict[int, int] = field(default_factory=dict)

    @property
    def has_shrunk(self) -> bool:
        return self.decision == "shrunk"

    def to_json(self) -> dict:
        return {
            "decision": self.decision,
            "certificate": self.certificate,
            "failure_bound": str(self.failure_bound),
        }


def _blowup_certificate(k: int, rep: MaxRankReport) -> dict:
    return {
        "type": "full-rank-blowup",
        "k": k,
        "prime": rep.prime,
        "coeffs": list(rep.coeffs),
        "rank": rep.rank,
        "exact_rank": rep.certified_rank,
        "exact_verified": rep.certified_rank == rep.rank,
    }


def has_shrunk_subspace(
    S: MatrixSpace,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    F: PrimeField | None = None,
    witnesses: Iterable[Subspace | ShrunkWitness] = (),
    size_guard: int = DEFAULT_SIZE_GUARD,
    jobs: int = 1,
) -> ShrunkDecision:
    """Decide whether the square space ``S`` has a shrunk subspace."""
    d = _require_square(S)
    for w in witnesses:
        U = w.U if isinstance(w, ShrunkWitness) else w
        v = verify_shrunk(S, U, getattr(w, "source", "supplied"))
        if v is not None:
            cert = {"type": "shrunk-witness", **v.to_json()}
            return ShrunkDecision("shrunk", cert, Fraction(0), 0, v)
    F = F or default_field()
    bound = Fraction(0)
    ranks: dict[int, int] = {}
    for k in _blowup_range(d):
        try:
            B = blowup(S, k, size_guard)
        except SizeGuardExceeded as exc:
            raise SizeGuardExceeded(str(exc), largest_tested=k - 1) from None
        rep = estimate_max_rank(B, trials, seed, F, jobs, stream=(k,))
        ranks[k] = rep.rank
        if rep.rank == k * d:
            rep = certify(B, rep)
            return ShrunkDecision("no-shrunk", _blowup_certificate(k, rep), Fraction(0), k, None, ranks)
        bound += rep.failure_bound
    return ShrunkDecision("shrunk", None, bound, max(ranks), None, ranks)


@dataclass
class NcrkBounds:
    lower: int
    upper: int
    evidence: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "evidence": self.evidence}


def ncrk_bounds(
    S: MatrixSpace,
    witnesses: Iterable[Subspace | ShrunkWitness] = (),
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    F: PrimeField | None = None,
    size_guard: int = DEFAULT_SIZE_GUARD,
    jobs: int = 1,
) -> NcrkBounds:
    """Bounds on the non-commutative rank of a square space.

    ``lower = max_k ceil(r_k / k)`` over randomized blow-up ranks ``r_k``;
    ``upper = d - max shrinkage`` over the verified witnesses.
    """
    d = _require_square(S)
    F = F or default_field()
    evidence = []
    c_max = 0
    for w in witnesses:
        U = w.U if isinstance(w, ShrunkWitness) else w
        v = verify_shrunk(S, U, getattr(w, "source", "supplied"))
        if v is not None:
            c_max = max(c_max, v.shrinkage)
            evidence.append({"type": "shrunk-witness", "source": v.source, "shrinkage": v.shrinkage})
    lower = 0
    for k in _blowup_range(d):
        try:
            B = blowup(S, k, size_guard)
        except SizeGuardExceeded:
            break
        rep = estimate_max_rank(B, trials, seed, F, jobs, stream=(k,))
        lower = max(lower, ceil(rep.rank / k))
        evidence.append({"type": "blowup-rank", "k": k, "rank": rep.rank})
        if rep.rank == k * d:
            break
    upper = d - c_max
    if lower > upper:
        raise InconsistentEvidence(
            f"blow-up rank bound {lower} exceeds witness bound {upper}"
        )
    return NcrkBounds(lower, upper, evidence)


def check_certificate(S: MatrixSpace, cert: dict, size_guard: int = DEFAULT_SIZE_GUARD) -> bool:
    """Re-verify a serialized decision certificate from its JSON fields alone."""
    d = _require_square(S)
    if cert.get("type") == "full-rank-blowup":
        k = int(cert["k"])
        B = blowup(S, k, size_guard)
        X = evaluate(B, [GaussianRational(int(c)) for c in cert["coeffs"]])
        return X.rank() == k * d
    if cert.get("type") == "shrunk-witness":
        U = Subspace.span_of(S.cols, [[parse_scalar(x) for x in v] for v in cert["U"]])
        w = verify_shrunk(S, U)
        return w is not None and w.shrinkage == cert["shrinkage"]
    return False
