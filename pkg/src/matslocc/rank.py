"""Rank engines: exact rank, randomized maximal rank, and rank boosting.

The randomized estimate substitutes uniform ``F_p`` values for the coordinates of
a generic element and keeps the best rank over independent trials.  Any rank
found mod ``p`` is a certified lower bound on the maximal rank over ``C``:
lifting the coefficients to integers gives an exact element whose rank is at
least its rank mod ``p``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from matslocc._linalg import Echelon, echelon_of, rank_mod_array
from matslocc.arith import (
    GaussianRational,
    PrimeField,
    default_field,
    next_field_below,
    random_field_vector,
    trial_stream,
)
from matslocc.errors import DenominatorDivisibleByP, NotInSpace
from matslocc.matspace import Matrix, MatrixSpace, evaluate, image, kernel

log = logging.getLogger(__name__)

DEFAULT_TRIALS = 16
GRID_POINT_LIMIT = 4096


@dataclass(frozen=True)
class MaxRankReport:
    rank: int
    prime: int
    coeffs: tuple[int, ...]
    trials: int
    failure_bound: Fraction
    certified_rank: int | None = None

    def witness_json(self) -> dict:
        return {"prime": self.prime, "coeffs": list(self.coeffs), "rank": self.rank}

    def to_json(self) -> dict:
        out = {
            "rank": self.rank,
            "trials": self.trials,
            "failure_bound": str(self.failure_bound),
            "witness": self.witness_json(),
        }
        if self.certified_rank is not None:
            out["certified_rank"] = self.certified_rank
        return out


def rank_exact(A: Matrix) -> int:
    return A.rank()


def rank_mod(A, F: PrimeField) -> int:
    """Rank over ``F_p`` of an int array, or of the reduction of an exact matrix."""
    if isinstance(A, Matrix):
        A = A.to_mod(F)
    return rank_mod_array(np.asarray(A), F.modulus)


def _trial(S: MatrixSpace, F: PrimeField, seed: int, t: int, stream: tuple) -> tuple[int, np.ndarray]:
    coeffs = random_field_vector(F, trial_stream(seed, t, stream), S.dim)
    return rank_mod_array(S.evaluate_mod(coeffs, F), F.modulus), coeffs


def max_rank_randomized(
    S: MatrixSpace,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    F: PrimeField | None = None,
    jobs: int = 1,
    stream: tuple[int, ...] = (),
) -> MaxRankReport:
    """Best rank over ``trials`` random elements of ``S`` reduced into ``F``.

    Stops early once ``min(rows, cols)`` is reached, in which case the estimate
    is exact.  The reported failure bound is ``(min(rows, cols)/p)**t`` and
    assumes the maximal minor does not vanish identically mod ``p``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    F = F or default_field()
    cap = min(S.rows, S.cols)
    if S.dim == 0:
        return MaxRankReport(0, F.modulus, (), 1, Fraction(0))
    # reduce once up front so a bad prime fails before any work is scheduled
    S.mod_basis(F)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: _trial(S, F, seed, t, stream), range(trials)))
        used = next((t + 1 for t, (r, _) in enumerate(results) if r == cap), trials)
        results = results[:used]
    else:
        results = []
        for t in range(trials):
            results.append(_trial(S, F, seed, t, stream))
            if results[-1][0] == cap:
                break
        used = len(results)
    best_t = max(range(used), key=lambda t: (results[t][0], -t))
    best, coeffs = results[best_t]
    bound = Fraction(0) if best == cap else Fraction(cap, F.modulus) ** used
    return MaxRankReport(best, F.modulus, tuple(int(c) for c in coeffs), used, bound)


def estimate_max_rank(
    S: MatrixSpace,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    F: PrimeField | None = None,
    jobs: int = 1,
    stream: tuple[int, ...] = (),
) -> MaxRankReport:
    """:func:`max_rank_randomized`, moving to the next smaller prime when reduction fails."""
    F = F or default_field()
    while True:
        try:
            return max_rank_randomized(S, trials, seed, F, jobs, stream)
        except DenominatorDivisibleByP:
            log.info("prime %d divides a denominator; retrying", F.modulus)
            F = next_field_below(F)


def lift_witness(S: MatrixSpace, report: MaxRankReport) -> Matrix:
    """The exact element of ``S`` with the report's coefficients read as integers."""
    return evaluate(S, [GaussianRational(c) for c in report.coeffs])


def certify(S: MatrixSpace, report: MaxRankReport) -> MaxRankReport:
    """Attach the exact rank of the lifted witness (never below ``report.rank``)."""
    if S.dim == 0:
        exact = 0
    else:
        exact = rank_exact(lift_witness(S, report))
    if exact < report.rank:
        raise AssertionError("lifted witness lost rank; reduction map is broken")
    return MaxRankReport(
        report.rank, report.prime, report.coeffs, report.trials, report.failure_bound, exact
    )


def _kernel_and_image(X: Matrix) -> tuple[list[dict], Echelon]:
    rows = echelon_of((X.row(i) for i in range(X.rows)), X.cols)
    cols = echelon_of((X.column(j) for j in range(X.cols)), X.rows)
    return rows.nullspace(), cols


def rank_boost(S: MatrixSpace, X: Matrix) -> Matrix | None:
    """Return ``X + r*Y`` of larger rank for a basis element ``Y`` moving ``Ker X`` out of ``Im X``.

    At most ``rank(X) + 1`` values of ``r`` fail for such a ``Y``, so trying
    ``r = 1, ..., rank(X) + 2`` always succeeds.  ``None`` means no basis element
    qualifies, i.e. ``X`` is a fixpoint of the boosting step.
    """
    if not S.contains(X):
        raise NotInSpace("X is not an element of the matrix space")
    ker, im = _kernel_and_image(X)
    if not ker:
        return None
    base = rank_exact(X)
    for Y in S.basis_matrices():
        if all(im.contains(Y.apply(k)) for k in ker):
            continue
        for r in range(1, base + 3):
            Z = X + Y.scale(r)
            if rank_exact(Z) > base:
                return Z
    return None


def max_rank_greedy(S: MatrixSpace, start: Matrix | None = None) -> Matrix:
    """Iterate :func:`rank_boost` from ``start`` until no boost applies."""
    if start is None:
        mats = S.basis_matrices()
        if not mats:
            return Matrix.zeros(S.rows, S.cols)
        start = max(mats, key=rank_exact)
    elif not S.contains(start):
        raise NotInSpace("start is not an element of the matrix space")
    X = start
    while True:
        Z = rank_boost(S, X)
        if Z is None:
            return X
        X = Z


def structural_upper_bound(S: MatrixSpace) -> int:
    """``min(rows, cols, dim Im S, cols - dim Ker S)``."""
    return min(S.rows, S.cols, image(S).dim, S.cols - kernel(S).dim)


def grid_upper_bound_holds(S: MatrixSpace, r: int, limit: int = GRID_POINT_LIMIT) -> bool | None:
    """Exactly decide ``mrk(S) <= r`` by evaluating on ``{0..r+1}^dim``.

    Every ``(r+1)``-minor of the generic element has degree at most ``r+1`` in
    each coordinate, so it vanishes identically iff it vanishes on that grid.
    Returns ``None`` when the grid has more than ``limit`` points.
    """
    if (r + 2) ** S.dim > limit:
        return None
    for point in product(range(r + 2), repeat=S.dim):
        if rank_exact(evaluate(S, list(point))) > r:
            return False
    return True


@dataclass
class MrkBounds:
    lower: int
    upper: int
    sources: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact, "sources": self.sources}


def certified_bounds(
    S: MatrixSpace,
    report: MaxRankReport,
    extra_upper: dict[str, int] | None = None,
    grid_limit: int = GRID_POINT_LIMIT,
) -> MrkBounds:
    """Exact lower and upper bounds on ``mrk(S)``.

    Lower: exact rank of the lifted randomized witness (and of the greedy
    fixpoint when that is larger).  Upper: structural bounds, any supplied
    bounds, and the grid test when it is small enough.
    """
    rep = report if report.certified_rank is not None else certify(S, report)
    lower = rep.certified_rank
    sources = {"lower": "lifted-witness"}
    if lower < min(S.rows, S.cols) and S.dim:
        g = rank_exact(max_rank_greedy(S))
        if g > lower:
            lower, sources["lower"] = g, "greedy"
    uppers = {"structural": structural_upper_bound(S)}
    uppers.update(extra_upper or {})
    name, upper = min(uppers.items(), key=lambda kv: (kv[1], kv[0]))
    sources["upper"] = name
    if lower < upper and grid_upper_bound_holds(S, lower, grid_limit):
        upper, sources["upper"] = lower, "grid"
    return MrkBounds(lower, upper, sources)
