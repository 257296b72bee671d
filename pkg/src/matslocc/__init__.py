"""Exact and randomized maximal-rank computations for tripartite-to-bipartite SLOCC."""

from matslocc.arith import DEFAULT_PRIME, GaussianRational, PrimeField, default_field
from matslocc.matspace import Matrix, MatrixSpace, Subspace
from matslocc.rank import MaxRankReport, max_rank_randomized
from matslocc.shrunk import has_shrunk_subspace, ncrk_bounds
from matslocc.slocc import TripartiteState, can_convert, rate_bounds

__all__ = [
    "DEFAULT_PRIME",
    "GaussianRational",
    "Matrix",
    "MatrixSpace",
    "MaxRankReport",
    "PrimeField",
    "Subspace",
    "TripartiteState",
    "can_convert",
    "default_field",
    "has_shrunk_subspace",
    "max_rank_randomized",
    "ncrk_bounds",
    "rate_bounds",
]

__version__ = "0.1.0"
