"""Matrices and matrix spaces over Gaussian rationals.

A :class:`MatrixSpace` keeps its generators and a reduced row echelon basis of
the vectorized generators (row-major flattening ``i*cols + j``).  Basis elements
are held sparsely because tensor powers of coordinate spaces are mostly zeros;
:meth:`MatrixSpace.basis_matrices` materializes dense :class:`Matrix` objects.
"""

from __future__ import annotations

from functools import reduce
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from matslocc._linalg import Echelon, SparseVec, bareiss_rank, echelon_of
from matslocc.arith import GaussianRational, PrimeField, reduce_mod
from matslocc.errors import (
    DimensionMismatch,
    LengthMismatch,
    SingularTransform,
    SizeGuardExceeded,
)

DEFAULT_SIZE_GUARD = 2**22

_Z = GaussianRational(0)


class Matrix:
    """Dense immutable ``rows x cols`` matrix of Gaussian rationals."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Sequence[Sequence]):
        rows = [tuple(GaussianRational.coerce(x) for x in row) for row in entries]
        if not rows or not rows[0]:
            raise DimensionMismatch("a matrix needs at least one row and one column")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("ragged matrix rows")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", n)
        object.__setattr__(self, "_e", tuple(rows))

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def zeros(cls, m: int, n: int) -> Matrix:
        return cls([[_Z] * n for _ in range(m)])

    @classmethod
    def identity(cls, d: int) -> Matrix:
        return cls([[int(i == j) for j in range(d)] for i in range(d)])

    @classmethod
    def unit(cls, m: int, n: int, i: int, j: int) -> Matrix:
        """The elementary matrix ``|i><j|``."""
        return cls.from_sparse(m, n, {i * n + j: GaussianRational(1)})

    @classmethod
    def from_sparse(cls, m: int, n: int, vec: SparseVec) -> Matrix:
        grid = [[_Z] * n for _ in range(m)]
        for k, x in vec.items():
            grid[k // n][k % n] = x
        return cls(grid)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def row_list(self) -> list[tuple[GaussianRational, ...]]:
        return list(self._e)

    def column(self, j: int) -> SparseVec:
        return {i: r[j] for i, r in enumerate(self._e) if r[j]}

    def row(self, i: int) -> SparseVec:
        return {j: x for j, x in enumerate(self._e[i]) if x}

    def to_sparse(self) -> SparseVec:
        n = self.cols
        return {i * n + j: x for i, r in enumerate(self._e) for j, x in enumerate(r) if x}

    def is_zero(self) -> bool:
        return not any(x for r in self._e for x in r)

    def transpose(self) -> Matrix:
        return Matrix(list(zip(*self._e)))

    def apply(self, v: SparseVec) -> SparseVec:
        """Matrix-vector product on a sparse column vector."""
        out: SparseVec = {}
        for i, r in enumerate(self._e):
            s = _Z
            for j, x in v.items():
                a = r[j]
                if a:
                    s = s + a * x
            if s:
                out[i] = s
        return out

    def __add__(self, other: Matrix) -> Matrix:
        _same_shape(self, other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __sub__(self, other: Matrix) -> Matrix:
        _same_shape(self, other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def scale(self, c) -> Matrix:
        c = GaussianRational.coerce(c)
        return Matrix([[c * a for a in r] for r in self._e])

    def __neg__(self):
        return self.scale(-1)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other._e))
        out = []
        for r in self._e:
            out.append([sum((a * b for a, b in zip(r, c) if a and b), _Z) for c in cols])
        return Matrix(out)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._e == other._e

    def __hash__(self):
        return hash(self._e)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"

    def rank(self) -> int:
        return bareiss_rank(self._e)

    def to_mod(self, F: PrimeField) -> np.ndarray:
        return np.array(
            [[reduce_mod(x, F) for x in r] for r in self._e], dtype=np.int64
        )

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self._e]


def _same_shape(a: Matrix, b: Matrix):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch {a.shape} vs {b.shape}")


def kronecker(A: Matrix, B: Matrix) -> Matrix:
    """Block matrix whose ``(i, j)`` block is ``A[i, j] * B``."""
    m2, n2 = B.shape
    out = []
    for ra in A.row_list():
        for i2 in range(m2):
            rb = B.row_list()[i2]
            out.append([a * b for a in ra for b in rb])
    return Matrix(out)


def kron_sparse(u: SparseVec, shape_u, v: SparseVec, shape_v) -> SparseVec:
    """Kronecker product of two vectorized matrices, in vectorized form."""
    m1, n1 = shape_u
    m2, n2 = shape_v
    N = n1 * n2
    out = {}
    for k1, a in u.items():
        i1, j1 = divmod(k1, n1)
        for k2, b in v.items():
            i2, j2 = divmod(k2, n2)
            out[(i1 * m2 + i2) * N + j1 * n2 + j2] = a * b
    return out


class Subspace:
    """Subspace of ``C^ambient`` held as a reduced echelon basis."""

    def __init__(self, ambient: int, vectors: Iterable[SparseVec] = ()):
        self.ambient = ambient
        self._ech = Echelon(ambient)
        for v in vectors:
            if any(k < 0 or k >= ambient for k in v):
                raise DimensionMismatch("vector coordinate outside the ambient space")
            self._ech.add(v)

    @classmethod
    def span_of(cls, ambient: int, vectors: Iterable[Sequence]) -> Subspace:
        """Build from dense coordinate lists."""
        sparse = []
        for v in vectors:
            if len(v) != ambient:
                raise DimensionMismatch("vector length does not match ambient dimension")
            sparse.append({k: GaussianRational.coerce(x) for k, x in enumerate(v) if GaussianRational.coerce(x)})
        return cls(ambient, sparse)

    @classmethod
    def coordinate(cls, ambient: int, indices: Iterable[int]) -> Subspace:
        return cls(ambient, [{k: GaussianRational(1)} for k in indices])

    @property
    def dim(self) -> int:
        return len(self._ech)

    @property
    def basis(self) -> list[SparseVec]:
        return self._ech.basis()

    def dense_basis(self) -> list[list[GaussianRational]]:
        return [[v.get(k, _Z) for k in range(self.ambient)] for v in self.basis]

    def contains(self, v: SparseVec) -> bool:
        return self._ech.contains(v)

    def __le__(self, other: Subspace) -> bool:
        return self.ambient == other.ambient and all(other.contains(v) for v in self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.dim == other.dim and self <= other

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"


class MatrixSpace:
    """Span of ``rows x cols`` matrices, with an eagerly computed echelon basis."""

    def __init__(self, rows: int, cols: int, generators: Iterable[SparseVec | Matrix]):
        if rows < 1 or cols < 1:
            raise DimensionMismatch("matrix spaces need positive dimensions")
        self.rows = rows
        self.cols = cols
        gens = []
        for g in generators:
            if isinstance(g, Matrix):
                if g.shape != (rows, cols):
                    raise DimensionMismatch(f"generator of shape {g.shape}, expected {(rows, cols)}")
                g = g.to_sparse()
            gens.append(dict(g))
        if not gens:
            raise DimensionMismatch("a matrix space needs at least one generator")
        self._generators = gens
        ech = echelon_of(gens, rows * cols)
        self._basis = ech.basis()
        self._ech = ech
        self._mod_cache: dict[int, tuple] = {}

    @classmethod
    def from_matrices(cls, mats: Sequence[Matrix]) -> MatrixSpace:
        if not mats:
            raise DimensionMismatch("a matrix space needs at least one generator")
        m, n = mats[0].shape
        return cls(m, n, mats)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def dim(self) -> int:
        return len(self._basis)

    @property
    def canonical_basis(self) -> list[SparseVec]:
        return list(self._basis)

    @property
    def generators(self) -> list[SparseVec]:
        return list(self._generators)

    def basis_matrices(self) -> list[Matrix]:
        return [Matrix.from_sparse(self.rows, self.cols, b) for b in self._basis]

    def contains(self, X: Matrix) -> bool:
        return X.shape == self.shape and self._ech.contains(X.to_sparse())

    def __eq__(self, other):
        if not isinstance(other, MatrixSpace):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.dim == other.dim
            and all(other._ech.contains(b) for b in self._basis)
        )

    def __repr__(self):
        return f"MatrixSpace({self.rows}x{self.cols}, dim={self.dim})"

    def support(self) -> set[tuple[int, int]]:
        """Positions that are nonzero in some element (the 0/* pattern)."""
        n = self.cols
        return {divmod(k, n) for b in self._basis for k in b}

    def mod_basis(self, F: PrimeField):
        """Flattened (positions, values, owner) arrays of the basis reduced into ``F``."""
        hit = self._mod_cache.get(F.modulus)
        if hit is None:
            pos, val, own = [], [], []
            for t, b in enumerate(self._basis):
                for k, x in b.items():
                    pos.append(k)
                    val.append(reduce_mod(x, F))
                    own.append(t)
            hit = (
                np.array(pos, dtype=np.int64),
                np.array(val, dtype=np.int64),
                np.array(own, dtype=np.int64),
            )
            self._mod_cache[F.modulus] = hit
        return hit

    def evaluate_mod(self, coeffs: np.ndarray, F: PrimeField) -> np.ndarray:
        """``sum_i coeffs[i] * B_i`` over ``F_p`` as an int64 ``rows x cols`` array."""
        if len(coeffs) != self.dim:
            raise LengthMismatch(f"{len(coeffs)} coefficients for a space of dimension {self.dim}")
        pos, val, own = self.mod_basis(F)
        p = F.modulus
        out = np.zeros(self.rows * self.cols, dtype=np.int64)
        if pos.size:
            np.add.at(out, pos, (val * np.asarray(coeffs, dtype=np.int64)[own]) % p)
        return (out % p).reshape(self.rows, self.cols)

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "basis": [m.to_strings() for m in self.basis_matrices()],
        }


def check_size(rows: int, cols: int, size_guard: int = DEFAULT_SIZE_GUARD) -> None:
    if rows * cols > size_guard:
        raise SizeGuardExceeded(
            f"{rows}x{cols} = {rows * cols} entries exceeds the size guard {size_guard}"
        )


def tensor(S1: MatrixSpace, S2: MatrixSpace, size_guard: int = DEFAULT_SIZE_GUARD) -> MatrixSpace:
    """Span of Kronecker products of the two canonical bases."""
    m, n = S1.rows * S2.rows, S1.cols * S2.cols
    check_size(m, n, size_guard)
    gens = [
        kron_sparse(a, S1.shape, b, S2.shape)
        for a, b in product(S1.canonical_basis, S2.canonical_basis)
    ]
    if not any(gens):
        gens = [{}]
    return MatrixSpace(m, n, gens)


def tensor_power(S: MatrixSpace, n: int, size_guard: int = DEFAULT_SIZE_GUARD) -> MatrixSpace:
    if n < 1:
        raise ValueError("tensor power needs n >= 1")
    check_size(S.rows**n, S.cols**n, size_guard)
    return reduce(lambda acc, _: tensor(acc, S, size_guard), range(n - 1), S)


def image(S: MatrixSpace) -> Subspace:
    """Column span of all basis elements."""
    n = S.cols
    cols: dict[tuple[int, int], SparseVec] = {}
    for t, b in enumerate(S.canonical_basis):
        for k, x in b.items():
            i, j = divmod(k, n)
            cols.setdefault((t, j), {})[i] = x
    return Subspace(S.rows, cols.values())


def kernel(S: MatrixSpace) -> Subspace:
    """Common kernel of all basis elements."""
    n = S.cols
    rows: dict[tuple[int, int], SparseVec] = {}
    for t, b in enumerate(S.canonical_basis):
        for k, x in b.items():
            i, j = divmod(k, n)
            rows.setdefault((t, i), {})[j] = x
    ech = echelon_of(rows.values(), n)
    return Subspace(n, ech.nullspace())


def apply_space(S: MatrixSpace, U: Subspace) -> Subspace:
    """``S(U)``: span of ``E u`` over basis elements ``E`` and basis vectors ``u``."""
    if U.ambient != S.cols:
        raise DimensionMismatch("subspace ambient does not match column count")
    mats = S.basis_matrices()
    return Subspace(S.rows, (E.apply(u) for E in mats for u in U.basis))


def equivalent_transform(S: MatrixSpace, P: Matrix, Q: Matrix) -> MatrixSpace:
    """The space ``{P E Q : E in S}``."""
    if P.shape != (S.rows, S.rows) or Q.shape != (S.cols, S.cols):
        raise DimensionMismatch("P must be rows x rows and Q cols x cols")
    if P.rank() < S.rows or Q.rank() < S.cols:
        raise SingularTransform("transform matrices must be invertible")
    return MatrixSpace.from_matrices([P @ E @ Q for E in S.basis_matrices()])


def evaluate(S: MatrixSpace, coeffs: Sequence) -> Matrix:
    """``sum_i coeffs[i] * B_i`` over the canonical basis, exactly."""
    if len(coeffs) != S.dim:
        raise LengthMismatch(f"{len(coeffs)} coefficients for a space of dimension {S.dim}")
    acc: SparseVec = {}
    for c, b in zip(coeffs, S.canonical_basis):
        c = GaussianRational.coerce(c)
        if not c:
            continue
        for k, x in b.items():
            y = acc.get(k, _Z) + c * x
            if y:
                acc[k] = y
            else:
                acc.pop(k, None)
    return Matrix.from_sparse(S.rows, S.cols, acc)


def permutation_matrix(perm: Sequence[int]) -> Matrix:
    """Matrix sending basis vector ``j`` to ``perm[j]``."""
    d = len(perm)
    return Matrix([[int(perm[j] == i) for j in range(d)] for i in range(d)])


# -- standard spaces ---------------------------------------------------------


def skew_space(d: int) -> MatrixSpace:
    """``span{|i><j| - |j><i| : i < j}``."""
    gens = [{i * d + j: GaussianRational(1), j * d + i: GaussianRational(-1)} for i in range(d) for j in range(i + 1, d)]
    return MatrixSpace(d, d, gens)


def identity_space(d: int) -> MatrixSpace:
    return MatrixSpace(d, d, [Matrix.identity(d)])


def full_space(m: int, n: int | None = None) -> MatrixSpace:
    n = m if n is None else n
    return MatrixSpace(m, n, [{k: GaussianRational(1)} for k in range(m * n)])


def diagonal_space(d: int) -> MatrixSpace:
    return MatrixSpace(d, d, [{i * d + i: GaussianRational(1)} for i in range(d)])
