"""Exact elimination kernels shared by the matrix-space and rank modules.

Vectors are sparse dicts ``{coordinate: GaussianRational}`` with no stored zeros.
"""

from __future__ import annotations

from math import lcm

import numpy as np

from matslocc.arith import GaussianRational

SparseVec = dict[int, GaussianRational]


class Echelon:
    """Incrementally maintained reduced row echelon basis of a span.

    Each stored row has a leading 1 at its pivot and zeros at every other pivot.
    """

    def __init__(self, ambient: int):
        self.ambient = ambient
        self.rows: dict[int, SparseVec] = {}
        # column -> pivots of rows with a nonzero entry in that column
        self._cols: dict[int, set[int]] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: SparseVec) -> SparseVec:
        """Remainder of ``v`` after subtracting its component along every pivot."""
        out = dict(v)
        for c in [c for c in out if c in self.rows]:
            coeff = out.get(c)
            if coeff:
                _axpy(out, coeff, self.rows[c])
        return out

    def add(self, v: SparseVec) -> bool:
        """Insert ``v``; returns False when it was already in the span."""
        w = self.reduce(v)
        if not w:
            return False
        pivot = min(w)
        lead = w[pivot]
        if lead != 1:
            inv = lead.inverse()
            w = {k: x * inv for k, x in w.items()}
        for r in list(self._cols.get(pivot, ())):
            row = self.rows[r]
            self._axpy_tracked(r, row, row[pivot], w)
        self.rows[pivot] = w
        for k in w:
            self._cols.setdefault(k, set()).add(pivot)
        return True

    def _axpy_tracked(self, r: int, row: SparseVec, coeff: GaussianRational, src: SparseVec):
        for k, x in src.items():
            y = row.get(k)
            y = -(coeff * x) if y is None else y - coeff * x
            if y:
                if k not in row:
                    self._cols.setdefault(k, set()).add(r)
                row[k] = y
            elif k in row:
                del row[k]
                self._cols[k].discard(r)

    def contains(self, v: SparseVec) -> bool:
        return not self.reduce(v)

    def basis(self) -> list[SparseVec]:
        return [self.rows[p] for p in sorted(self.rows)]

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def nullspace(self) -> list[SparseVec]:
        """Basis of ``{x : row . x = 0 for every row}`` in ``ambient`` coordinates."""
        piv = set(self.rows)
        out = []
        for f in range(self.ambient):
            if f in piv:
                continue
            x = {f: GaussianRational(1)}
            for p in self._cols.get(f, ()):
                x[p] = -self.rows[p][f]
            out.append(x)
        return out


def _axpy(target: SparseVec, coeff: GaussianRational, src: SparseVec) -> None:
    for k, x in src.items():
        y = target.get(k)
        y = -(coeff * x) if y is None else y - coeff * x
        if y:
            target[k] = y
        elif k in target:
            del target[k]


def echelon_of(vectors, ambient: int) -> Echelon:
    e = Echelon(ambient)
    for v in vectors:
        e.add(v)
    return e


def _clear_row(row) -> tuple[list[int], list[int]]:
    """Scale a row of Gaussian rationals to Gaussian integers (real, imaginary lists)."""
    den = 1
    for x in row:
        den = lcm(den, x.re.denominator, x.im.denominator)
    return (
        [int(x.re * den) for x in row],
        [int(x.im * den) for x in row],
    )


def bareiss_rank(rows) -> int:
    """Rank over Q(i) by fraction-free elimination on Gaussian integers."""
    cleared = [_clear_row(r) for r in rows]
    if not cleared:
        return 0
    if all(not any(im) for _, im in cleared):
        return _bareiss_rank_int([re for re, _ in cleared])
    return _bareiss_rank_gauss([list(zip(re, im)) for re, im in cleared])


def _bareiss_rank_int(M: list[list[int]]) -> int:
    m = len(M)
    n = len(M[0]) if m else 0
    r, prev = 0, 1
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        top = M[r]
        a = top[c]
        for i in range(r + 1, m):
            row = M[i]
            b = row[c]
            if b:
                for j in range(c + 1, n):
                    row[j] = (a * row[j] - b * top[j]) // prev
            else:
                for j in range(c + 1, n):
                    row[j] = (a * row[j]) // prev
            row[c] = 0
        prev = a
        r += 1
        if r == m:
            break
    return r


def _gmul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gdiv_exact(x, y):
    nrm = y[0] * y[0] + y[1] * y[1]
    num = _gmul(x, (y[0], -y[1]))
    return (num[0] // nrm, num[1] // nrm)


def _bareiss_rank_gauss(M) -> int:
    m = len(M)
    n = len(M[0]) if m else 0
    r, prev = 0, (1, 0)
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != (0, 0)), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        top = M[r]
        a = top[c]
        for i in range(r + 1, m):
            row = M[i]
            b = row[c]
            for j in range(c + 1, n):
                t = _gmul(a, row[j])
                s = _gmul(b, top[j])
                row[j] = _gdiv_exact((t[0] - s[0], t[1] - s[1]), prev)
            row[c] = (0, 0)
        prev = a
        r += 1
        if r == m:
            break
    return r


def rank_mod_array(A: np.ndarray, p: int) -> int:
    """Rank over ``F_p`` of an int64 array with entries in ``[0, p)``, ``p < 2**31``."""
    A = np.array(A, dtype=np.int64, copy=True) % p
    m, n = A.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r, c:] = (A[r, c:] * inv) % p
        below = r + 1 + np.flatnonzero(A[r + 1 :, c])
        if below.size:
            f = A[below, c : c + 1]
            A[below, c:] = (A[below, c:] - f * A[r, c:]) % p
        r += 1
    return r
