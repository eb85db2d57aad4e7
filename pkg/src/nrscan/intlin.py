"""Exact integer linear algebra over Z.

Row-style Hermite normal form, Smith invariant factors, integer left kernels
and lattice saturation.  Everything uses Python ints, so there is no overflow;
the algorithms are the plain Euclidean-pivot ones, intended for desk-scale
matrices (roughly 10 x 30 and smaller).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence, Union

MatrixLike = Union["IntMatrix", Sequence[Sequence[int]]]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored as a tuple of row tuples.

    ``ncols`` is kept explicitly so that matrices with zero rows still know
    their width.
    """

    rows: tuple[tuple[int, ...], ...]
    ncols: int

    def __post_init__(self):
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError(f"row of length {len(r)} in a matrix with {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(rows, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def transpose(self) -> IntMatrix:
        return IntMatrix(tuple(zip(*self.rows)) if self.rows else tuple(() for _ in range(self.ncols)), self.nrows)

    def __len__(self):
        return self.nrows


def as_matrix(M: MatrixLike, ncols: int | None = None) -> IntMatrix:
    if isinstance(M, IntMatrix):
        return M
    return IntMatrix.from_rows(M, ncols)


@dataclass(frozen=True)
class IntLattice:
    """Sublattice of Z^k given by a basis in Hermite normal form.

    The HNF basis is canonical, so two lattices are equal exactly when the
    dataclasses compare equal.  An empty basis is the zero lattice.
    """

    ambient_rank: int
    basis: IntMatrix

    @classmethod
    def from_generators(cls, gens: MatrixLike, ambient_rank: int | None = None) -> IntLattice:
        M = as_matrix(gens, ambient_rank)
        return cls(M.ncols, hnf(M))

    @classmethod
    def zero(cls, k: int) -> IntLattice:
        return cls(k, IntMatrix((), k))

    @classmethod
    def full(cls, k: int) -> IntLattice:
        return cls(k, identity(k))

    @property
    def rank(self) -> int:
        return self.basis.nrows

    def vectors(self) -> list[tuple[int, ...]]:
        return list(self.basis.rows)

    def contains(self, v: Sequence[int]) -> bool:
        """Membership test by reducing ``v`` against the HNF basis."""
        v = list(v)
        if len(v) != self.ambient_rank:
            raise ValueError("vector length does not match the ambient rank")
        for row in self.basis.rows:
            j = _pivot_col(row)
            q, r = divmod(v[j], row[j])
            if r:
                return False
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return not any(v)


def identity(k: int) -> IntMatrix:
    return IntMatrix(tuple(tuple(int(i == j) for j in range(k)) for i in range(k)), k)


def _pivot_col(row: Sequence[int]) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    return -1


def _echelon(rows: list[list[int]], pivot_cols: int) -> int:
    """Bring ``rows`` to Hermite form in place on the first ``pivot_cols``
    columns using unimodular row operations.  Returns the rank there.

    Pivots are positive and the entries above each pivot are reduced into
    ``[0, pivot)``.  Columns past ``pivot_cols`` are carried along untouched
    by any pivoting decision (this is how left kernels are read off).
    """
    n = len(rows)
    r = 0
    for c in range(pivot_cols):
        if r == n:
            break
        while True:
            # smallest nonzero |entry| below r in column c becomes the pivot
            best = None
            for i in range(r, n):
                x = rows[i][c]
                if x and (best is None or abs(x) < abs(rows[best][c])):
                    best = i
            if best is None:
                break
            rows[r], rows[best] = rows[best], rows[r]
            piv = rows[r]
            done = True
            for i in range(r + 1, n):
                x = rows[i][c]
                if x:
                    q = x // piv[c]
                    rows[i] = [a - q * b for a, b in zip(rows[i], piv)]
                    if rows[i][c]:
                        done = False
            if done:
                break
        if not any(rows[i][c] for i in range(r, n)):
            continue
        if rows[r][c] < 0:
            rows[r] = [-a for a in rows[r]]
        piv = rows[r]
        for i in range(r):
            q = rows[i][c] // piv[c]
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], piv)]
        r += 1
    return r


def hnf(M: MatrixLike) -> IntMatrix:
    """Row-style Hermite normal form of the row lattice of ``M``, zero rows dropped.

    >>> hnf([[2, -4], [1, -2]]).rows
    ((1, -2),)
    """
    M = as_matrix(M)
    rows = [list(r) for r in M.rows]
    rank = _echelon(rows, M.ncols)
    return IntMatrix(tuple(tuple(r) for r in rows[:rank]), M.ncols)


def snf_divisors(M: MatrixLike) -> list[int]:
    """Invariant factors d_1 | d_2 | ... | d_r of ``M``, r = rank.

    >>> snf_divisors([[2, 0], [0, 3]])
    [1, 6]
    """
    M = as_matrix(M)
    A = [list(r) for r in M.rows]
    m, n = M.nrows, M.ncols
    divisors = []
    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i0, j0 = best
        A[t], A[i0] = A[i0], A[t]
        for row in A:
            row[t], row[j0] = row[j0], row[t]
        clean = True
        piv = A[t][t]
        for i in range(t + 1, m):
            q = A[i][t] // piv
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[t])]
            if A[i][t]:
                clean = False
        for j in range(t + 1, n):
            q = A[t][j] // piv
            if q:
                for row in A:
                    row[j] -= q * row[t]
            if A[t][j]:
                clean = False
        if not clean:
            continue
        # pivot must divide the rest of the block; otherwise fold a row in
        bad = next(
            (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv),
            None,
        )
        if bad is not None:
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
            continue
        divisors.append(abs(piv))
        t += 1
    return divisors


def left_kernel(M: MatrixLike) -> IntLattice:
    """Lattice of integer row vectors v with v.M = 0.

    Read off from the transformation rows of the Hermite form of [M | I];
    the result is saturated because it is the kernel of a Z-linear map.
    """
    M = as_matrix(M)
    k = M.nrows
    aug = [list(M.rows[i]) + [int(i == j) for j in range(k)] for i in range(k)]
    rank = _echelon(aug, M.ncols)
    kernel = [row[M.ncols:] for row in aug[rank:]]
    return IntLattice(k, hnf(IntMatrix.from_rows(kernel, k)))


def _right_kernel_basis(B: IntMatrix) -> IntMatrix:
    # w with B.w = 0, as rows
    return left_kernel(B.transpose()).basis


def saturate(L: IntLattice) -> IntLattice:
    """(L tensor Q) intersected with Z^k."""
    k = L.ambient_rank
    if L.rank == 0:
        return L
    N = _right_kernel_basis(L.basis)
    if N.nrows == 0:
        return IntLattice.full(k)
    return left_kernel(N.transpose())


def torsion_order_of_quotient(L: IntLattice) -> int:
    """Order of the torsion subgroup of Z^k / L, i.e. the index [L_sat : L]."""
    if L.rank == 0:
        return 1
    return prod(snf_divisors(L.basis))


def determinant(M: MatrixLike) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = as_matrix(M)
    n = M.nrows
    if n != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    A = [list(r) for r in M.rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1
