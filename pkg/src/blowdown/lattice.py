"""Exact integer linear algebra for Lorentzian lattices.

Vectors are plain tuples of Python ints.  For diagonal lattices coordinate 0
is the h-coefficient and coordinates 1..n are the e_1..e_n coefficients, so
``(3, -1, -1)`` is the class 3h - e_1 - e_2.

Nothing in here uses floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple  # tuple[int, ...]
Matrix = tuple  # tuple[tuple[int, ...], ...]


class LatticeError(ValueError):
    """Malformed input to a lattice operation (shape, symmetry, ...)."""


class DegenerateError(LatticeError):
    """An operation needing independent vectors or a nondegenerate form got neither."""


@dataclass(frozen=True)
class Lattice:
    gram: Matrix
    label: str = field(default="", compare=False)

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        n = len(g)
        for i, row in enumerate(g):
            if len(row) != n:
                raise LatticeError(f"gram row {i} has length {len(row)}, expected {n}")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise LatticeError(f"gram is not symmetric at ({i}, {j})")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def zero(self) -> Vector:
        return (0,) * self.rank

    def basis_vector(self, i: int) -> Vector:
        return tuple(1 if k == i else 0 for k in range(self.rank))


@dataclass(frozen=True)
class Sublattice:
    """A sublattice given by a basis of ambient coordinate vectors."""

    ambient: Lattice
    basis: tuple = field(default=())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def gram(self) -> Matrix:
        return gram_of(self.basis, self.ambient)

    def as_lattice(self, label: str = "") -> Lattice:
        return Lattice(self.gram(), label)

    def coordinates(self, v: Sequence[int]) -> Vector | None:
        """Integer coordinates of ``v`` in this basis, or None if v is not in the sublattice."""
        return integer_coordinates(self.basis, v)


def diagonal_lattice(pos: int, neg: int, label: str = "") -> Lattice:
    if pos < 0 or neg < 0:
        raise LatticeError("pos and neg must be nonnegative")
    n = pos + neg
    gram = tuple(
        tuple((1 if i < pos else -1) if i == j else 0 for j in range(n)) for i in range(n)
    )
    return Lattice(gram, label or f"<1>^{pos}+<-1>^{neg}")


def _check_len(v: Sequence[int], L: Lattice) -> None:
    if len(v) != L.rank:
        raise LatticeError(f"vector of length {len(v)} in a rank-{L.rank} lattice")


def inner(v: Sequence, w: Sequence, L: Lattice):
    """v^T G w.  Works for rational entries too (returns a Fraction then)."""
    _check_len(v, L)
    _check_len(w, L)
    g = L.gram
    total = 0
    for i, vi in enumerate(v):
        if vi:
            row = g[i]
            total += vi * sum(row[j] * wj for j, wj in enumerate(w) if wj)
    return total


def square(v: Sequence, L: Lattice):
    return inner(v, v, L)


def pairing_row(v: Sequence[int], L: Lattice) -> Vector:
    """The functional x -> v.x as a coordinate row (v^T G)."""
    _check_len(v, L)
    return tuple(sum(v[i] * L.gram[i][j] for i in range(L.rank)) for j in range(L.rank))


def is_characteristic(K: Sequence[int], L: Lattice) -> bool:
    """K.v = v.v (mod 2) on basis vectors; by linearity that is all of L."""
    _check_len(K, L)
    row = pairing_row(K, L)
    return all((row[i] - L.gram[i][i]) % 2 == 0 for i in range(L.rank))


def gram_of(vs: Sequence[Sequence], L: Lattice) -> Matrix:
    return tuple(tuple(inner(v, w, L) for w in vs) for v in vs)


def add(v: Sequence, w: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(v, w))


def scale(c, v: Sequence) -> Vector:
    return tuple(c * a for a in v)


def combine(coeffs: Sequence, vectors: Sequence[Sequence]) -> Vector:
    """Sum of coeffs[i] * vectors[i]."""
    if not vectors:
        raise LatticeError("cannot combine an empty list of vectors")
    out = [0] * len(vectors[0])
    for c, v in zip(coeffs, vectors):
        if c:
            for k, x in enumerate(v):
                out[k] += c * x
    return tuple(out)


def mat_vec(M: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in M)


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    cols = list(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in A)


def transpose(M: Sequence[Sequence]) -> Matrix:
    return tuple(zip(*M))


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


# ---------------------------------------------------------------------------
# Determinants and rational solves


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise LatticeError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [list(row) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def solve_rational(M: Sequence[Sequence], b: Sequence) -> tuple | None:
    """Solve M x = b over Q for square nonsingular M; None if M is singular."""
    n = len(M)
    a = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return tuple(a[i][n] for i in range(n))


def inverse_rational(M: Sequence[Sequence]) -> tuple | None:
    n = len(M)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = solve_rational(M, e)
        if x is None:
            return None
        cols.append(x)
    return transpose(cols)


def rational_rank(rows: Sequence[Sequence]) -> int:
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return 0
    rank = 0
    ncols = len(a[0])
    for c in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(rank + 1, len(a)):
            if a[r][c] != 0:
                f = a[r][c] / a[rank][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Hermite normal form and integer kernels


def _echelon(rows: list, ncols: int) -> list:
    """Unimodular row reduction of ``rows`` to echelon form on the first ``ncols`` columns.

    Rows may be longer than ``ncols``; the extra columns ride along and record
    the transform.  Returns the rows reordered: pivot rows first (in pivot
    order, positive pivots, entries above pivots reduced), zero rows after.
    """
    rows = [list(r) for r in rows]
    r = 0
    pivots = []
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][c] != 0]
            if not nz:
                break
            i_min = min(nz, key=lambda i: (abs(rows[i][c]), i))
            rows[r], rows[i_min] = rows[i_min], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][c] != 0:
                    q = rows[i][c] // rows[r][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    if rows[i][c] != 0:
                        done = False
            if done:
                break
        if r < len(rows) and rows[r][c] != 0:
            if rows[r][c] < 0:
                rows[r] = [-x for x in rows[r]]
            d = rows[r][c]
            for i in range(r):
                q = rows[i][c] // d
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
    return rows, pivots


def hermite_normal_form(rows: Iterable[Sequence[int]]) -> Matrix:
    """Row-style HNF of the integer row span: nonzero rows only, canonical."""
    rows = [tuple(int(x) for x in r) for r in rows]
    if not rows:
        return ()
    ncols = len(rows[0])
    reduced, pivots = _echelon(rows, ncols)
    return tuple(tuple(reduced[i]) for i in range(len(pivots)))


def integer_kernel(A: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """Saturated basis (HNF rows) of {x in Z^n : A x = 0}."""
    if ncols is None:
        if not A:
            raise LatticeError("integer_kernel needs ncols for an empty matrix")
        ncols = len(A[0])
    k = len(A)
    # row j of the augmented matrix is (A e_j | e_j)
    aug = [[A[i][j] for i in range(k)] + [1 if t == j else 0 for t in range(ncols)] for j in range(ncols)]
    reduced, pivots = _echelon(aug, k)
    kernel = [row[k:] for row in reduced[len(pivots):]]
    return hermite_normal_form(kernel) if kernel else ()


def reduce_mod(v: Sequence[int], hnf: Sequence[Sequence[int]]) -> Vector:
    """Canonical representative of v modulo the row span of an HNF basis."""
    v = list(v)
    for row in hnf:
        c = next(i for i, x in enumerate(row) if x != 0)
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


def integer_coordinates(basis: Sequence[Sequence[int]], v: Sequence[int]) -> Vector | None:
    """Integer c with sum c_i basis_i = v, or None."""
    if not basis:
        return () if not any(v) else None
    n = len(basis)
    # rows (basis_i | e_i); reduce, then peel v off the echelon rows
    aug = [list(b) + [1 if t == i else 0 for t in range(n)] for i, b in enumerate(basis)]
    m = len(basis[0])
    reduced, pivots = _echelon(aug, m)
    if len(pivots) != n:
        raise DegenerateError("basis vectors are linearly dependent")
    rest = list(v)
    coeffs = [0] * n
    for row, c in zip(reduced, pivots):
        if rest[c] % row[c]:
            return None
        q = rest[c] // row[c]
        rest = [a - q * b for a, b in zip(rest, row[:m])]
        coeffs = [a + q * b for a, b in zip(coeffs, row[m:])]
    if any(rest):
        return None
    return tuple(coeffs)


def orthogonal_complement(S: Sequence[Sequence[int]], L: Lattice) -> Sublattice:
    """Saturated sublattice {v : v.s = 0 for all s in S} with an HNF basis."""
    S = [tuple(s) for s in S]
    for s in S:
        _check_len(s, L)
    if not S:
        return Sublattice(L, identity(L.rank))
    if rational_rank(S) != len(S):
        raise DegenerateError("orthogonal_complement: input vectors are linearly dependent")
    A = [pairing_row(s, L) for s in S]
    if rational_rank(A) != len(S):
        raise DegenerateError("orthogonal_complement: pairing map has a kernel (degenerate form)")
    return Sublattice(L, integer_kernel(A, L.rank))


def solve_pairings(targets: Sequence[tuple], L: Lattice) -> Vector | None:
    """Canonical integer delta with delta.v_i = t_i for every (v_i, t_i), or None.

    The answer is the representative of the solution coset that is reduced
    against the HNF basis of the homogeneous solutions, so it does not depend
    on how the system happened to be eliminated.
    """
    if not targets:
        return L.zero()
    A = [pairing_row(v, L) for v, _ in targets]
    t = [int(x) for _, x in targets]
    k, n = len(A), L.rank
    aug = [[A[i][j] for i in range(k)] + [1 if s == j else 0 for s in range(n)] for j in range(n)]
    reduced, pivots = _echelon(aug, k)
    rest = list(t)
    x = [0] * n
    for row, c in zip(reduced, pivots):
        if any(rest[:c]):
            return None
        if rest[c] % row[c]:
            return None
        q = rest[c] // row[c]
        rest = [a - q * b for a, b in zip(rest, row[:k])]
        x = [a + q * b for a, b in zip(x, row[k:])]
    if any(rest):
        return None
    kernel = hermite_normal_form([row[k:] for row in reduced[len(pivots):]])
    return reduce_mod(x, kernel)


# ---------------------------------------------------------------------------
# Inertia


def congruence_diagonalize(gram: Sequence[Sequence]) -> tuple:
    """Rational P with P G P^T diagonal; returns (diagonal entries, P rows).

    Each row of P is a rational vector; the rows are mutually orthogonal.
    """
    n = len(gram)
    G = [[Fraction(x) for x in row] for row in gram]
    P = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]

    def row_op(i, j, f):
        # row_i += f * row_j, col_i += f * col_j
        G[i] = [a + f * b for a, b in zip(G[i], G[j])]
        for r in range(n):
            G[r][i] += f * G[r][j]
        P[i] = [a + f * b for a, b in zip(P[i], P[j])]

    def swap(i, j):
        G[i], G[j] = G[j], G[i]
        for r in range(n):
            G[r][i], G[r][j] = G[r][j], G[r][i]
        P[i], P[j] = P[j], P[i]

    for k in range(n):
        if G[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if G[r][r] != 0), None)
            if piv is not None:
                swap(k, piv)
            else:
                j = next((r for r in range(k + 1, n) if G[k][r] != 0), None)
                if j is None:
                    continue
                row_op(k, j, Fraction(1))
        d = G[k][k]
        for r in range(k + 1, n):
            if G[r][k] != 0:
                row_op(r, k, -G[r][k] / d)
    return tuple(G[i][i] for i in range(n)), tuple(tuple(r) for r in P)


def signature(L: Lattice | Sequence[Sequence[int]]) -> tuple:
    """(b2plus, b2minus, nullity) of the form, computed over Q."""
    gram = L.gram if isinstance(L, Lattice) else L
    return _inertia(tuple(tuple(row) for row in gram))


@lru_cache(maxsize=256)
def _inertia(gram: tuple) -> tuple:
    # integer Schur complements: d*S = d*A' - b b^T, flipping signs when d < 0
    A = [list(row) for row in gram]
    pos = neg = 0
    flip = False
    while A:
        n = len(A)
        k = next((i for i in range(n) if A[i][i] != 0), None)
        if k is None:
            j = next(((i, c) for i in range(n) for c in range(i + 1, n) if A[i][c] != 0), None)
            if j is None:
                break
            i, c = j
            # v_i + v_c has square 2 A[i][c] != 0
            A[i] = [a + b for a, b in zip(A[i], A[c])]
            for r in range(n):
                A[r][i] += A[r][c]
            k = i
        d = A[k][k]
        if (d > 0) != flip:
            pos += 1
        else:
            neg += 1
        b = [A[k][c] for c in range(n) if c != k]
        rest = [[A[r][c] for c in range(n) if c != k] for r in range(n) if r != k]
        A = [[d * x - b[r] * b[c] for c, x in enumerate(row)] for r, row in enumerate(rest)]
        if d < 0:
            flip = not flip
        g = math.gcd(*(x for row in A for x in row)) if A else 0
        if g > 1:
            A = [[x // g for x in row] for row in A]
    return pos, neg, len(gram) - pos - neg


def format_class(v: Sequence, names: Sequence[str] | None = None) -> str:
    """Render a diagonal-lattice vector as e.g. '3h - e1 - e2'."""
    if names is None:
        names = ["h"] + [f"e{i}" for i in range(1, len(v))]
    parts = []
    for c, name in zip(v, names):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = name if mag == 1 else f"{mag}{name}"
        parts.append((sign, term))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out
