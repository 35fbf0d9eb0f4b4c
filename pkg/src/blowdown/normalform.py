"""Normal forms of characteristic vectors in odd unimodular Lorentzian lattices.

``wall_reduce`` runs the classical reflection cascade that carries a
characteristic K with K^2 = 9 - m in <1> + m<-1> to (3; 1, ..., 1).
``build_sw_isomorphism`` strings two such reductions together into a
form-preserving isomorphism matching basic classes, the way one matches the
Seiberg-Witten invariants of two homeomorphic blow-downs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .lattice import (
    Lattice,
    LatticeError,
    diagonal_lattice,
    identity,
    inner,
    integer_kernel,
    is_characteristic,
    mat_mul,
    mat_vec,
    signature,
    solve_rational,
    square,
    transpose,
)


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class BasisIsomorphism:
    source: Lattice
    target: Lattice
    images: tuple  # image of each source basis vector, in target coordinates

    @property
    def matrix(self) -> tuple:
        """Columns are the images; apply with mat_vec(matrix, coords)."""
        return transpose(self.images)

    def apply(self, v: Sequence) -> tuple:
        return mat_vec(self.matrix, v)

    def preserves_form(self) -> bool:
        n = self.source.rank
        return all(
            inner(self.images[i], self.images[j], self.target) == self.source.gram[i][j]
            for i in range(n)
            for j in range(n)
        )


@dataclass(frozen=True)
class WallReduction:
    iso: BasisIsomorphism
    steps: int
    reflections: int
    orientation_reversed: bool
    result: tuple


def _reflection(r, G, c=1):
    """Matrix of v -> v + c (v.r) r; c = 1 for r^2 = -2, c = 2 for r^2 = -1."""
    n = len(r)
    rG = [sum(r[i] * G[i][j] for i in range(n)) for j in range(n)]
    return tuple(tuple((1 if i == j else 0) + c * r[i] * rG[j] for j in range(n)) for i in range(n))


# (h-coefficient, e-pattern) of reflection vectors of square -2 or -1, applied
# to the largest coordinates; the first entry is the classical cascade root
_PATTERNS = (
    (1, (1, 1, 1)),
    (1, (1, 1)),
    (2, (1,) * 6),
    (2, (1,) * 5),
    (3, (2,) + (1,) * 7),
    (3, (2,) + (1,) * 6),
    (3, (2, 2, 1, 1, 1)),
    (3, (2, 2, 1, 1)),
    (3, (1,) * 11),
    (3, (1,) * 10),
)


@lru_cache(maxsize=None)
def _reflectors(m):
    out = []
    for c, pat in _PATTERNS:
        if len(pat) > m:
            continue
        v = (c,) + pat + (0,) * (m - len(pat))
        sq = c * c - sum(x * x for x in pat)
        out.append((v, 1 if sq == -2 else 2))
    return tuple(out)


def wall_reduce(K: Sequence[int], m: int, max_steps: int | None = None) -> WallReduction:
    """Automorphism of <1> + m<-1> carrying K to (3; 1^m).

    Pivots on the three largest |b_i| (ties to the lowest index) and reflects
    in r = h + e_i + e_j + e_k whenever K.r < 0; each such step lowers a.
    From m = 10 on that root alone can stall (e.g. at (9; 3^9, 1, 1, 1) or
    (11; 5, 3^11)), so the other short reflectors of _reflectors are tried
    in turn; every one of them also lowers a when it pairs negatively.
    A negative h-coefficient is handled by -1, flagged as an orientation
    reversal.
    """
    K = tuple(int(x) for x in K)
    if len(K) != m + 1:
        raise ReductionError(f"K must have length {m + 1}")
    if not 8 <= m <= 12:
        raise ReductionError("wall_reduce supports 8 <= m <= 12")
    L = diagonal_lattice(1, m)
    G = L.gram
    if not is_characteristic(K, L):
        raise ReductionError("K is not characteristic")
    if square(K, L) != 9 - m:
        raise ReductionError(f"K^2 = {square(K, L)}, expected {9 - m}")
    g = math.gcd(*K)
    if g != 1:
        raise ReductionError(f"K is divisible by {g}; (3; 1, ..., 1) is primitive, so no automorphism reaches it")
    if max_steps is None:
        max_steps = 10 * (abs(K[0]) + m) + 10
    target = (3,) + (1,) * m
    M = [list(row) for row in identity(m + 1)]
    cur = list(K)
    reversed_ = False
    steps = reflections = 0

    def apply(T):
        nonlocal M, cur
        M = [list(row) for row in mat_mul(T, M)]
        cur = list(mat_vec(T, cur))

    while True:
        if cur[0] < 0:
            apply(tuple(tuple(-x for x in row) for row in identity(m + 1)))
            reversed_ = not reversed_
        signs = [1] + [(-1 if x < 0 else 1) for x in cur[1:]]
        if any(s < 0 for s in signs):
            apply(tuple(tuple(signs[i] if i == j else 0 for j in range(m + 1)) for i in range(m + 1)))
        order = sorted(range(1, m + 1), key=lambda i: (-cur[i], i))
        perm = [0] + order
        if perm != list(range(m + 1)):
            apply(tuple(tuple(1 if j == perm[i] else 0 for j in range(m + 1)) for i in range(m + 1)))
        if tuple(cur) == target:
            break
        if steps >= max_steps:
            raise ReductionError(f"no normal form after {steps} cascade steps (at {tuple(cur)})")
        for r, c in _reflectors(m):
            if inner(cur, r, L) < 0:
                apply(_reflection(r, G, c))
                break
        else:
            raise ReductionError(f"cascade stuck at {tuple(cur)}: no reflector pairs negatively")
        reflections += 1
        steps += 1
    images = tuple(tuple(M[i][j] for i in range(m + 1)) for j in range(m + 1))
    iso = BasisIsomorphism(L, L, images)
    if not iso.preserves_form():
        raise ReductionError("internal error: reduction does not preserve the form")
    return WallReduction(iso, steps, reflections, reversed_, tuple(cur))


@lru_cache(maxsize=64)
def _lorentzian(L: Lattice) -> bool:
    bp, _, null = signature(L)
    return bp == 1 and not null


def cone_coherent(u: Sequence, v: Sequence, w: Sequence, L: Lattice) -> bool:
    """u.v > 0 for u, v positive and w a nonnegative vector in their common cone side.

    Needs b2+ = 1, u^2 > 0, v^2 > 0, w^2 >= 0, u.w > 0 and v.w > 0.
    """
    if not _lorentzian(L):
        raise ReductionError("cone_coherent needs a nondegenerate form with b2+ = 1")
    if not (square(u, L) > 0 and square(v, L) > 0 and square(w, L) >= 0):
        raise ReductionError("need u^2 > 0, v^2 > 0, w^2 >= 0")
    if not (inner(u, w, L) > 0 and inner(v, w, L) > 0):
        raise ReductionError("need u.w > 0 and v.w > 0")
    uv = inner(u, v, L)
    if uv <= 0:
        raise AssertionError(f"positive cone incoherence: u.v = {uv}")
    return True


# ---------------------------------------------------------------------------
# Orthonormal bases of odd unimodular Lorentzian lattices


def _majorant(G, t):
    n = len(G)
    Gt = [sum(Fraction(G[i][j]) * t[j] for j in range(n)) for i in range(n)]
    tt = sum(Gt[i] * t[i] for i in range(n))
    if tt <= 0:
        raise ReductionError("majorant needs a timelike vector")
    return [[2 * Gt[i] * Gt[j] / tt - G[i][j] for j in range(n)] for i in range(n)]


def _lll(Q, delta=0.75):
    """LLL on a positive definite Gram matrix Q; returns the unimodular U (columns = new basis).

    Floating point is fine here: U is unimodular whatever rounding does, and
    callers only use it to make the exact enumeration cheaper.
    """
    n = len(Q)
    Q = [[float(x) for x in row] for row in Q]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def gso():
        mu = [[0.0] * n for _ in range(n)]
        B = [0.0] * n
        for i in range(n):
            for j in range(i):
                s = Q[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))
                mu[i][j] = s / B[j]
            B[i] = Q[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
        return mu, B

    def add_col(i, j, c):
        # b_i -= c b_j
        for r in range(n):
            U[r][i] -= c * U[r][j]
        for r in range(n):
            Q[i][r] -= c * Q[j][r]
        for r in range(n):
            Q[r][i] -= c * Q[r][j]

    def swap(i, j):
        for r in range(n):
            U[r][i], U[r][j] = U[r][j], U[r][i]
        Q[i], Q[j] = Q[j], Q[i]
        for r in range(n):
            Q[r][i], Q[r][j] = Q[r][j], Q[r][i]

    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 100000:
            raise ReductionError("LLL did not converge")
        mu, B = gso()
        for j in range(k - 1, -1, -1):
            c = round(mu[k][j])
            if c:
                add_col(k, j, c)
                mu, B = gso()
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            k = max(k - 1, 1)
    return U


def _short_vectors(Q, bound):
    """Integer x with x^T Q x <= bound for positive definite Q, plus a few slightly longer ones.

    The enumeration runs in floating point with a relative slack; callers
    re-check lengths exactly.
    """
    n = len(Q)
    A = [[float(x) for x in row] for row in Q]
    # Q = sum_i q_i (x_i + sum_{j>i} m_ij x_j)^2
    q = [0.0] * n
    mm = [[0.0] * n for _ in range(n)]
    for i in range(n):
        q[i] = A[i][i]
        if q[i] <= 0:
            raise ReductionError("majorant is not positive definite")
        for j in range(i + 1, n):
            mm[i][j] = A[i][j] / q[i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                A[j][k] -= q[i] * mm[i][j] * mm[i][k]
    out = []
    x = [0] * n
    eps = 1e-7

    def rec(i, rest):
        if i < 0:
            out.append(tuple(x))
            return
        c = sum(mm[i][j] * x[j] for j in range(i + 1, n))
        r = max(rest, 0.0) / q[i]
        s = math.sqrt(r) + eps
        for v in range(math.ceil(-c - s), math.floor(-c + s) + 1):
            t = (v + c) ** 2
            x[i] = v
            rec(i - 1, rest - q[i] * t)
        x[i] = 0

    rec(n - 1, float(bound) * (1 + eps) + eps)
    return out


def _timelike(G):
    """Some rational vector of positive square."""
    n = len(G)
    for i in range(n):
        if G[i][i] > 0:
            return tuple(1 if k == i else 0 for k in range(n))
    from .lattice import congruence_diagonalize

    diag, P = congruence_diagonalize(G)
    for d, row in zip(diag, P):
        if d > 0:
            return tuple(row)
    raise ReductionError("form has no positive vectors")


def _find_vector(G, t, want_square, extra=lambda x: True, max_bound=1 << 14):
    """Shortest (w.r.t. the t-majorant) x with x^2 = want_square and extra(x).

    Both signs of every short vector are tried; ties break lexicographically.
    """
    n = len(G)
    Q = _majorant(G, t)
    Gt = [sum(Fraction(G[i][j]) * t[j] for j in range(n)) for i in range(n)]
    tt = sum(a * b for a, b in zip(Gt, t))
    U = _lll(Q)
    QU = mat_mul(transpose(U), mat_mul(Q, U))
    bound = 1
    while bound <= max_bound:
        cands = []
        for y in _short_vectors(QU, bound):
            if not any(y):
                continue
            x = mat_vec(U, y)
            sq = sum(x[i] * G[i][j] * x[j] for i in range(n) for j in range(n) if x[i] and x[j])
            if sq != want_square:
                continue
            xt = sum(a * b for a, b in zip(x, Gt) if a)
            maj = 2 * xt * xt / tt - sq
            if maj > bound:
                continue
            for z in (x, tuple(-c for c in x)):
                if extra(z):
                    cands.append((maj, tuple(-c for c in z), z))
        if cands:
            cands.sort()
            return cands[0][2]
        bound *= 2
    return None


def orthonormal_basis(G: Sequence[Sequence[int]], t: Sequence | None = None) -> tuple:
    """Vectors w_0..w_m with w_0^2 = 1, w_i^2 = -1, pairwise orthogonal, spanning the lattice.

    G must be odd unimodular of signature (1, m).  Repeatedly splits off a
    non-characteristic vector of square -1 (so the complement stays odd),
    taking the one nearest the timelike direction t.
    """
    G = tuple(tuple(int(x) for x in row) for row in G)
    n = len(G)
    bp, bm, null = signature(G)
    if null or bp != 1:
        raise ReductionError("orthonormal_basis needs a nondegenerate form of signature (1, m)")
    if t is None:
        t = _timelike(G)
    t = tuple(Fraction(x) for x in t)
    full = Lattice(G)
    basis = [tuple(row) for row in identity(n)]  # current sublattice, full coordinates
    cur_G = G
    cur_t = t
    negatives = []
    while len(basis) > 1:
        L = Lattice(cur_G)
        x = _find_vector(cur_G, cur_t, -1, lambda z, L=L: not is_characteristic(z, L))
        if x is None:
            raise ReductionError("could not find a splitting vector of square -1")
        k = len(basis)
        negatives.append(tuple(sum(x[i] * basis[i][c] for i in range(k)) for c in range(n)))
        row = [sum(x[i] * cur_G[i][j] for i in range(k)) for j in range(k)]
        ker = integer_kernel([row], k)
        basis = [tuple(sum(kv[i] * basis[i][c] for i in range(k)) for c in range(n)) for kv in ker]
        cur_G = tuple(tuple(inner(u, v, full) for v in basis) for u in basis)
        if abs(_det(cur_G)) != 1:
            raise ReductionError("complement of a -1 vector is not unimodular")
        cur_t = _project_coords(full, basis, t)
    w0 = basis[0]
    if square(w0, full) != 1:
        raise ReductionError("form is not odd unimodular of signature (1, m)")
    if inner(w0, t, full) < 0:
        w0 = tuple(-c for c in w0)
    return (w0, *negatives)


def _det(G):
    from .lattice import determinant

    return determinant(G)


def _project_coords(L: Lattice, basis, t):
    """Coordinates (in ``basis``) of the orthogonal projection of t onto span(basis)."""
    gram = [[inner(u, v, L) for v in basis] for u in basis]
    rhs = [inner(u, t, L) for u in basis]
    return solve_rational(gram, rhs)


def _coords_in(vectors, v, L: Lattice):
    """Coordinates of v in an orthogonal basis with unit squares."""
    return tuple(inner(v, w, L) * square(w, L) for w in vectors)


def _apply_inverse(vectors, M):
    """New basis d_j = sum_i w_i (M^-1)_ij for an automorphism M of <1> + m<-1>."""
    r = len(vectors)
    S = [1] + [-1] * (r - 1)
    # M^-1 = S M^T S
    inv = [[S[i] * M[j][i] * S[j] for j in range(r)] for i in range(r)]
    n = len(vectors[0])
    return [tuple(sum(vectors[i][c] * inv[i][j] for i in range(r)) for c in range(n)) for j in range(r)]


# ---------------------------------------------------------------------------
# Matching canonical classes across two lattices


@dataclass(frozen=True)
class StandardBasis:
    """w_1..w_r with w_1^2 = 1, w_i^2 = -1 and K = 3 w_1 - w_2 - ... - w_r."""

    lattice: Lattice
    K: tuple
    vectors: tuple
    splitter: tuple | None
    reduction: WallReduction

    def check(self) -> bool:
        L = self.lattice
        r = len(self.vectors)
        want = [[(1 if i == 0 else -1) if i == j else 0 for j in range(r)] for i in range(r)]
        if [[inner(u, v, L) for v in self.vectors] for u in self.vectors] != want:
            return False
        coeffs = (3,) + (-1,) * (r - 1)
        return tuple(sum(c * w[k] for c, w in zip(coeffs, self.vectors)) for k in range(L.rank)) == tuple(self.K)


def find_splitter(L: Lattice, K: Sequence[int], t: Sequence, max_coord: int = 40) -> tuple | None:
    """alpha with alpha^2 = -1 and K.alpha = -1, so that (K - alpha)^2 = K^2 + 1.

    Basis vectors are tried first, then the shortest vectors for the
    majorant of t.
    """
    K = tuple(K)

    def ok(x):
        return inner(x, K, L) == -1 and max(abs(c) for c in x) <= max_coord

    for i in range(L.rank):
        for s in (1, -1):
            e = tuple(s if k == i else 0 for k in range(L.rank))
            if square(e, L) == -1 and ok(e):
                return e
    return _find_vector(L.gram, t, -1, ok)


def standard_basis(L: Lattice, K: Sequence[int], t: Sequence, splitter: Sequence[int] | None = None,
                   split: bool | None = None) -> StandardBasis:
    """Diagonalize L and reduce K to 3 w_1 - sum w_i.

    Rank 10 with K^2 = 0 goes through a splitter alpha (K.alpha = -1,
    alpha^2 = -1): the complement of alpha is rank 9 with L = K - alpha of
    square 1, reduced there, and alpha becomes the last basis vector.
    """
    K = tuple(K)
    r = L.rank
    if not is_characteristic(K, L):
        raise ReductionError("K is not characteristic")
    if split is None:
        split = r == 10 and square(K, L) == 0
    if splitter is not None:
        split = True
    if not split:
        W = orthonormal_basis(L.gram, t)
        Kd = _coords_in(W, K, L)
        red = wall_reduce(Kd, r - 1)
        D = _apply_inverse(W, transpose(red.iso.images))
        vectors = (D[0],) + tuple(tuple(-c for c in d) for d in D[1:])
        out = StandardBasis(L, K, vectors, None, red)
    else:
        alpha = tuple(splitter) if splitter is not None else find_splitter(L, K, t)
        if alpha is None:
            raise ReductionError("no splitter found")
        if square(alpha, L) != -1 or inner(alpha, K, L) != -1:
            raise ReductionError("splitter must satisfy alpha^2 = -1 and K.alpha = -1")
        row = [inner(alpha, L.basis_vector(j), L) for j in range(r)]
        P = integer_kernel([row], r)
        sub = Lattice(tuple(tuple(inner(u, v, L) for v in P) for u in P))
        Lvec = tuple(k - a for k, a in zip(K, alpha))
        Lp = solve_rational(sub.gram, [inner(u, Lvec, L) for u in P])
        if Lp is None or any(Fraction(c).denominator != 1 for c in Lp):
            raise ReductionError("K - alpha is not in the complement lattice")
        Lp = tuple(int(c) for c in Lp)
        tp = _project_coords(L, P, t)
        inner_basis = standard_basis(sub, Lp, tp, split=False)
        lifted = tuple(tuple(sum(v[i] * P[i][c] for i in range(len(P))) for c in range(r)) for v in inner_basis.vectors)
        vectors = lifted + (tuple(-a for a in alpha),)
        out = StandardBasis(L, K, vectors, alpha, inner_basis.reduction)
    if not out.check():
        raise ReductionError("internal error: standard basis check failed")
    return out


@dataclass(frozen=True)
class SWIsomorphism:
    iso: BasisIsomorphism  # B -> A
    basis_A: StandardBasis
    basis_B: StandardBasis
    negated: bool
    K_image: tuple
    pairings: dict


def build_sw_isomorphism(LA: Lattice, KA: Sequence[int], HA: Sequence, LB: Lattice, KB: Sequence[int],
                         HB: Sequence, splitter_A=None, splitter_B=None) -> SWIsomorphism:
    """Form isomorphism phi: L_B -> L_A with phi(K_B) = +-K_A, oriented so that H_A.phi(H_B) > 0.

    phi is W_A W_B^-1 for the two standard bases.  If it reverses the
    positive cones it is composed with -1, which sends K_B to -K_A.
    """
    if LA.rank != LB.rank:
        raise ReductionError("lattices have different rank")
    KA, KB = tuple(KA), tuple(KB)
    if square(KA, LA) != square(KB, LB):
        raise ReductionError("K_A and K_B have different squares")
    A = standard_basis(LA, KA, HA, splitter_A)
    B = standard_basis(LB, KB, HB, splitter_B)
    r = LA.rank
    signs = [square(w, LB) for w in B.vectors]
    images = []
    for j in range(r):
        e = LB.basis_vector(j)
        c = [inner(e, w, LB) * s for w, s in zip(B.vectors, signs)]
        images.append(tuple(sum(c[i] * A.vectors[i][k] for i in range(r)) for k in range(r)))
    iso = BasisIsomorphism(LB, LA, tuple(images))
    phiH = iso.apply(HB)
    negated = inner(phiH, HA, LA) < 0
    if negated:
        iso = BasisIsomorphism(LB, LA, tuple(tuple(-c for c in im) for im in images))
        phiH = iso.apply(HB)
    if not iso.preserves_form():
        raise ReductionError("internal error: isomorphism does not preserve the form")
    K_image = iso.apply(KB)
    if K_image != (tuple(-c for c in KA) if negated else KA):
        raise ReductionError("internal error: K_B is not carried to +-K_A")
    pairings = {
        "HA.phi(HB)": inner(HA, phiH, LA),
        "-KA.HA": -inner(KA, HA, LA),
        "-KA.phi(HB)": -inner(KA, phiH, LA),
        "-KB.HB": -inner(KB, HB, LB),
    }
    if square(KA, LA) >= 0 and inner(KA, HA, LA) != 0:
        w = KA if inner(KA, HA, LA) > 0 else tuple(-c for c in KA)
        if inner(w, phiH, LA) > 0:
            cone_coherent(HA, phiH, w, LA)
    return SWIsomorphism(iso, A, B, negated, K_image, pairings)
