"""Rational blow-down at the level of homology lattices.

A C_p configuration is the linear chain of p - 1 spheres u_1..u_{p-1} with
u_i^2 = -2 (i <= p-2), u_{p-1}^2 = -(p+2) and u_i.u_{i+1} = 1.  Blowing it
down replaces H_2 by the orthogonal complement of the chain, glued up to a
unimodular overlattice by a class of the form g/p.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .lattice import (
    DegenerateError,
    Lattice,
    LatticeError,
    Sublattice,
    combine,
    determinant,
    diagonal_lattice,
    gram_of,
    hermite_normal_form,
    inner,
    integer_coordinates,
    is_characteristic,
    orthogonal_complement,
    signature,
    solve_pairings,
    solve_rational,
    square,
)
from .swchamber import (
    Chamber,
    ChamberError,
    ManifoldModel,
    d_invariant,
    model_from_lattice,
    sw_rational_surface,
)


class ConfigurationError(ValueError):
    pass


class OverlatticeError(ValueError):
    pass


@dataclass(frozen=True)
class CpConfiguration:
    p: int
    spheres: tuple
    lattice: Lattice

    def __post_init__(self):
        object.__setattr__(self, "spheres", tuple(tuple(u) for u in self.spheres))
        if self.p < 2:
            raise ConfigurationError("p must be at least 2")
        if len(self.spheres) != self.p - 1:
            raise ConfigurationError(f"C_{self.p} needs {self.p - 1} spheres, got {len(self.spheres)}")

    def gram(self):
        return gram_of(self.spheres, self.lattice)


def chain_gram(p: int) -> tuple:
    """The linear-chain intersection matrix of C_p."""
    n = p - 1
    rows = []
    for i in range(n):
        row = [0] * n
        row[i] = -(p + 2) if i == n - 1 else -2
        if i > 0:
            row[i - 1] = 1
        if i < n - 1:
            row[i + 1] = 1
        rows.append(tuple(row))
    return tuple(rows)


def validate_config(cfg: CpConfiguration) -> str | None:
    """None when the spheres realise the C_p chain, else a message naming the first bad entry."""
    want = chain_gram(cfg.p)
    got = cfg.gram()
    for i in range(cfg.p - 1):
        for j in range(i, cfg.p - 1):
            if got[i][j] != want[i][j]:
                if i == j:
                    return f"u{i + 1}^2 = {got[i][j]}, expected {want[i][j]}"
                return f"u{i + 1}.u{j + 1} = {got[i][j]}, expected {want[i][j]}"
    return None


def standard_pCq(p: int, q: int) -> CpConfiguration:
    """The copy pC_q of C_q in CP^2 # (8+q)(-CP^2) whose blow-down is E(1)_{p,q}.

    u_k = e_{8+q-k} - e_{9+q-k} for k <= q-2 and
    u_{q-1} = p(3h - e_1 - ... - e_9) - 2e_10 - e_11 - ... - e_{8+q}.
    """
    if p < 1 or q < 2:
        raise ConfigurationError("standard_pCq needs p >= 1 and q >= 2")
    n = 8 + q
    L = diagonal_lattice(1, n, f"R{n}")
    spheres = []
    for k in range(1, q - 1):
        u = [0] * (n + 1)
        u[8 + q - k] = 1
        u[9 + q - k] = -1
        spheres.append(tuple(u))
    last = [3 * p] + [-p] * 9 + [-2] + [-1] * (q - 2)
    spheres.append(tuple(last))
    cfg = CpConfiguration(q, tuple(spheres), L)
    problem = validate_config(cfg)
    if problem:
        raise ConfigurationError(problem)
    return cfg


def _pairings(K: Sequence[int], cfg: CpConfiguration) -> tuple:
    return tuple(inner(K, u, cfg.lattice) for u in cfg.spheres)


def _require_characteristic(K, cfg):
    if not is_characteristic(K, cfg.lattice):
        raise ChamberError("K is not characteristic")


def lift_condition_cor(K: Sequence[int], cfg: CpConfiguration) -> bool:
    """K.u_i = 0 for i <= p-2 and K.u_{p-1} = +-p."""
    _require_characteristic(K, cfg)
    k = _pairings(K, cfg)
    return all(x == 0 for x in k[:-1]) and abs(k[-1]) == cfg.p


@dataclass(frozen=True)
class LiftDiagnostic:
    pairings: tuple
    dual_coords: tuple  # x with Gram(U) x = pairings
    projection_square: Fraction
    boundary_class: int  # in Z/p^2
    m_mod_p: int | None  # None when the boundary class is not a multiple of p
    parity_ok: bool
    square_ok: bool

    @property
    def liftable(self) -> bool:
        return self.square_ok and self.parity_ok


def lift_diagnostic(K: Sequence[int], cfg: CpConfiguration) -> LiftDiagnostic:
    _require_characteristic(K, cfg)
    p = cfg.p
    k = _pairings(K, cfg)
    x = solve_rational(cfg.gram(), k)
    if x is None:
        raise DegenerateError("configuration Gram is singular")
    proj = sum(a * b for a, b in zip(x, k))
    # dual coordinate of the chain-end sphere, scaled into Z/p^2
    end = x[-1] * p * p
    if end.denominator != 1:
        raise DegenerateError("configuration determinant is not p^2")
    boundary = int(end) % (p * p)
    if boundary % p:
        m, parity_ok = None, False
    else:
        m = boundary // p
        # m is only defined mod p; for odd p both parities occur in its class
        parity_ok = (p % 2 == 1) or (m % 2 == (p - 1) % 2)
    return LiftDiagnostic(k, x, proj, boundary, m, parity_ok, proj == 1 - p)


def liftable_thm(K: Sequence[int], cfg: CpConfiguration) -> bool:
    return lift_diagnostic(K, cfg).liftable


def betti_after_blowdown(M: ManifoldModel, cfg: CpConfiguration) -> tuple:
    bp, bm = M.b2
    return bp, bm - (cfg.p - 1)


def delta_exists(cfg: CpConfiguration):
    """A class delta with delta.u_1 = 1 and delta.u_i = 0 otherwise, or None."""
    targets = [(cfg.spheres[0], 1)] + [(u, 0) for u in cfg.spheres[1:]]
    return solve_pairings(targets, cfg.lattice)


def splitting_index(cfg: CpConfiguration) -> int:
    """Index of complement + span(u) in the ambient lattice (|det| of the joint basis)."""
    comp = orthogonal_complement(cfg.spheres, cfg.lattice)
    rows = list(comp.basis) + list(cfg.spheres)
    if len(rows) != cfg.lattice.rank:
        raise DegenerateError("complement and configuration do not span a full-rank sublattice")
    return abs(determinant(rows))


# ---------------------------------------------------------------------------
# Blow-down models and overlattices


@dataclass(frozen=True)
class BlowdownModel:
    ambient: ManifoldModel
    config: CpConfiguration
    complement: Sublattice
    glue_num: tuple | None = None

    @property
    def p(self) -> int:
        return self.config.p


def blowdown_model(M: ManifoldModel, cfg: CpConfiguration, glue_num: Sequence[int] | None = None) -> BlowdownModel:
    if cfg.lattice != M.lattice:
        raise ConfigurationError("configuration lives in a different lattice than the model")
    problem = validate_config(cfg)
    if problem:
        raise ConfigurationError(problem)
    comp = orthogonal_complement(cfg.spheres, M.lattice)
    return BlowdownModel(M, cfg, comp, tuple(glue_num) if glue_num is not None else None)


@dataclass(frozen=True)
class Overlattice:
    """Unimodular overlattice of a complement, with its basis embedded rationally in the ambient."""

    lattice: Lattice
    basis: tuple  # rational ambient vectors
    complement_coords: tuple  # rational coordinates of each basis vector in the complement basis
    glue: tuple  # the rational glue class g/p in ambient coordinates
    index: int

    def coordinates(self, v: Sequence) -> tuple | None:
        """Integer coordinates of an ambient (rational) vector in this basis, or None."""
        return _rational_coords(self.basis, v)

    def embed(self, coords: Sequence) -> tuple:
        return combine(coords, self.basis)


def _rational_coords(basis, v):
    """Coordinates of v in basis (exact, rational); integer tuple if integral, else None."""
    rows = [list(map(Fraction, b)) for b in basis]
    n = len(rows)
    m = len(rows[0])
    # least squares would be overkill: solve the normal equations B B^T c = B v
    BBt = [[sum(a * b for a, b in zip(rows[i], rows[j])) for j in range(n)] for i in range(n)]
    Bv = [sum(a * Fraction(b) for a, b in zip(rows[i], v)) for i in range(n)]
    c = solve_rational(BBt, Bv)
    if c is None:
        raise DegenerateError("basis is linearly dependent")
    back = [sum(c[i] * rows[i][k] for i in range(n)) for k in range(m)]
    if any(b != Fraction(x) for b, x in zip(back, v)):
        return None
    if any(x.denominator != 1 for x in c):
        return None
    return tuple(int(x) for x in c)


def glue_overlattice(B: BlowdownModel, glue_num: Sequence[int] | None = None) -> Overlattice:
    """The overlattice generated by the complement and glue_num / p."""
    g = tuple(glue_num if glue_num is not None else (B.glue_num or ()))
    if not g:
        raise OverlatticeError("no glue vector supplied")
    p = B.p
    L = B.ambient.lattice
    comp = B.complement
    cb = comp.basis
    r = len(cb)
    Gc = comp.gram()
    y = solve_rational(Gc, [inner(c, g, L) for c in cb])
    if y is None:
        raise DegenerateError("complement form is degenerate")
    if combine(y, cb) != tuple(Fraction(x) for x in g):
        raise OverlatticeError("glue numerator is not in the rational span of the complement")
    for i, c in enumerate(cb):
        val = Fraction(inner(c, g, L), p)
        if val.denominator != 1:
            raise OverlatticeError(f"glue/p pairs non-integrally ({val}) with complement basis vector {i}")
    gsq = Fraction(square(g, L), p * p)
    if gsq.denominator != 1:
        raise OverlatticeError(f"(glue/p)^2 = {gsq} is not an integer")
    yp = [Fraction(a) / p for a in y]
    den = 1
    for a in yp:
        den = den * a.denominator // _gcd(den, a.denominator)
    rows = [[den if i == j else 0 for j in range(r)] for i in range(r)] + [[int(a * den) for a in yp]]
    hnf = hermite_normal_form(rows)
    coords = tuple(tuple(Fraction(a, den) for a in row) for row in hnf)
    basis = tuple(combine(c, cb) for c in coords)
    gram = [[inner(u, v, L) for v in basis] for u in basis]
    for row in gram:
        for x in row:
            if Fraction(x).denominator != 1:
                raise OverlatticeError("overlattice form is not integral")
    lat = Lattice(tuple(tuple(int(x) for x in row) for row in gram), "overlattice")
    det = determinant(lat.gram)
    if abs(det) != 1:
        raise OverlatticeError(f"overlattice is not unimodular (det {det})")
    index = abs(determinant(Gc)) // abs(det)
    idx = 1
    while idx * idx < index:
        idx += 1
    glue = tuple(Fraction(x, p) for x in g)
    return Overlattice(lat, basis, coords, glue, idx)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def glue_search(B: BlowdownModel) -> list:
    """All glue numerators g (one per order-p isotropic subgroup) found by enumerating the discriminant group.

    Exhaustive over the |det| cosets of the complement in its dual, so only
    meant for small discriminants.
    """
    p = B.p
    L = B.ambient.lattice
    cb = B.complement.basis
    Gc = B.complement.gram()
    r = len(cb)
    hnf = hermite_normal_form(Gc)
    if len(hnf) != r:
        raise DegenerateError("complement form is degenerate")
    pivots = [next(x for x in row if x != 0) for row in hnf]
    seen = set()
    found = []
    for y in itertools.product(*[range(d) for d in pivots]):
        if not any(y):
            continue
        x = solve_rational(Gc, y)  # dual element in complement coordinates
        if any((p * a).denominator != 1 for a in x):
            continue
        if all(a.denominator == 1 for a in x):
            continue
        norm = sum(a * b for a, b in zip(x, y))
        if norm.denominator != 1:
            continue
        g = combine([int(p * a) for a in x], cb)
        sub = _subgroup_key(x, p)
        if sub in seen:
            continue
        seen.add(sub)
        found.append(g)
    return found


def _subgroup_key(x, p):
    """Frozen set of the nonzero multiples of x modulo the integer lattice."""
    key = []
    for k in range(1, p):
        key.append(tuple((k * a) % 1 for a in x))
    return frozenset(key)


@dataclass(frozen=True)
class Descent:
    value: int
    complement_pairings: tuple
    glue_pairing: int | None
    d_upstairs: int
    d_downstairs: int | None
    overlattice_class: tuple | None  # coordinates of the descended class in the overlattice basis
    square_downstairs: int | None


def descend_sw(B: BlowdownModel, H: Sequence[int], K: Sequence[int], over: Overlattice | None = None) -> Descent:
    """SW of the descended class, equal to SW_{X,H}(K) for a lift K and H orthogonal to the chain."""
    M = B.ambient
    L = M.lattice
    cfg = B.config
    H = tuple(H)
    K = tuple(K)
    for i, u in enumerate(cfg.spheres):
        if inner(H, u, L) != 0:
            raise ChamberError(f"H is not orthogonal to u{i + 1} (H.u = {inner(H, u, L)})")
    if not (lift_condition_cor(K, cfg) or liftable_thm(K, cfg)):
        raise ChamberError("K is not a lift of any class of the blow-down")
    chamber = Chamber.checked(H, M)
    n = L.rank - 1
    value = sw_rational_surface(K, chamber, n)
    d_up = d_invariant(K, M)
    comp_pair = tuple(inner(K, c, L) for c in B.complement.basis)
    glue_pair = None
    d_down = None
    klass = None
    ksq = None
    if over is None and B.glue_num is not None:
        over = glue_overlattice(B)
    if over is not None:
        gp = inner(K, over.glue, L)
        if Fraction(gp).denominator != 1:
            raise OverlatticeError("lift pairs non-integrally with the glue class")
        glue_pair = int(gp)
        pair = [inner(K, b, L) for b in over.basis]
        x = solve_rational(over.lattice.gram, pair)
        klass = tuple(int(a) for a in x)
        ksq = int(sum(a * b for a, b in zip(x, pair)))
        down = model_from_lattice(over.lattice, _overlattice_coords(over, H, L))
        d_down = d_invariant(klass, down)
    return Descent(value, comp_pair, glue_pair, d_up, d_down, klass, ksq)


def _overlattice_coords(over: Overlattice, H, L):
    """Overlattice coordinates of H (rational)."""
    pair = [inner(H, b, L) for b in over.basis]
    return solve_rational(over.lattice.gram, pair)


# ---------------------------------------------------------------------------
# Constrained recovery of chain configurations


def _root_candidates(n: int, H, K, L) -> list:
    roots = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            u = [0] * (n + 1)
            u[i], u[j] = 1, -1
            u = tuple(u)
            if inner(u, H, L) == 0 and inner(u, K, L) == 0:
                roots.append(u)
    # prefer high-index roots e_i - e_{i+1}: the pattern of the standard chains
    roots.sort(key=lambda u: (-max(k for k, x in enumerate(u) if x), -min(k for k, x in enumerate(u) if x), u.index(1) > u.index(-1)))
    return roots


def _end_sphere_candidates(p, H, K, L, a_max, b_max):
    n = L.rank - 1
    blocks = {}
    for i in range(1, n + 1):
        blocks.setdefault((H[i], K[i]), []).append(i)
    block_list = [blocks[k] for k in sorted(blocks, key=lambda k: blocks[k][0])]
    values = range(-b_max, b_max + 1)
    per_block = []
    for idx in block_list:
        options = []
        for combo in itertools.combinations_with_replacement(values, len(idx)):
            options.append((sum(v * v for v in combo), sum(combo), combo))
        per_block.append(options)
    target = -(p + 2)
    out = []
    for a in range(0, a_max + 1):
        for choice in itertools.product(*per_block):
            sq = a * a - sum(c[0] for c in choice)
            if sq != target:
                continue
            hdot = a * H[0] - sum(H[idx[0]] * c[1] for idx, c in zip(block_list, choice))
            if hdot != 0:
                continue
            kdot = a * K[0] - sum(K[idx[0]] * c[1] for idx, c in zip(block_list, choice))
            if abs(kdot) != p:
                continue
            u = [0] * (n + 1)
            u[0] = a
            for idx, c in zip(block_list, choice):
                for i, v in zip(idx, c[2]):
                    u[i] = v
            out.append(tuple(u))
    return out


def find_chain_configurations(
    L: Lattice, p: int, H: Sequence[int], K: Sequence[int], a_max: int = 8, b_max: int = 2, limit: int = 1
) -> list:
    """Search for C_p chains orthogonal to H on which K satisfies the congruence lift condition.

    The end sphere is enumerated up to the coordinate permutations fixing
    both H and K; the -2 spheres are taken among roots e_i - e_j.  Results
    come out in a fixed order, so the first one is reproducible.
    """
    H, K = tuple(H), tuple(K)
    n = L.rank - 1
    roots = _root_candidates(n, H, K, L)
    found = []
    for end in _end_sphere_candidates(p, H, K, L, a_max, b_max):
        chain = [end]

        def extend():
            if len(chain) == p - 1:
                found.append(tuple(reversed(chain)))
                return len(found) >= limit
            nxt = chain[-1]
            for r in roots:
                if r in chain or inner(r, nxt, L) != 1:
                    continue
                if any(inner(r, u, L) != 0 for u in chain[:-1]):
                    continue
                chain.append(r)
                if extend():
                    return True
                chain.pop()
            return False

        if extend():
            break
    configs = []
    for spheres in found:
        cfg = CpConfiguration(p, spheres, L)
        if validate_config(cfg) is None:
            configs.append(cfg)
    return configs
