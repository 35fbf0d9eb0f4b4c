"""Small-perturbation Seiberg-Witten calculus for b2+ = 1.

Everything here is combinatorial: SW on CP^2 # n(-CP^2) is zero in the
chamber of PD(h), and every other chamber is reached by the wall-crossing
formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

from .lattice import Lattice, LatticeError, diagonal_lattice, inner, is_characteristic, signature, square


class ChamberError(ValueError):
    """Violated precondition of the chamber calculus."""


class WallError(ChamberError):
    """K lies on a wall (K.H = 0) for one of the chambers involved."""


@dataclass(frozen=True)
class ManifoldModel:
    lattice: Lattice
    euler: int
    sigma: int
    orientation_rep: tuple

    def __post_init__(self):
        bp, bm, null = signature(self.lattice)
        if null:
            raise ChamberError("intersection form is degenerate")
        if bp != 1:
            raise ChamberError(f"only b2+ = 1 is supported, got b2+ = {bp}")
        if self.euler != 2 + self.lattice.rank:
            raise ChamberError(f"euler {self.euler} != 2 + rank {self.lattice.rank}")
        if self.sigma != bp - bm:
            raise ChamberError(f"sigma {self.sigma} != b2+ - b2- = {bp - bm}")
        if square(self.orientation_rep, self.lattice) <= 0:
            raise ChamberError("orientation representative must have positive square")

    @property
    def b2(self) -> tuple:
        bp, bm, _ = signature(self.lattice)
        return bp, bm

    @property
    def wall_constant(self) -> int:
        """D = -(2e + 3 sigma), so that d(K) = (K^2 + D) / 4."""
        return -(2 * self.euler + 3 * self.sigma)


@lru_cache(maxsize=None)
def rational_surface(n: int) -> ManifoldModel:
    """R_n = CP^2 # n(-CP^2) with homology orientation PD(h)."""
    L = diagonal_lattice(1, n, f"R{n}")
    return ManifoldModel(L, n + 3, 1 - n, L.basis_vector(0))


def model_from_lattice(L: Lattice, orientation_rep: Sequence) -> ManifoldModel:
    bp, bm, _ = signature(L)
    return ManifoldModel(L, 2 + L.rank, bp - bm, tuple(orientation_rep))


@dataclass(frozen=True)
class Chamber:
    H: tuple

    @classmethod
    def checked(cls, H: Sequence, M: ManifoldModel) -> "Chamber":
        H = tuple(H)
        if square(H, M.lattice) <= 0:
            raise ChamberError("chamber vector must have positive square")
        if inner(H, M.orientation_rep, M.lattice) <= 0:
            raise ChamberError("chamber vector is not positively oriented")
        return cls(H)


def d_invariant(K: Sequence[int], M: ManifoldModel) -> int:
    """d(K) = (K^2 - 2e - 3 sigma) / 4, checked to be an even integer."""
    if not is_characteristic(K, M.lattice):
        raise ChamberError("d_invariant needs a characteristic class")
    num = square(K, M.lattice) + M.wall_constant
    if num % 4:
        raise ChamberError(f"K^2 - 2e - 3sigma = {num} is not divisible by 4; inconsistent model")
    d = num // 4
    if d % 2:
        raise ChamberError(f"d = {d} is odd; inconsistent model")
    return d


def wall_cross(base: int, K: Sequence[int], frm: Chamber, to: Chamber, M: ManifoldModel) -> int:
    """SW_{M,to}(K) from SW_{M,frm}(K) = base."""
    L = M.lattice
    if inner(frm.H, to.H, L) <= 0:
        raise ChamberError("chambers must satisfy H.H' > 0")
    d = d_invariant(K, M)
    if d < 0:
        raise ChamberError(f"wall-crossing needs d >= 0, got {d}")
    kf = inner(K, frm.H, L)
    kt = inner(K, to.H, L)
    if kf == 0 or kt == 0:
        raise WallError("K lies on a wall of one of the chambers")
    if (kf > 0) == (kt > 0):
        return base
    if kf > 0:
        return base + (-1) ** (d // 2)
    return base + (-1) ** (1 + d // 2)


class SWEvaluation(NamedTuple):
    value: int
    d: int
    negative_d: bool


def evaluate_rational_surface(K: Sequence[int], H: Chamber, n: int) -> SWEvaluation:
    """SW_{R_n,H}(K), flagging the d < 0 classes whose value is zero by convention."""
    M = rational_surface(n)
    K = tuple(K)
    if len(K) != n + 1 or len(H.H) != n + 1:
        raise LatticeError(f"vectors must have length {n + 1} for R_{n}")
    if not is_characteristic(K, M.lattice):
        raise ChamberError("K is not characteristic")
    Chamber.checked(H.H, M)
    d = d_invariant(K, M)
    base = Chamber(M.orientation_rep)
    if inner(K, base.H, M.lattice) == 0:
        raise WallError("K.h = 0: K lies on the wall of the PD(h) chamber")
    if inner(K, H.H, M.lattice) == 0:
        raise WallError("K.H = 0: K lies on a wall")
    if d < 0:
        return SWEvaluation(0, d, True)
    return SWEvaluation(wall_cross(0, K, base, H, M), d, False)


def sw_rational_surface(K: Sequence[int], H: Chamber, n: int) -> int:
    return evaluate_rational_surface(K, H, n).value


def chamber_independent(M: ManifoldModel) -> bool:
    bp, bm = M.b2
    if bp != 1:
        raise ChamberError("chamber_independent is only meaningful for b2+ = 1")
    return bm <= 9
