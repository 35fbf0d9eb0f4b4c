"""Named classes from the E(1)_{2,3}, E_3, E_5 and E3' constructions.

Coordinates follow the lattice convention: h-coefficient first, then the
e_i coefficients, so 4h - e1 - 2e10 is (4, -1, 0, ..., -2, 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .lattice import Lattice, determinant, diagonal_lattice, format_class, inner, solve_rational
from .rbd import CpConfiguration, standard_pCq


def _vec(h, *runs):
    """Build (h; ...) from runs of (coefficient, count)."""
    out = [h]
    for c, k in runs:
        out.extend([c] * k)
    return tuple(out)


def _alphas3():
    out = [_vec(4, (-1, 9), (-2, 2))]
    for i in range(2, 9):
        v = list(_vec(5, (-2, 2), (-1, 7), (-2, 2)))
        v[i + 1] -= 1
        out.append(tuple(v))
    out.append(_vec(0, (1, 1), (-1, 1), (0, 9)))
    return tuple(out)


def _alphas5():
    out = []
    for i in range(1, 9):
        v = list(_vec(17, (-3, 1), (-4, 8), (-6, 4)))
        v[i + 1] -= 1
        out.append(tuple(v))
    out.append(_vec(96, (-19, 1), (-23, 8), (-34, 4)))
    return tuple(out)


def _c5prime():
    L = diagonal_lattice(1, 13, "R13")
    u = [tuple(1 if i == a else -1 if i == a + 1 else 0 for i in range(14)) for a in (10, 11, 12)]
    u.append(_vec(6, (1, 2), (-2, 10), (-1, 1)))
    return CpConfiguration(5, tuple(u), L)


@dataclass(frozen=True)
class ExplicitBasis:
    """A lattice given by rational ambient vectors (e.g. alpha_1..alpha_9, beta/3)."""

    names: tuple
    vectors: tuple  # rational ambient vectors
    ambient: Lattice

    @property
    def lattice(self) -> Lattice:
        g = [[inner(u, v, self.ambient) for v in self.vectors] for u in self.vectors]
        if any(Fraction(x).denominator != 1 for row in g for x in row):
            raise ValueError("explicit basis has a non-integral Gram matrix")
        return Lattice(tuple(tuple(int(x) for x in row) for row in g), "explicit")

    def pairings(self, K: Sequence) -> tuple:
        return tuple(inner(K, v, self.ambient) for v in self.vectors)

    def dual_coordinates(self, K: Sequence) -> tuple:
        """Coordinates of the class pairing like K with the basis (K dualized)."""
        x = solve_rational(self.lattice.gram, self.pairings(K))
        return tuple(int(a) if Fraction(a).denominator == 1 else a for a in x)

    def coordinates(self, v: Sequence) -> tuple:
        return self.dual_coordinates(v)


@dataclass(frozen=True)
class PaperDataset:
    f: tuple
    c23: CpConfiguration
    c25: CpConfiguration
    alphas: tuple
    beta: tuple
    alphas5: tuple
    beta5: tuple
    K3_lift: tuple
    H: tuple
    K3p_lift: tuple
    Hp: tuple
    alpha_p: tuple
    c5prime: CpConfiguration
    K3_alpha_coords: tuple = (1, 1, 1, 1, 1, 1, 1, 1, -2, -4)

    def alpha_basis(self) -> ExplicitBasis:
        vecs = self.alphas + (tuple(Fraction(x, 3) for x in self.beta),)
        return ExplicitBasis(tuple(f"alpha{i}" for i in range(1, 11)), vecs, self.c23.lattice)

    def alpha5_basis(self) -> ExplicitBasis:
        vecs = self.alphas5 + (tuple(Fraction(x, 5) for x in self.beta5),)
        return ExplicitBasis(tuple(f"alpha5_{i}" for i in range(1, 11)), vecs, self.c25.lattice)

    def named_vectors(self) -> dict:
        out = {"f": self.f}
        for i, u in enumerate(self.c23.spheres, 1):
            out[f"2C3.u{i}"] = u
        for i, u in enumerate(self.c25.spheres, 1):
            out[f"2C5.u{i}"] = u
        for i, a in enumerate(self.alphas, 1):
            out[f"alpha{i}"] = a
        out["beta"] = self.beta
        for i, a in enumerate(self.alphas5, 1):
            out[f"alpha5_{i}"] = a
        out["beta5"] = self.beta5
        out["K3~"] = self.K3_lift
        out["H"] = self.H
        out["K3'~"] = self.K3p_lift
        out["H'"] = self.Hp
        out["alpha'"] = self.alpha_p
        for i, u in enumerate(self.c5prime.spheres, 1):
            out[f"C5'.u{i}"] = u
        return out

    def as_dict(self) -> dict:
        from .formats import builtin_scripts, script_dict

        return {
            "vectors": {k: {"coords": list(v), "class": format_class(v)} for k, v in self.named_vectors().items()},
            "K3_in_alpha_basis": list(self.K3_alpha_coords),
            "scripts": {k: script_dict(s) for k, s in builtin_scripts().items()},
        }


@lru_cache(maxsize=1)
def paper_dataset() -> PaperDataset:
    return PaperDataset(
        f=_vec(6, (-2, 9)),
        c23=standard_pCq(2, 3),
        c25=standard_pCq(2, 5),
        alphas=_alphas3(),
        beta=_vec(30, (-13, 1), (-10, 1), (-7, 7), (-12, 2)),
        alphas5=_alphas5(),
        beta5=_vec(537, (-104, 1), (-129, 8), (-190, 4)),
        K3_lift=_vec(3, (-1, 11)),
        H=_vec(7, (-2, 11)),
        K3p_lift=_vec(3, (1, 2), (-1, 11)),
        Hp=_vec(23, (6, 2), (-6, 11)),
        alpha_p=_vec(3, (1, 1), (0, 1), (-1, 5), (0, 2), (-1, 4)),
        c5prime=_c5prime(),
    )
