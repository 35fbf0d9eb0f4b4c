"""Enumeration of classes with nonzero chamber SW value on CP^2 # n(-CP^2).

A characteristic K = (a; b_1..b_n) has all coordinates odd.  It can only
have nonzero SW in the chamber of H when d(K) >= 0 and K.h, K.H have
opposite signs; Cauchy-Schwarz turns that into a bound on |a|, and the same
inequality prunes the inner search over the b_i.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .rbd import CpConfiguration, lift_condition_cor
from .swchamber import Chamber, ChamberError, ManifoldModel, rational_surface, sw_rational_surface


@dataclass(frozen=True)
class SearchSpec:
    n: int
    chamber: tuple
    config: CpConfiguration | None = None
    a_override: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "chamber", tuple(self.chamber))
        if len(self.chamber) != self.n + 1:
            raise ChamberError(f"chamber must have length {self.n + 1}")
        Chamber.checked(self.chamber, self.model)
        if self.config is not None and self.config.lattice.rank != self.n + 1:
            raise ChamberError("configuration lives in a lattice of the wrong rank")

    @property
    def model(self) -> ManifoldModel:
        return rational_surface(self.n)


@dataclass(frozen=True)
class SWReport:
    entries: tuple  # ((K, value), ...) canonically ordered
    chamber: tuple
    n: int
    a_bound: int
    candidates: int = 0
    walls: int = 0
    filtered: int = 0
    lift_filter: bool = False
    per_a: tuple = ()  # (a, visited, hits) for each odd a searched

    def as_dict(self) -> dict:
        return {key: value for key, value in self.entries}

    def __len__(self):
        return len(self.entries)


def a_bound(spec: SearchSpec) -> int:
    """Largest odd |a| with a^2 H^2 < (sum c_i^2) D, or 0 if there is none."""
    H = spec.chamber
    M = spec.model
    h2 = H[0] * H[0] - sum(c * c for c in H[1:])
    if h2 <= 0:
        raise ChamberError("a_bound needs H^2 > 0")
    csum = sum(c * c for c in H[1:])
    D = M.wall_constant
    rhs = csum * D
    if rhs <= 0:
        return 0
    # largest a with a^2 * h2 < rhs
    a = math.isqrt(rhs // h2 + 1)
    while a * a * h2 >= rhs:
        a -= 1
    if a % 2 == 0:
        a -= 1
    return max(a, 0)


def _search_a(a: int, H: tuple, D: int) -> tuple:
    """All odd b with sum b^2 <= a^2 + D and sign(K.H) opposite to sign(a).

    Returns (hits, walls, visited) where hits are full vectors (a, b...).
    """
    n = len(H) - 1
    c = H[1:]
    budget0 = a * a + D
    # K.H = a c0 - sum b_i c_i; for a > 0 we need sum b_i c_i > a c0, for a < 0 the reverse
    s = 1 if a > 0 else -1
    need = s * a * H[0]  # need s * sum(b_i c_i) > need
    tail_sq = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        tail_sq[i] = tail_sq[i + 1] + c[i] * c[i]
    hits = []
    walls = 0
    visited = 0
    b = [0] * n

    def rec(i, budget, acc):
        nonlocal walls, visited
        remaining = n - i
        if budget < remaining:
            return
        if remaining == 0:
            visited += 1
            if acc == need:
                walls += 1
            elif acc > need:
                hits.append((a,) + tuple(b))
            return
        # Cauchy-Schwarz: the rest adds at most sqrt(budget * tail_sq)
        gap = need - acc
        if gap >= 0 and gap * gap > budget * tail_sq[i]:
            return
        top = math.isqrt(budget - (remaining - 1))
        if top % 2 == 0:
            top -= 1
        for v in range(-top, top + 1, 2):
            b[i] = v
            rec(i + 1, budget - v * v, acc + s * v * c[i])
        b[i] = 0

    rec(0, budget0, 0)
    return hits, walls, visited


def _run_a(args):
    a, H, D = args
    return a, _search_a(a, H, D)


def enumerate_unfiltered(spec: SearchSpec, workers: int = 1) -> SWReport:
    return _enumerate(spec, None, workers)


def enumerate_basic(spec: SearchSpec, workers: int = 1) -> SWReport:
    return _enumerate(spec, spec.config, workers)


def _enumerate(spec: SearchSpec, config: CpConfiguration | None, workers: int) -> SWReport:
    M = spec.model
    H = spec.chamber
    bound = a_bound(spec)
    if spec.a_override is not None:
        bound = max(bound, spec.a_override)
    D = M.wall_constant
    a_values = [a for a in range(-bound, bound + 1) if a % 2]
    tasks = [(a, H, D) for a in a_values]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_a, tasks))
    else:
        results = [_run_a(t) for t in tasks]
    # order-independent merge
    results.sort(key=lambda r: r[0])
    chamber = Chamber(H)
    entries = []
    candidates = walls = filtered = 0
    per_a = []
    for a, (hits, w, visited) in results:
        per_a.append((a, visited, len(hits)))
        candidates += visited
        walls += w
        for K in hits:
            if config is not None and not lift_condition_cor(K, config):
                filtered += 1
                continue
            entries.append((K, sw_rational_surface(K, chamber, spec.n)))
    entries.sort(key=lambda e: e[0])
    return SWReport(tuple(entries), H, spec.n, bound, candidates, walls, filtered, config is not None, tuple(per_a))


def naive_enumerate(n: int, H: Sequence[int], coord_bound: int = 5) -> dict:
    """Unpruned oracle: every odd vector with |coords| <= coord_bound, checked directly."""
    import itertools

    H = tuple(H)
    D = rational_surface(n).wall_constant
    odd = [v for v in range(-coord_bound, coord_bound + 1) if v % 2]
    out = {}
    for K in itertools.product(odd, repeat=n + 1):
        a, b = K[0], K[1:]
        k2 = a * a - sum(x * x for x in b)
        if k2 + D < 0:
            continue
        kH = a * H[0] - sum(x * c for x, c in zip(b, H[1:]))
        if kH == 0:
            continue
        if (a > 0) != (kH > 0):
            # d/2 parity, straight from the formula
            d = (k2 + D) // 4
            out[K] = (-1) ** (d // 2) if a > 0 else (-1) ** (1 + d // 2)
    return out
