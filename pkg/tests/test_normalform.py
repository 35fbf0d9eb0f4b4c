import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowdown.lattice import diagonal_lattice, identity, inner, is_characteristic, mat_vec, square
from blowdown.normalform import (
    ReductionError,
    build_sw_isomorphism,
    cone_coherent,
    find_splitter,
    orthonormal_basis,
    standard_basis,
    wall_reduce,
)


def std(m):
    return (3,) + (1,) * m


def test_identity_case():
    red = wall_reduce(std(9), 9)
    assert red.result == std(9)
    assert red.iso.images == identity(10)
    assert red.reflections == 0 and not red.orientation_reversed


def test_one_cascade_example():
    K = (5, 3, 3, 1, 1, 1, 1, 1, 1)
    assert square(K, diagonal_lattice(1, 8)) == 1
    red = wall_reduce(K, 8)
    assert red.result == std(8)
    assert red.reflections == 1
    assert red.iso.preserves_form()
    assert red.iso.apply(K) == std(8)


def test_negative_class_flagged():
    K = (-3,) + (-1,) * 9
    red = wall_reduce(K, 9)
    assert red.orientation_reversed
    assert red.result == std(9)
    assert red.iso.apply(K) == std(9)


def test_wall_reduce_preconditions():
    with pytest.raises(ReductionError):
        wall_reduce(std(7), 7)
    with pytest.raises(ReductionError):
        wall_reduce((4,) + (1,) * 9, 9)
    with pytest.raises(ReductionError):
        wall_reduce((5,) + (1,) * 9, 9)  # square off
    with pytest.raises(ReductionError):
        wall_reduce(std(9), 10)
    with pytest.raises(ReductionError):
        wall_reduce((9,) + (3,) * 9, 9)


@pytest.mark.parametrize("K", [(9,) + (3,) * 9 + (1,) * 3, (11, 5) + (3,) * 11])
def test_cascade_fallback_classes(K):
    # the three-largest root pairs to zero here; other reflectors finish the job
    m = len(K) - 1
    red = wall_reduce(K, m)
    assert red.result == std(m) and red.iso.apply(K) == std(m)


def _canonical_classes(m, amax):
    """Every characteristic (a; b) with a > 0, b sorted nonincreasing and positive, K^2 = 9 - m."""
    odd = range(1, amax + 1, 2)
    for a in range(1, amax + 1, 2):
        want = a * a - 9 + m
        for bs in itertools.combinations_with_replacement(range(amax, 0, -2), m):
            if sum(b * b for b in bs) == want:
                yield (a,) + bs


@pytest.mark.parametrize("m", range(8, 13))
def test_exhaustive_small_a(m):
    seen = 0
    for K in _canonical_classes(m, 11):
        for signs in ((1,) * (m + 1), (-1,) * (m + 1), (1,) + tuple((-1) ** i for i in range(m))):
            v = tuple(s * x for s, x in zip(signs, K))
            if math.gcd(*v) != 1:
                # only m = 9 allows multiples such as 3 (3; 1^9); no automorphism makes them primitive
                assert m == 9
                with pytest.raises(ReductionError):
                    wall_reduce(v, m)
                continue
            red = wall_reduce(v, m)
            assert red.result == std(m)
            assert red.iso.apply(v) == std(m)
            assert red.iso.preserves_form()
            assert red.steps <= 10 * (abs(v[0]) + m)
            seen += 1
    assert seen > 0


@st.composite
def scrambled_class(draw):
    """(3; 1^m) pushed away from normal form by random signed permutations and reflections."""
    m = draw(st.integers(8, 12))
    L = diagonal_lattice(1, m)
    K = list(std(m))
    for _ in range(draw(st.integers(0, 12))):
        i, j, k = draw(st.lists(st.integers(1, m), min_size=3, max_size=3, unique=True))
        r = [0] * (m + 1)
        r[0] = 1
        for idx in (i, j, k):
            r[idx] = draw(st.sampled_from([-1, 1]))
        kr = inner(K, r, L)
        K = [x + kr * y for x, y in zip(K, r)]
        if abs(K[0]) > 99:
            break
    if draw(st.booleans()):
        K = [-x for x in K]
    return m, tuple(K)


@settings(max_examples=300, deadline=None)
@given(scrambled_class())
def test_wall_reduce_random(data):
    m, K = data
    L = diagonal_lattice(1, m)
    assert is_characteristic(K, L) and square(K, L) == 9 - m
    red = wall_reduce(K, m)
    assert red.result == std(m)
    assert red.iso.apply(K) == std(m)
    assert red.iso.preserves_form()
    assert red.steps <= 10 * (abs(K[0]) + m)


def test_cone_coherent_examples():
    L = diagonal_lattice(1, 2)
    assert cone_coherent((1, 0, 0), (2, 1, 1), (1, 1, 0), L)
    assert cone_coherent((1, 0, 0), (1, 0, 0), (1, 0, 0), L)
    with pytest.raises(ReductionError):
        cone_coherent((1, 0, 0), (0, 1, 0), (1, 0, 0), L)
    with pytest.raises(ReductionError):
        cone_coherent((1, 0, 0), (-1, 0, 0), (1, 0, 0), L)
    with pytest.raises(ReductionError):
        cone_coherent((1, 0, 0), (1, 0, 0), (1, 0, 0), diagonal_lattice(2, 1))


def _positive(rng_int, n, strict):
    """A vector of positive (or, if not strict, nonnegative) square with random cone side."""
    c = [rng_int(-5, 5) for _ in range(n)]
    s = sum(x * x for x in c)
    a = math.isqrt(s)
    if a * a < s or strict:
        a += 1
    a += rng_int(0, 3) if a else 1
    return tuple(x * (1 if rng_int(0, 1) else -1) for x in (a,) + tuple(c))


@st.composite
def cone_triple(draw):
    n = draw(st.integers(1, 12))
    rng_int = lambda lo, hi: draw(st.integers(lo, hi))
    u, v, w = _positive(rng_int, n, True), _positive(rng_int, n, True), _positive(rng_int, n, False)
    return diagonal_lattice(1, n), u, v, w


def _preconditions(L, u, v, w):
    return inner(u, w, L) > 0 and inner(v, w, L) > 0


@settings(max_examples=1000, deadline=None)
@given(cone_triple())
def test_cone_coherence_hypothesis(data):
    L, u, v, w = data
    if _preconditions(L, u, v, w):
        assert cone_coherent(u, v, w, L)
    else:
        with pytest.raises(ReductionError):
            cone_coherent(u, v, w, L)


def test_cone_coherence_ten_thousand():
    rng = random.Random(20261019)
    lattices = {n: diagonal_lattice(1, n) for n in range(1, 13)}
    hits = 0
    while hits < 10**4:
        n = rng.randint(1, 12)
        L = lattices[n]
        u, v, w = (_positive(rng.randint, n, s) for s in (True, True, False))
        if not _preconditions(L, u, v, w):
            continue
        assert cone_coherent(u, v, w, L)
        hits += 1


def test_orthonormal_basis_recovers_diagonal():
    L = diagonal_lattice(1, 9)
    W = orthonormal_basis(L.gram, (1,) + (0,) * 9)
    assert [square(w, L) for w in W] == [1] + [-1] * 9
    assert all(inner(W[i], W[j], L) == 0 for i in range(10) for j in range(i))


def test_standard_basis_alpha_lattice(ds):
    basis = ds.alpha_basis()
    L = basis.lattice
    K = ds.K3_alpha_coords
    Hc = basis.dual_coordinates(ds.H)
    sb = standard_basis(L, K, Hc)
    assert sb.check()
    assert sb.splitter is not None
    assert inner(sb.splitter, K, L) == -1 and square(sb.splitter, L) == -1


def test_splitter_makes_square_one(ds):
    basis = ds.alpha_basis()
    L = basis.lattice
    K = ds.K3_alpha_coords
    alpha = find_splitter(L, K, basis.dual_coordinates(ds.H))
    rest = tuple(k - a for k, a in zip(K, alpha))
    assert square(rest, L) == 1


def test_reflexive_isomorphism(ds):
    basis = ds.alpha_basis()
    L = basis.lattice
    K = ds.K3_alpha_coords
    Hc = basis.dual_coordinates(ds.H)
    sw = build_sw_isomorphism(L, K, Hc, L, K, Hc)
    assert not sw.negated
    assert sw.iso.images == identity(10)
    assert sw.K_image == K


def test_rank9_isomorphism_between_forms():
    L = diagonal_lattice(1, 8)
    K = (5, 3, 3, 1, 1, 1, 1, 1, 1)
    sw = build_sw_isomorphism(L, std(8), (1,) + (0,) * 8, L, K, (5,) + (0,) * 8)
    assert sw.iso.preserves_form()
    assert sw.K_image in (std(8), tuple(-x for x in std(8)))
    assert sw.pairings["HA.phi(HB)"] > 0
