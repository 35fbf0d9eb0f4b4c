from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowdown.lattice import DegenerateError, determinant, diagonal_lattice, inner, is_characteristic, signature, square
from blowdown.rbd import (
    ConfigurationError,
    CpConfiguration,
    OverlatticeError,
    blowdown_model,
    chain_gram,
    delta_exists,
    descend_sw,
    find_chain_configurations,
    glue_overlattice,
    glue_search,
    lift_condition_cor,
    lift_diagnostic,
    liftable_thm,
    splitting_index,
    standard_pCq,
    validate_config,
)
from blowdown.swchamber import ChamberError, d_invariant, rational_surface

from helpers import CONFIGS, cor_lift

R11 = diagonal_lattice(1, 11)
K3 = (3,) + (-1,) * 11
H = (7,) + (-2,) * 11
PDh = (1,) + (0,) * 11
# PD(h) itself is not characteristic in R11; its nearest characteristic stand-in
HCHAR = (1,) + (-1,) * 11


def test_chain_gram():
    assert chain_gram(2) == ((-4,),)
    assert chain_gram(3) == ((-2, 1), (1, -5))
    assert chain_gram(5)[3] == (0, 0, 1, -7)


def test_validate_config_examples(ds):
    assert validate_config(ds.c23) is None
    assert ds.c23.gram() == ((-2, 1), (1, -5))
    assert validate_config(ds.c25) is None
    assert [ds.c25.gram()[i][i] for i in range(4)] == [-2, -2, -2, -7]
    L = diagonal_lattice(1, 3)
    bad = CpConfiguration(3, [(0, 1, -1, 0), (0, 0, 1, -1)], L)
    msg = validate_config(bad)
    assert msg is not None and "u2" in msg and "-2" in msg and "-5" in msg


def test_standard_pCq_examples():
    c = standard_pCq(2, 3)
    assert c.spheres == ((0,) + (0,) * 9 + (1, -1), (6,) + (-2,) * 9 + (-2, -1))
    c5 = standard_pCq(2, 5)
    assert len(c5.spheres) == 4
    assert c5.spheres[-1] == (6,) + (-2,) * 9 + (-2, -1, -1, -1)
    c12 = standard_pCq(1, 2)
    assert c12.spheres == ((3,) + (-1,) * 9 + (-2,),)
    assert square(c12.spheres[0], c12.lattice) == -4
    with pytest.raises(ConfigurationError):
        standard_pCq(0, 3)
    with pytest.raises(ConfigurationError):
        standard_pCq(2, 1)


@pytest.mark.parametrize("p", range(2, 8))
def test_det_is_p_squared(p):
    cfg = standard_pCq(2, p)
    assert validate_config(cfg) is None
    assert abs(determinant(cfg.gram())) == p * p


def test_lift_condition_cor_examples(ds):
    assert inner(K3, ds.c23.spheres[0], R11) == 0
    assert inner(K3, ds.c23.spheres[1], R11) == -3
    assert lift_condition_cor(K3, ds.c23)
    assert inner(PDh, ds.c23.spheres[1], R11) == 6
    assert not lift_condition_cor(HCHAR, ds.c23)
    with pytest.raises(ChamberError):
        lift_condition_cor((0,) * 12, ds.c23)


def test_liftable_thm_examples(ds):
    diag = lift_diagnostic(K3, ds.c23)
    assert diag.dual_coords == (Fraction(1, 3), Fraction(2, 3))
    assert diag.projection_square == -2
    assert liftable_thm(K3, ds.c23)
    d5 = lift_diagnostic(ds.K3p_lift, ds.c5prime)
    assert d5.projection_square == -4
    assert liftable_thm(ds.K3p_lift, ds.c5prime)
    assert lift_diagnostic(HCHAR, ds.c23).projection_square != -2
    assert not liftable_thm(HCHAR, ds.c23)


def test_delta_exists(ds):
    for cfg in (ds.c23, ds.c25):
        d = delta_exists(cfg)
        assert d is not None
        assert inner(d, cfg.spheres[0], cfg.lattice) == 1
        assert all(inner(d, u, cfg.lattice) == 0 for u in cfg.spheres[1:])
    L = diagonal_lattice(1, 2)
    cfg = CpConfiguration(2, [(0, 2, -2)], L)
    assert delta_exists(cfg) is None


def test_splitting_index(ds):
    assert splitting_index(ds.c23) == 9
    assert splitting_index(ds.c25) == 25
    for mult in (1, 2):
        for q in range(2, 8):
            cfg = standard_pCq(mult, q)
            if delta_exists(cfg) is None:
                # 2C_q with q even: every class pairs evenly with u1 once the others vanish
                assert mult == 2 and q % 2 == 0
                assert splitting_index(cfg) != q * q
                continue
            assert splitting_index(cfg) == q * q


def test_glue_overlattice(ds):
    B = blowdown_model(rational_surface(11), ds.c23)
    assert abs(determinant(B.complement.gram())) == 9
    over = glue_overlattice(B, ds.beta)
    assert abs(determinant(over.lattice.gram)) == 1
    assert signature(over.lattice) == (1, 9, 0)
    assert any(over.lattice.gram[i][i] % 2 for i in range(10))  # odd
    assert over.index == 3
    B5 = blowdown_model(rational_surface(13), ds.c25)
    over5 = glue_overlattice(B5, ds.beta5)
    assert abs(determinant(over5.lattice.gram)) == 1
    assert signature(over5.lattice) == (1, 9, 0)
    assert over5.index == 5
    with pytest.raises(OverlatticeError):
        glue_overlattice(B, ds.c23.spheres[0])
    with pytest.raises(OverlatticeError):
        glue_overlattice(B)


def test_glue_search_finds_beta_class(ds):
    B = blowdown_model(rational_surface(11), ds.c23)
    found = glue_search(B)
    assert found
    # beta/3 generates the same overlattice as some found glue
    over = glue_overlattice(B, ds.beta)
    assert any(over.coordinates(tuple(Fraction(x, 3) for x in g)) is not None for g in found)


def test_descend_sw(ds):
    B = blowdown_model(rational_surface(11), ds.c23, ds.beta)
    dsc = descend_sw(B, H, K3)
    assert dsc.value == 1
    basis = ds.alpha_basis()
    assert basis.pairings(K3) == (-1,) * 8 + (0, -2)
    assert dsc.d_upstairs == dsc.d_downstairs == 0
    B5 = blowdown_model(rational_surface(13), ds.c5prime)
    assert descend_sw(B5, ds.Hp, ds.K3p_lift).value == 1
    with pytest.raises(ChamberError):
        descend_sw(B, PDh, K3)


def test_find_chain_recovers_c5prime(ds):
    found = find_chain_configurations(ds.c5prime.lattice, 5, ds.Hp, ds.K3p_lift)
    assert found
    cfg = found[0]
    assert validate_config(cfg) is None
    assert all(inner(ds.Hp, u, cfg.lattice) == 0 for u in cfg.spheres)
    assert lift_condition_cor(ds.K3p_lift, cfg)


def test_blowdown_model_checks(ds):
    with pytest.raises(ConfigurationError):
        blowdown_model(rational_surface(12), ds.c23)
    with pytest.raises(ConfigurationError):
        CpConfiguration(3, [(1,) * 12], R11)


# ---------------------------------------------------------------------------
# properties

odd = st.integers(-4, 4).map(lambda x: 2 * x + 1)


@pytest.mark.parametrize("p", [2, 3, 5])
@settings(max_examples=350, deadline=None)
@given(st.data())
def test_cor_implies_thm(p, data):
    cfg = CONFIGS[p]
    n = cfg.lattice.rank
    if data.draw(st.booleans()):
        K = cor_lift(p, data.draw(odd), [data.draw(odd) for _ in range(9)], data.draw(st.sampled_from([-1, 1])))
        assert lift_condition_cor(K, cfg)
    else:
        K = tuple(data.draw(odd) for _ in range(n))
    assert is_characteristic(K, cfg.lattice)
    if lift_condition_cor(K, cfg):
        assert liftable_thm(K, cfg)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_cor_implies_thm_on_lifts(p):
    """Directly constructed lifts meeting the congruence shortcut also pass the full lift test."""
    cfg = CONFIGS[p]
    L = cfg.lattice
    hits = 0
    for K in ((3,) + (-1,) * (L.rank - 1), (3,) + (1,) * (L.rank - 1), (-3,) + (1,) * (L.rank - 1)):
        if lift_condition_cor(K, cfg):
            hits += 1
            assert liftable_thm(K, cfg)
    assert hits >= 1


def test_descend_preserves_d(ds):
    B = blowdown_model(rational_surface(11), ds.c23, ds.beta)
    for K in (K3, tuple(-x for x in K3)):
        dsc = descend_sw(B, H, K)
        assert dsc.d_downstairs == d_invariant(K, rational_surface(11))
        assert dsc.square_downstairs == 0
