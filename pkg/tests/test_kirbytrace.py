import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowdown.formats import builtin_scripts
from blowdown.kirbytrace import (
    HandleLedger,
    Move,
    MoveError,
    MoveScript,
    blow_up,
    blowdown_counts,
    cancel_pair,
    chain_from_ledger,
    create_pair,
    initial_cp2,
    parse_class,
    replay,
    resolve,
    slide,
)
from blowdown.lattice import format_class
from blowdown.rbd import standard_pCq

LIB = builtin_scripts()


def test_initial_ledger():
    L = initial_cp2()
    assert L.euler == 3
    assert L.classes == ((1,),) and L.gram() == ((1,),)
    assert initial_cp2() == L


def test_slide_examples():
    L = create_pair(initial_cp2(), "2-3")
    L = HandleLedger(L.counts, L.classes[::-1], L.ambient_n, L.linking[::-1])  # {0-class, h}
    L = HandleLedger(L.counts, L.classes, L.ambient_n, L.gram())
    L1 = slide(L, 0, 1, 1)
    assert L1.classes == ((1,), (1,))
    L2 = slide(L1, 0, 1, 1)
    assert L2.classes == ((2,), (1,))
    assert L2.euler == L.euler
    assert slide(slide(L2, 0, 1, 1), 0, 1, -1) == L2
    with pytest.raises(MoveError):
        slide(L2, 0, 0)
    with pytest.raises(MoveError):
        slide(L2, 0, 5)


def test_blow_up_examples():
    L = initial_cp2()
    free = blow_up(L)
    assert free.classes[-1] == (0, 1) and free.ambient_n == 1
    assert free.euler == L.euler + 1
    four = HandleLedger((1, 0, 1, 0, 1), ((4,),), 0, ((16,),))
    assert blow_up(four, [(0, 2)]).classes[0] == (4, -2)
    two = HandleLedger((1, 0, 2, 0, 1), ((2,), (4,)), 0, ((4, 8), (8, 16)))
    out = blow_up(two, [(0, 1), (1, 1)])
    assert out.classes[:2] == ((2, -1), (4, -1))
    assert out.check() == []
    with pytest.raises(MoveError):
        blow_up(two, [(0, 1), (0, 1)])


def test_pairs():
    L = create_pair(initial_cp2(), "2-3")
    assert L.counts_dict() == {0: 1, 1: 0, 2: 2, 3: 1, 4: 1}
    assert L.euler == 3
    assert cancel_pair(create_pair(initial_cp2(), "1-2"), "1-2") == initial_cp2()
    with pytest.raises(MoveError):
        cancel_pair(slide(L, 1, 0), "2-3", 1)
    with pytest.raises(MoveError):
        cancel_pair(initial_cp2(), "2-3")
    with pytest.raises(MoveError):
        create_pair(initial_cp2(), "3-4")


def test_parse_and_resolve():
    assert parse_class("4h - e1 - 2e3", 3) == (4, -1, 0, -2)
    assert parse_class(format_class((6, -2, 0, 3)), 3) == (6, -2, 0, 3)
    with pytest.raises(MoveError):
        parse_class("4h - e5", 3)
    with pytest.raises(MoveError):
        parse_class("4x", 3)
    L = create_pair(create_pair(initial_cp2(), "2-3"), "2-3")
    assert resolve(L, "h") == 0
    with pytest.raises(MoveError):
        resolve(L, "0")  # two null handles


def test_first_script():
    r = replay(LIB["lemma-3.1"], LIB)
    assert r.ok, r.failures()
    L = r.ledger
    assert (6,) + (-2,) * 9 in L.classes
    assert L.ambient_n == 9 and L.counts[3] == 2 and L.euler == 12


def test_prop_scripts_match_standard_chains():
    for name, q in (("prop-3.2-q3", 3), ("prop-3.2-q5", 5)):
        r = replay(LIB[name], LIB)
        assert r.ok, r.failures()
        cfg = standard_pCq(2, q)
        for u in cfg.spheres:
            assert u in r.ledger.classes
        assert r.ledger.ambient_n == 8 + q


def test_empty_script_is_identity():
    r = replay(MoveScript("empty", ()))
    assert r.ledger == initial_cp2() and r.ok


@pytest.mark.parametrize("name,counts", [
    ("prop-3.2-q3", [1, 0, 12, 2, 1]),
    ("prop-3.2-q5", [1, 0, 12, 2, 1]),
    ("prop-3.3", [1, 0, 10, 0, 1]),
    ("remark-6.1", [1, 0, 11, 1, 1]),
])
def test_blowdown_counts(name, counts):
    s = LIB[name]
    r = replay(s, LIB)
    assert r.ok, r.failures()
    spec = s.expected["blowdown"]
    got = blowdown_counts(r.ledger, spec["handles"], int(spec["p"]))
    assert [got[k] for k in range(5)] == counts
    assert sum((-1) ** k * c for k, c in enumerate(counts)) == 12


def test_blowdown_counts_rejects_bad_chain():
    r = replay(LIB["lemma-3.1"], LIB)
    with pytest.raises(MoveError):
        blowdown_counts(r.ledger, [0, 1], 3)


def test_failures_are_reported_not_raised():
    bad = MoveScript("bad", (Move("slide", {"handle": 0, "over": 7}),), {"euler": 3})
    r = replay(bad)
    assert not r.ok
    assert r.failures()[0].name.startswith("move 1")
    wrong = MoveScript("wrong", (), {"euler": 4, "classes_present": ["2h"]})
    assert [c.name for c in replay(wrong).failures()] == ["euler", "class 2h present"]


@pytest.mark.parametrize("name", sorted(LIB))
def test_every_prefix_invariants(name):
    s = LIB[name]
    r = replay(s, LIB)
    assert r.ok, r.failures()
    assert len(r.trace) == len(s.moves) + 1
    for before, mv, after in zip(r.trace, s.moves, r.trace[1:]):
        assert after.euler - before.euler == (1 if mv.op == "blow_up" else 0)
        # framing = class square, kept by the independent linking matrix
        assert after.check() == []
        assert sorted(after.linking[i][i] for i in range(len(after.classes))) == sorted(
            after.gram()[i][i] for i in range(len(after.classes)))
    assert replay(s, LIB) == r
    sig = [c for c in r.checks if c.name == "signature"]
    assert sig and sig[0].ok


# random move sequences keep the invariants

move = st.one_of(
    st.tuples(st.just("slide"), st.integers(0, 20), st.integers(0, 20), st.sampled_from([-1, 1])),
    st.tuples(st.just("blow_up"), st.lists(st.tuples(st.integers(0, 20), st.integers(-2, 2)), max_size=3)),
    st.tuples(st.just("create"), st.sampled_from(["2-3", "1-2"])),
    st.tuples(st.just("cancel"), st.sampled_from(["2-3", "1-2"])),
)


@settings(max_examples=150, deadline=None)
@given(st.lists(move, max_size=12))
def test_random_moves_keep_invariants(moves):
    L = initial_cp2()
    for mv in moves:
        e = L.euler
        try:
            if mv[0] == "slide":
                k = len(L.classes)
                nxt = slide(L, mv[1] % k, mv[2] % k, mv[3])
            elif mv[0] == "blow_up":
                k = len(L.classes)
                linked = {}
                for i, m in mv[1]:
                    linked.setdefault(i % k, m)
                nxt = blow_up(L, list(linked.items()))
            elif mv[0] == "create":
                nxt = create_pair(L, mv[1])
            else:
                nxt = cancel_pair(L, mv[1])
        except MoveError:
            continue
        assert nxt.check() == []
        assert nxt.euler - e == (1 if mv[0] == "blow_up" else 0)
        L = nxt
