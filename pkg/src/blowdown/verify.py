"""End-to-end arithmetic checks of the constructions, grouped into sections.

``chains``: the C_p chains.  ``sw``: Gram tables, overlattices, basic
classes and the SW-preserving isomorphism.  ``kirby``: handle-move replays
and handle counts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction

from .basiclasses import SearchSpec, enumerate_basic
from .dataset import PaperDataset, paper_dataset
from .formats import builtin_scripts
from .kirbytrace import blowdown_counts, replay
from .lattice import determinant, format_class, gram_of, inner, is_characteristic, signature, square
from .normalform import build_sw_isomorphism, cone_coherent
from .rbd import (
    blowdown_model,
    chain_gram,
    descend_sw,
    glue_overlattice,
    glue_search,
    lift_condition_cor,
    lift_diagnostic,
    liftable_thm,
    validate_config,
)
from .swchamber import d_invariant, rational_surface

SECTIONS = ("chains", "sw", "kirby")


@dataclass(frozen=True)
class CheckResult:
    section: str
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerifyReport:
    checks: list
    timings: dict

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def first_failure(self):
        return next((c for c in self.checks if not c.ok), None)


class _Collector:
    def __init__(self, section):
        self.section = section
        self.out = []

    def __call__(self, name, ok, detail=""):
        self.out.append(CheckResult(self.section, name, bool(ok), str(detail)))
        return ok


def _i(x):
    return int(x) if isinstance(x, Fraction) and x.denominator == 1 else x


def check_chains(ds: PaperDataset, c: _Collector):
    g3 = ds.c23.gram()
    c("2C3 Gram = [[-2,1],[1,-5]]", g3 == ((-2, 1), (1, -5)), g3)
    c("2C3 det = 9", determinant(g3) == 9, determinant(g3))
    g5 = ds.c25.gram()
    diag = tuple(g5[i][i] for i in range(4))
    c("2C5 chain (-2,-2,-2,-7)", diag == (-2, -2, -2, -7) and g5 == chain_gram(5), diag)
    c("2C5 det = 25", determinant(g5) == 25, determinant(g5))
    msg = validate_config(ds.c5prime)
    c("C5' chain valid", msg is None, msg or "valid")


def check_gram_table(ds: PaperDataset, c: _Collector):
    L = ds.c23.lattice
    a = ds.alphas
    b = ds.beta
    c("α₁²=…=α₈²=−1", all(square(x, L) == -1 for x in a[:8]), [square(x, L) for x in a[:8]])
    c("α₉²=−2", square(a[8], L) == -2, square(a[8], L))
    off = [inner(a[i], a[j], L) for i in range(9) for j in range(i + 1, 9)]
    c("αᵢ·αⱼ=0 (i<j)", not any(off), f"{sum(1 for x in off if x)} nonzero")
    c("β²=0", square(b, L) == 0, square(b, L))
    ba = [inner(b, x, L) for x in a]
    c("β·αᵢ=0 (i≤8)", not any(ba[:8]), ba[:8])
    c("β·α₉=3", ba[8] == 3, ba[8])
    perp = [inner(x, u, L) for x in a + (b,) for u in ds.c23.spheres]
    c("α₁…α₉, β ⟂ 2C3", not any(perp), f"{sum(1 for x in perp if x)} nonzero pairings")


def check_overlattices(ds: PaperDataset, c: _Collector):
    M = rational_surface(11)
    B = blowdown_model(M, ds.c23)
    cdet = abs(determinant(B.complement.gram()))
    c("|det| of 2C3 complement = 9", cdet == 9, cdet)
    try:
        O = glue_overlattice(B, ds.beta)
        sig = signature(O.lattice)
        c("β/3 overlattice unimodular", abs(determinant(O.lattice.gram)) == 1, f"index {O.index}")
        c("β/3 overlattice signature (1,9)", sig[:2] == (1, 9) and not sig[2], sig)
        c("β/3 overlattice is odd", any(O.lattice.gram[i][i] % 2 for i in range(O.lattice.rank)), "")
    except Exception as exc:  # a corrupted beta must show up as a failed check
        c("β/3 overlattice unimodular", False, exc)
    basis = ds.alpha_basis()
    try:
        G = basis.lattice
        c("α₁…α₉, β/3 is a unimodular basis", abs(determinant(G.gram)) == 1, determinant(G.gram))
        pair = tuple(_i(x) for x in basis.pairings(ds.K3_lift))
        c("K₃ pairings (−1×8, 0, −2)", pair == (-1,) * 8 + (0, -2), pair)
        coords = basis.dual_coordinates(ds.K3_lift)
        c("K₃ = α₁+…+α₈−2α₉−4α₁₀", coords == ds.K3_alpha_coords, coords)
    except Exception as exc:
        c("α₁…α₉, β/3 is a unimodular basis", False, exc)
    M13 = rational_surface(13)
    B5 = blowdown_model(M13, ds.c25)
    cdet5 = abs(determinant(B5.complement.gram()))
    c("|det| of 2C5 complement = 25", cdet5 == 25, cdet5)
    try:
        O5 = glue_overlattice(B5, ds.beta5)
        sig5 = signature(O5.lattice)
        c("β₅/5 overlattice unimodular, signature (1,9)", sig5[:2] == (1, 9) and not sig5[2], sig5)
    except Exception as exc:
        c("β₅/5 overlattice unimodular, signature (1,9)", False, exc)
    G5 = ds.alpha5_basis().lattice
    c("α₅,₁…α₅,₉, β₅/5 is a unimodular basis", abs(determinant(G5.gram)) == 1, determinant(G5.gram))


def check_basic_classes(ds: PaperDataset, c: _Collector):
    M11 = rational_surface(11)
    K = ds.K3_lift
    negK = tuple(-x for x in K)
    rep = enumerate_basic(SearchSpec(11, ds.H, ds.c23))
    got = rep.as_dict()
    c("R11, H, 2C3: basic classes = {K̃₃: +1, −K̃₃: −1}", got == {K: 1, negK: -1},
      {format_class(k): v for k, v in got.items()})
    c("d(K̃₃) = 0", d_invariant(K, M11) == 0, d_invariant(K, M11))
    c("R11 search visits ≤ 10⁴ candidates", rep.candidates <= 10 ** 4, rep.candidates)
    c("K̃₃ satisfies the pairing lift test", lift_condition_cor(K, ds.c23), "")
    B = blowdown_model(M11, ds.c23, ds.beta)
    try:
        desc = descend_sw(B, ds.H, K)
        c("SW(K₃) = 1 after blow-down", desc.value == 1 and desc.d_downstairs == 0, desc.value)
    except Exception as exc:
        c("SW(K₃) = 1 after blow-down", False, exc)

    M13 = rational_surface(13)
    Kp = ds.K3p_lift
    negKp = tuple(-x for x in Kp)
    rep = enumerate_basic(SearchSpec(13, ds.Hp, ds.c5prime))
    got = rep.as_dict()
    c("R13, H′, C5′: basic classes = {K̃₃′: +1, −K̃₃′: −1}", got == {Kp: 1, negKp: -1},
      {format_class(k): v for k, v in got.items()})
    c("a_bound(R13, H′) = 5", rep.a_bound == 5, rep.a_bound)
    diag = lift_diagnostic(Kp, ds.c5prime)
    c("K̃₃′ liftable, projection square −4 = 1−5", liftable_thm(Kp, ds.c5prime) and diag.projection_square == -4,
      _i(diag.projection_square))
    c("(−K̃₃′)·H′ = 9", -inner(Kp, ds.Hp, M13.lattice) == 9, -inner(Kp, ds.Hp, M13.lattice))


def paper_isomorphism(ds: PaperDataset):
    """phi': H^2(E3') -> H^2(E(1)_{2,3}) using the dataset's alpha' as the E3' splitter."""
    A = ds.alpha_basis()
    LA = A.lattice
    KA = ds.K3_alpha_coords
    HA = A.dual_coordinates(ds.H)
    M13 = rational_surface(13)
    B = blowdown_model(M13, ds.c5prime)
    g = glue_search(B)[0]
    B = blowdown_model(M13, ds.c5prime, g)
    O = glue_overlattice(B)
    KB = descend_sw(B, ds.Hp, ds.K3p_lift, O).overlattice_class
    HB = O.coordinates(ds.Hp)
    aB = O.coordinates(ds.alpha_p)
    iso = build_sw_isomorphism(LA, KA, HA, O.lattice, KB, HB, splitter_B=aB)
    return iso, (LA, KA, HA), (O.lattice, KB, HB, aB)


def check_reduction(ds: PaperDataset, c: _Collector):
    try:
        iso, (LA, KA, HA), (LB, KB, HB, aB) = paper_isomorphism(ds)
    except Exception as exc:
        c("φ′ construction", False, exc)
        return
    c("K₃′² = 0 and K₃′·α′ = −1, α′² = −1",
      square(KB, LB) == 0 and inner(KB, aB, LB) == -1 and square(aB, LB) == -1, "")
    sb = iso.basis_B
    red = sb.reduction
    c("L₃′ = K₃′ − α′ reduces to (3;1×8)", red.result == (3,) + (1,) * 8 and red.iso.preserves_form(),
      f"{red.reflections} reflections")
    Lp = tuple(k - a for k, a in zip(KB, aB))
    c("L₃′² = 1", square(Lp, LB) == 1, square(Lp, LB))
    c("K₃′ = 3v₁ − v₂ − … − v₁₀", sb.check(), "")
    c("K₃ = 3w₁ − w₂ − … − w₁₀", iso.basis_A.check(), "")
    c("φ′ preserves the form", iso.iso.preserves_form(), "")
    c("φ′(K₃′) = K₃", iso.K_image == tuple(KA) and not iso.negated, iso.K_image)
    p = iso.pairings
    c("(−K₃)·H = 1", p["-KA.HA"] == 1, _i(p["-KA.HA"]))
    c("(−K₃)·φ′(H′) = 9", p["-KA.phi(HB)"] == 9, _i(p["-KA.phi(HB)"]))
    negK = tuple(-x for x in KA)
    try:
        ok = cone_coherent(HA, iso.iso.apply(HB), negK, LA)
    except Exception as exc:
        ok, p["HA.phi(HB)"] = False, exc
    c("H·φ′(H′) > 0 (cone coherence)", ok, _i(p["HA.phi(HB)"]))


def check_kirby(ds: PaperDataset, c: _Collector):
    lib = builtin_scripts()
    results = {}
    for name in ("lemma-3.1", "prop-3.2-q3", "prop-3.2-q5", "prop-3.3", "remark-6.1"):
        r = replay(lib[name], lib)
        results[name] = r
        bad = r.failures()
        c(f"replay {name}", r.ok, "; ".join(f"{x.name}: {x.detail}" for x in bad) or f"{len(r.checks)} checks")
    led = results["lemma-3.1"].ledger
    L9 = rational_surface(9).lattice
    c("lemma-3.1: f present, f² = 0, e = 12",
      ds.f in led.classes and square(ds.f, L9) == 0 and led.euler == 12, led.euler)
    led = results["prop-3.2-q3"].ledger
    c("prop-3.2-q3 carries the 2C3 classes", all(u in led.classes for u in ds.c23.spheres), "")
    led = results["prop-3.2-q5"].ledger
    c("prop-3.2-q5 carries the 2C5 classes", all(u in led.classes for u in ds.c25.spheres), "")

    def counts(name, spheres, p, want):
        led = results[name].ledger
        try:
            got = blowdown_counts(led, [led.classes.index(u) for u in spheres], p)
        except Exception as exc:
            return c(f"{name}: blow-down counts {want}", False, exc)
        vec = [got[k] for k in range(5)]
        e = sum((-1) ** k * x for k, x in enumerate(vec))
        return c(f"{name}: blow-down counts {want}", vec == want and e == 12, f"{vec}, e = {e}")

    counts("prop-3.2-q3", ds.c23.spheres, 3, [1, 0, 12, 2, 1])
    counts("prop-3.2-q5", ds.c25.spheres, 5, [1, 0, 12, 2, 1])
    counts("prop-3.3", ds.c5prime.spheres, 5, [1, 0, 10, 0, 1])
    counts("remark-6.1", ds.c23.spheres, 3, [1, 0, 11, 1, 1])


def verify_paper(ds: PaperDataset | None = None, sections=None) -> VerifyReport:
    ds = ds or paper_dataset()
    sections = tuple(sections or SECTIONS)
    for s in sections:
        if s not in SECTIONS:
            raise ValueError(f"unknown section {s!r} (choose from {', '.join(SECTIONS)})")
    checks = []
    timings = {}
    plan = {
        "chains": [check_chains],
        "sw": [check_gram_table, check_overlattices, check_basic_classes, check_reduction],
        "kirby": [check_kirby],
    }
    for s in SECTIONS:
        if s not in sections:
            continue
        t = time.perf_counter()
        col = _Collector(s)
        for fn in plan[s]:
            fn(ds, col)
        checks.extend(col.out)
        timings[s] = time.perf_counter() - t
    return VerifyReport(checks, timings)


def perturbed(ds: PaperDataset, name: str, index: int, delta: int) -> PaperDataset:
    """A copy of the dataset with one coefficient of a named vector changed."""
    fields = {"beta": "beta", "beta5": "beta5", "H": "H", "H'": "Hp", "K3~": "K3_lift", "K3'~": "K3p_lift",
              "alpha'": "alpha_p", "f": "f"}
    if name.startswith("alpha") and name[5:].isdigit():
        i = int(name[5:]) - 1
        al = list(ds.alphas)
        v = list(al[i])
        v[index] += delta
        al[i] = tuple(v)
        return replace(ds, alphas=tuple(al))
    if name not in fields:
        raise ValueError(f"cannot perturb {name!r}")
    v = list(getattr(ds, fields[name]))
    if not 0 <= index < len(v):
        raise ValueError(f"index {index} out of range for {name}")
    v[index] += delta
    return replace(ds, **{fields[name]: tuple(v)})
