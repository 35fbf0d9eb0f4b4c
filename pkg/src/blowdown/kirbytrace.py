"""Homological Kirby calculus: handle counts plus the classes carried by 2-handles.

A ledger never sees a link diagram.  It records how many k-handles there
are, the class of each 2-handle in CP^2 # n(-CP^2), and the linking matrix
(framings on the diagonal).  The linking matrix is updated by its own rules
and must agree with the Gram matrix of the classes after every move.

Moves reference 2-handles either by index or by their current class written
as text, e.g. ``"4h - 2e1 - 2e2"``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

from .lattice import diagonal_lattice, format_class, inner, signature
from .rbd import CpConfiguration, betti_after_blowdown, validate_config
from .swchamber import rational_surface


class MoveError(ValueError):
    pass


@dataclass(frozen=True)
class HandleLedger:
    counts: tuple = (1, 0, 1, 0, 1)
    classes: tuple = ((1,),)
    ambient_n: int = 0
    linking: tuple = ((1,),)

    @property
    def euler(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.counts))

    def counts_dict(self) -> dict:
        return {k: c for k, c in enumerate(self.counts)}

    def formatted(self) -> list:
        return [format_class(c) for c in self.classes]

    def gram(self) -> tuple:
        # the ambient is always <1> + n<-1>, so pair coordinates directly
        return tuple(tuple(u[0] * v[0] - sum(a * b for a, b in zip(u[1:], v[1:])) for v in self.classes)
                     for u in self.classes)

    def check(self) -> list:
        """Invariant violations, empty when the ledger is consistent."""
        bad = []
        if self.counts[2] != len(self.classes):
            bad.append(f"counts[2] = {self.counts[2]} but {len(self.classes)} classes")
        if any(len(c) != self.ambient_n + 1 for c in self.classes):
            bad.append("class of the wrong length")
        if self.linking != self.gram():
            bad.append("linking matrix differs from the Gram matrix of the classes")
        if min(self.counts) < 0:
            bad.append("negative handle count")
        return bad


def initial_cp2() -> HandleLedger:
    return HandleLedger()


def parse_class(text: str, n: int) -> tuple:
    """Inverse of format_class for classes in <1> + n<-1>."""
    s = text.replace(" ", "")
    if s == "0":
        return (0,) * (n + 1)
    if not s or s[0] not in "+-":
        s = "+" + s
    out = [0] * (n + 1)
    pos = 0
    for m in re.finditer(r"([+-])(\d*)(h|e(\d+))", s):
        if m.start() != pos:
            raise MoveError(f"cannot parse class {text!r}")
        pos = m.end()
        coef = int(m.group(2) or 1) * (-1 if m.group(1) == "-" else 1)
        idx = 0 if m.group(3) == "h" else int(m.group(4))
        if idx > n or (m.group(3) != "h" and idx == 0):
            raise MoveError(f"{text!r} mentions e{idx} but only e1..e{n} exist")
        out[idx] += coef
    if pos != len(s):
        raise MoveError(f"cannot parse class {text!r}")
    return tuple(out)


def resolve(L: HandleLedger, ref) -> int:
    """Index of a 2-handle given as an int or as its current class."""
    if isinstance(ref, bool):
        raise MoveError(f"bad handle reference {ref!r}")
    if isinstance(ref, int):
        if not 0 <= ref < len(L.classes):
            raise MoveError(f"handle index {ref} out of range (0..{len(L.classes) - 1})")
        return ref
    if isinstance(ref, str):
        v = parse_class(ref, L.ambient_n)
        hits = [i for i, c in enumerate(L.classes) if c == v]
        if not hits:
            raise MoveError(f"no 2-handle with class {ref!r}")
        if len(hits) > 1:
            raise MoveError(f"class {ref!r} is carried by {len(hits)} handles; use an index")
        return hits[0]
    raise MoveError(f"bad handle reference {ref!r}")


def _bump(counts, k, d):
    c = list(counts)
    c[k] += d
    return tuple(c)


def slide(L: HandleLedger, i, j, sign: int = 1) -> HandleLedger:
    """Handle i slides over handle j: class_i += sign * class_j."""
    i, j = resolve(L, i), resolve(L, j)
    if i == j:
        raise MoveError("a handle cannot slide over itself")
    if sign not in (1, -1):
        raise MoveError("slide sign must be +1 or -1")
    classes = list(L.classes)
    classes[i] = tuple(a + sign * b for a, b in zip(classes[i], classes[j]))
    lk = [list(r) for r in L.linking]
    n = len(lk)
    for k in range(n):
        lk[i][k] += sign * lk[j][k]
    for k in range(n):
        lk[k][i] += sign * lk[k][j]
    return replace(L, classes=tuple(classes), linking=tuple(tuple(r) for r in lk))


def blow_up(L: HandleLedger, linked: Sequence = ()) -> HandleLedger:
    """Add a -1 handle e_new; each listed (handle, m) loses m e_new."""
    mult = {}
    for ref, m in linked:
        i = resolve(L, ref)
        if i in mult:
            raise MoveError(f"handle {i} listed twice in one blow-up")
        mult[i] = int(m)
    n = L.ambient_n + 1
    classes = [c + (0,) for c in L.classes]
    for i, m in mult.items():
        classes[i] = classes[i][:-1] + (-m,)
    classes.append((0,) * n + (1,))
    k = len(L.classes)
    lk = [list(r) + [mult.get(a, 0)] for a, r in enumerate(L.linking)]
    lk.append([mult.get(a, 0) for a in range(k)] + [-1])
    for a in mult:
        for b in mult:
            lk[a][b] -= mult[a] * mult[b]
    return HandleLedger(
        _bump(L.counts, 2, 1), tuple(classes), n, tuple(tuple(r) for r in lk)
    )


def _kinds(kind):
    if kind == "2-3":
        return 3
    if kind == "1-2":
        return 1
    raise MoveError(f"unknown pair kind {kind!r} (use '2-3' or '1-2')")


def create_pair(L: HandleLedger, kind: str) -> HandleLedger:
    """A cancelling pair; its 2-handle is null-homologous and unlinked."""
    other = _kinds(kind)
    k = len(L.classes)
    lk = [list(r) + [0] for r in L.linking] + [[0] * (k + 1)]
    counts = _bump(_bump(L.counts, 2, 1), other, 1)
    classes = L.classes + ((0,) * (L.ambient_n + 1),)
    return HandleLedger(counts, classes, L.ambient_n, tuple(tuple(r) for r in lk))


def cancel_pair(L: HandleLedger, kind: str, handle=None) -> HandleLedger:
    other = _kinds(kind)
    if L.counts[other] < 1:
        raise MoveError(f"no {other}-handle left to cancel")
    if handle is None:
        zeros = [i for i, c in enumerate(L.classes) if not any(c)]
        if not zeros:
            raise MoveError("no null-homologous 2-handle to cancel")
        i = zeros[-1]
    else:
        i = resolve(L, handle)
    if any(L.classes[i]):
        raise MoveError(f"2-handle {i} carries {format_class(L.classes[i])}, not 0; cannot cancel")
    classes = L.classes[:i] + L.classes[i + 1:]
    lk = tuple(tuple(x for b, x in enumerate(r) if b != i) for a, r in enumerate(L.linking) if a != i)
    counts = _bump(_bump(L.counts, 2, -1), other, -1)
    return HandleLedger(counts, classes, L.ambient_n, lk)


# ---------------------------------------------------------------------------
# scripts


@dataclass(frozen=True)
class Move:
    op: str
    args: dict = field(default_factory=dict)
    note: str = ""


@dataclass(frozen=True)
class MoveScript:
    name: str
    moves: tuple
    expected: dict = field(default_factory=dict)
    start: str | None = None  # name of a script whose result is the starting ledger
    description: str = ""


def apply_move(L: HandleLedger, mv: Move) -> HandleLedger:
    a = mv.args
    if mv.op == "slide":
        return slide(L, a["handle"], a["over"], int(a.get("sign", 1)))
    if mv.op == "blow_up":
        return blow_up(L, [tuple(x) for x in a.get("linked", [])])
    if mv.op == "create_pair":
        return create_pair(L, a["kind"])
    if mv.op == "cancel_pair":
        return cancel_pair(L, a["kind"], a.get("handle"))
    if mv.op == "isotopy":
        return L
    raise MoveError(f"unknown move {mv.op!r}")


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ReplayResult:
    script: str
    ledger: HandleLedger
    trace: tuple  # ledger after each move, starting with the initial one
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]


def replay(script: MoveScript, library: dict | None = None, start: HandleLedger | None = None) -> ReplayResult:
    """Run a script, checking the ledger invariants after every move and the expectations at the end.

    Problems are collected into the checks, never raised.
    """
    checks = []
    if start is None:
        start = initial_cp2()
        if script.start:
            try:
                start = _start_ledger(script.start, library or {}, ())
            except MoveError as exc:
                checks.append(Check(f"start from {script.start}", False, str(exc)))
    L = start
    trace = [L]
    for step, mv in enumerate(script.moves, 1):
        try:
            nxt = apply_move(L, mv)
        except (MoveError, KeyError, TypeError, ValueError) as exc:
            checks.append(Check(f"move {step} ({mv.op})", False, str(exc)))
            break
        de = nxt.euler - L.euler
        want = 1 if mv.op == "blow_up" else 0
        if de != want:
            checks.append(Check(f"move {step} euler", False, f"euler changed by {de}, expected {want}"))
        for msg in nxt.check():
            checks.append(Check(f"move {step} invariants", False, msg))
        L = nxt
        trace.append(L)
    checks.extend(_expectations(L, script.expected))
    return ReplayResult(script.name, L, tuple(trace), tuple(checks))


def _start_ledger(name: str, library: dict, seen: tuple) -> HandleLedger:
    """Final ledger of a library script, applying its moves without re-checking expectations."""
    if name in seen:
        raise MoveError(f"scripts start from each other in a cycle: {' -> '.join(seen + (name,))}")
    base = library.get(name)
    if base is None:
        raise MoveError("unknown script")
    L = _start_ledger(base.start, library, seen + (name,)) if base.start else initial_cp2()
    for mv in base.moves:
        L = apply_move(L, mv)
    return L


def _expectations(L: HandleLedger, exp: dict) -> list:
    out = []
    if not exp:
        return out
    if "euler" in exp:
        out.append(Check("euler", L.euler == exp["euler"], f"e = {L.euler}"))
    if "ambient_n" in exp:
        out.append(Check("ambient_n", L.ambient_n == exp["ambient_n"], f"n = {L.ambient_n}"))
    if "counts" in exp:
        want = tuple(int(exp["counts"].get(k, exp["counts"].get(str(k), 0))) for k in range(5))
        out.append(Check("counts", L.counts == want, f"counts = {list(L.counts)}"))
    if "signature" in exp:
        bp, bm, null = signature(L.linking)
        want = tuple(exp["signature"])
        ok = (bp, bm) == want and null == L.counts[1] + L.counts[3]
        out.append(Check("signature", ok, f"linking form has inertia ({bp}, {bm}, null {null})"))
    for text in exp.get("classes_present", []):
        try:
            v = _as_class(text, L.ambient_n)
        except MoveError as exc:
            out.append(Check(f"class {text}", False, str(exc)))
            continue
        hit = v in L.classes
        out.append(Check(f"class {format_class(v)} present", hit, "" if hit else "missing"))
    for text, sq in exp.get("squares", {}).items():
        v = _as_class(text, L.ambient_n)
        got = inner(v, v, diagonal_lattice(1, L.ambient_n))
        out.append(Check(f"{format_class(v)} squared", got == sq, f"square = {got}"))
    if "chain" in exp:
        spec = exp["chain"]
        try:
            cfg = chain_from_ledger(L, spec["handles"], int(spec["p"]))
            msg = validate_config(cfg)
            out.append(Check(f"C_{spec['p']} chain", msg is None, msg or "valid"))
        except MoveError as exc:
            out.append(Check(f"C_{spec['p']} chain", False, str(exc)))
    if "blowdown" in exp:
        spec = exp["blowdown"]
        try:
            got = blowdown_counts(L, spec["handles"], int(spec["p"]))
            want = {k: int(spec["counts"].get(k, spec["counts"].get(str(k), 0))) for k in range(5)}
            out.append(Check("blow-down handle counts", got == want, f"counts = {[got[k] for k in range(5)]}"))
        except MoveError as exc:
            out.append(Check("blow-down handle counts", False, str(exc)))
    return out


def _as_class(x, n):
    if isinstance(x, str):
        return parse_class(x, n)
    v = tuple(int(c) for c in x)
    if len(v) != n + 1:
        raise MoveError(f"class {list(v)} has length {len(v)}, ambient needs {n + 1}")
    return v


def chain_from_ledger(L: HandleLedger, handles: Sequence, p: int) -> CpConfiguration:
    idx = [resolve(L, h) for h in handles]
    if len(idx) != p - 1:
        raise MoveError(f"C_{p} needs {p - 1} handles, got {len(idx)}")
    lat = diagonal_lattice(1, L.ambient_n, f"R{L.ambient_n}")
    return CpConfiguration(p, tuple(L.classes[i] for i in idx), lat)


def blowdown_counts(L: HandleLedger, cfg_handles: Sequence, p: int) -> dict:
    """Handle counts after rationally blowing down the chain carried by ``cfg_handles``.

    a chain drawn with 2-handles only) costs no 1-handles; everything else is kept.
    in the handle count) costs no 1-handles; everything else is kept.
    """
    if L.counts[0] != 1 or L.counts[4] != 1 or L.counts[1] != 0:
        raise MoveError("ledger must have one 0-handle, one 4-handle and no 1-handles")
    cfg = chain_from_ledger(L, cfg_handles, p)
    msg = validate_config(cfg)
    if msg is not None:
        raise MoveError(f"chain handles do not form C_{p}: {msg}")
    if len(set(resolve(L, h) for h in cfg_handles)) != p - 1:
        raise MoveError("chain handles must be distinct")
    out = {0: 1, 1: 0, 2: L.counts[2] - (p - 1), 3: L.counts[3], 4: 1}
    e = sum((-1) ** k * c for k, c in out.items())
    bp, bm = betti_after_blowdown(rational_surface(L.ambient_n), cfg)
    if e != 2 + bp + bm:
        raise MoveError(f"euler {e} of the counts disagrees with 2 + b2 = {2 + bp + bm}")
    return out
