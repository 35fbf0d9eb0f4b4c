"""Command-line driver.

Exit codes: 0 success, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import formats
from .formats import InputError, dump_yaml


def _plain(x):
    """JSON/YAML friendly copy: tuples to lists, integral fractions to ints, others to 'a/b'."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    return x


def _emit(data: dict, as_json: bool, out):
    data = _plain(data)
    if as_json:
        out.write(json.dumps(data, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(dump_yaml(data))


def _load_manifest(ref: str):
    lib = formats.builtin_manifests()
    if ref in lib and not Path(ref).exists():
        return lib[ref]
    return formats.parse_manifest(Path(ref))


def _load_script(ref: str):
    lib = formats.builtin_scripts()
    if ref in lib and not Path(ref).exists():
        return lib[ref], lib
    s = formats.parse_script(Path(ref))
    return s, {**lib, s.name: s}


# ---------------------------------------------------------------------------


def cmd_verify_paper(args, out) -> int:
    from .dataset import paper_dataset
    from .verify import perturbed, verify_paper

    ds = paper_dataset()
    for spec in args.perturb or []:
        try:
            name, idx, delta = spec.rsplit(":", 2)
            ds = perturbed(ds, name, int(idx), int(delta))
        except ValueError as exc:
            raise InputError(f"bad --perturb {spec!r}: {exc}") from None
    try:
        rep = verify_paper(ds, args.section)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.json:
        _emit({"ok": rep.ok, "checks": [
            {"section": c.section, "name": c.name, "ok": c.ok, "detail": c.detail} for c in rep.checks
        ]}, True, out)
    else:
        for c in rep.checks:
            out.write(f"{'PASS' if c.ok else 'FAIL'}\t{c.section}\t{c.name}\t{c.detail}\n")
        failed = [c for c in rep.checks if not c.ok]
        out.write(f"# {len(rep.checks) - len(failed)} passed, {len(failed)} failed\n")
        if failed:
            out.write(f"# first failure: {failed[0].name}\n")
    if args.plot_dir:
        _verify_plots(ds, Path(args.plot_dir), args.section, out)
    return 0 if rep.ok else 1


def _verify_plots(ds, d: Path, sections, out):
    from . import plots
    from .basiclasses import SearchSpec, enumerate_basic
    from .kirbytrace import replay

    sections = sections or ["chains", "sw", "kirby"]
    made = []
    if "chains" in sections:
        made.append(plots.plot_gram(ds.c25.gram(), d / "chain-2C5.png", "2C5 chain Gram"))
    if "sw" in sections:
        try:
            made.append(plots.plot_gram(ds.alpha_basis().lattice.gram, d / "alpha-basis-gram.png",
                                        "alpha_1..alpha_9, beta/3", [f"a{i}" for i in range(1, 11)]))
        except ValueError:
            pass
        made.append(plots.plot_search(enumerate_basic(SearchSpec(11, ds.H, ds.c23)), d / "search-r11.png"))
        made.append(plots.plot_search(enumerate_basic(SearchSpec(13, ds.Hp, ds.c5prime)), d / "search-r13.png"))
    if "kirby" in sections:
        lib = formats.builtin_scripts()
        for name in sorted(lib):
            made.append(plots.plot_ledger(replay(lib[name], lib), d / f"ledger-{name}.png"))
    for p in made:
        out.write(f"# plot: {p}\n")


def cmd_enumerate(args, out) -> int:
    from .basiclasses import SearchSpec, enumerate_basic, enumerate_unfiltered
    from .lattice import format_class

    m = _load_manifest(args.manifest)
    if m.pos != 1:
        raise InputError("enumerate needs an ambient of the form pos: 1")
    if m.chamber is None:
        raise InputError("manifest has no chamber")
    cfg = None
    if args.config is not None:
        if args.config == "manifest":
            cfg = m.config()
            if cfg is None:
                raise InputError("--config given but the manifest has no configuration")
        else:
            from .dataset import paper_dataset

            named = {"2C3": "c23", "2C5": "c25", "C5'": "c5prime"}
            if args.config not in named:
                raise InputError(f"unknown configuration {args.config!r} (choose from {', '.join(named)})")
            cfg = getattr(paper_dataset(), named[args.config])
    spec = SearchSpec(m.neg, m.vector(m.chamber), cfg, args.a_bound)
    rep = enumerate_basic(spec, args.workers) if cfg is not None else enumerate_unfiltered(spec, args.workers)
    data = {
        "n": rep.n,
        "chamber": list(rep.chamber),
        "a_bound": rep.a_bound,
        "lift_filter": rep.lift_filter,
        "candidates": rep.candidates,
        "walls": rep.walls,
        "filtered": rep.filtered,
        "entries": [{"class": list(k), "text": format_class(k), "sw": v} for k, v in rep.entries],
    }
    _emit(data, args.json, out)
    if args.plot_dir:
        from . import plots

        p = plots.plot_search(rep, Path(args.plot_dir) / f"search-{m.name or 'manifest'}.png")
        out.write(f"# plot: {p}\n")
    return 0


def cmd_replay(args, out) -> int:
    from .kirbytrace import replay

    script, lib = _load_script(args.script)
    r = replay(script, lib)
    data = {
        "script": r.script,
        "ok": r.ok,
        "counts": list(r.ledger.counts),
        "euler": r.ledger.euler,
        "ambient_n": r.ledger.ambient_n,
        "classes": r.ledger.formatted(),
        "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in r.checks],
    }
    _emit(data, args.json, out)
    if not args.json:
        out.write(f"# {'PASS' if r.ok else 'FAIL'} {r.script}\n")
    if args.plot_dir:
        from . import plots

        p = plots.plot_ledger(r, Path(args.plot_dir) / f"ledger-{r.script}.png")
        out.write(f"# plot: {p}\n")
    return 0 if r.ok else 1


def cmd_reduce(args, out) -> int:
    from .normalform import wall_reduce

    m = _load_manifest(args.manifest)
    if m.pos != 1:
        raise InputError("reduce needs an ambient of the form pos: 1")
    K = m.vector(args.vector)
    red = wall_reduce(K, m.neg)
    data = {
        "input": list(K),
        "result": list(red.result),
        "reflections": red.reflections,
        "orientation_reversed": red.orientation_reversed,
        "identity": red.iso.images == tuple(tuple(1 if i == j else 0 for i in range(len(K))) for j in range(len(K))),
        "images": [list(v) for v in red.iso.images],
    }
    _emit(data, args.json, out)
    return 0


def cmd_lattice(args, out) -> int:
    from .lattice import (
        determinant,
        gram_of,
        is_characteristic,
        orthogonal_complement,
        signature,
    )

    m = _load_manifest(args.manifest)
    L = m.lattice()
    names = args.names or (list(m.config_spheres) if m.config_p else [])
    vecs = [m.vector(n) for n in names]
    op = args.op
    if op == "gram":
        if not vecs:
            raise InputError("gram needs vector names")
        data = {"vectors": names, "gram": [list(r) for r in gram_of(vecs, L)]}
    elif op == "det":
        G = gram_of(vecs, L) if vecs else L.gram
        data = {"vectors": names or "ambient", "det": determinant(G)}
    elif op == "signature":
        G = gram_of(vecs, L) if vecs else L.gram
        bp, bm, null = signature(G)
        data = {"vectors": names or "ambient", "signature": [bp, bm], "null": null}
    elif op == "complement":
        S = orthogonal_complement(vecs, L)
        data = {"vectors": names, "rank": S.rank, "basis": [list(b) for b in S.basis],
                "det": determinant(S.gram())}
    elif op == "characteristic":
        if not vecs:
            raise InputError("characteristic needs vector names")
        data = {n: is_characteristic(v, L) for n, v in zip(names, vecs)}
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown lattice operation {op!r}")
    _emit(data, args.json, out)
    return 0


def cmd_dump_dataset(args, out) -> int:
    from .dataset import paper_dataset

    _emit(paper_dataset().as_dict(), args.json, out)
    return 0


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message, None, self.prog)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="blowdown", description="Exact lattice and Seiberg-Witten bookkeeping for rational blow-downs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify-paper", help="run every arithmetic check of the constructions")
    v.add_argument("--section", action="append", choices=["chains", "sw", "kirby"])
    v.add_argument("--json", action="store_true")
    v.add_argument("--plot-dir")
    v.add_argument("--perturb", action="append", metavar="NAME:INDEX:DELTA",
                   help="fault injection: change one coefficient of a named dataset vector")
    v.set_defaults(func=cmd_verify_paper)

    e = sub.add_parser("enumerate", help="list classes with nonzero SW in the manifest's chamber")
    e.add_argument("manifest", help="manifest file or shipped manifest name")
    e.add_argument("--config", nargs="?", const="manifest",
                   help="apply the lift filter (manifest configuration, or 2C3 / 2C5 / C5')")
    e.add_argument("--json", action="store_true")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--a-bound", type=int)
    e.add_argument("--plot-dir")
    e.set_defaults(func=cmd_enumerate)

    r = sub.add_parser("replay", help="replay a Kirby move script")
    r.add_argument("script", help="script file or shipped script name")
    r.add_argument("--json", action="store_true")
    r.add_argument("--plot-dir")
    r.set_defaults(func=cmd_replay)

    w = sub.add_parser("reduce", help="wall-reduce a characteristic vector to (3; 1, ..., 1)")
    w.add_argument("manifest")
    w.add_argument("vector")
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_reduce)

    lt = sub.add_parser("lattice", help="lattice queries on manifest vectors")
    lt.add_argument("op", choices=["gram", "det", "signature", "complement", "characteristic"])
    lt.add_argument("manifest")
    lt.add_argument("names", nargs="*")
    lt.add_argument("--json", action="store_true")
    lt.set_defaults(func=cmd_lattice)

    d = sub.add_parser("dump-dataset", help="print the named classes and shipped scripts")
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_dump_dataset)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "workers", 1) is not None and getattr(args, "workers", 1) < 1:
            raise InputError("--workers must be at least 1")
        return args.func(args, out)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except (ValueError, KeyError, ArithmeticError) as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
