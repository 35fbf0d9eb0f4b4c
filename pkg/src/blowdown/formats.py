"""Manifest and move-script files.

Both are YAML documents.  Parsing keeps the line of every node so that
validation errors point at the offending line, and each format has one
canonical serialization (``dump_manifest``) plus a field-for-field JSON
mirror.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .kirbytrace import Move, MoveScript
from .lattice import Lattice, diagonal_lattice


class InputError(ValueError):
    def __init__(self, msg: str, line: int | None = None, source: str = "<input>"):
        self.msg = msg
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {msg}")


_Loader = getattr(yaml, "CSafeLoader", yaml.SafeLoader)


class _Doc:
    """Parsed YAML plus the 1-based line of each path."""

    def __init__(self, text: str, source: str):
        self.source = source
        loader = _Loader(text)
        try:
            node = loader.get_single_node()
            self.data = loader.construct_document(node) if node is not None else None
        except yaml.MarkedYAMLError as exc:
            loader.dispose()
            line = exc.problem_mark.line + 1 if exc.problem_mark else None
            raise InputError(str(exc.problem), line, source) from None
        except yaml.YAMLError as exc:
            loader.dispose()
            raise InputError(str(exc), None, source) from None
        self.lines = {}
        try:
            if node is not None:
                self._walk(node, (), loader)
        finally:
            loader.dispose()

    def _walk(self, node, path, loader):
        self.lines[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                # keys reuse the resolved scalar type, so `1:` maps to int
                key = loader.construct_object(k) if isinstance(k, yaml.ScalarNode) else k.value
                self._walk(v, path + (key,), loader)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                self._walk(v, path + (i,), loader)

    def line(self, path) -> int | None:
        path = tuple(path)
        while path and path not in self.lines:
            path = path[:-1]
        return self.lines.get(path)

    def fail(self, msg, path=()):
        raise InputError(msg, self.line(path), self.source)


def _read(path_or_text, source=None):
    if isinstance(path_or_text, Path) or (isinstance(path_or_text, str) and "\n" not in path_or_text
                                          and path_or_text.endswith((".yaml", ".yml"))):
        p = Path(path_or_text)
        try:
            return p.read_text(), source or str(p)
        except OSError as exc:
            raise InputError(f"cannot read file: {exc.strerror}", None, str(p)) from None
    return path_or_text, source or "<input>"


# ---------------------------------------------------------------------------
# manifests


@dataclass
class Manifest:
    pos: int
    neg: int
    vectors: dict  # name -> tuple of ints, h-coefficient first
    config_p: int | None = None
    config_spheres: tuple = ()
    chamber: str | None = None
    orientation: str = "h"
    glue_numerator: str | None = None
    glue_denominator: int | None = None
    name: str = ""

    @property
    def rank(self) -> int:
        return self.pos + self.neg

    def lattice(self) -> Lattice:
        return diagonal_lattice(self.pos, self.neg, f"R{self.neg}" if self.pos == 1 else "")

    def vector(self, name: str) -> tuple:
        if name == "h" and "h" not in self.vectors:
            return (1,) + (0,) * (self.rank - 1)
        try:
            return self.vectors[name]
        except KeyError:
            raise InputError(f"unknown vector {name!r}") from None

    def config(self):
        from .rbd import CpConfiguration

        if self.config_p is None:
            return None
        return CpConfiguration(self.config_p, tuple(self.vector(s) for s in self.config_spheres), self.lattice())

    def as_dict(self) -> dict:
        out: dict[str, Any] = {}
        if self.name:
            out["name"] = self.name
        out["ambient"] = {"pos": self.pos, "neg": self.neg}
        out["vectors"] = {k: list(v) for k, v in self.vectors.items()}
        if self.config_p is not None:
            out["configuration"] = {"p": self.config_p, "spheres": list(self.config_spheres)}
        if self.chamber is not None:
            out["chamber"] = self.chamber
        out["orientation"] = self.orientation
        if self.glue_numerator is not None:
            out["glue"] = {"numerator": self.glue_numerator, "denominator": self.glue_denominator}
        return out


def _int(doc, value, path, what):
    if isinstance(value, bool) or not isinstance(value, int):
        doc.fail(f"{what} must be an integer, got {value!r}", path)
    return value


def _name(doc, value, path, what):
    if not isinstance(value, str) or not value:
        doc.fail(f"{what} must be a vector name, got {value!r}", path)
    return value


_MANIFEST_KEYS = {"name", "ambient", "vectors", "configuration", "chamber", "orientation", "glue"}


def parse_manifest(path_or_text, source: str | None = None) -> Manifest:
    text, source = _read(path_or_text, source)
    doc = _Doc(text, source)
    d = doc.data
    if not isinstance(d, dict):
        doc.fail("manifest must be a mapping")
    for k in d:
        if k not in _MANIFEST_KEYS:
            doc.fail(f"unknown key {k!r}", (k,))
    if "ambient" not in d:
        doc.fail("missing 'ambient'")
    amb = d["ambient"]
    if not isinstance(amb, dict) or set(amb) != {"pos", "neg"}:
        doc.fail("ambient must be {pos: N, neg: M}", ("ambient",))
    pos = _int(doc, amb["pos"], ("ambient", "pos"), "ambient.pos")
    neg = _int(doc, amb["neg"], ("ambient", "neg"), "ambient.neg")
    if pos < 0 or neg < 0 or pos + neg == 0:
        doc.fail("ambient rank must be positive", ("ambient",))
    vecs = d.get("vectors") or {}
    if not isinstance(vecs, dict):
        doc.fail("vectors must be a mapping of name to integer array", ("vectors",))
    vectors = {}
    for name, arr in vecs.items():
        path = ("vectors", name)
        if not isinstance(name, str):
            doc.fail(f"vector name {name!r} must be text", path)
        if not isinstance(arr, list):
            doc.fail(f"vector {name!r} must be an integer array", path)
        vals = tuple(_int(doc, x, path + (i,), f"{name}[{i}]") for i, x in enumerate(arr))
        if len(vals) != pos + neg:
            doc.fail(f"vector {name!r} has {len(vals)} entries, ambient rank is {pos + neg}", path)
        vectors[name] = vals

    def ref(path, what):
        v = _name(doc, d_get(path), path, what)
        if v not in vectors and not (v == "h" and pos >= 1):
            doc.fail(f"{what} refers to unknown vector {v!r}", path)
        return v

    def d_get(path):
        x = d
        for k in path:
            x = x[k]
        return x

    m = Manifest(pos, neg, vectors, name=str(d.get("name", "")))
    if "configuration" in d:
        c = d["configuration"]
        if not isinstance(c, dict) or set(c) != {"p", "spheres"}:
            doc.fail("configuration must be {p: N, spheres: [names]}", ("configuration",))
        m.config_p = _int(doc, c["p"], ("configuration", "p"), "configuration.p")
        if m.config_p < 2:
            doc.fail("configuration.p must be at least 2", ("configuration", "p"))
        if not isinstance(c["spheres"], list):
            doc.fail("configuration.spheres must be a list of names", ("configuration", "spheres"))
        m.config_spheres = tuple(ref(("configuration", "spheres", i), "sphere") for i in range(len(c["spheres"])))
        if len(m.config_spheres) != m.config_p - 1:
            doc.fail(f"C_{m.config_p} needs {m.config_p - 1} spheres", ("configuration", "spheres"))
    if "chamber" in d:
        m.chamber = ref(("chamber",), "chamber")
    if "orientation" in d:
        m.orientation = ref(("orientation",), "orientation")
    if "glue" in d:
        g = d["glue"]
        if not isinstance(g, dict) or set(g) != {"numerator", "denominator"}:
            doc.fail("glue must be {numerator: name, denominator: N}", ("glue",))
        m.glue_numerator = ref(("glue", "numerator"), "glue numerator")
        m.glue_denominator = _int(doc, g["denominator"], ("glue", "denominator"), "glue.denominator")
        if m.glue_denominator < 1:
            doc.fail("glue.denominator must be positive", ("glue", "denominator"))
    return m


class _Dumper(yaml.SafeDumper):
    pass


def _repr_list(dumper, data):
    flow = all(isinstance(x, (int, str)) for x in data)
    return dumper.represent_sequence("tag:yaml.org,2002:seq", data, flow_style=flow)


_Dumper.add_representer(list, _repr_list)


def dump_yaml(d: dict) -> str:
    return yaml.dump(d, Dumper=_Dumper, sort_keys=False, default_flow_style=False, width=1 << 16)


def dump_manifest(m: Manifest) -> str:
    return dump_yaml(m.as_dict())


def manifest_json(m: Manifest) -> str:
    return json.dumps(m.as_dict(), indent=2) + "\n"


# ---------------------------------------------------------------------------
# move scripts


_SCRIPT_KEYS = {"name", "description", "start", "moves", "expected"}
_MOVE_ARGS = {
    "slide": {"handle", "over", "sign"},
    "blow_up": {"linked"},
    "create_pair": {"kind"},
    "cancel_pair": {"kind", "handle"},
    "isotopy": set(),
}


def parse_script(path_or_text, source: str | None = None) -> MoveScript:
    text, source = _read(path_or_text, source)
    doc = _Doc(text, source)
    d = doc.data
    if not isinstance(d, dict):
        doc.fail("script must be a mapping")
    for k in d:
        if k not in _SCRIPT_KEYS:
            doc.fail(f"unknown key {k!r}", (k,))
    name = d.get("name")
    if not isinstance(name, str) or not name:
        doc.fail("script needs a name", ("name",))
    moves_raw = d.get("moves") or []
    if not isinstance(moves_raw, list):
        doc.fail("moves must be a list", ("moves",))
    moves = []
    for i, mv in enumerate(moves_raw):
        path = ("moves", i)
        if not isinstance(mv, dict) or "op" not in mv:
            doc.fail("each move needs an 'op'", path)
        op = mv["op"]
        if op not in _MOVE_ARGS:
            doc.fail(f"unknown move {op!r}", path + ("op",))
        args = {k: v for k, v in mv.items() if k not in ("op", "note")}
        for k in args:
            if k not in _MOVE_ARGS[op]:
                doc.fail(f"{op} takes no argument {k!r}", path + (k,))
        if op == "slide" and not {"handle", "over"} <= set(args):
            doc.fail("slide needs 'handle' and 'over'", path)
        if op in ("create_pair", "cancel_pair") and "kind" not in args:
            doc.fail(f"{op} needs 'kind'", path)
        if op == "blow_up":
            linked = args.get("linked", [])
            if not isinstance(linked, list) or not all(
                isinstance(x, list) and len(x) == 2 and isinstance(x[1], int) for x in linked
            ):
                doc.fail("blow_up.linked must be a list of [handle, multiplicity]", path + ("linked",))
        moves.append(Move(op, args, str(mv.get("note", ""))))
    expected = d.get("expected") or {}
    if not isinstance(expected, dict):
        doc.fail("expected must be a mapping", ("expected",))
    start = d.get("start")
    if start is not None and not isinstance(start, str):
        doc.fail("start must be a script name", ("start",))
    return MoveScript(name, tuple(moves), expected, start, str(d.get("description", "")))


def script_dict(s: MoveScript) -> dict:
    out: dict[str, Any] = {"name": s.name}
    if s.description:
        out["description"] = s.description
    if s.start:
        out["start"] = s.start
    moves = []
    for mv in s.moves:
        m = {"op": mv.op, **mv.args}
        if mv.note:
            m["note"] = mv.note
        moves.append(m)
    out["moves"] = moves
    if s.expected:
        out["expected"] = s.expected
    return out


# ---------------------------------------------------------------------------
# shipped data


def _data_dir(kind: str):
    return resources.files("blowdown").joinpath("data", kind)


def builtin_scripts() -> dict:
    return copy.deepcopy(_builtin_scripts())


@lru_cache(maxsize=1)
def _builtin_scripts() -> dict:
    out = {}
    for f in sorted(_data_dir("scripts").iterdir(), key=lambda p: p.name):
        if f.name.endswith(".yaml"):
            s = parse_script(f.read_text(), f"scripts/{f.name}")
            out[s.name] = s
    return out


def builtin_manifests() -> dict:
    return copy.deepcopy(_builtin_manifests())


@lru_cache(maxsize=1)
def _builtin_manifests() -> dict:
    out = {}
    for f in sorted(_data_dir("manifests").iterdir(), key=lambda p: p.name):
        if f.name.endswith(".yaml"):
            out[f.name[: -len(".yaml")]] = parse_manifest(f.read_text(), f"manifests/{f.name}")
    return out
