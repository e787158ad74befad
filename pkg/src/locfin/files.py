"""Line-based text format for complexes, diffable and byte-stable.

A file holds one complex::

    # comment
    vertices a b c          base labels, in order (the linear order)
    level 1                 optional, default 0
    stage present           optional, default absent
    vertex 0;0              coordinate-vertex table (required when level > 0
    vertex 0;1;2            or a stage is present): base;c1,c2,...;stage
    simplex 0 1             maximal simplices, as indices into the vertex
                            table (or into the base labels at level 0)

Reading closes the listed simplices downward; writing emits maximal
simplices only, sorted, so read . write is the identity on canonical form.
"""

from __future__ import annotations

import json
from typing import Optional, TextIO, Union

from .core import Complex, closure, validate


class ParseError(ValueError):
    pass


def _format_vertex(v, has_stage: bool) -> str:
    if has_stage:
        base, coords, stage = v[0], v[1:-1], v[-1]
        mid = ",".join(map(str, coords))
        return f"{base};{mid};{stage}"
    base, coords = v[0], v[1:]
    return f"{base};" + ",".join(map(str, coords))


def _parse_vertex(text: str, level: int, has_stage: bool):
    parts = text.split(";")
    want = 2 + (1 if has_stage else 0)
    if len(parts) != want:
        raise ParseError(f"vertex {text!r} has {len(parts)} fields, expected {want}")
    try:
        base = int(parts[0])
        coords = tuple(int(c) for c in parts[1].split(",") if c != "")
        stage = (int(parts[2]),) if has_stage else ()
    except ValueError as e:
        raise ParseError(f"bad vertex {text!r}: {e}") from None
    if len(coords) != level:
        raise ParseError(f"vertex {text!r} has {len(coords)} coordinates at level {level}")
    return (base,) + coords + stage


def _maximal(C: Complex) -> list:
    """Simplices not contained in any other simplex.

    The complex is downward closed, so non-maximal simplices are exactly the
    codimension-1 faces of other simplices.
    """
    import itertools
    covered = set()
    for s in C.simplices:
        if len(s) > 1:
            covered.update(itertools.combinations(s, len(s) - 1))
    return sorted(s for s in C.simplices if s not in covered)


def write_complex(C: Complex, stream: Union[str, TextIO]) -> None:
    if isinstance(stream, str):
        with open(stream, "w") as fh:
            return write_complex(C, fh)
    labels = C.universe if C.universe is not None else tuple(
        f"v{i}" for i in range(max((v[0] for v in C.vertices), default=-1) + 1))
    stream.write(("vertices " + " ".join(labels)).rstrip() + "\n")
    needs_table = C.level > 0 or C.has_stage
    if C.level:
        stream.write(f"level {C.level}\n")
    if C.has_stage:
        stream.write("stage present\n")
    verts = sorted(C.vertices)
    index = {v: i for i, v in enumerate(verts)}
    if needs_table:
        for v in verts:
            stream.write("vertex " + _format_vertex(v, C.has_stage) + "\n")
        for s in _maximal(C):
            stream.write("simplex " + " ".join(str(index[v]) for v in s) + "\n")
    else:
        for s in _maximal(C):
            stream.write("simplex " + " ".join(str(v[0]) for v in s) + "\n")


def complex_to_text(C: Complex) -> str:
    import io
    buf = io.StringIO()
    write_complex(C, buf)
    return buf.getvalue()


def read_complex(stream: Union[str, TextIO], strict: bool = False) -> Complex:
    """Parse a complex file; with ``strict`` the listed simplex set must
    already be downward closed (given the implied singletons)."""
    if isinstance(stream, str):
        with open(stream) as fh:
            return read_complex(fh, strict)
    labels: Optional[list] = None
    level = 0
    has_stage = False
    vertex_table: list = []
    simplex_lines: list = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "vertices":
            labels = rest.split()
        elif word == "level":
            try:
                level = int(rest)
            except ValueError:
                raise ParseError(f"line {lineno}: bad level {rest!r}") from None
        elif word == "stage":
            has_stage = rest == "present"
        elif word == "vertex":
            vertex_table.append((lineno, rest))
        elif word == "simplex":
            simplex_lines.append((lineno, rest))
        else:
            raise ParseError(f"line {lineno}: unknown directive {word!r}")
    if labels is None:
        raise ParseError("missing 'vertices' line")
    table = [_parse_vertex(text, level, has_stage) for _, text in vertex_table]
    needs_table = level > 0 or has_stage
    if needs_table and not table and simplex_lines:
        raise ParseError("constructed complex needs a vertex table")
    for _, v in zip(vertex_table, table):
        if not (0 <= v[0] < len(labels)):
            raise ParseError(f"vertex base {v[0]} outside universe of size {len(labels)}")
    maximal = []
    for lineno, rest in simplex_lines:
        try:
            idxs = [int(x) for x in rest.split()]
        except ValueError:
            raise ParseError(f"line {lineno}: bad simplex {rest!r}") from None
        if not idxs:
            raise ParseError(f"line {lineno}: empty simplex")
        if needs_table:
            try:
                verts = [table[i] for i in idxs]
            except IndexError:
                raise ParseError(f"line {lineno}: vertex index out of range") from None
        else:
            for i in idxs:
                if not (0 <= i < len(labels)):
                    raise ParseError(f"line {lineno}: vertex index {i} out of range")
            verts = [(i,) for i in idxs]
        if len(set(verts)) != len(verts):
            raise ParseError(f"line {lineno}: repeated vertex in simplex")
        maximal.append(verts)
    explicit = {tuple(sorted(s)) for s in maximal}
    if needs_table:
        C = closure(maximal, None, level, has_stage)
        C = Complex(C.simplices | {(v,) for v in table}, tuple(labels),
                    level, has_stage)
    else:
        C = closure(maximal, labels, level, has_stage)
    if strict:
        implied = {(v,) for v in (table if needs_table else
                                  [(i,) for i in range(len(labels))])}
        missing = C.simplices - explicit - implied
        if missing:
            raise ParseError(
                f"strict mode: listed simplices are not downward closed "
                f"({len(missing)} faces missing, e.g. {sorted(missing)[0]!r})")
    return C


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------

def vertex_map_table(mapping: dict, has_stage: bool, target_stage: bool = False) -> str:
    lines = []
    for v in sorted(mapping):
        lines.append(_format_vertex(v, has_stage) + " -> "
                     + _format_vertex(mapping[v], target_stage))
    return "\n".join(lines) + "\n"


def machine_report(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2, default=str) + "\n"
