"""Chart Map Format: the line-oriented interchange format.

Grammar (UTF-8, ``#`` starts a comment, blank lines ignored)::

    chart <name> degree=<n>
    v <vid> kind=black|white|crossing
    e <eid> label=<m> tail=<vid>|- head=<vid>|-    (- marks hoop darts)
    rot <vid>: <eid>.t|<eid>.h ...                 (counterclockwise)
    place <ref>[@<facekey>] in <ref>/<facekey>
    inf <facekey>

A face key is ``<eid>.t`` or ``<eid>.h``: the smallest dart on the face
boundary walk.  A component ref is any vertex or edge id belonging to
the component; the serializer uses the canonical key (smallest vertex
id, or the edge id for hoops).  ``place child@f in parent/g`` puts the
child component inside face ``g`` showing its own face ``f`` outward;
``@f`` may be omitted and defaults to the child's smallest face key.

Normalized form: header first, then ``v``/``e``/``rot``/``place``/``inf``
blocks with ids sorted, single spaces, explicit ``@`` outer faces, LF
line endings.  ``serialize`` always emits normalized documents.
"""

from __future__ import annotations

import re
from typing import Optional

from .model import (
    Chart,
    ChartBuilder,
    ChartError,
    Dart,
    KINDS,
    Placement,
)

_ID = re.compile(r"^[A-Za-z0-9_]+$")


class CmfError(Exception):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _check_id(tok: str, what: str, ln: int) -> str:
    if not _ID.match(tok):
        raise CmfError(f"bad {what} {tok!r}", ln)
    return tok


def parse_chart(text: str) -> Chart:
    """Parse a CMF document into a Chart."""
    builder: Optional[ChartBuilder] = None
    pending_rots: list[tuple[int, str, list[str]]] = []
    pending_places: list[tuple[int, str, Optional[str], str]] = []
    pending_inf: Optional[tuple[int, str]] = None

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kw = toks[0]
        if kw == "chart":
            if builder is not None:
                raise CmfError("duplicate chart header", ln)
            if len(toks) != 3 or not toks[2].startswith("degree="):
                raise CmfError("expected: chart <name> degree=<n>", ln)
            name = _check_id(toks[1], "chart name", ln)
            try:
                degree = int(toks[2][len("degree="):])
            except ValueError:
                raise CmfError(f"bad degree {toks[2]!r}", ln)
            if degree < 2:
                raise CmfError(f"degree must be at least 2, got {degree}", ln)
            builder = ChartBuilder(name, degree)
            continue
        if builder is None:
            raise CmfError("chart header must come first", ln)
        try:
            if kw == "v":
                if len(toks) != 3 or not toks[2].startswith("kind="):
                    raise CmfError("expected: v <vid> kind=<kind>", ln)
                kind = toks[2][len("kind="):]
                if kind not in KINDS:
                    raise CmfError(f"unknown vertex kind {kind!r}", ln)
                builder.vertex(_check_id(toks[1], "vertex id", ln), kind)
            elif kw == "e":
                if (len(toks) != 5 or not toks[2].startswith("label=")
                        or not toks[3].startswith("tail=") or not toks[4].startswith("head=")):
                    raise CmfError("expected: e <eid> label=<m> tail=<vid>|- head=<vid>|-", ln)
                try:
                    label = int(toks[2][len("label="):])
                except ValueError:
                    raise CmfError(f"bad label {toks[2]!r}", ln)
                tail = toks[3][len("tail="):]
                head = toks[4][len("head="):]
                builder.edge(
                    _check_id(toks[1], "edge id", ln), label,
                    None if tail == "-" else tail,
                    None if head == "-" else head,
                )
            elif kw == "rot":
                if len(toks) < 2 or not toks[1].endswith(":"):
                    raise CmfError("expected: rot <vid>: <dart> ...", ln)
                pending_rots.append((ln, toks[1][:-1], toks[2:]))
            elif kw == "place":
                if len(toks) != 4 or toks[2] != "in":
                    raise CmfError("expected: place <ref>[@<face>] in <ref>/<face>", ln)
                child, _, outer = toks[1].partition("@")
                parent_ref, sep, parent_face = toks[3].partition("/")
                if not sep:
                    raise CmfError("placement target must be <ref>/<facekey>", ln)
                pending_places.append((ln, child, outer or None, parent_face))
            elif kw == "inf":
                if len(toks) != 2:
                    raise CmfError("expected: inf <facekey>", ln)
                if pending_inf is not None:
                    raise CmfError("duplicate inf directive", ln)
                pending_inf = (ln, toks[1])
            else:
                raise CmfError(f"unknown directive {kw!r}", ln)
        except ChartError as exc:
            raise CmfError(str(exc), ln) from exc

    if builder is None:
        raise CmfError("missing chart header")

    for ln, vid, dart_keys in pending_rots:
        if vid not in builder.vertices:
            raise CmfError(f"rot for unknown vertex {vid!r}", ln)
        try:
            builder.rot(vid, *dart_keys)
        except (ValueError, ChartError) as exc:
            raise CmfError(str(exc), ln) from exc
    rotless = set(builder.vertices) - {vid for _, vid, _ in pending_rots}
    if rotless:
        raise CmfError(f"missing rot directive for vertices {sorted(rotless)}")
    for ln, child, outer, parent_face in pending_places:
        if child not in builder.vertices and child not in builder.edges:
            raise CmfError(f"place references unknown id {child!r}", ln)
        builder.placements[child] = Placement("", parent_face, outer or "")
    if pending_inf is not None:
        builder.infinity = pending_inf[1]
    try:
        return builder.build()
    except ChartError as exc:
        raise CmfError(str(exc)) from exc


def serialize(chart: Chart) -> str:
    """Serialize a chart to normalized CMF (the byte-exact interchange form)."""
    lines = [f"chart {chart.name} degree={chart.degree}"]
    for vid in sorted(chart.vertices):
        lines.append(f"v {vid} kind={chart.vertices[vid].kind}")
    for eid in sorted(chart.edges):
        e = chart.edges[eid]
        tail = e.tail if e.tail is not None else "-"
        head = e.head if e.head is not None else "-"
        lines.append(f"e {eid} label={e.label} tail={tail} head={head}")
    for vid in sorted(chart.vertices):
        rot = " ".join(d.key for d in chart.vertices[vid].rotation)
        lines.append(f"rot {vid}: {rot}".rstrip())
    for child in sorted(chart.placements):
        pl = chart.placements[child]
        lines.append(f"place {child}@{pl.child_outer} in {pl.parent}/{pl.parent_face}")
    if chart.infinity is not None:
        lines.append(f"inf {chart.infinity}")
    return "\n".join(lines) + "\n"


def normalize(text: str) -> str:
    return serialize(parse_chart(text))
