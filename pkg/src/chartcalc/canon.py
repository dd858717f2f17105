"""Canonical forms and isomorphism of charts on the sphere.

The code of a chart is invariant under renaming of ids, re-rooting of
the containment forest, and the choice of infinity face.  With the
``reflection`` option it is also invariant under mirroring.

Each component is encoded by a breadth-first dart numbering seeded at
every possible start dart, keeping the lexicographically smallest
encoding.  Nesting is handled on the bipartite region/component tree:
a chart's code is the minimum, over all arrangement regions chosen as
the outside, of the sorted subtree codes of the components bounding
that region.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

from .model import BLACK, CROSSING, WHITE, Chart, Dart, HEAD, TAIL
from .lor import reflect

_KIND_TAG = {BLACK: "b", WHITE: "w", CROSSING: "x", None: "-"}


def _component_encoding(chart: Chart, comp: str, start: Dart,
                        outer_face: str,
                        child_codes: dict[str, tuple[str, ...]]) -> str:
    """Encoding of one component from a start dart (fixed chirality)."""
    members = chart.components[comp]
    edge = chart.edges[start.edge]
    if edge.is_hoop:
        sides = []
        for end in (TAIL, HEAD):
            key = Dart(start.edge, end).key
            mark = "P" if key == outer_face else ""
            kids = "|".join(child_codes.get(key, ()))
            sides.append(f"{mark}[{kids}]")
        return f"H{edge.label}:{sides[0]};{sides[1]}"

    num: dict[Dart, int] = {start: 0}
    arr: list[Dart] = [start]
    i = 0
    while i < len(arr):
        d = arr[i]
        i += 1
        neighbors = [d.twin()]
        if chart.vertex_of(d) is not None:
            neighbors.append(chart.rot_next(d))
        for n in neighbors:
            if n not in num:
                num[n] = len(arr)
                arr.append(n)
    parts = []
    for d in arr:
        e = chart.edges[d.edge]
        vid = chart.vertex_of(d)
        kind = _KIND_TAG[chart.vertices[vid].kind if vid else None]
        nxt = num[chart.rot_next(d)] if vid else -1
        parts.append(f"{nxt}.{num[d.twin()]}.{e.label}.{d.end}.{kind}")
    face_parts = []
    for key, walk in sorted(chart.faces.items()):
        if walk[0].edge not in members:
            continue
        rep = min(num[d] for d in walk)
        mark = "P" if key == outer_face else ""
        kids = "|".join(child_codes.get(key, ()))
        face_parts.append((rep, f"{rep}{mark}[{kids}]"))
    face_parts.sort()
    return ",".join(parts) + "/" + ";".join(fp for _, fp in face_parts)


def _subtree_code(chart: Chart, comp: str, outer_face: str,
                  children_of: dict[str, list[tuple[str, str]]]) -> str:
    """Minimal encoding of the component with everything nested in it.

    ``children_of`` maps each face key to the (child component, child
    outer face) pairs sitting in its region.
    """
    child_codes: dict[str, tuple[str, ...]] = {}
    for key in chart.faces_of_component(comp):
        subs = [
            _subtree_code(chart, sub, sub_outer, children_of)
            for sub, sub_outer in children_of.get(key, ())
        ]
        if subs:
            child_codes[key] = tuple(sorted(subs))
    members = chart.components[comp]
    if comp in chart.edges and chart.edges[comp].is_hoop:
        return _component_encoding(
            chart, comp, Dart(comp, TAIL), outer_face, child_codes)
    best = None
    for start in sorted(d for d in chart.darts() if d.edge in members):
        code = _component_encoding(chart, comp, start, outer_face, child_codes)
        if best is None or code < best:
            best = code
    return best or ""


def canonical_code(chart: Chart, reflection: bool = False) -> str:
    """Canonical code; equal codes mean isomorphic sphere embeddings."""
    if reflection:
        return min(canonical_code(chart, False),
                   canonical_code(reflect(chart), False))
    if not chart.edges:
        return f"empty:{chart.degree}"

    # bipartite region tree: region key -> list of (comp, its face there)
    region_faces: dict[str, list[tuple[str, str]]] = {}
    for key in chart.faces:
        region_faces.setdefault(chart.region_of(key), []).append(
            (chart.component_of_face(key), key))

    best: Optional[str] = None
    for root_region, bound in sorted(region_faces.items()):
        # rooted at this region: each bounding component hangs downward
        children_of: dict[str, list[tuple[str, str]]] = {}
        outer_of: dict[str, str] = {}
        for comp, face in bound:
            outer_of[comp] = face
        # walk the tree away from the root region
        stack = [comp for comp, _ in bound]
        seen = set(stack)
        while stack:
            comp = stack.pop()
            for key in chart.faces_of_component(comp):
                if key == outer_of[comp]:
                    continue
                region = chart.region_of(key)
                for sub, sub_face in region_faces.get(region, ()):
                    if sub == comp or sub in seen:
                        continue
                    seen.add(sub)
                    outer_of[sub] = sub_face
                    children_of.setdefault(key, []).append((sub, sub_face))
                    stack.append(sub)
        tops = sorted(
            _subtree_code(chart, comp, face, children_of)
            for comp, face in bound)
        code = f"deg{chart.degree}(" + "&".join(tops) + ")"
        if best is None or code < best:
            best = code
    return best or f"empty:{chart.degree}"


def canonically_equal(a: Chart, b: Chart, reflection: bool = False) -> bool:
    return canonical_code(a, reflection) == canonical_code(b, reflection)


def code_hex(code: str) -> str:
    return code.encode("utf-8").hex()
