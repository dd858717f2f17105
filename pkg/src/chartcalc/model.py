"""Core data model: charts as combinatorial maps on the 2-sphere.

A chart is an oriented, labeled graph embedded in the sphere.  Each
connected component is stored as a rotation system (counterclockwise
cyclic dart order at every vertex); closed vertex-free edges (hoops) are
components of their own.  Relative placement of components is recorded
in a containment forest: every non-root component sits inside a face of
some other component.

Faces are orbits of the face permutation ``d -> rot_next(twin(d))``.
With counterclockwise rotations this traces the region lying to the
*right* of each directed dart.  For a hoop the two sides are named by
its two darts: ``e.t`` is the right side of the directed circle, ``e.h``
the left side.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence

BLACK = "black"
WHITE = "white"
CROSSING = "crossing"
KINDS = (BLACK, WHITE, CROSSING)

DEGREE_OF_KIND = {BLACK: 1, CROSSING: 4, WHITE: 6}

TAIL = "t"
HEAD = "h"


@dataclass(frozen=True, order=True)
class Dart:
    """One end of an edge: ``(edge id, 't'|'h')``."""

    edge: str
    end: str

    def twin(self) -> "Dart":
        return Dart(self.edge, HEAD if self.end == TAIL else TAIL)

    @property
    def key(self) -> str:
        return f"{self.edge}.{self.end}"

    @staticmethod
    def from_key(key: str) -> "Dart":
        eid, _, end = key.rpartition(".")
        if not eid or end not in (TAIL, HEAD):
            raise ValueError(f"bad dart key {key!r}")
        return Dart(eid, end)

    def __repr__(self) -> str:  # keep tracebacks readable
        return self.key


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str
    rotation: tuple[Dart, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.rotation)


@dataclass(frozen=True)
class Edge:
    id: str
    label: int
    tail: Optional[str]  # vertex id, None for hoop darts
    head: Optional[str]

    @property
    def is_hoop(self) -> bool:
        return self.tail is None and self.head is None

    def endpoint(self, end: str) -> Optional[str]:
        return self.tail if end == TAIL else self.head

    @property
    def tail_dart(self) -> Dart:
        return Dart(self.id, TAIL)

    @property
    def head_dart(self) -> Dart:
        return Dart(self.id, HEAD)


@dataclass(frozen=True)
class Placement:
    """Child component embedded in a face of a parent component."""

    parent: str  # component key
    parent_face: str  # face key of parent component
    child_outer: str  # face key of child facing the parent


class ChartError(Exception):
    """Structural problem that prevents building a chart at all."""


def _cyclic_min_rotation(seq: Sequence[str]) -> tuple[str, ...]:
    if not seq:
        return ()
    best = None
    for i in range(len(seq)):
        cand = tuple(seq[i:]) + tuple(seq[:i])
        if best is None or cand < best:
            best = cand
    return best


@dataclass(frozen=True)
class Chart:
    """Immutable chart value.

    ``placements`` maps a component key (min vertex id, or the edge id
    for hoops) to its Placement.  The root component has no entry.
    ``infinity`` optionally names the arrangement face holding the point
    at infinity.
    """

    name: str
    degree: int
    vertices: Mapping[str, Vertex]
    edges: Mapping[str, Edge]
    placements: Mapping[str, Placement] = field(default_factory=dict)
    infinity: Optional[str] = None

    # -- basic queries ------------------------------------------------

    def vertex_of(self, dart: Dart) -> Optional[str]:
        return self.edges[dart.edge].endpoint(dart.end)

    def darts(self) -> Iterator[Dart]:
        for eid in self.edges:
            yield Dart(eid, TAIL)
            yield Dart(eid, HEAD)

    def label_of(self, dart: Dart) -> int:
        return self.edges[dart.edge].label

    def is_outward(self, dart: Dart) -> bool:
        """True if the edge points away from the dart's vertex."""
        return dart.end == TAIL

    def rot_next(self, dart: Dart) -> Dart:
        vid = self.vertex_of(dart)
        if vid is None:
            raise ChartError(f"dart {dart} has no vertex (hoop)")
        rot = self.vertices[vid].rotation
        i = rot.index(dart)
        return rot[(i + 1) % len(rot)]

    def rot_prev(self, dart: Dart) -> Dart:
        vid = self.vertex_of(dart)
        if vid is None:
            raise ChartError(f"dart {dart} has no vertex (hoop)")
        rot = self.vertices[vid].rotation
        i = rot.index(dart)
        return rot[(i - 1) % len(rot)]

    # -- components ---------------------------------------------------

    @cached_property
    def components(self) -> dict[str, frozenset[str]]:
        """Component key -> set of member ids (vertex and edge ids).

        The key is the smallest vertex id, or the edge id for a hoop.
        """
        parent: dict[str, str] = {}

        def find(x: str) -> str:
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a: str, b: str) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for vid in self.vertices:
            find("v:" + vid)
        for eid, e in self.edges.items():
            find("e:" + eid)
            if e.tail is not None:
                union("e:" + eid, "v:" + e.tail)
            if e.head is not None:
                union("e:" + eid, "v:" + e.head)

        groups: dict[str, set[str]] = {}
        for x in parent:
            groups.setdefault(find(x), set()).add(x)

        out: dict[str, frozenset[str]] = {}
        for members in groups.values():
            vids = sorted(m[2:] for m in members if m.startswith("v:"))
            eids = sorted(m[2:] for m in members if m.startswith("e:"))
            key = vids[0] if vids else eids[0]
            out[key] = frozenset(vids) | frozenset(eids)
        return out

    def component_of(self, ref: str) -> str:
        """Component key owning the given vertex or edge id."""
        for key, members in self.components.items():
            if ref in members:
                return key
        raise ChartError(f"unknown component member {ref!r}")

    def component_of_dart(self, dart: Dart) -> str:
        return self.component_of(dart.edge)

    # -- faces ----------------------------------------------------------

    @cached_property
    def faces(self) -> dict[str, tuple[Dart, ...]]:
        """Face key -> boundary walk (face permutation orbit).

        Hoops contribute two one-dart walks keyed by their darts.
        """
        out: dict[str, tuple[Dart, ...]] = {}
        seen: set[Dart] = set()
        for d0 in sorted(self.darts()):
            if d0 in seen:
                continue
            if self.edges[d0.edge].is_hoop:
                seen.add(d0)
                out[d0.key] = (d0,)
                continue
            walk = []
            d = d0
            while True:
                walk.append(d)
                seen.add(d)
                d = self.rot_next(d.twin())
                if d == d0:
                    break
            key = min(w.key for w in walk)
            out[key] = tuple(walk)
        return out

    @cached_property
    def face_of_dart(self) -> dict[Dart, str]:
        out: dict[Dart, str] = {}
        for key, walk in self.faces.items():
            for d in walk:
                out[d] = key
        return out

    def faces_of_component(self, comp: str) -> list[str]:
        members = self.components[comp]
        return sorted(
            key for key, walk in self.faces.items() if walk[0].edge in members
        )

    def component_of_face(self, face_key: str) -> str:
        return self.component_of(Dart.from_key(face_key).edge)

    # -- containment / arrangement --------------------------------------

    @property
    def root_component(self) -> Optional[str]:
        comps = set(self.components)
        if not comps:
            return None
        roots = comps - set(self.placements)
        if len(roots) != 1:
            raise ChartError(f"containment must have exactly one root, got {sorted(roots)}")
        return next(iter(roots))

    def region_of(self, face_key: str) -> str:
        """Resolve a component face to its arrangement region.

        A non-root component's outer face belongs to the region of its
        parent face; every other face is a region of its own, named by
        the face key.
        """
        seen = set()
        while True:
            comp = self.component_of_face(face_key)
            pl = self.placements.get(comp)
            if pl is None or pl.child_outer != face_key:
                return face_key
            if face_key in seen:
                raise ChartError("containment cycle")
            seen.add(face_key)
            face_key = pl.parent_face

    def regions(self) -> dict[str, list[str]]:
        """Region key -> component keys placed directly inside it."""
        out: dict[str, list[str]] = {}
        for key in self.faces:
            if self.region_of(key) == key:
                out.setdefault(key, [])
        for comp, pl in self.placements.items():
            out.setdefault(self.region_of(pl.parent_face), []).append(comp)
        for comps in out.values():
            comps.sort()
        return out

    # -- derived counts -------------------------------------------------

    def crossings(self) -> list[str]:
        return sorted(v.id for v in self.vertices.values() if v.kind == CROSSING)

    def whites(self) -> list[str]:
        return sorted(v.id for v in self.vertices.values() if v.kind == WHITE)

    def blacks(self) -> list[str]:
        return sorted(v.id for v in self.vertices.values() if v.kind == BLACK)

    def hoops(self) -> list[str]:
        return sorted(e.id for e in self.edges.values() if e.is_hoop)

    def label_edges(self, m: int) -> list[str]:
        return sorted(e.id for e in self.edges.values() if e.label == m)

    # -- rebuilding -------------------------------------------------------

    def but(self, **kw) -> "Chart":
        return replace(self, **kw)


@dataclass(frozen=True, order=True)
class Complexity:
    """c-complexity tuple ``(crossings, whites, -free edges, -bigons)``.

    Dataclass ordering is field order, which is exactly the
    lexicographic order the minimality comparison uses.
    """

    c: int
    w: int
    neg_f: int
    neg_b: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.c, self.w, self.neg_f, self.neg_b)

    def __str__(self) -> str:
        return f"({self.c},{self.w},{self.neg_f},{self.neg_b})"


class ChartBuilder:
    """Mutable helper used to assemble charts programmatically."""

    def __init__(self, name: str = "chart", degree: int = 4):
        self.name = name
        self.degree = degree
        self.vertices: dict[str, Vertex] = {}
        self.edges: dict[str, Edge] = {}
        self.rotations: dict[str, list[Dart]] = {}
        self.placements: dict[str, Placement] = {}
        self.infinity: Optional[str] = None

    def vertex(self, vid: str, kind: str) -> str:
        if vid in self.vertices:
            raise ChartError(f"duplicate vertex id {vid!r}")
        self.vertices[vid] = Vertex(vid, kind)
        self.rotations[vid] = []
        return vid

    def edge(self, eid: str, label: int, tail: Optional[str], head: Optional[str]) -> str:
        if eid in self.edges:
            raise ChartError(f"duplicate edge id {eid!r}")
        for v in (tail, head):
            if v is not None and v not in self.vertices:
                raise ChartError(f"edge {eid!r} references unknown vertex {v!r}")
        if (tail is None) != (head is None):
            raise ChartError(f"edge {eid!r} must have both or neither endpoint")
        self.edges[eid] = Edge(eid, label, tail, head)
        return eid

    def rot(self, vid: str, *dart_keys: str) -> None:
        if vid not in self.vertices:
            raise ChartError(f"rot for unknown vertex {vid!r}")
        self.rotations[vid] = [
            d if isinstance(d, Dart) else Dart.from_key(d) for d in dart_keys
        ]

    def place(self, child: str, parent_face: str, child_outer: Optional[str] = None,
              parent: Optional[str] = None) -> None:
        self.placements[child] = Placement(parent or "", parent_face, child_outer or "")

    def build(self) -> Chart:
        vertices = {
            vid: Vertex(vid, v.kind, tuple(self.rotations.get(vid, ())))
            for vid, v in self.vertices.items()
        }
        chart = Chart(
            name=self.name,
            degree=self.degree,
            vertices=vertices,
            edges=dict(self.edges),
            placements={},
            infinity=None,
        )
        check_structure(chart)
        placements = _resolve_placements(chart, self.placements)
        chart = chart.but(placements=placements)
        if self.infinity is not None:
            if self.infinity not in chart.faces:
                raise ChartError(f"infinity face {self.infinity!r} does not exist")
            chart = chart.but(infinity=chart.region_of(self.infinity))
        return normalize_rooting(chart)


def _resolve_placements(chart: Chart, raw: Mapping[str, Placement]) -> dict[str, Placement]:
    comps = chart.components
    out: dict[str, Placement] = {}
    for child, pl in raw.items():
        child_key = chart.component_of(child) if child not in comps else child
        parent_face = pl.parent_face
        if parent_face not in chart.faces:
            raise ChartError(f"placement parent face {parent_face!r} does not exist")
        parent_key = chart.component_of_face(parent_face)
        child_faces = chart.faces_of_component(child_key)
        outer = pl.child_outer or child_faces[0]
        if outer not in child_faces:
            raise ChartError(
                f"outer face {outer!r} is not a face of component {child_key!r}")
        if parent_key == child_key:
            raise ChartError(f"component {child_key!r} cannot be placed in itself")
        if child_key in out:
            raise ChartError(f"component {child_key!r} placed twice")
        out[child_key] = Placement(parent_key, parent_face, outer)
    missing = set(comps) - set(out)
    if len(missing) > 1:
        raise ChartError(
            "every component except the root needs a place directive; "
            f"unplaced: {sorted(missing)}")
    if not missing and comps:
        raise ChartError("containment has no root (cycle among placements)")
    for child in out:  # forest check: each chain must reach the root
        seen = {child}
        cur = child
        while cur in out:
            cur = out[cur].parent
            if cur in seen:
                raise ChartError("containment cycle involving " + child)
            seen.add(cur)
    return out


def check_structure(chart: Chart) -> None:
    """Raise ChartError on structural (pre-axiom) defects."""
    if chart.degree < 2:
        raise ChartError(f"degree must be at least 2, got {chart.degree}")
    seen_darts: dict[Dart, str] = {}
    for vid, v in chart.vertices.items():
        if v.kind not in KINDS:
            raise ChartError(f"vertex {vid!r} has unknown kind {v.kind!r}")
        for d in v.rotation:
            if d.edge not in chart.edges:
                raise ChartError(f"rotation of {vid!r} references unknown edge {d.edge!r}")
            if chart.vertex_of(d) != vid:
                raise ChartError(
                    f"rotation of {vid!r} lists dart {d} attached to {chart.vertex_of(d)!r}")
            if d in seen_darts:
                raise ChartError(f"dart {d} appears in rotations of {seen_darts[d]!r} and {vid!r}")
            seen_darts[d] = vid
    for eid, e in chart.edges.items():
        for end, vid in ((TAIL, e.tail), (HEAD, e.head)):
            if vid is None:
                continue
            if vid not in chart.vertices:
                raise ChartError(f"edge {eid!r} references unknown vertex {vid!r}")
            if Dart(eid, end) not in seen_darts:
                raise ChartError(f"dart {eid}.{end} missing from rotation of {vid!r}")


def reroot(chart: Chart, new_root: str) -> Chart:
    """Re-root the containment forest at the given component.

    This is pure re-description: the sphere embedding is unchanged.
    Walking from the new root up the old parent chain, every link is
    reversed (the old parent becomes a child sitting in the face the
    child used to show it).
    """
    if new_root not in chart.components:
        raise ChartError(f"unknown component {new_root!r}")
    placements = dict(chart.placements)
    chain: list[str] = []
    cur = new_root
    while cur in placements:
        chain.append(cur)
        cur = placements[cur].parent
    # cur is the old root
    for child in reversed(chain):
        pl = placements.pop(child)
        placements[pl.parent] = Placement(child, pl.child_outer, pl.parent_face)
    rerooted = chart.but(placements=placements)
    if chart.infinity is not None:
        rerooted = rerooted.but(infinity=rerooted.region_of(chart.infinity))
    return rerooted


def normalize_rooting(chart: Chart) -> Chart:
    """Root the containment forest at the canonical component.

    The canonical root is the component containing the smallest vertex
    id (smallest hoop edge id if the chart is all hoops).
    """
    comps = chart.components
    if not comps:
        return chart
    with_vertices = sorted(k for k, members in comps.items() if k in chart.vertices)
    target = with_vertices[0] if with_vertices else sorted(comps)[0]
    chart.root_component  # raises if malformed
    return reroot(chart, target)


def middle_darts(chart: Chart, vid: str) -> frozenset[Dart]:
    """The two middle arcs at a white vertex: the centers of the three
    consecutive inward darts and of the three consecutive outward ones."""
    v = chart.vertices[vid]
    if v.kind != WHITE or len(v.rotation) != 6:
        return frozenset()
    out: set[Dart] = set()
    flags = [d.end == TAIL for d in v.rotation]
    for i in range(6):
        if flags[i] == flags[(i - 1) % 6] == flags[(i + 1) % 6]:
            out.add(v.rotation[i])
    return frozenset(out)


def euler_characteristics(chart: Chart) -> dict[str, int]:
    """Per-component V - E + F (2 for every sphere-embeddable component)."""
    out: dict[str, int] = {}
    for comp, members in chart.components.items():
        nv = sum(1 for m in members if m in chart.vertices)
        ne = sum(1 for m in members if m in chart.edges)
        nf = len(chart.faces_of_component(comp))
        out[comp] = nv - ne + nf
    return out
