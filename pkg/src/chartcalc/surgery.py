"""Chart surgery: rebuild a chart after local rewiring.

Moves edit the graph part (edges, vertices, rotations) and describe how
arrangement regions are affected; ``Surgery.commit`` rebuilds the chart
and reconstructs the containment forest from region anchors.

The reconstruction works on the bipartite incidence between components
and arrangement regions, which on the sphere is always a tree.  Every
dart that survives a move (kept, or renamed onto a replacement edge)
still bounds the same geometric region, so surviving darts of one old
region anchor the corresponding new faces together.  Moves that split a
region (a saddle band, a poked finger) must say which side each region
child lands on; everything else is automatic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .model import (
    Chart,
    ChartError,
    Dart,
    Edge,
    Placement,
    Vertex,
    check_structure,
    normalize_rooting,
)


@dataclass
class RegionSplit:
    """Declares how the children of a split region re-home: each old
    child component key is anchored to a dart (surviving or new) whose
    face it joins.  ``infinity`` anchors the infinity marker if the
    split region held it."""

    children: dict[str, Dart] = field(default_factory=dict)
    infinity: Optional[Dart] = None


class _DSU:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        while self.parent.setdefault(x, x) != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def fresh_id(existing: Iterable[str], prefix: str) -> str:
    """Deterministic unused id: prefix + smallest free number."""
    taken = set(existing)
    pat = re.compile(re.escape(prefix) + r"(\d+)$")
    top = 0
    for name in taken:
        m = pat.match(name)
        if m:
            top = max(top, int(m.group(1)))
    n = top + 1
    while f"{prefix}{n}" in taken:
        n += 1
    return f"{prefix}{n}"


def region_of_dart(chart: Chart, dart: Dart) -> str:
    return chart.region_of(chart.face_of_dart[dart])


def region_children(chart: Chart, region: str) -> list[str]:
    """Component keys placed directly inside the region."""
    return [
        comp for comp, pl in chart.placements.items()
        if chart.region_of(pl.parent_face) == region
    ]


class Surgery:
    def __init__(self, chart: Chart, name: Optional[str] = None):
        self.chart = chart
        self.name = name or chart.name
        self._removed_edges: set[str] = set()
        self._removed_vertices: set[str] = set()
        self._added_edges: dict[str, Edge] = {}
        self._added_vertices: dict[str, Vertex] = {}
        self._rotations: dict[str, tuple[Dart, ...]] = {}
        self._renames: dict[Dart, Dart] = {}
        self._witnesses: dict[Dart, Dart] = {}
        self._splits: dict[str, RegionSplit] = {}
        self._anchors: list[tuple[Dart, Dart]] = []
        self._infinity: Optional[str] = chart.infinity

    # -- id helpers ----------------------------------------------------

    def fresh_edge(self, prefix: str = "e") -> str:
        return fresh_id(
            list(self.chart.edges) + list(self._added_edges), prefix)

    def fresh_vertex(self, prefix: str = "b") -> str:
        return fresh_id(
            list(self.chart.vertices) + list(self._added_vertices), prefix)

    # -- graph edits ----------------------------------------------------

    def remove_edge(self, eid: str) -> None:
        self._removed_edges.add(eid)

    def remove_vertex(self, vid: str) -> None:
        self._removed_vertices.add(vid)

    def add_edge(self, eid: str, label: int, tail: Optional[str], head: Optional[str]) -> str:
        self._added_edges[eid] = Edge(eid, label, tail, head)
        return eid

    def add_vertex(self, vid: str, kind: str, rotation: Sequence[Dart] = ()) -> str:
        self._added_vertices[vid] = Vertex(vid, kind, tuple(rotation))
        return vid

    def set_rotation(self, vid: str, rotation: Sequence[Dart]) -> None:
        self._rotations[vid] = tuple(rotation)

    def rename(self, old: Dart, new: Dart) -> None:
        if old in self._renames:
            raise ChartError(f"dart {old} renamed twice")
        self._renames[old] = new

    def witness(self, old: Dart, new: Dart) -> None:
        """Record that the region bounded by the old dart side is the
        one bounded by the new dart side (no rotation rewrite)."""
        self._witnesses[old] = new

    def survivor(self, d: Dart) -> Optional[Dart]:
        """Where the dart side lives after the edits registered so far."""
        nd = self._renames.get(d) or self._witnesses.get(d) or d
        if nd.edge in self._removed_edges and nd.edge not in self._added_edges:
            return None
        if nd.edge not in self.chart.edges and nd.edge not in self._added_edges:
            return None
        return nd

    # -- region bookkeeping ----------------------------------------------

    def split_region(self, region: str, split: RegionSplit) -> None:
        self._splits[region] = split

    def anchor(self, a: Dart, b: Dart) -> None:
        """Declare that the faces holding darts a and b bound one region."""
        self._anchors.append((a, b))

    def set_infinity(self, region: Optional[str]) -> None:
        self._infinity = region

    # -- commit ----------------------------------------------------------

    def _survive(self, d: Dart, edges: dict[str, Edge]) -> Optional[Dart]:
        nd = self._renames.get(d) or self._witnesses.get(d)
        if nd is not None:
            return nd if nd.edge in edges else None
        if d.edge in edges and d.edge not in self._added_edges:
            return d
        return None

    def commit(self) -> Chart:
        old = self.chart
        edges: dict[str, Edge] = {
            eid: e for eid, e in old.edges.items() if eid not in self._removed_edges}
        edges.update(self._added_edges)
        vertices: dict[str, Vertex] = {}
        for vid, v in old.vertices.items():
            if vid in self._removed_vertices:
                continue
            rot = self._rotations.get(vid)
            if rot is None:
                rot = tuple(self._renames.get(d, d) for d in v.rotation)
            vertices[vid] = Vertex(vid, v.kind, tuple(rot))
        for vid, v in self._added_vertices.items():
            rot = self._rotations.get(vid, v.rotation)
            vertices[vid] = Vertex(vid, v.kind, tuple(rot))

        bare = Chart(self.name, old.degree, vertices, edges, {}, None)
        check_structure(bare)
        if not bare.edges:
            return bare

        face_of = bare.face_of_dart
        dsu = _DSU()
        for key in bare.faces:
            dsu.find(key)

        def face_key(d: Dart) -> Optional[str]:
            nd = self._renames.get(d) or self._witnesses.get(d) or d
            if nd.edge not in edges:
                return None
            return face_of.get(nd)

        # group old darts by old region
        old_region_darts: dict[str, list[Dart]] = {}
        if old.edges:
            for d in old.darts():
                old_region_darts.setdefault(region_of_dart(old, d), []).append(d)

        old_children: dict[str, list[str]] = {}
        for comp, pl in old.placements.items():
            old_children.setdefault(old.region_of(pl.parent_face), []).append(comp)

        outer_face_dart: dict[str, Dart] = {}
        for comp, pl in old.placements.items():
            outer_face_dart[comp] = old.faces[pl.child_outer][0]

        survivors_of_region: dict[str, list[str]] = {}
        for region, darts in sorted(old_region_darts.items()):
            keys = []
            for d in sorted(darts):
                k = face_key(d)
                if k is not None:
                    keys.append(k)
            survivors_of_region[region] = keys

        for region, keys in survivors_of_region.items():
            distinct = sorted(set(keys))
            split = self._splits.get(region)
            if split is None:
                comps_hit = [bare.component_of_face(k) for k in distinct]
                if len(set(comps_hit)) == len(distinct):
                    for k in distinct[1:]:
                        dsu.union(distinct[0], k)
                elif old_children.get(region):
                    raise ChartError(
                        f"region {region} split by the move but its children "
                        f"{old_children[region]} have no declared anchors")
                continue
            for comp in old_children.get(region, []):
                target = split.children.get(comp)
                if target is None:
                    raise ChartError(
                        f"split of region {region} does not assign child {comp}")
                tkey = face_key(target)
                ckey = face_key(outer_face_dart[comp])
                if tkey is None or ckey is None:
                    raise ChartError(f"split of region {region}: missing anchors")
                dsu.union(ckey, tkey)

        for a, b in self._anchors:
            ka, kb = face_key(a), face_key(b)
            if ka is None or kb is None:
                raise ChartError(f"anchor {a}~{b} does not resolve")
            dsu.union(ka, kb)

        placements = self._derive_placements(bare, dsu)
        chart = bare.but(placements=placements)

        infinity = None
        if self._infinity is not None:
            split = self._splits.get(self._infinity)
            inf_keys = survivors_of_region.get(self._infinity, [])
            if split is not None and split.infinity is not None:
                k = face_key(split.infinity)
                inf_keys = [k] if k is not None else []
            if inf_keys:
                infinity = chart.region_of(inf_keys[0])
        chart = chart.but(infinity=infinity)
        return normalize_rooting(chart)

    def _derive_placements(self, bare: Chart, dsu: _DSU) -> dict[str, Placement]:
        comps = bare.components
        if len(comps) <= 1:
            return {}
        class_faces: dict[str, list[str]] = {}
        for key in bare.faces:
            class_faces.setdefault(dsu.find(key), []).append(key)

        comp_of_face = {key: bare.component_of_face(key) for key in bare.faces}
        # bipartite adjacency, with the face realizing each incidence
        comp_adj: dict[str, dict[str, str]] = {c: {} for c in comps}
        class_adj: dict[str, dict[str, str]] = {}
        for cls, keys in class_faces.items():
            class_adj[cls] = {}
            for key in keys:
                comp = comp_of_face[key]
                if comp in class_adj[cls]:
                    raise ChartError(
                        f"component {comp} bounds region {cls} twice (bad anchors)")
                class_adj[cls][comp] = key
                comp_adj[comp][cls] = key

        n_nodes = len(comps) + len(class_faces)
        n_edges = sum(len(v) for v in class_adj.values())
        with_vertices = sorted(k for k in comps if k in bare.vertices)
        root = with_vertices[0] if with_vertices else sorted(comps)[0]

        placements: dict[str, Placement] = {}
        seen_comps = {root}
        seen_classes: set[str] = set()
        queue = [root]
        while queue:
            comp = queue.pop(0)
            for cls, pface in sorted(comp_adj[comp].items()):
                if cls in seen_classes:
                    continue
                seen_classes.add(cls)
                for child, cface in sorted(class_adj[cls].items()):
                    if child in seen_comps:
                        continue
                    seen_comps.add(child)
                    placements[child] = Placement(comp, pface, cface)
                    queue.append(child)
        if len(seen_comps) != len(comps) or n_edges != n_nodes - 1:
            raise ChartError(
                "arrangement is not a tree after surgery "
                f"({len(seen_comps)}/{len(comps)} components, {n_edges} links, {n_nodes} nodes)")
        return placements
