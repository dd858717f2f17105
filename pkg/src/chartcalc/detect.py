"""Detectors for the named structures of chart calculus.

Edge classes, bigons, linearity, complexity, anacanthous bodies,
direction indicators, mal-cycles, pinwheels, consecutive triplets, and
the aggregated non-minimality report.  Everything here is a pure
function of an immutable chart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .model import (
    BLACK,
    CROSSING,
    WHITE,
    Chart,
    ChartError,
    Complexity,
    Dart,
    HEAD,
    TAIL,
    middle_darts,
)
from .surgery import Surgery, region_children

FREE = "free"
TERMINAL = "terminal"
HOOP = "hoop"
INTERNAL = "internal"


@dataclass(frozen=True)
class EdgeClass:
    edge: str
    kind: str  # free | terminal | hoop | internal


def classify_edge(chart: Chart, eid: str) -> str:
    e = chart.edges[eid]
    if e.is_hoop:
        return HOOP
    kinds = {chart.vertices[e.tail].kind, chart.vertices[e.head].kind}
    if kinds == {BLACK}:
        return FREE
    if BLACK in kinds and WHITE in kinds:
        return TERMINAL
    return INTERNAL


def classify_edges(chart: Chart) -> list[EdgeClass]:
    return [EdgeClass(eid, classify_edge(chart, eid)) for eid in sorted(chart.edges)]


def terminal_edges(chart: Chart) -> list[str]:
    return [eid for eid in sorted(chart.edges)
            if classify_edge(chart, eid) == TERMINAL]


def free_edges(chart: Chart) -> list[str]:
    return [eid for eid in sorted(chart.edges)
            if classify_edge(chart, eid) == FREE]


def white_end(chart: Chart, eid: str) -> Optional[str]:
    e = chart.edges[eid]
    if e.is_hoop:
        return None
    for v in (e.tail, e.head):
        if chart.vertices[v].kind == WHITE:
            return v
    return None


# ---------------------------------------------------------------------------
# bigons


@dataclass(frozen=True)
class Bigon:
    edges: tuple[str, str]
    whites: tuple[str, ...]
    face: str  # the disk side


def find_bigons(chart: Chart) -> list[Bigon]:
    """Two crossing-free edges joining white vertices and bounding a
    disk that no edge at those vertices enters."""
    out = []
    for key, walk in sorted(chart.faces.items()):
        if len(walk) != 2:
            continue
        d1, d2 = walk
        if d1.edge == d2.edge:
            continue
        vs = set()
        ok = True
        for eid in (d1.edge, d2.edge):
            e = chart.edges[eid]
            if e.is_hoop:
                ok = False
                break
            for v in (e.tail, e.head):
                if chart.vertices[v].kind != WHITE:
                    ok = False
                vs.add(v)
        e1, e2 = chart.edges[d1.edge], chart.edges[d2.edge]
        if ok and {e1.tail, e1.head} != {e2.tail, e2.head}:
            ok = False
        if ok:
            out.append(Bigon(tuple(sorted((d1.edge, d2.edge))), tuple(sorted(vs)), key))
    return out


def complexity(chart: Chart) -> Complexity:
    return Complexity(
        c=len(chart.crossings()),
        w=len(chart.whites()),
        neg_f=-len(free_edges(chart)),
        neg_b=-len(find_bigons(chart)),
    )


# ---------------------------------------------------------------------------
# label subgraphs and linearity


@dataclass(frozen=True)
class LabelSubgraph:
    label: int
    edges: tuple[str, ...]
    vertices: tuple[str, ...]


def label_subgraph(chart: Chart, m: int) -> LabelSubgraph:
    if not 1 <= m <= chart.degree - 1:
        raise ChartError(f"label {m} outside 1..{chart.degree - 1}")
    eids = chart.label_edges(m)
    vids = sorted({v for eid in eids
                   for v in (chart.edges[eid].tail, chart.edges[eid].head)
                   if v is not None})
    return LabelSubgraph(m, tuple(eids), tuple(vids))


def _label_cycle(chart: Chart, m: int) -> Optional[list[str]]:
    """A cycle in the label-m subgraph avoiding crossings, if any."""
    for eid in chart.label_edges(m):
        if chart.edges[eid].is_hoop:
            return [eid]
    adj: dict[str, list[tuple[str, str]]] = {}
    candidates = []
    for eid in chart.label_edges(m):
        e = chart.edges[eid]
        if chart.vertices[e.tail].kind == CROSSING:
            continue
        if chart.vertices[e.head].kind == CROSSING:
            continue
        if e.tail == e.head:
            return [eid]
        candidates.append(eid)
        adj.setdefault(e.tail, []).append((e.head, eid))
        adj.setdefault(e.head, []).append((e.tail, eid))

    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree: dict[str, list[tuple[str, str]]] = {}
    for eid in candidates:
        e = chart.edges[eid]
        if find(e.tail) == find(e.head):
            # recover the tree path between the endpoints
            path: dict[str, tuple[Optional[str], Optional[str]]] = {e.tail: (None, None)}
            queue = [e.tail]
            while queue:
                v = queue.pop(0)
                if v == e.head:
                    break
                for w, through in tree.get(v, []):
                    if w not in path:
                        path[w] = (v, through)
                        queue.append(w)
            cyc = [eid]
            v = e.head
            while path.get(v, (None, None))[0] is not None:
                prev, through = path[v]
                cyc.append(through)
                v = prev
            return cyc
        parent[find(e.tail)] = find(e.head)
        tree.setdefault(e.tail, []).append((e.head, eid))
        tree.setdefault(e.head, []).append((e.tail, eid))
    return None


def is_linear(chart: Chart, m: int) -> tuple[bool, Optional[list[str]]]:
    """Whether the label-m subgraph minus crossings is a forest.

    Vacuously true when no label-m edge touches a crossing.  Returns
    the offending cycle's edges when false.
    """
    touches = False
    for eid in chart.label_edges(m):
        e = chart.edges[eid]
        for v in (e.tail, e.head):
            if v is not None and chart.vertices[v].kind == CROSSING:
                touches = True
    if not touches:
        return True, None
    cyc = _label_cycle(chart, m)
    return (cyc is None), cyc


def chart_is_linear(chart: Chart) -> bool:
    return all(is_linear(chart, m)[0] for m in range(1, chart.degree))


# ---------------------------------------------------------------------------
# peripheral stripping


def strip_peripheral(chart: Chart) -> tuple[Chart, int, int]:
    """Remove all free edges and hoops; returns the new chart and the
    removed counts.  Children of removed hoops re-home to the region
    the hoop sat in."""
    stripped_free = 0
    stripped_hoops = 0
    cur = chart
    while True:
        frees = free_edges(cur)
        hoops = cur.hoops()
        if not frees and not hoops:
            return cur, stripped_free, stripped_hoops
        sur = Surgery(cur)
        anchors: list[tuple[Dart, Dart]] = []
        removed_regions: list[str] = []
        for eid in frees:
            e = cur.edges[eid]
            sur.remove_edge(eid)
            sur.remove_vertex(e.tail)
            sur.remove_vertex(e.head)
            stripped_free += 1
        for eid in hoops:
            sur.remove_edge(eid)
            stripped_hoops += 1
            # children inside the hoop re-home beside it
            for end in (TAIL, HEAD):
                key = Dart(eid, end).key
                if cur.region_of(key) == key:
                    removed_regions.append(key)
        # anchor every surviving child of a removed region to a survivor
        # of the removed component's outer region, when one exists
        survivors = [d for d in cur.darts()
                     if sur.survivor(d) is not None]
        for region in removed_regions:
            kids = region_children(cur, region)
            rep = None
            host_comp = cur.component_of_face(region)
            pl = cur.placements.get(host_comp)
            if pl is not None:
                outer_region = cur.region_of(pl.parent_face)
                for d in survivors:
                    if cur.region_of(cur.face_of_dart[d]) == outer_region:
                        rep = d
                        break
            if rep is None:
                for d in survivors:
                    rep = d
                    break
            prev = rep
            for comp in kids:
                if comp not in cur.components or prev is None:
                    continue
                outer = cur.placements[comp].child_outer
                mine = cur.faces[outer][0]
                if sur.survivor(mine) is not None:
                    sur.anchor(mine, prev)
        cur = sur.commit()


# ---------------------------------------------------------------------------
# anacanthous bodies


@dataclass(frozen=True)
class AnacanthousBody:
    label: int
    edges: tuple[str, ...]
    components: tuple[tuple[str, ...], ...]  # AB-components as edge sets


def anacanthous_body(chart: Chart, k: int) -> AnacanthousBody:
    """Closure of the label-k subgraph minus all terminal edges, split
    into components after removing crossings."""
    terms = set(terminal_edges(chart))
    eids = [eid for eid in chart.label_edges(k) if eid not in terms]
    # split at crossings: union-find over edges via shared non-crossing vertices
    parent: dict[str, str] = {e: e for e in eids}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_vertex: dict[str, list[str]] = {}
    for eid in eids:
        e = chart.edges[eid]
        for v in (e.tail, e.head):
            if v is not None and chart.vertices[v].kind != CROSSING:
                by_vertex.setdefault(v, []).append(eid)
    for group in by_vertex.values():
        for other in group[1:]:
            ra, rb = find(group[0]), find(other)
            if ra != rb:
                parent[ra] = rb
    comps: dict[str, list[str]] = {}
    for eid in eids:
        comps.setdefault(find(eid), []).append(eid)
    return AnacanthousBody(
        k, tuple(sorted(eids)),
        tuple(sorted(tuple(sorted(c)) for c in comps.values())))


@dataclass(frozen=True)
class Arc:
    """A path of same-label edges; endpoints are white or crossing."""

    label: int
    edges: tuple[str, ...]
    vertices: tuple[str, ...]  # len(edges) + 1, traversal order
    closed: bool = False

    @property
    def inner_vertices(self) -> tuple[str, ...]:
        return self.vertices[1:-1] if not self.closed else self.vertices[:-1]


def _arc_traversal_darts(chart: Chart, arc: Arc) -> list[Dart]:
    """Dart per edge pointing along the traversal."""
    out = []
    for eid, vfrom in zip(arc.edges, arc.vertices):
        e = chart.edges[eid]
        out.append(Dart(eid, TAIL) if e.tail == vfrom else Dart(eid, HEAD))
    return out


def is_anacanthous(chart: Chart, arc: Arc) -> bool:
    """Every interior vertex carries a terminal edge of the arc label."""
    for v in arc.inner_vertices:
        if chart.vertices[v].kind != WHITE:
            return False
        has_term = any(
            d.edge not in arc.edges
            and chart.edges[d.edge].label == arc.label
            and classify_edge(chart, d.edge) == TERMINAL
            for d in chart.vertices[v].rotation)
        if not has_term:
            return False
    for v in (arc.vertices[0], arc.vertices[-1]):
        if chart.vertices[v].kind == BLACK:
            return False
    return True


def anacanthous_arcs(chart: Chart, k: int) -> list[Arc]:
    """Maximal arcs of the anacanthous body of label k, split at
    vertices of body-degree other than 2 (crossings always split)."""
    body = anacanthous_body(chart, k)
    eids = set(body.edges)
    deg: dict[str, list[str]] = {}
    for eid in eids:
        e = chart.edges[eid]
        if e.is_hoop:
            continue
        for v in (e.tail, e.head):
            deg.setdefault(v, []).append(eid)
    breakers = {
        v for v, inc in deg.items()
        if len(inc) != 2 or chart.vertices[v].kind != WHITE
    }
    arcs = []
    used: set[str] = set()

    def follow(start_v: str, eid: str) -> Arc:
        verts = [start_v]
        edges = []
        v, cur = start_v, eid
        while True:
            edges.append(cur)
            used.add(cur)
            e = chart.edges[cur]
            v = e.head if e.tail == v else e.tail
            verts.append(v)
            if v in breakers or v == start_v:
                break
            nxt = [x for x in deg[v] if x != cur]
            if len(nxt) != 1:
                break
            cur = nxt[0]
        return Arc(k, tuple(edges), tuple(verts), closed=verts[0] == verts[-1]
                   and verts[0] not in breakers)

    for v in sorted(breakers):
        for eid in sorted(deg.get(v, [])):
            if eid not in used:
                arcs.append(follow(v, eid))
    for eid in sorted(eids):
        if eid not in used and not chart.edges[eid].is_hoop:
            e = chart.edges[eid]
            arcs.append(follow(e.tail, eid))
    return arcs


# ---------------------------------------------------------------------------
# IO-paths and direction indicators


@dataclass(frozen=True)
class DirectionIndicator:
    arc: Arc
    side: str  # "L" | "R" | "free"


@dataclass(frozen=True)
class IOViolation:
    arc: Arc
    edge: str  # the edge of the arc whose white pair can be cancelled
    terminals: tuple[str, str]


def _side_germs(chart: Chart, arc: Arc, idx: int) -> tuple[list[Dart], list[Dart]]:
    """Left and right germ sets at inner vertex ``arc.vertices[idx]``."""
    darts = _arc_traversal_darts(chart, arc)
    v = arc.vertices[idx]
    incoming = darts[idx - 1].twin()
    outgoing = darts[idx]
    rot = chart.vertices[v].rotation
    i_in, i_out = rot.index(incoming), rot.index(outgoing)
    left, right = [], []
    j = (i_out + 1) % len(rot)
    side = left
    while j != i_out:
        if j == i_in:
            side = right
        else:
            side.append(rot[j])
        j = (j + 1) % len(rot)
    return left, right


def io_direction(chart: Chart, arc: Arc):
    """The direction indicator of an anacanthous arc, an IOViolation
    witness when its inner vertices disagree, or a free choice."""
    if not is_anacanthous(chart, arc):
        raise ChartError("arc is not anacanthous")
    inner = range(1, len(arc.vertices) - 1)
    votes: list[str] = []
    for idx in inner:
        left, right = _side_germs(chart, arc, idx)
        l_out = all(d.end == TAIL for d in left)
        l_in = all(d.end == HEAD for d in left)
        r_out = all(d.end == TAIL for d in right)
        r_in = all(d.end == HEAD for d in right)
        if l_out and r_in:
            votes.append("L")
        elif r_out and l_in:
            votes.append("R")
        else:
            votes.append("?")
    if not votes:
        return DirectionIndicator(arc, "free")
    if all(v == "L" for v in votes):
        return DirectionIndicator(arc, "L")
    if all(v == "R" for v in votes):
        return DirectionIndicator(arc, "R")
    # find a cancellable pair: adjacent inner vertices whose terminal
    # edges sit on one side with opposite orientations
    idxs = list(inner)
    for a, b in zip(idxs, idxs[1:]):
        va, vb = arc.vertices[a], arc.vertices[b]
        ta = _terminal_at(chart, va, arc)
        tb = _terminal_at(chart, vb, arc)
        if ta is None or tb is None:
            continue
        for pick in ("L", "R"):
            ga = _side_of(chart, arc, a, ta)
            gb = _side_of(chart, arc, b, tb)
            if ga == gb == pick:
                da = next(d for d in chart.vertices[va].rotation if d.edge == ta)
                db = next(d for d in chart.vertices[vb].rotation if d.edge == tb)
                if da.end != db.end:
                    return IOViolation(arc, arc.edges[a], (ta, tb))
    return IOViolation(arc, arc.edges[idxs[0]], ("", ""))


def _terminal_at(chart: Chart, v: str, arc: Arc) -> Optional[str]:
    for d in chart.vertices[v].rotation:
        if d.edge in arc.edges:
            continue
        if chart.edges[d.edge].label != arc.label:
            continue
        if classify_edge(chart, d.edge) == TERMINAL:
            return d.edge
    return None


def _side_of(chart: Chart, arc: Arc, idx: int, eid: str) -> Optional[str]:
    left, right = _side_germs(chart, arc, idx)
    if any(d.edge == eid for d in left):
        return "L"
    if any(d.edge == eid for d in right):
        return "R"
    return None


# ---------------------------------------------------------------------------
# cycle sides: what a closed curve of edges encloses


def cycle_side_contents(chart: Chart, darts: list[Dart], side: str):
    """Vertices and faces strictly on one side of a directed closed
    cycle of edges.  ``side`` is L or R of the traversal.  Nested
    components placed inside count as content."""
    cyc_edges = {d.edge for d in darts}
    start_faces = set()
    for d in darts:
        start_faces.add(chart.face_of_dart[d if side == "R" else d.twin()])
    faces = set()
    queue = list(start_faces)
    while queue:
        f = queue.pop()
        if f in faces:
            continue
        faces.add(f)
        for d in chart.faces[f]:
            if d.edge in cyc_edges:
                continue
            nxt = chart.face_of_dart[d.twin()]
            if nxt not in faces:
                queue.append(nxt)
    cyc_vertices = {chart.vertex_of(d) for d in darts}
    vertices = set()
    comps = set()
    for f in faces:
        for d in chart.faces[f]:
            for v in (chart.edges[d.edge].tail, chart.edges[d.edge].head):
                if v is not None and v not in cyc_vertices:
                    vertices.add(v)
        region = chart.region_of(f)
        for comp in region_children(chart, region):
            comps.add(comp)
    for comp in list(comps):
        for member in chart.components[comp]:
            if member in chart.vertices:
                vertices.add(member)
    return vertices, faces


# ---------------------------------------------------------------------------
# mal-cycles


@dataclass(frozen=True)
class MalCycle:
    m: int
    epsilon: int
    vertices: tuple[str, str, str, str]  # v1, w1, v2, w2 in cyclic order
    edges: tuple[str, str, str, str]
    disk_faces: tuple[str, ...]


def _white_type(chart: Chart, vid: str) -> Optional[tuple[int, int]]:
    v = chart.vertices[vid]
    if v.kind != WHITE:
        return None
    labels = sorted({chart.label_of(d) for d in v.rotation})
    return (labels[0], labels[1]) if len(labels) == 2 else None


def find_mal_cycles(chart: Chart) -> list[MalCycle]:
    out = []
    seen = set()
    for m in range(1, chart.degree):
        eids = [e for e in chart.label_edges(m)
                if not chart.edges[e].is_hoop]
        adj: dict[str, list[str]] = {}
        for eid in eids:
            e = chart.edges[eid]
            if chart.vertices[e.tail].kind != WHITE:
                continue
            if chart.vertices[e.head].kind != WHITE:
                continue
            adj.setdefault(e.tail, []).append(eid)
            adj.setdefault(e.head, []).append(eid)
        for e1 in eids:
            a = chart.edges[e1]
            if a.tail not in adj or a.head not in adj:
                continue
            for e2 in adj.get(a.head, []):
                if e2 == e1:
                    continue
                b = chart.edges[e2]
                v2 = b.head if b.tail == a.head else b.tail
                for e3 in adj.get(v2, []):
                    if e3 in (e1, e2):
                        continue
                    c3 = chart.edges[e3]
                    v3 = c3.head if c3.tail == v2 else c3.tail
                    for e4 in adj.get(v3, []):
                        if e4 in (e1, e2, e3):
                            continue
                        d4 = chart.edges[e4]
                        v4 = d4.head if d4.tail == v3 else d4.tail
                        if v4 != a.tail:
                            continue
                        cyc_v = (a.tail, a.head, v2, v3)
                        cyc_e = (e1, e2, e3, e4)
                        if len(set(cyc_v)) != 4:
                            continue
                        key = frozenset(cyc_e)
                        if key in seen:
                            continue
                        mc = _check_mal_cycle(chart, m, cyc_v, cyc_e)
                        if mc is not None:
                            seen.add(key)
                            out.append(mc)
    return out


def _check_mal_cycle(chart: Chart, m: int, cyc_v, cyc_e) -> Optional[MalCycle]:
    # coherent orientation: the four edges must form a directed cycle,
    # one way or the other
    forward = all(
        chart.edges[eid].tail == cyc_v[i] and chart.edges[eid].head == cyc_v[(i + 1) % 4]
        for i, eid in enumerate(cyc_e))
    backward = all(
        chart.edges[eid].head == cyc_v[i] and chart.edges[eid].tail == cyc_v[(i + 1) % 4]
        for i, eid in enumerate(cyc_e))
    if not forward and not backward:
        return None
    darts = []
    for i, eid in enumerate(cyc_e):
        e = chart.edges[eid]
        darts.append(Dart(eid, TAIL) if e.tail == cyc_v[i] else Dart(eid, HEAD))
    for eps in (1, -1):
        lo, hi = m - eps, m + eps
        if not (1 <= lo <= chart.degree - 1 and 1 <= hi <= chart.degree - 1):
            continue
        for start in (0, 1):
            # whites at even offsets from start are the v's
            vs = (cyc_v[start], cyc_v[(start + 2) % 4])
            ws = (cyc_v[(start + 1) % 4], cyc_v[(start + 3) % 4])
            if any(_white_type(chart, v) != tuple(sorted((m, m - eps))) for v in vs):
                continue
            if any(_white_type(chart, w) != tuple(sorted((m, m + eps))) for w in ws):
                continue
            for side in ("L", "R"):
                inside_v, inside_f = cycle_side_contents(chart, darts, side)
                kinds = [chart.vertices[v].kind for v in inside_v]
                if kinds.count(CROSSING) != 1 or WHITE in kinds:
                    continue
                # terminal edges of label m+eps at both w's outside D
                ok = True
                for w in ws:
                    good = False
                    for dd in chart.vertices[w].rotation:
                        if dd.edge in cyc_e:
                            continue
                        if chart.edges[dd.edge].label != m + eps:
                            continue
                        if classify_edge(chart, dd.edge) != TERMINAL:
                            continue
                        if chart.face_of_dart[dd] in inside_f and \
                                chart.face_of_dart[dd.twin()] in inside_f:
                            continue
                        good = True
                    if not good:
                        ok = False
                if not ok:
                    continue
                order = (vs[0], ws[0], vs[1], ws[1])
                edges = tuple(cyc_e[(start + i) % 4] for i in range(4))
                return MalCycle(m, eps, order, edges, tuple(sorted(inside_f)))
    return None


# ---------------------------------------------------------------------------
# pinwheels


@dataclass(frozen=True)
class Pinwheel:
    center: str
    m: int
    epsilon: int
    arms: tuple[tuple[str, ...], ...]  # per arm, its edges
    marked: tuple[str, str, str, str]  # v1..v4


def _grow_arms(chart: Chart, c: str, germ: Dart) -> list[Arc]:
    """All anacanthous prefixes of the strand leaving a crossing germ."""
    label = chart.label_of(germ)
    edges = [germ.edge]
    verts = [c]
    arms: list[Arc] = []
    cur = germ
    v = chart.vertex_of(cur.twin())
    while v is not None and chart.vertices[v].kind == WHITE:
        verts.append(v)
        arms.append(Arc(label, tuple(edges), tuple(verts + [])))
        nxt = None
        term = None
        for d in chart.vertices[v].rotation:
            if d.edge == cur.edge or chart.label_of(d) != label:
                continue
            if classify_edge(chart, d.edge) == TERMINAL:
                term = d
            else:
                nxt = d
        if nxt is None or term is None:
            break
        edges.append(nxt.edge)
        cur = nxt
        v = chart.vertex_of(cur.twin())
    return arms


def find_pinwheels(chart: Chart) -> list[Pinwheel]:
    out = []
    for c in chart.crossings():
        rot = chart.vertices[c].rotation
        li, lj = chart.label_of(rot[0]), chart.label_of(rot[1])
        if abs(li - lj) != 2:
            continue  # arms of labels m-1 and m+1 need a middle label
        m = (li + lj) // 2
        if not 1 <= m <= chart.degree - 1:
            continue
        arm_sets = [_grow_arms(chart, c, g) for g in rot]
        for choice in _arm_combos(arm_sets):
            for eps in (1, -1):
                pw = _check_pinwheel(chart, c, m, eps, rot, choice)
                if pw is not None:
                    out.append(pw)
    # dedupe by arm tuples
    uniq = {}
    for pw in out:
        uniq[(pw.center, pw.arms)] = pw
    return [uniq[k] for k in sorted(uniq)]


def _arm_combos(arm_sets):
    if any(not s for s in arm_sets):
        return
    for a0 in arm_sets[0]:
        for a1 in arm_sets[1]:
            for a2 in arm_sets[2]:
                for a3 in arm_sets[3]:
                    yield (a0, a1, a2, a3)


def _check_pinwheel(chart: Chart, c: str, m: int, eps: int, rot, arms) -> Optional[Pinwheel]:
    # pairwise disjoint except the crossing
    all_edges = [set(a.edges) for a in arms]
    for i in range(4):
        for j in range(i + 1, 4):
            if all_edges[i] & all_edges[j]:
                return None
            shared = set(arms[i].vertices) & set(arms[j].vertices)
            if shared - {c}:
                return None
    # labels: diagonals alternate m-eps / m+eps around the crossing
    for i, arm in enumerate(arms):
        want = m - eps if i % 2 == 0 else m + eps
        if arm.label != want:
            return None
    # marked whites: the far endpoint of each arm
    marked = tuple(a.vertices[-1] for a in arms)
    if any(chart.vertices[v].kind != WHITE for v in marked):
        return None
    # terminal condition (iii): odd arms or even arms carry terminals
    def has_term(v, lab):
        return any(
            chart.edges[d.edge].label == lab
            and classify_edge(chart, d.edge) == TERMINAL
            for d in chart.vertices[v].rotation)
    if not ((has_term(marked[0], m - eps) and has_term(marked[2], m - eps))
            or (has_term(marked[1], m + eps) and has_term(marked[3], m + eps))):
        return None
    # indicators and marked-white edges must follow one rotational
    # sense around the crossing: either every sector D_i sees its
    # label-m edge outward at v_i and D_{i+1} inward, or the mirror
    sides = []
    for arm in arms:
        res = io_direction(chart, arm)
        if isinstance(res, IOViolation):
            return None
        sides.append(res.side)
    for uniform in ("R", "L"):
        if all(s in (uniform, "free") for s in sides):
            if all(_marked_ok(chart, arms[i], uniform, m) for i in range(4)):
                return Pinwheel(c, m, eps,
                                tuple(a.edges for a in arms), marked)
    return None


def _marked_ok(chart: Chart, arm: Arc, uniform: str, m: int) -> bool:
    """Uniform case R: a label-m edge outward on the right flank of the
    marked white and one inward on the left flank (L: mirrored).  The
    germ straight ahead of the arm can serve either flank."""
    v = arm.vertices[-1]
    darts = _arc_traversal_darts(chart, arm)
    incoming = darts[-1].twin()
    rot = chart.vertices[v].rotation
    i_in = rot.index(incoming)
    others = [rot[(i_in + k) % len(rot)] for k in range(1, len(rot))]
    mid = len(others) // 2
    right = others[:mid + 1]  # counterclockwise just after the arm
    left = others[mid:]
    if uniform == "R":
        out_side, in_side = right, left
    else:
        out_side, in_side = left, right
    return (any(chart.label_of(d) == m and d.end == TAIL for d in out_side)
            and any(chart.label_of(d) == m and d.end == HEAD for d in in_side))


# ---------------------------------------------------------------------------
# consecutive triplets


@dataclass(frozen=True)
class ConsecutiveTriplet:
    e1: str
    e2: str
    e3: str
    corners: tuple[str, str]
    face: str
    admissible: bool


def find_consecutive_triplets(chart: Chart) -> list[ConsecutiveTriplet]:
    out = {}
    for key, walk in sorted(chart.faces.items()):
        n = len(walk)
        if n < 4:
            continue
        for i in range(n):
            d0, d1 = walk[i], walk[(i + 1) % n]
            if d0.edge != d1.edge:
                continue
            tip = chart.vertex_of(d1)
            if tip is None or chart.vertices[tip].kind != BLACK:
                continue
            if classify_edge(chart, d0.edge) != TERMINAL:
                continue
            d2, d3 = walk[(i + 2) % n], walk[(i + 3) % n]
            w1 = chart.vertex_of(d2)
            w2 = chart.vertex_of(d3)
            if w1 is None or w2 is None:
                continue
            if chart.vertices[w1].kind != WHITE or chart.vertices[w2].kind != WHITE:
                continue
            e1, e2, e3 = d0.edge, d2.edge, d3.edge
            if len({e1, e2, e3}) != 3:
                continue
            # e2 must run white to white
            ee2 = chart.edges[e2]
            if {chart.vertices[ee2.tail].kind, chart.vertices[ee2.head].kind} != {WHITE}:
                continue
            admissible = chart.edges[e3].label != chart.edges[e1].label
            out[(e1, e2, e3)] = ConsecutiveTriplet(
                e1, e2, e3, (w1, w2), key, admissible)
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# aggregated non-minimality report


@dataclass(frozen=True)
class WitnessReport:
    mal_cycles: tuple[MalCycle, ...]
    pinwheels: tuple[Pinwheel, ...]
    bad_triplets: tuple[ConsecutiveTriplet, ...]
    io_violations: tuple[IOViolation, ...]
    loose_terminal_whites: tuple[str, ...]
    bad_black_edges: tuple[str, ...]

    def is_empty(self) -> bool:
        return not (self.mal_cycles or self.pinwheels or self.bad_triplets
                    or self.io_violations or self.loose_terminal_whites
                    or self.bad_black_edges)

    def lines(self) -> list[str]:
        rows = []
        for mc in self.mal_cycles:
            rows.append("WITNESS mal-cycle m=%d eps=%+d %s" % (
                mc.m, mc.epsilon, " ".join(mc.vertices)))
        for pw in self.pinwheels:
            rows.append("WITNESS pinwheel center=%s m=%d eps=%+d" % (
                pw.center, pw.m, pw.epsilon))
        for t in self.bad_triplets:
            rows.append(f"WITNESS inadmissible-triplet {t.e1} {t.e2} {t.e3}")
        for v in self.io_violations:
            rows.append("WITNESS io-violation edge=%s terminals=%s,%s" % (
                v.edge, v.terminals[0], v.terminals[1]))
        for w in self.loose_terminal_whites:
            rows.append(f"WITNESS loose-terminal-white {w}")
        for e in self.bad_black_edges:
            rows.append(f"WITNESS black-edge {e}")
        return sorted(rows)


def non_minimality_witnesses(chart: Chart) -> WitnessReport:
    loose = []
    for vid in chart.whites():
        terms = [d.edge for d in chart.vertices[vid].rotation
                 if classify_edge(chart, d.edge) == TERMINAL
                 and white_end(chart, d.edge) == vid]
        if len(terms) >= 2:
            mids = middle_darts(chart, vid)
            nonmid = [e for e in terms
                      if not any(d.edge == e and d in mids
                                 for d in chart.vertices[vid].rotation)]
            if nonmid:
                loose.append(vid)
    bad_black = [eid for eid in sorted(chart.edges)
                 if classify_edge(chart, eid) == INTERNAL
                 and any(
                     v is not None and chart.vertices[v].kind == BLACK
                     for v in (chart.edges[eid].tail, chart.edges[eid].head))]
    violations = []
    for k in range(1, chart.degree):
        for arc in anacanthous_arcs(chart, k):
            if arc.closed or not is_anacanthous(chart, arc):
                continue
            res = io_direction(chart, arc)
            if isinstance(res, IOViolation):
                violations.append(res)
    return WitnessReport(
        mal_cycles=tuple(find_mal_cycles(chart)),
        pinwheels=tuple(find_pinwheels(chart)),
        bad_triplets=tuple(t for t in find_consecutive_triplets(chart)
                           if not t.admissible),
        io_violations=tuple(violations),
        loose_terminal_whites=tuple(sorted(loose)),
        bad_black_edges=tuple(bad_black),
    )


def ab_cycle_witnesses(chart: Chart, k: int) -> list[tuple[str, ...]]:
    """AB-components of label k that contain a cycle (Lemma 5.1 gate).

    Inside an AB-component every crossing incidence is a loose end, so
    the component has a cycle iff, with each crossing stub counted as
    its own leaf, there are at least as many edges as vertices.
    """
    body = anacanthous_body(chart, k)
    out = []
    for comp in body.components:
        if any(chart.edges[eid].is_hoop for eid in comp):
            out.append(tuple(sorted(comp)))
            continue
        plain = set()
        stubs = 0
        loops = False
        for eid in comp:
            e = chart.edges[eid]
            if e.tail == e.head:
                loops = True
            for v in (e.tail, e.head):
                if chart.vertices[v].kind == CROSSING:
                    stubs += 1
                else:
                    plain.add(v)
        nv = len(plain) + stubs
        if loops or len(comp) > nv - 1:
            out.append(tuple(sorted(comp)))
    return out
