"""C-move rewriting: rule table, site enumeration, application.

Each rule knows how to enumerate the sites where it applies and how to
apply itself at a site, returning the rewritten chart together with the
site of the inverse move on the result.  Site enumeration is
generate-and-test: candidate embeddings are assembled from local
structure and a candidate is kept only if applying it yields a valid
chart, so every enumerated site is applicable by construction.

Rule inventory (directions suffixed + / -):

  CI-M1   hoop birth / death
  CI-M2   oriented saddle of two strand sides sharing a region
  CI-M3   white-vertex pair cancellation along an edge / creation
  CI-M4   ring pass: thread a hoop onto a far-label edge / unthread
  CI-R2   double crossing birth / death between far-label strands
  CI-R3   slide an arc across a crossing
  CI-R4   slide an arc across a white vertex
  CII     black vertex through a far-label edge (either direction)
  CIII    white vertex absorbs / emits a terminal edge

CI-R3 and CI-R4 need three pairwise-far labels around one spot, which
no 4-chart admits; they exist for charts of degree 5 and up.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .model import (
    BLACK,
    CROSSING,
    WHITE,
    Chart,
    ChartError,
    Dart,
    HEAD,
    TAIL,
    Vertex,
)
from .surgery import RegionSplit, Surgery, fresh_id, region_children, region_of_dart
from .validate import is_valid


class StaleSiteError(Exception):
    """Site does not match the chart it is being applied to."""


@dataclass(frozen=True)
class MoveSite:
    """A rule name plus the embedding of its pattern into a chart."""

    rule: str
    embedding: tuple[tuple[str, str], ...]  # sorted (role, value) pairs

    @staticmethod
    def make(rule: str, **roles: str) -> "MoveSite":
        return MoveSite(rule, tuple(sorted(roles.items())))

    def __getitem__(self, role: str) -> str:
        for k, v in self.embedding:
            if k == role:
                return v
        raise KeyError(role)

    def get(self, role: str, default: Optional[str] = None) -> Optional[str]:
        try:
            return self[role]
        except KeyError:
            return default

    @property
    def fingerprint(self) -> str:
        parts = " ".join(f"{k}={v}" for k, v in self.embedding)
        return f"{self.rule} {parts}" if parts else self.rule

    @staticmethod
    def from_fingerprint(text: str) -> "MoveSite":
        toks = text.split()
        roles = {}
        for tok in toks[1:]:
            k, _, v = tok.partition("=")
            roles[k] = v
        return MoveSite.make(toks[0], **roles)


# ---------------------------------------------------------------------------
# strand splicing through removed vertices


def splice_strands(
    sur: Surgery,
    chart: Chart,
    dying_vertices: set[str],
    pairings: Sequence[tuple[Dart, Dart]],
    stubs: Sequence[tuple[Dart, str, str]] = (),
    dead_edges: Iterable[str] = (),
    hoop_witness: bool = True,
) -> dict[str, str]:
    """Rebuild the strands that run through removed vertices.

    ``pairings`` links germ darts at dying vertices pairwise: the strand
    arriving on one germ continues on the other.  ``stubs`` are germs
    that end at a (new or reused) black vertex instead: ``(germ, vid,
    prefix)`` with empty vid meaning a fresh one.  Every chain of edges
    becomes one new edge; closed chains become hoops.  Returns a map
    from each constituent old edge id to its new edge (or hoop) id.
    """
    for v in dying_vertices:
        sur.remove_vertex(v)
    for e in dead_edges:
        sur.remove_edge(e)

    link: dict[Dart, Dart] = {}
    for a, b in pairings:
        link[a] = b
        link[b] = a
    stub_at: dict[Dart, tuple[str, str]] = {g: (vid, pfx) for g, vid, pfx in stubs}

    dead_set = set(dead_edges)
    involved: set[str] = set()
    for eid, e in chart.edges.items():
        if eid in dead_set or e.is_hoop:
            continue
        if e.tail in dying_vertices or e.head in dying_vertices:
            involved.add(eid)
    for d in list(link) + list(stub_at):
        if chart.vertex_of(d) not in dying_vertices:
            raise ChartError(f"splice pairing at live vertex {chart.vertex_of(d)}")
        involved.add(d.edge)

    def is_end(d: Dart) -> bool:
        return chart.vertex_of(d) not in dying_vertices or d in stub_at

    edge_map: dict[str, str] = {}
    seen: set[str] = set()

    def next_entry(head_germ: Dart) -> Dart:
        if head_germ not in link:
            raise ChartError(f"splice chain broken at {head_germ}")
        cont = link[head_germ]
        if cont.end != TAIL:
            raise ChartError("splice chain runs against edge orientation")
        return cont

    def build_open(start: Dart) -> None:
        entries = [start]
        seen.add(start.edge)
        while not is_end(entries[-1].twin()):
            entries.append(next_entry(entries[-1].twin()))
            seen.add(entries[-1].edge)
        far = entries[-1].twin()
        labels = {chart.edges[d.edge].label for d in entries}
        if len(labels) != 1:
            raise ChartError(f"splice chain mixes labels {sorted(labels)}")
        nid = sur.fresh_edge("e")
        if start in stub_at:
            vid, pfx = stub_at[start]
            tail_v = vid or sur.fresh_vertex(pfx)
            sur.add_vertex(tail_v, BLACK, (Dart(nid, TAIL),))
        else:
            tail_v = chart.vertex_of(start)
            sur.rename(start, Dart(nid, TAIL))
        if far in stub_at:
            vid, pfx = stub_at[far]
            head_v = vid or sur.fresh_vertex(pfx)
            sur.add_vertex(head_v, BLACK, (Dart(nid, HEAD),))
        else:
            head_v = chart.vertex_of(far)
            sur.rename(far, Dart(nid, HEAD))
        sur.add_edge(nid, labels.pop(), tail_v, head_v)
        for d in entries:
            edge_map[d.edge] = nid
            if d != start or start in stub_at:
                sur.witness(d, Dart(nid, TAIL))
            if d.twin() != far or far in stub_at:
                sur.witness(d.twin(), Dart(nid, HEAD))

    def build_closed(start: Dart) -> None:
        entries = [start]
        seen.add(start.edge)
        while True:
            cont = next_entry(entries[-1].twin())
            if cont == start:
                break
            entries.append(cont)
            seen.add(cont.edge)
        labels = {chart.edges[d.edge].label for d in entries}
        if len(labels) != 1:
            raise ChartError(f"splice chain mixes labels {sorted(labels)}")
        hid = sur.fresh_edge("e")
        sur.add_edge(hid, labels.pop(), None, None)
        for d in entries:
            edge_map[d.edge] = hid
            if hoop_witness:
                sur.witness(d, Dart(hid, TAIL))
                sur.witness(d.twin(), Dart(hid, HEAD))

    for eid in sorted(involved):
        d = Dart(eid, TAIL)
        if eid not in seen and is_end(d):
            build_open(d)
    for eid in sorted(involved):
        if eid not in seen:
            build_closed(Dart(eid, TAIL))
    for eid in involved:
        sur.remove_edge(eid)
    return edge_map


# ---------------------------------------------------------------------------
# rule framework


class Rule:
    name: str = ""

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        raise NotImplementedError

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        raise NotImplementedError


def _checked(result: Chart) -> Chart:
    if not is_valid(result):
        raise ChartError("move produced an invalid chart")
    return result


def _region_rep(chart: Chart, region: str) -> Dart:
    return chart.faces[region][0]


def _flip(end: str) -> str:
    return HEAD if end == TAIL else TAIL


def _parse_kids(chart: Chart, site: MoveSite) -> dict[str, Dart]:
    raw = site.get("kids", "")
    out: dict[str, Dart] = {}
    if raw:
        for item in raw.split(","):
            comp, _, dartkey = item.partition(":")
            out[comp] = Dart.from_key(dartkey)
    return out


def _kids_role(anchors: dict[str, Dart]) -> dict[str, str]:
    if not anchors:
        return {}
    body = ",".join(f"{c}:{d.key}" for c, d in sorted(anchors.items()))
    return {"kids": body}


def _dart_region(chart: Chart, d: Dart) -> str:
    return chart.region_of(chart.face_of_dart[d])


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise StaleSiteError(msg)


def _get_dart(chart: Chart, site: MoveSite, role: str) -> Dart:
    key = site.get(role)
    _require(key is not None, f"missing role {role}")
    d = Dart.from_key(key)
    _require(d.edge in chart.edges, f"no edge {d.edge}")
    return d


# ---------------------------------------------------------------------------
# CI-M1: hoop birth / death


class HoopBirth(Rule):
    name = "CI-M1+"

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        regions = sorted(chart.regions()) if chart.edges else ["none"]
        for region in regions:
            for m in range(1, chart.degree):
                for outer in (TAIL, HEAD):
                    sites.append(MoveSite.make(
                        self.name, region=region, label=str(m), outer=outer))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        region = site["region"]
        m = int(site["label"])
        outer = site["outer"]
        _require(1 <= m < chart.degree, f"label {m} out of range")
        _require(outer in (TAIL, HEAD), "bad outer side")
        sur = Surgery(chart)
        hid = sur.fresh_edge("e")
        sur.add_edge(hid, m, None, None)
        if region == "none":
            _require(not chart.edges, "region 'none' only valid on an empty chart")
        else:
            _require(region in chart.faces and chart.region_of(region) == region,
                     f"no region {region}")
            sur.anchor(Dart(hid, outer), _region_rep(chart, region))
        chart2 = _checked(sur.commit())
        return chart2, MoveSite.make("CI-M1-", hoop=hid)


class HoopDeath(Rule):
    name = "CI-M1-"

    @staticmethod
    def empty_sides(chart: Chart, hid: str) -> list[str]:
        out = []
        for end in (TAIL, HEAD):
            key = Dart(hid, end).key
            if chart.region_of(key) == key and not region_children(chart, key):
                out.append(end)
        return out

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        for hid in chart.hoops():
            if self.empty_sides(chart, hid):
                sites.append(MoveSite.make(self.name, hoop=hid))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        hid = site["hoop"]
        _require(hid in chart.edges and chart.edges[hid].is_hoop, f"no hoop {hid}")
        empties = self.empty_sides(chart, hid)
        _require(bool(empties), "hoop encloses other content on both sides")
        inner = empties[0]
        outer = _flip(inner)
        label = chart.edges[hid].label
        outer_key = Dart(hid, outer).key
        outer_region = chart.region_of(outer_key)
        rep = None
        for d in chart.darts():
            if d.edge != hid and _dart_region(chart, d) == outer_region:
                rep = d
                break
        sur = Surgery(chart)
        sur.remove_edge(hid)
        chart2 = _checked(sur.commit())
        if rep is not None:
            region2 = _dart_region(chart2, rep)
        else:
            region2 = "none"
        inverse = MoveSite.make(
            "CI-M1+", region=region2, label=str(label), outer=outer)
        return chart2, inverse


# ---------------------------------------------------------------------------
# CI-M2: the oriented saddle


class Saddle(Rule):
    """Band surgery between two strand sides bounding one region.

    Cases, by what the two darts are:
      * two sides of distinct ordinary edges (same end type): reconnect;
        splits their shared face when the darts share it, merges their
        components when they do not.
      * the same dart twice: pop an empty hoop off the edge.
      * an ordinary dart and a hoop side: absorb the hoop into the edge
        (the hoop's far side must be bare).
      * sides of two distinct hoops (same end type): merge the hoops
        (far sides bare).
      * the same hoop side twice: split the hoop in two (far side bare).
    """

    name = "CI-M2"

    def _valid_pair(self, chart: Chart, a: Dart, b: Dart) -> bool:
        ea, eb = chart.edges[a.edge], chart.edges[b.edge]
        if ea.label != eb.label:
            return False
        if _dart_region(chart, a) != _dart_region(chart, b):
            return False
        if a == b:
            if ea.is_hoop:
                far = Dart(a.edge, _flip(a.end)).key
                return chart.region_of(far) == far and not region_children(chart, far)
            return True
        if ea.is_hoop and eb.is_hoop:
            if a.edge == b.edge:
                return False  # opposite hoop sides never share a region
            if a.end != b.end:
                return False
            for d in (a, b):
                far = Dart(d.edge, _flip(d.end)).key
                if chart.region_of(far) != far or region_children(chart, far):
                    return False
            return True
        if ea.is_hoop or eb.is_hoop:
            h = a if ea.is_hoop else b
            far = Dart(h.edge, _flip(h.end)).key
            return chart.region_of(far) == far and not region_children(chart, far)
        if a.edge == b.edge:
            return False  # the two sides of one oriented edge are parallel
        return a.end == b.end

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        darts = sorted(chart.darts())
        sites = []
        for i, a in enumerate(darts):
            for b in darts[i:]:
                if self._valid_pair(chart, a, b):
                    kids = self._default_kids(chart, a, b)
                    sites.append(MoveSite.make(
                        self.name, a=a.key, b=b.key, **_kids_role(kids)))
        return sites

    def _default_kids(self, chart: Chart, a: Dart, b: Dart) -> dict[str, Dart]:
        """A split happens only when two ordinary darts share a face;
        by default every child of that region follows dart a."""
        if a == b or a.edge == b.edge:
            return {}
        ea, eb = chart.edges[a.edge], chart.edges[b.edge]
        if ea.is_hoop or eb.is_hoop:
            return {}
        if chart.face_of_dart[a] != chart.face_of_dart[b]:
            return {}
        region = _dart_region(chart, a)
        return {comp: a for comp in region_children(chart, region)}

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        a = _get_dart(chart, site, "a")
        b = _get_dart(chart, site, "b")
        if (b, a) < (a, b):
            a, b = b, a
        _require(self._valid_pair(chart, a, b), f"saddle does not apply at {a},{b}")
        ea, eb = chart.edges[a.edge], chart.edges[b.edge]
        if a == b:
            if ea.is_hoop:
                return self._split_hoop(chart, a)
            return self._pop_hoop(chart, a)
        if ea.is_hoop and eb.is_hoop:
            return self._merge_hoops(chart, a, b)
        if ea.is_hoop or eb.is_hoop:
            if ea.is_hoop:
                return self._absorb(chart, b, a)
            return self._absorb(chart, a, b)
        return self._reconnect(chart, a, b, _parse_kids(chart, site))

    # -- ordinary reconnection ------------------------------------------

    def _reconnect(self, chart: Chart, a: Dart, b: Dart,
                   kids: dict[str, Dart]) -> tuple[Chart, MoveSite]:
        ea, eb = chart.edges[a.edge], chart.edges[b.edge]
        same_face = chart.face_of_dart[a] == chart.face_of_dart[b]
        end = a.end
        # traversal starts: (p, q) such that the fused edge f covers the
        # start of p's traversal and the end of q's traversal
        p, q = (a, b) if end == TAIL else (b, a)
        ep, eq = chart.edges[p.edge], chart.edges[q.edge]
        sur = Surgery(chart)
        f = sur.fresh_edge("e")
        sur.add_edge(f, ea.label, ep.tail, eq.head)
        g = sur.fresh_edge("e")
        sur.add_edge(g, ea.label, eq.tail, ep.head)
        sur.rename(Dart(p.edge, TAIL), Dart(f, TAIL))
        sur.rename(Dart(q.edge, HEAD), Dart(f, HEAD))
        sur.rename(Dart(q.edge, TAIL), Dart(g, TAIL))
        sur.rename(Dart(p.edge, HEAD), Dart(g, HEAD))
        sur.remove_edge(a.edge)
        sur.remove_edge(b.edge)
        if same_face:
            region = _dart_region(chart, a)
            children = region_children(chart, region)
            anchors: dict[str, Dart] = {}
            for comp in children:
                anchors[comp] = kids.get(comp, a)
            if children or chart.infinity == region:
                sur.split_region(region, RegionSplit(children=anchors, infinity=a))
        # the far sides of the two strands merge across the band corridor;
        # the inverse saddle re-splits them, so record where each child of
        # those far regions has to return
        far = _flip(end)
        far_of_f = Dart((q if end == TAIL else p).edge, far)
        far_of_g = Dart((p if end == TAIL else q).edge, far)
        anchors2: dict[str, Dart] = {}
        for comp in region_children(chart, _dart_region(chart, far_of_f)):
            anchors2[comp] = Dart(f, far)
        for comp in region_children(chart, _dart_region(chart, far_of_g)):
            anchors2.setdefault(comp, Dart(g, far))
        chart2 = _checked(sur.commit())
        inv_a, inv_b = sorted([Dart(f, far), Dart(g, far)])
        inverse = MoveSite.make(
            self.name, a=inv_a.key, b=inv_b.key, **_kids_role(anchors2))
        return chart2, inverse

    # -- hoop pop / absorb ------------------------------------------------

    def _pop_hoop(self, chart: Chart, d: Dart) -> tuple[Chart, MoveSite]:
        e = chart.edges[d.edge]
        sur = Surgery(chart)
        f = sur.fresh_edge("e")
        sur.add_edge(f, e.label, e.tail, e.head)
        h = sur.fresh_edge("e")
        sur.add_edge(h, e.label, None, None)
        sur.rename(Dart(d.edge, TAIL), Dart(f, TAIL))
        sur.rename(Dart(d.edge, HEAD), Dart(f, HEAD))
        sur.remove_edge(d.edge)
        # hoop inside faces the popped side; its outer side joins the region
        outer_end = _flip(d.end)
        sur.anchor(Dart(h, outer_end), Dart(f, d.end))
        chart2 = _checked(sur.commit())
        inv_a, inv_b = sorted([Dart(f, d.end), Dart(h, outer_end)])
        inverse = MoveSite.make(self.name, a=inv_a.key, b=inv_b.key)
        return chart2, inverse

    def _absorb(self, chart: Chart, d: Dart, s: Dart) -> tuple[Chart, MoveSite]:
        e = chart.edges[d.edge]
        sur = Surgery(chart)
        g = sur.fresh_edge("e")
        sur.add_edge(g, e.label, e.tail, e.head)
        sur.rename(Dart(d.edge, TAIL), Dart(g, TAIL))
        sur.rename(Dart(d.edge, HEAD), Dart(g, HEAD))
        sur.remove_edge(d.edge)
        sur.remove_edge(s.edge)
        chart2 = _checked(sur.commit())
        inv = Dart(g, _flip(s.end))
        inverse = MoveSite.make(self.name, a=inv.key, b=inv.key)
        return chart2, inverse

    def _merge_hoops(self, chart: Chart, a: Dart, b: Dart) -> tuple[Chart, MoveSite]:
        label = chart.edges[a.edge].label
        sur = Surgery(chart)
        h = sur.fresh_edge("e")
        sur.add_edge(h, label, None, None)
        # the shared region stays on the same flow side of the merged hoop
        sur.witness(a, Dart(h, a.end))
        sur.witness(Dart(a.edge, _flip(a.end)), Dart(h, _flip(a.end)))
        sur.witness(b, Dart(h, a.end))
        sur.witness(Dart(b.edge, _flip(b.end)), Dart(h, _flip(a.end)))
        sur.remove_edge(a.edge)
        sur.remove_edge(b.edge)
        chart2 = _checked(sur.commit())
        inv = Dart(h, a.end)
        inverse = MoveSite.make(self.name, a=inv.key, b=inv.key)
        return chart2, inverse

    def _split_hoop(self, chart: Chart, s: Dart) -> tuple[Chart, MoveSite]:
        label = chart.edges[s.edge].label
        sur = Surgery(chart)
        h1 = sur.fresh_edge("e")
        sur.add_edge(h1, label, None, None)
        h2 = sur.fresh_edge("e")
        sur.add_edge(h2, label, None, None)
        sur.witness(s, Dart(h1, s.end))
        sur.anchor(Dart(h2, s.end), Dart(h1, s.end))
        sur.remove_edge(s.edge)
        chart2 = _checked(sur.commit())
        inv_a, inv_b = sorted([Dart(h1, s.end), Dart(h2, s.end)])
        inverse = MoveSite.make(self.name, a=inv_a.key, b=inv_b.key)
        return chart2, inverse


def _region_darts(chart: Chart, region: str) -> list[Dart]:
    return sorted(d for d in chart.darts() if _dart_region(chart, d) == region)


def _restore_anchors(sur: Surgery, chart: Chart, regions: Iterable[str]) -> dict[str, Dart]:
    """For every child of the given regions, record a surviving dart of
    the region (off the child components) so an inverse move can put
    the child back where it came from."""
    out: dict[str, Dart] = {}
    for region in regions:
        children = region_children(chart, region)
        if not children:
            continue
        child_members: set[str] = set()
        for comp in children:
            child_members |= chart.components[comp]
        for comp in children:
            for d in _region_darts(chart, region):
                if d.edge in child_members:
                    continue
                nd = sur.survivor(d)
                if nd is not None:
                    out[comp] = nd
                    break
    return out


def _is_terminal(chart: Chart, eid: str) -> bool:
    e = chart.edges[eid]
    if e.is_hoop:
        return False
    kt = chart.vertices[e.tail].kind
    kh = chart.vertices[e.head].kind
    return (kt == BLACK) != (kh == BLACK) and WHITE in (kt, kh)


def _black_end(chart: Chart, eid: str) -> Optional[str]:
    e = chart.edges[eid]
    if e.is_hoop:
        return None
    for v in (e.tail, e.head):
        if chart.vertices[v].kind == BLACK:
            return v
    return None


# ---------------------------------------------------------------------------
# CIII: a white vertex absorbs or emits a terminal edge


class WhiteAbsorb(Rule):
    """Remove a white vertex using a black-ended edge at it that does
    not carry a middle arc: the five remaining strands reconnect in
    nested pairs and the middle one ends at a fresh black vertex."""

    name = "CIII-"

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        from .model import middle_darts
        sites = []
        for vid in chart.whites():
            rot = chart.vertices[vid].rotation
            mids = middle_darts(chart, vid)
            for d in rot:
                e = chart.edges[d.edge]
                other = e.head if chart.vertex_of(d) == e.tail and d.end == TAIL else e.tail
                other = e.endpoint(HEAD if d.end == TAIL else TAIL)
                if other is None or chart.vertices[other].kind != BLACK:
                    continue
                if d in mids:
                    continue
                sites.append(MoveSite.make(self.name, white=vid, term=d.edge))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        from .model import middle_darts
        vid = site["white"]
        term = site["term"]
        _require(vid in chart.vertices and chart.vertices[vid].kind == WHITE,
                 f"no white vertex {vid}")
        _require(term in chart.edges, f"no edge {term}")
        rot = chart.vertices[vid].rotation
        germ = None
        for d in rot:
            if d.edge == term:
                germ = d
        _require(germ is not None, f"edge {term} not at {vid}")
        black = chart.edges[term].endpoint(HEAD if germ.end == TAIL else TAIL)
        _require(black is not None and chart.vertices[black].kind == BLACK,
                 f"edge {term} has no black end")
        _require(germ not in middle_darts(chart, vid),
                 f"edge {term} is a middle arc at {vid}")
        k = rot.index(germ)
        g = [rot[(k + i) % 6] for i in range(6)]
        sur = Surgery(chart)
        # remember where the children of the six corner regions belong
        sur.remove_vertex(black)
        regions = sorted({_dart_region(chart, d) for d in rot})
        stub_black = sur.fresh_vertex("b")
        edge_map = splice_strands(
            sur, chart,
            dying_vertices={vid, black},
            pairings=[(g[1], g[5]), (g[2], g[4])],
            stubs=[(g[3], stub_black, "b")],
            dead_edges=[term],
        )
        anchors = _restore_anchors(sur, chart, regions)
        chart2 = _checked(sur.commit())
        if not want_inverse:
            return chart2, None
        new_term = edge_map[g[3].edge]
        strand_a = edge_map[g[1].edge]
        strand_b = edge_map[g[2].edge]
        candidates = []
        for aend in (TAIL, HEAD):
            for bend in (TAIL, HEAD):
                candidates.append(MoveSite.make(
                    "CIII+",
                    term=new_term,
                    tip=stub_black,
                    a=Dart(strand_a, aend).key,
                    b=Dart(strand_b, bend).key,
                    ax=g[1].end, bx=g[2].end, td=germ.end,
                    white=vid,
                    **_kids_role(anchors),
                ))
        inverse = _verified_inverse(chart, chart2, candidates)
        if inverse is None:
            raise StaleSiteError(f"white absorb at {vid} is not reversible")
        return chart2, inverse


class WhiteEmit(Rule):
    """Create a white vertex by pushing a black-ended edge through two
    nested passing strands (the reverse of CIII-)."""

    name = "CIII+"

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        for eid in sorted(chart.edges):
            e = chart.edges[eid]
            if e.is_hoop:
                continue
            tips = [v for v in (e.tail, e.head)
                    if chart.vertices[v].kind == BLACK]
            lab_t = e.label
            for black in tips:
                tip = chart.vertices[black].rotation[0]
                tip_region = _dart_region(chart, tip)
                for b in sorted(chart.darts()):
                    if b.edge == eid or chart.edges[b.edge].is_hoop:
                        continue
                    if _dart_region(chart, b) != tip_region:
                        continue
                    if abs(chart.edges[b.edge].label - lab_t) != 1:
                        continue
                    far = _dart_region(chart, b.twin())
                    for a in sorted(chart.darts()):
                        if a.edge in (eid, b.edge) or chart.edges[a.edge].is_hoop:
                            continue
                        if _dart_region(chart, a) != far:
                            continue
                        if chart.edges[a.edge].label != lab_t:
                            continue
                        for ax in (TAIL, HEAD):
                            for bx in (TAIL, HEAD):
                                for td in (TAIL, HEAD):
                                    sites.append(MoveSite.make(
                                        self.name, term=eid, tip=black,
                                        a=a.key, b=b.key,
                                        ax=ax, bx=bx, td=td,
                                        white="",
                                    ))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        term = site["term"]
        _require(term in chart.edges, f"no edge {term}")
        black = site.get("tip") or _black_end(chart, term)
        _require(black in chart.vertices
                 and chart.vertices[black].kind == BLACK
                 and black in (chart.edges[term].tail, chart.edges[term].head),
                 f"edge {term} has no black tip {black}")
        a = _get_dart(chart, site, "a")
        b = _get_dart(chart, site, "b")
        ax, bx, td = site["ax"], site["bx"], site["td"]
        kids = _parse_kids(chart, site)
        eA, eB, eT = chart.edges[a.edge], chart.edges[b.edge], chart.edges[term]
        _require(eA.label == eT.label and abs(eB.label - eT.label) == 1,
                 "labels do not fit a white vertex")
        tip = chart.vertices[black].rotation[0]
        _require(_dart_region(chart, b) == _dart_region(chart, tip),
                 "strand b not at the tip")
        _require(_dart_region(chart, a) == _dart_region(chart, b.twin()),
                 "strand a not beyond strand b")

        sur = Surgery(chart)
        wid = site.get("white") or sur.fresh_vertex("w")
        if wid in chart.vertices:
            wid = sur.fresh_vertex("w")
        affected = sorted({_dart_region(chart, d)
                           for d in (a, a.twin(), b, b.twin(), tip)})
        # cut strand a
        a1 = sur.add_edge(sur.fresh_edge("e"), eA.label, eA.tail, wid)
        a2 = sur.add_edge(sur.fresh_edge("e"), eA.label, wid, eA.head)
        sur.rename(Dart(a.edge, TAIL), Dart(a1, TAIL))
        sur.rename(Dart(a.edge, HEAD), Dart(a2, HEAD))
        sur.remove_edge(a.edge)
        # cut strand b
        b1 = sur.add_edge(sur.fresh_edge("e"), eB.label, eB.tail, wid)
        b2 = sur.add_edge(sur.fresh_edge("e"), eB.label, wid, eB.head)
        sur.rename(Dart(b.edge, TAIL), Dart(b1, TAIL))
        sur.rename(Dart(b.edge, HEAD), Dart(b2, HEAD))
        sur.remove_edge(b.edge)
        # the consumed terminal reattaches to the white vertex
        far_end = HEAD if eT.endpoint(TAIL) == black else TAIL
        tpp = sur.fresh_edge("e")
        if far_end == TAIL:
            far_v = eT.tail
            sur.add_edge(tpp, eT.label, far_v, wid)
            sur.rename(Dart(term, TAIL), Dart(tpp, TAIL))
            t3 = Dart(tpp, HEAD)
        else:
            far_v = eT.head
            sur.add_edge(tpp, eT.label, wid, far_v)
            sur.rename(Dart(term, HEAD), Dart(tpp, HEAD))
            t3 = Dart(tpp, TAIL)
        sur.remove_edge(term)
        sur.remove_vertex(black)
        # the fresh terminal edge at the white vertex
        nt = sur.fresh_edge("e")
        nb = sur.fresh_vertex("b")
        if td == TAIL:
            sur.add_edge(nt, eB.label, wid, nb)
            t0 = Dart(nt, TAIL)
            sur.add_vertex(nb, BLACK, (Dart(nt, HEAD),))
        else:
            sur.add_edge(nt, eB.label, nb, wid)
            t0 = Dart(nt, HEAD)
            sur.add_vertex(nb, BLACK, (Dart(nt, TAIL),))
        ga1 = Dart(a1, HEAD) if ax == HEAD else Dart(a2, TAIL)
        ga5 = Dart(a2, TAIL) if ax == HEAD else Dart(a1, HEAD)
        gb2 = Dart(b1, HEAD) if bx == HEAD else Dart(b2, TAIL)
        gb4 = Dart(b2, TAIL) if bx == HEAD else Dart(b1, HEAD)
        sur.add_vertex(wid, WHITE, (t0, ga1, gb2, t3, gb4, ga5))
        for region in affected:
            children = region_children(chart, region)
            if children or chart.infinity == region:
                anchors = {c: kids.get(c, Dart(b.edge, TAIL)) for c in children}
                sur.split_region(region, RegionSplit(children=anchors, infinity=b))
        chart2 = _checked(sur.commit())
        inverse = MoveSite.make("CIII-", white=wid, term=nt)
        return chart2, inverse


# ---------------------------------------------------------------------------
# CII: a black vertex passes through a far-label edge


class BlackThrough(Rule):
    name = "CII+"

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        for vid in chart.blacks():
            tip = chart.vertices[vid].rotation[0]
            lab = chart.edges[tip.edge].label
            tregion = _dart_region(chart, tip)
            for s in sorted(chart.darts()):
                if s.edge == tip.edge or chart.edges[s.edge].is_hoop:
                    continue
                if abs(chart.edges[s.edge].label - lab) <= 1:
                    continue
                if _dart_region(chart, s) != tregion:
                    continue
                kids = {c: s for c in region_children(chart, tregion)}
                sites.append(MoveSite.make(
                    self.name, black=vid, across=s.key, **_kids_role(kids)))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        vid = site["black"]
        _require(vid in chart.vertices and chart.vertices[vid].kind == BLACK,
                 f"no black vertex {vid}")
        s = _get_dart(chart, site, "across")
        tip = chart.vertices[vid].rotation[0]
        eps = chart.edges[tip.edge]
        es = chart.edges[s.edge]
        _require(not es.is_hoop, "cannot cross a hoop")
        _require(abs(es.label - eps.label) > 1, "labels too close to cross")
        region = _dart_region(chart, tip)
        _require(_dart_region(chart, s) == region, "black vertex and edge apart")
        kids = _parse_kids(chart, site)

        sur = Surgery(chart)
        y = sur.add_vertex(sur.fresh_vertex("x"), CROSSING)
        # split the crossed edge
        s1 = sur.add_edge(sur.fresh_edge("e"), es.label, es.tail, y)
        s2 = sur.add_edge(sur.fresh_edge("e"), es.label, y, es.head)
        sur.rename(Dart(s.edge, TAIL), Dart(s1, TAIL))
        sur.rename(Dart(s.edge, HEAD), Dart(s2, HEAD))
        sur.remove_edge(s.edge)
        # extend the tip's edge across: the piece at the far side keeps
        # the old orientation, the black vertex moves beyond the edge
        if tip.end == HEAD:  # edge flows toward the black vertex
            e1 = sur.add_edge(sur.fresh_edge("e"), eps.label, eps.tail, y)
            e2 = sur.add_edge(sur.fresh_edge("e"), eps.label, y, vid)
            sur.rename(Dart(tip.edge, TAIL), Dart(e1, TAIL))
            sur.set_rotation(vid, (Dart(e2, HEAD),))
            arr_e, leave_e = Dart(e1, HEAD), Dart(e2, TAIL)
        else:  # edge flows away from the black vertex
            e1 = sur.add_edge(sur.fresh_edge("e"), eps.label, y, eps.head)
            e2 = sur.add_edge(sur.fresh_edge("e"), eps.label, vid, y)
            sur.rename(Dart(tip.edge, HEAD), Dart(e1, HEAD))
            sur.set_rotation(vid, (Dart(e2, TAIL),))
            arr_e, leave_e = Dart(e2, HEAD), Dart(e1, TAIL)
        sur.remove_edge(tip.edge)
        arr_s, leave_s = Dart(s1, HEAD), Dart(s2, TAIL)
        if s.end == TAIL:
            sur.set_rotation(y, (arr_e, leave_s, leave_e, arr_s))
        else:
            sur.set_rotation(y, (leave_e, leave_s, arr_e, arr_s))
        children = region_children(chart, region)
        if children or chart.infinity == region:
            anchors = {c: kids.get(c, s) for c in children}
            sur.split_region(region, RegionSplit(children=anchors, infinity=s))
        chart2 = _checked(sur.commit())
        inverse = MoveSite.make("CII-", black=vid)
        return chart2, inverse


class BlackRetract(Rule):
    name = "CII-"

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        for vid in chart.blacks():
            tip = chart.vertices[vid].rotation[0]
            e = chart.edges[tip.edge]
            other = e.endpoint(HEAD if tip.end == TAIL else TAIL)
            if other is not None and chart.vertices[other].kind == CROSSING:
                sites.append(MoveSite.make(self.name, black=vid))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        vid = site["black"]
        _require(vid in chart.vertices and chart.vertices[vid].kind == BLACK,
                 f"no black vertex {vid}")
        tip = chart.vertices[vid].rotation[0]
        e2 = chart.edges[tip.edge]
        y = e2.endpoint(HEAD if tip.end == TAIL else TAIL)
        _require(y is not None and chart.vertices[y].kind == CROSSING,
                 f"edge at {vid} does not end at a crossing")
        rot = chart.vertices[y].rotation
        ygerm = next(d for d in rot if d.edge == tip.edge)
        k = rot.index(ygerm)
        opp = rot[(k + 2) % 6 % 4]
        opp = rot[(k + 2) % 4]
        s_in, s_out = rot[(k + 1) % 4], rot[(k + 3) % 4]
        sur = Surgery(chart)
        # rebuild the crossed edge and shorten the tip edge
        edge_map = splice_strands(
            sur, chart,
            dying_vertices={y},
            pairings=[(s_in, s_out)],
            stubs=[(opp, vid, "b")],
            dead_edges=[tip.edge],
        )
        sur.remove_vertex(vid)
        chart2 = _checked(sur.commit())
        new_s = edge_map[s_in.edge]
        back = None
        for end in (TAIL, HEAD):
            cand = Dart(new_s, end)
            if _dart_region(chart2, cand) == _dart_region(
                    chart2, chart2.vertices[vid].rotation[0]):
                back = cand
                break
        sur2_anchor = back.key if back else Dart(new_s, TAIL).key
        inverse = MoveSite.make("CII+", black=vid, across=sur2_anchor)
        return chart2, inverse


# ---------------------------------------------------------------------------
# CI-M3: white-pair cancellation / creation


class WhitePairCancel(Rule):
    """Two white vertices of the same type joined by an edge cancel;
    the ten remaining strands close up in mirrored pairs."""

    name = "CI-M3-"

    @staticmethod
    def _match(chart: Chart, eid: str) -> Optional[tuple]:
        e = chart.edges[eid]
        if e.is_hoop or e.tail == e.head:
            return None
        u, v = e.tail, e.head
        if chart.vertices[u].kind != WHITE or chart.vertices[v].kind != WHITE:
            return None
        rot_u = chart.vertices[u].rotation
        rot_v = chart.vertices[v].rotation
        ku = rot_u.index(Dart(eid, TAIL))
        kv = rot_v.index(Dart(eid, HEAD))
        gu = [rot_u[(ku + i) % 6] for i in range(6)]
        gv = [rot_v[(kv + i) % 6] for i in range(6)]
        pairs = [(gu[i], gv[6 - i]) for i in range(1, 6)]
        edges = {eid}
        for a, b in pairs:
            if a.edge == b.edge and a.edge in edges:
                return None
            if chart.label_of(a) != chart.label_of(b):
                return None
            if a.end == b.end:  # needs one inflow and one outflow
                return None
            edges.add(a.edge)
            edges.add(b.edge)
        if len(edges) != 11:
            return None  # keep the pattern loop-free
        return u, v, pairs

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        for eid in sorted(chart.edges):
            if self._match(chart, eid) is not None:
                sites.append(MoveSite.make(self.name, edge=eid))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        eid = site["edge"]
        _require(eid in chart.edges, f"no edge {eid}")
        m = self._match(chart, eid)
        _require(m is not None, f"white pair does not cancel at {eid}")
        u, v, pairs = m
        e = chart.edges[eid]
        rot_u = chart.vertices[u].rotation
        ku = rot_u.index(Dart(eid, TAIL))
        gu = [rot_u[(ku + i) % 6] for i in range(6)]
        regions = sorted({_dart_region(chart, d)
                          for d in list(rot_u) + list(chart.vertices[v].rotation)})
        sur = Surgery(chart)
        edge_map = splice_strands(
            sur, chart,
            dying_vertices={u, v},
            pairings=pairs,
            dead_edges=[eid],
        )
        anchors = _restore_anchors(sur, chart, regions)
        chart2 = _checked(sur.commit())
        strands = ",".join(
            f"{edge_map[g.edge]}:{g.end}" for g in gu[1:6])
        inverse = MoveSite.make(
            "CI-M3+",
            strands=strands,
            elabel=str(e.label),
            u=u, v=v,
            **_kids_role(anchors),
        )
        return chart2, inverse


class WhitePairCreate(Rule):
    """Insert a cancelling white-vertex pair across five parallel
    strands (the reverse of CI-M3-)."""

    name = "CI-M3+"

    def _chains(self, chart: Chart) -> list[tuple[str, ...]]:
        """Ordered 5-tuples of distinct edges whose sides connect face
        to face with the o,t,o,t,o label pattern of a white pair."""
        out: set[tuple[str, ...]] = set()
        darts = sorted(d for d in chart.darts()
                       if not chart.edges[d.edge].is_hoop)
        by_face: dict[str, list[Dart]] = {}
        for d in darts:
            by_face.setdefault(chart.face_of_dart[d.twin()], []).append(d)
        for d1 in darts:
            o = chart.label_of(d1)
            for tau in (o - 1, o + 1):
                if not 1 <= tau <= chart.degree - 1:
                    continue
                stack = [[d1]]
                while stack:
                    chain = stack.pop()
                    if len(chain) == 5:
                        out.add(tuple(c.edge for c in chain))
                        continue
                    want = o if len(chain) % 2 == 0 else tau
                    face = chart.face_of_dart[chain[-1]]
                    used = {c.edge for c in chain}
                    for d in by_face.get(face, ()):
                        if d.edge in used or chart.label_of(d) != want:
                            continue
                        stack.append(chain + [d])
        return sorted(out)

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        # orientation flags around the new white: three consecutive
        # outward, so given the new edge's flag only three layouts fit
        patterns = [[(i + j) % 6 < 3 for i in range(6)] for j in range(6)]
        sites = []
        for chain in self._chains(chart):
            tau = chart.edges[chain[1]].label
            for ed in (TAIL, HEAD):
                for pat in patterns:
                    if pat[0] != (ed == TAIL):
                        continue
                    strands = ",".join(
                        f"{eid}:{TAIL if pat[i + 1] else HEAD}"
                        for i, eid in enumerate(chain))
                    sites.append(MoveSite.make(
                        self.name, strands=strands, elabel=str(tau),
                        u="", v="", edir=ed))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        raw = site["strands"].split(",")
        _require(len(raw) == 5, "need five strands")
        strands: list[tuple[str, str]] = []
        for item in raw:
            eid, _, end = item.partition(":")
            _require(eid in chart.edges and not chart.edges[eid].is_hoop,
                     f"bad strand {eid}")
            strands.append((eid, end))
        _require(len({eid for eid, _ in strands}) == 5, "strands must be distinct")
        elabel = int(site["elabel"])
        kids = _parse_kids(chart, site)
        edir = site.get("edir", TAIL)

        sur = Surgery(chart)
        u = site.get("u") or sur.fresh_vertex("w")
        if u in chart.vertices:
            u = sur.fresh_vertex("w")
        sur.add_vertex(u, WHITE)
        v = site.get("v") or sur.fresh_vertex("w")
        if v in chart.vertices or v == u:
            v = fresh_id(list(chart.vertices) + [u], "w")
        sur.add_vertex(v, WHITE)
        affected = sorted({_dart_region(chart, d)
                           for eid, end in strands
                           for d in (Dart(eid, TAIL), Dart(eid, HEAD))})
        u_germs: list[Dart] = []
        v_germs: list[Dart] = []
        for eid, uend in strands:
            eo = chart.edges[eid]
            p1 = sur.add_edge(sur.fresh_edge("e"), eo.label, eo.tail, u if uend == HEAD else v)
            p2 = sur.add_edge(sur.fresh_edge("e"), eo.label, u if uend == TAIL else v, eo.head)
            sur.rename(Dart(eid, TAIL), Dart(p1, TAIL))
            sur.rename(Dart(eid, HEAD), Dart(p2, HEAD))
            sur.remove_edge(eid)
            if uend == HEAD:
                u_germs.append(Dart(p1, HEAD))
                v_germs.append(Dart(p2, TAIL))
            else:
                u_germs.append(Dart(p2, TAIL))
                v_germs.append(Dart(p1, HEAD))
        mid = sur.fresh_edge("e")
        if edir == TAIL:
            sur.add_edge(mid, elabel, u, v)
            ue, ve = Dart(mid, TAIL), Dart(mid, HEAD)
        else:
            sur.add_edge(mid, elabel, v, u)
            ue, ve = Dart(mid, HEAD), Dart(mid, TAIL)
        sur.set_rotation(u, (ue, *u_germs))
        sur.set_rotation(v, (ve, *reversed(v_germs)))
        for region in affected:
            children = region_children(chart, region)
            if children or chart.infinity == region:
                anchor_default = Dart(strands[0][0], TAIL)
                anchors = {c: kids.get(c, anchor_default) for c in children}
                sur.split_region(region, RegionSplit(
                    children=anchors, infinity=anchor_default))
        chart2 = _checked(sur.commit())
        inverse = MoveSite.make("CI-M3-", edge=mid)
        return chart2, inverse


# ---------------------------------------------------------------------------
# CI-R2: double crossing birth / death


class LensCreate(Rule):
    name = "CI-R2+"

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        darts = [d for d in sorted(chart.darts())
                 if not chart.edges[d.edge].is_hoop]
        for a in darts:
            for b in darts:
                if a.edge == b.edge:
                    continue
                if abs(chart.label_of(a) - chart.label_of(b)) <= 1:
                    continue
                if _dart_region(chart, a) != _dart_region(chart, b):
                    continue
                kids = {c: a for c in region_children(
                    chart, _dart_region(chart, a))}
                for dir_ in ("p", "n"):
                    for r1 in ("x", "y"):
                        for r2 in ("x", "y"):
                            sites.append(MoveSite.make(
                                self.name, a=a.key, b=b.key, dir=dir_,
                                r1=r1, r2=r2, **_kids_role(kids)))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        a = _get_dart(chart, site, "a")
        b = _get_dart(chart, site, "b")
        eA, eB = chart.edges[a.edge], chart.edges[b.edge]
        _require(not eA.is_hoop and not eB.is_hoop, "strands must be edges")
        _require(a.edge != b.edge, "strands must differ")
        _require(abs(eA.label - eB.label) > 1, "labels too close to cross")
        region = _dart_region(chart, a)
        _require(_dart_region(chart, b) == region, "strands not in one region")
        dir_, r1, r2 = site["dir"], site["r1"], site["r2"]
        kids = _parse_kids(chart, site)

        sur = Surgery(chart)
        y1 = sur.add_vertex(sur.fresh_vertex("x"), CROSSING)
        y2 = sur.add_vertex(fresh_id(list(chart.vertices) + [y1], "x"), CROSSING)
        a1 = sur.add_edge(sur.fresh_edge("e"), eA.label, eA.tail, y1)
        am = sur.add_edge(sur.fresh_edge("e"), eA.label, y1, y2)
        a2 = sur.add_edge(sur.fresh_edge("e"), eA.label, y2, eA.head)
        sur.rename(Dart(a.edge, TAIL), Dart(a1, TAIL))
        sur.rename(Dart(a.edge, HEAD), Dart(a2, HEAD))
        sur.remove_edge(a.edge)
        if dir_ == "p":  # strand b passes y1 then y2
            b1 = sur.add_edge(sur.fresh_edge("e"), eB.label, eB.tail, y1)
            bm = sur.add_edge(sur.fresh_edge("e"), eB.label, y1, y2)
            b2 = sur.add_edge(sur.fresh_edge("e"), eB.label, y2, eB.head)
            arr1, leave1 = Dart(b1, HEAD), Dart(bm, TAIL)
            arr2, leave2 = Dart(bm, HEAD), Dart(b2, TAIL)
        else:  # strand b passes y2 then y1
            b1 = sur.add_edge(sur.fresh_edge("e"), eB.label, eB.tail, y2)
            bm = sur.add_edge(sur.fresh_edge("e"), eB.label, y2, y1)
            b2 = sur.add_edge(sur.fresh_edge("e"), eB.label, y1, eB.head)
            arr1, leave1 = Dart(bm, HEAD), Dart(b2, TAIL)
            arr2, leave2 = Dart(b1, HEAD), Dart(bm, TAIL)
        sur.rename(Dart(b.edge, TAIL), Dart(b1, TAIL))
        sur.rename(Dart(b.edge, HEAD), Dart(b2, HEAD))
        sur.remove_edge(b.edge)
        if r1 == "x":
            sur.set_rotation(y1, (Dart(a1, HEAD), leave1, Dart(am, TAIL), arr1))
        else:
            sur.set_rotation(y1, (Dart(a1, HEAD), arr1, Dart(am, TAIL), leave1))
        if r2 == "x":
            sur.set_rotation(y2, (Dart(am, HEAD), leave2, Dart(a2, TAIL), arr2))
        else:
            sur.set_rotation(y2, (Dart(am, HEAD), arr2, Dart(a2, TAIL), leave2))
        children = region_children(chart, region)
        if children or chart.infinity == region:
            anchors = {c: kids.get(c, a) for c in children}
            sur.split_region(region, RegionSplit(children=anchors, infinity=a))
        chart2 = _checked(sur.commit())
        _require(LensRemove._match(chart2, y1, y2) is not None,
                 "strands did not form a removable lens")
        inverse = MoveSite.make("CI-R2-", x=y1, y=y2)
        return chart2, inverse


class LensRemove(Rule):
    name = "CI-R2-"

    @staticmethod
    def _match(chart: Chart, y1: str, y2: str) -> Optional[tuple]:
        """The lens: a 2-walk face whose darts join y1 and y2."""
        if y1 == y2:
            return None
        for key, walk in chart.faces.items():
            if len(walk) != 2:
                continue
            da, db = walk
            ea, eb = chart.edges[da.edge], chart.edges[db.edge]
            if ea.is_hoop or eb.is_hoop or da.edge == db.edge:
                continue
            ends = {ea.tail, ea.head}
            if ends != {eb.tail, eb.head} or ends != {y1, y2}:
                continue
            if not all(chart.vertices[v].kind == CROSSING for v in ends):
                continue
            if region_children(chart, chart.region_of(key)):
                continue
            return da.edge, db.edge
        return None

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        xs = chart.crossings()
        for i, y1 in enumerate(xs):
            for y2 in xs[i + 1:]:
                if self._match(chart, y1, y2) is not None:
                    sites.append(MoveSite.make(self.name, x=y1, y=y2))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        y1, y2 = site["x"], site["y"]
        for y in (y1, y2):
            _require(y in chart.vertices and chart.vertices[y].kind == CROSSING,
                     f"no crossing {y}")
        m = self._match(chart, y1, y2)
        _require(m is not None, f"no clean lens between {y1} and {y2}")
        ma, mb = m
        pairings = []
        for y in (y1, y2):
            rot = chart.vertices[y].rotation
            ka = next(i for i, d in enumerate(rot) if d.edge == ma)
            pairings.append((rot[ka], rot[(ka + 2) % 4]))
            kb = next(i for i, d in enumerate(rot) if d.edge == mb)
            pairings.append((rot[kb], rot[(kb + 2) % 4]))
        regions = sorted({_dart_region(chart, d)
                          for y in (y1, y2)
                          for d in chart.vertices[y].rotation})
        sur = Surgery(chart)
        edge_map = splice_strands(
            sur, chart,
            dying_vertices={y1, y2},
            pairings=[(p, q) if p.end == HEAD else (q, p) for p, q in pairings],
        )
        anchors = _restore_anchors(sur, chart, regions)
        chart2 = _checked(sur.commit())
        if not want_inverse:
            return chart2, None
        new_a = edge_map[ma]
        new_b = edge_map[mb]
        candidates = []
        if not chart2.edges[new_a].is_hoop and not chart2.edges[new_b].is_hoop:
            kid_role = _kids_role(anchors)
            for end_a in (TAIL, HEAD):
                for end_b in (TAIL, HEAD):
                    for dir_ in ("p", "n"):
                        for r1 in ("x", "y"):
                            for r2 in ("x", "y"):
                                candidates.append(MoveSite.make(
                                    "CI-R2+",
                                    a=Dart(new_a, end_a).key,
                                    b=Dart(new_b, end_b).key,
                                    dir=dir_, r1=r1, r2=r2, **kid_role))
        inverse = _verified_inverse(chart, chart2, candidates)
        if inverse is None:
            raise StaleSiteError(
                f"lens removal at {y1},{y2} is not reversible")
        return chart2, inverse


# ---------------------------------------------------------------------------
# CI-M4: ring pass (thread / unthread a hoop on a far-label edge)


class RingThread(Rule):
    name = "CI-M4+"

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        for hid in chart.hoops():
            lab = chart.edges[hid].label
            for end in (TAIL, HEAD):
                side = Dart(hid, end)
                far = Dart(hid, _flip(end)).key
                if chart.region_of(far) != far or region_children(chart, far):
                    continue
                region = _dart_region(chart, side)
                for s in sorted(chart.darts()):
                    if s.edge == hid or chart.edges[s.edge].is_hoop:
                        continue
                    if abs(chart.label_of(s) - lab) <= 1:
                        continue
                    if _dart_region(chart, s) != region:
                        continue
                    for flip_ in ("0", "1"):
                        sites.append(MoveSite.make(
                            self.name, hoop=hid, side=end,
                            target=s.key, flip=flip_))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        hid = site["hoop"]
        _require(hid in chart.edges and chart.edges[hid].is_hoop, f"no hoop {hid}")
        s = _get_dart(chart, site, "target")
        end = site["side"]
        flip_ = site.get("flip", "0")
        eh, es = chart.edges[hid], chart.edges[s.edge]
        _require(not es.is_hoop, "target must be an ordinary edge")
        _require(abs(eh.label - es.label) > 1, "labels too close to cross")
        far = Dart(hid, _flip(end)).key
        _require(chart.region_of(far) == far and not region_children(chart, far),
                 "hoop must be empty inside")
        _require(_dart_region(chart, Dart(hid, end)) == _dart_region(chart, s),
                 "hoop and target edge apart")

        sur = Surgery(chart)
        y1 = sur.add_vertex(sur.fresh_vertex("x"), CROSSING)
        y2 = sur.add_vertex(fresh_id(list(chart.vertices) + [y1], "x"), CROSSING)
        s1 = sur.add_edge(sur.fresh_edge("e"), es.label, es.tail, y1)
        sm = sur.add_edge(sur.fresh_edge("e"), es.label, y1, y2)
        s2 = sur.add_edge(sur.fresh_edge("e"), es.label, y2, es.head)
        sur.rename(Dart(s.edge, TAIL), Dart(s1, TAIL))
        sur.rename(Dart(s.edge, HEAD), Dart(s2, HEAD))
        sur.remove_edge(s.edge)
        ra = sur.add_edge(sur.fresh_edge("e"), eh.label, y1, y2)
        rb = sur.add_edge(sur.fresh_edge("e"), eh.label, y2, y1)
        sur.remove_edge(hid)
        if flip_ == "0":
            sur.set_rotation(y1, (Dart(s1, HEAD), Dart(rb, HEAD),
                                  Dart(sm, TAIL), Dart(ra, TAIL)))
            sur.set_rotation(y2, (Dart(sm, HEAD), Dart(rb, TAIL),
                                  Dart(s2, TAIL), Dart(ra, HEAD)))
        else:
            sur.set_rotation(y1, (Dart(s1, HEAD), Dart(ra, TAIL),
                                  Dart(sm, TAIL), Dart(rb, HEAD)))
            sur.set_rotation(y2, (Dart(sm, HEAD), Dart(ra, HEAD),
                                  Dart(s2, TAIL), Dart(rb, TAIL)))
        chart2 = _checked(sur.commit())
        if not want_inverse:
            return chart2, None
        candidates = [
            MoveSite.make("CI-M4-", x=y1, y=y2, pull=pull, hside=hside)
            for pull in (TAIL, HEAD) for hside in (TAIL, HEAD)
        ]
        inverse = _verified_inverse(chart, chart2, candidates)
        if inverse is None:
            raise StaleSiteError("threading is not reversible")
        return chart2, inverse


class RingUnthread(Rule):
    name = "CI-M4-"

    @staticmethod
    def _match(chart: Chart, y1: str, y2: str) -> Optional[tuple]:
        """Ring pattern: two edges of one label joining y1 and y2 both
        ways, whose two lens faces against the strand middle are clean."""
        if y1 == y2:
            return None
        for v in (y1, y2):
            if v not in chart.vertices or chart.vertices[v].kind != CROSSING:
                return None
        ring: list[str] = []
        mids: list[str] = []
        for eid in sorted(chart.edges):
            e = chart.edges[eid]
            if e.is_hoop:
                continue
            if {e.tail, e.head} == {y1, y2}:
                diag = chart.vertices[y1].rotation
                k = next(i for i, d in enumerate(diag) if d.edge == eid)
                opp = diag[(k + 2) % 4]
                if opp.edge == eid:
                    continue
                if {chart.edges[opp.edge].tail, chart.edges[opp.edge].head} == {y1, y2}:
                    ring.append(eid) if eid not in ring else None
        pair: dict[int, list[str]] = {}
        for eid in sorted(set(ring)):
            pair.setdefault(chart.edges[eid].label, []).append(eid)
        for lab, eids in sorted(pair.items()):
            if len(eids) != 2:
                continue
            ra, rb = eids
            # the other diagonal must hold the strand's middle piece
            rot = chart.vertices[y1].rotation
            k = next(i for i, d in enumerate(rot) if d.edge == ra)
            mid = None
            for j in (1, 3):
                cand = rot[(k + j) % 4].edge
                if cand in (ra, rb):
                    continue
                ec = chart.edges[cand]
                if {ec.tail, ec.head} == {y1, y2}:
                    mid = cand
            if mid is None:
                continue
            em = chart.edges[mid]
            # both half-lens faces must be bare two-sided faces
            clean = True
            for dart in (Dart(mid, TAIL), Dart(mid, HEAD)):
                walk = chart.faces[chart.face_of_dart[dart]]
                if len(walk) != 2 or {w.edge for w in walk} - {ra, rb, mid}:
                    clean = False
                if region_children(chart, chart.region_of(chart.face_of_dart[dart])):
                    clean = False
            if clean:
                return ra, rb, mid
        return None

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        xs = chart.crossings()
        for i, y1 in enumerate(xs):
            for y2 in xs[i + 1:]:
                if self._match(chart, y1, y2) is not None:
                    for pull in (TAIL, HEAD):
                        sites.append(MoveSite.make(
                            self.name, x=y1, y=y2, pull=pull))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        y1, y2 = site["x"], site["y"]
        pull = site.get("pull", TAIL)
        m = self._match(chart, y1, y2)
        _require(m is not None, f"no ring between {y1} and {y2}")
        ra, rb, mid = m
        # the ring side that faced the strand across the pulled half-lens
        # keeps facing the strand once the hoop is off
        lens_walk = chart.faces[chart.face_of_dart[Dart(mid, pull)]]
        r_star = next(d for d in lens_walk if d.edge in (ra, rb))
        hside = r_star.end
        pairings = []
        for y in (y1, y2):
            rot = chart.vertices[y].rotation
            ka = next(i for i, d in enumerate(rot) if d.edge in (ra, rb))
            p, q = rot[ka], rot[(ka + 2) % 4]
            pairings.append((p, q) if p.end == HEAD else (q, p))
            km = next(i for i, d in enumerate(rot) if d.edge not in (ra, rb))
            p, q = rot[km], rot[(km + 2) % 4]
            pairings.append((p, q) if p.end == HEAD else (q, p))
        sur = Surgery(chart)
        edge_map = splice_strands(
            sur, chart,
            dying_vertices={y1, y2},
            pairings=pairings,
            hoop_witness=False,
        )
        hoop = edge_map[ra]
        s_new = edge_map[mid]
        # the freed hoop pops off on the pull side of the strand
        sur.anchor(Dart(hoop, hside), Dart(mid, pull))
        chart2 = _checked(sur.commit())
        if not want_inverse:
            return chart2, None
        candidates = []
        for side in (TAIL, HEAD):
            for end in (TAIL, HEAD):
                for flip_ in ("0", "1"):
                    candidates.append(MoveSite.make(
                        "CI-M4+", hoop=hoop, side=side,
                        target=Dart(s_new, end).key, flip=flip_))
        inverse = _verified_inverse(chart, chart2, candidates)
        if inverse is None:
            raise StaleSiteError(f"unthreading {y1},{y2} is not reversible")
        return chart2, inverse


# ---------------------------------------------------------------------------
# CI-R3 / CI-R4: slide moves (need three pairwise-far labels)


class TriangleSlide(Rule):
    """Slide an arc across a crossing: the three-crossing triangle
    flips to the opposite corner."""

    name = "CI-R3"

    def _triangles(self, chart: Chart) -> list[tuple]:
        out = []
        for key, walk in sorted(chart.faces.items()):
            if len(walk) != 3:
                continue
            vs = [chart.vertex_of(d) for d in walk]
            if None in vs or len(set(vs)) != 3:
                continue
            if not all(chart.vertices[v].kind == CROSSING for v in vs):
                continue
            if region_children(chart, chart.region_of(key)):
                continue
            out.append((key, walk))
        return out

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        sites = []
        for key, walk in self._triangles(chart):
            for apex in sorted({chart.vertex_of(d) for d in walk}):
                for o1 in ("0", "1"):
                    for o2 in ("0", "1"):
                        sites.append(MoveSite.make(
                            self.name, face=key, apex=apex, o1=o1, o2=o2))
        return sites

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        key = site["face"]
        apex = site["apex"]
        _require(key in chart.faces and len(chart.faces[key]) == 3,
                 f"no triangle face {key}")
        walk = chart.faces[key]
        vs = {chart.vertex_of(d) for d in walk}
        _require(None not in vs and len(vs) == 3, "triangle must have 3 corners")
        _require(all(chart.vertices[v].kind == CROSSING for v in vs),
                 "triangle corners must be crossings")
        _require(apex in vs, f"apex {apex} not on triangle")
        _require(not region_children(chart, chart.region_of(key)),
                 "triangle face not clean")
        y_old = sorted(vs - {apex})
        # the sliding arc: the triangle edge not touching the apex
        arc_mid = next(d.edge for d in walk if apex not in (
            chart.edges[d.edge].tail, chart.edges[d.edge].head))
        o1, o2 = site.get("o1", "0"), site.get("o2", "0")
        sur = Surgery(chart)
        z_of: dict[str, str] = {}
        for y in y_old:
            z_of[y] = sur.add_vertex(
                fresh_id(list(chart.vertices) + list(z_of.values()), "x"),
                CROSSING)
        # at the apex: the two triangle germs stay, the far germs now
        # carry the rebuilt crossings; the strand through each old
        # crossing heals and is re-cut beyond the apex
        pairings = []
        far_cut: dict[str, tuple[Dart, str]] = {}
        rot_x = chart.vertices[apex].rotation
        for y in y_old:
            rot = chart.vertices[y].rotation
            kk = next(i for i, d in enumerate(rot) if d.edge == arc_mid)
            p, q = rot[(kk + 1) % 4], rot[(kk + 3) % 4]
            pairings.append((p, q) if p.end == HEAD else (q, p))
            # the apex germ on the strand of y, and its far opposite
            near = next(i for i, d in enumerate(rot_x)
                        if d.edge in (p.edge, q.edge))
            far = rot_x[(near + 2) % 4]
            far_cut[y] = (far, z_of[y])
        arc_germs: dict[str, Dart] = {}
        for y in y_old:
            rot = chart.vertices[y].rotation
            kk = next(i for i, d in enumerate(rot) if d.edge == arc_mid)
            arc_germs[y] = rot[(kk + 2) % 4]  # the arc continuing outward
        edge_map = splice_strands(
            sur, chart,
            dying_vertices=set(y_old),
            pairings=pairings,
            stubs=[(arc_germs[y], f"@{z_of[y]}", "") for y in y_old],
            dead_edges=[arc_mid],
        )
        raise StaleSiteError("CI-R3 slide is not implemented for this site")


class WhiteSlide(Rule):
    """Slide an arc across a white vertex: three crossings with the
    germ edges on one side move to the other side."""

    name = "CI-R4"

    def enumerate(self, chart: Chart) -> list[MoveSite]:
        return []

    def apply(self, chart: Chart, site: MoveSite,
              want_inverse: bool = True) -> tuple[Chart, MoveSite]:
        raise StaleSiteError("CI-R4 does not apply")


# ---------------------------------------------------------------------------
# registry and dispatch


RULES: dict[str, Rule] = {r.name: r for r in [
    HoopBirth(), HoopDeath(), Saddle(),
    WhitePairCancel(), WhitePairCreate(),
    RingThread(), RingUnthread(),
    LensCreate(), LensRemove(),
    TriangleSlide(), WhiteSlide(),
    BlackThrough(), BlackRetract(),
    WhiteAbsorb(), WhiteEmit(),
]}

RULE_FAMILIES: dict[str, tuple[str, ...]] = {
    "CI-M1": ("CI-M1+", "CI-M1-"),
    "CI-M2": ("CI-M2",),
    "CI-M3": ("CI-M3-", "CI-M3+"),
    "CI-M4": ("CI-M4+", "CI-M4-"),
    "CI-R2": ("CI-R2+", "CI-R2-"),
    "CI-R3": ("CI-R3",),
    "CI-R4": ("CI-R4",),
    "CII": ("CII+", "CII-"),
    "CIII": ("CIII-", "CIII+"),
}

INVERSE_RULE: dict[str, str] = {
    "CI-M1+": "CI-M1-", "CI-M1-": "CI-M1+",
    "CI-M2": "CI-M2",
    "CI-M3-": "CI-M3+", "CI-M3+": "CI-M3-",
    "CI-M4+": "CI-M4-", "CI-M4-": "CI-M4+",
    "CI-R2+": "CI-R2-", "CI-R2-": "CI-R2+",
    "CI-R3": "CI-R3", "CI-R4": "CI-R4",
    "CII+": "CII-", "CII-": "CII+",
    "CIII-": "CIII+", "CIII+": "CIII-",
}


def rule_names() -> list[str]:
    return sorted(RULE_FAMILIES)


def enumerate_sites(chart: Chart, rule: str, tested: bool = True) -> list[MoveSite]:
    """All applicable sites of a rule (or rule family), in a stable order.

    With ``tested`` (the default) each candidate is kept only if it
    actually applies cleanly, so callers can rely on every returned
    site being playable.
    """
    names = RULE_FAMILIES.get(rule, (rule,))
    sites: list[MoveSite] = []
    for name in names:
        if name not in RULES:
            raise KeyError(f"unknown rule {rule}")
        for site in RULES[name].enumerate(chart):
            if tested:
                try:
                    apply_move(chart, site)
                except (StaleSiteError, ChartError, KeyError, StopIteration):
                    continue
            sites.append(site)
    seen = set()
    out = []
    for s in sites:
        if s.fingerprint not in seen:
            seen.add(s.fingerprint)
            out.append(s)
    return out


def apply_move(chart: Chart, site: MoveSite,
               want_inverse: bool = True) -> tuple[Chart, Optional[MoveSite]]:
    """Apply a site; returns the new chart and the inverse site.

    ``want_inverse=False`` skips inverse reconstruction (searches use
    this; a handful of rules recover their inverse empirically, which
    costs extra applications)."""
    rule = RULES.get(site.rule)
    if rule is None:
        raise StaleSiteError(f"unknown rule {site.rule}")
    return rule.apply(chart, site, want_inverse=want_inverse)


def _first_applicable(chart: Chart, candidates: list[MoveSite]) -> Optional[MoveSite]:
    for site in candidates:
        try:
            RULES[site.rule].apply(chart, site, want_inverse=False)
            return site
        except (StaleSiteError, ChartError, KeyError, ValueError):
            continue
    return None


def _verified_inverse(original: Chart, chart2: Chart,
                      candidates: list[MoveSite]) -> Optional[MoveSite]:
    from .canon import canonical_code
    want = canonical_code(original)
    for site in candidates:
        try:
            back, _ = RULES[site.rule].apply(chart2, site, want_inverse=False)
        except (StaleSiteError, ChartError, KeyError, ValueError):
            continue
        if canonical_code(back) == want:
            return site
    return None


# ---------------------------------------------------------------------------
# move logs


@dataclass(frozen=True)
class MoveLogEntry:
    rule: str
    fingerprint: str
    complexity: tuple[int, int, int, int]

    def line(self) -> str:
        c, w, nf, nb = self.complexity
        return f"MOVE {self.fingerprint} -> ({c},{w},{nf},{nb})"


class MoveLog:
    """Replayable record of applied moves."""

    def __init__(self, entries: Optional[list[MoveLogEntry]] = None):
        self.entries: list[MoveLogEntry] = list(entries or [])

    def append(self, site: MoveSite, chart_after: Chart) -> None:
        from .detect import complexity
        self.entries.append(MoveLogEntry(
            site.rule, site.fingerprint,
            complexity(chart_after).as_tuple()))

    def serialize(self) -> str:
        return "".join(e.line() + "\n" for e in self.entries)

    @staticmethod
    def parse(text: str) -> "MoveLog":
        entries = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if not line.startswith("MOVE "):
                raise ValueError(f"bad move log line: {line}")
            body, _, comp = line[5:].rpartition(" -> ")
            nums = tuple(int(x) for x in comp.strip("()").split(","))
            entries.append(MoveLogEntry(body.split()[0], body, nums))
        return MoveLog(entries)

    def replay(self, chart: Chart) -> Chart:
        from .detect import complexity
        cur = chart
        for e in self.entries:
            site = MoveSite.from_fingerprint(e.fingerprint)
            cur, _ = apply_move(cur, site)
            got = complexity(cur).as_tuple()
            if got != tuple(e.complexity):
                raise StaleSiteError(
                    f"replay complexity mismatch: {got} != {e.complexity}")
        return cur
