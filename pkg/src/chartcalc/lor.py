"""Label / orientation / reflection transformations of charts.

The five generators of lor-equivalence: degree stabilization, the label
mirror k -> n-k, a uniform label shift, global orientation reversal,
and reflection of the sphere.
"""

from __future__ import annotations

from .model import Chart, ChartError, Dart, Edge, Placement, Vertex


def stabilize(chart: Chart) -> Chart:
    """View the n-chart as an (n+1)-chart."""
    return chart.but(degree=chart.degree + 1)


def mirror_labels(chart: Chart) -> Chart:
    """Replace every label k by degree - k."""
    n = chart.degree
    edges = {eid: Edge(eid, n - e.label, e.tail, e.head)
             for eid, e in chart.edges.items()}
    return chart.but(edges=edges)


def shift_labels(chart: Chart, k: int) -> Chart:
    """Add a positive constant to all labels, raising the degree."""
    if k < 1:
        raise ChartError("label shift must be positive")
    edges = {eid: Edge(eid, e.label + k, e.tail, e.head)
             for eid, e in chart.edges.items()}
    return chart.but(edges=edges, degree=chart.degree + k)


def _swap_dart(d: Dart) -> Dart:
    return d.twin()


def reverse_orientation(chart: Chart) -> Chart:
    """Reverse every edge.  Dart names swap ends; geometry unchanged."""
    edges = {eid: Edge(eid, e.label, e.head, e.tail)
             for eid, e in chart.edges.items()}
    vertices = {
        vid: Vertex(vid, v.kind, tuple(d.twin() for d in v.rotation))
        for vid, v in chart.vertices.items()
    }
    out = Chart(chart.name, chart.degree, vertices, edges, {}, None)

    def remap(face_key: str) -> str:
        d = Dart.from_key(face_key)
        return out.face_of_dart[d.twin()]

    placements = {
        comp: Placement(pl.parent, remap(pl.parent_face), remap(pl.child_outer))
        for comp, pl in chart.placements.items()
    }
    infinity = remap(chart.infinity) if chart.infinity else None
    return out.but(placements=placements, infinity=infinity)


def reflect(chart: Chart) -> Chart:
    """Mirror the sphere: all vertex rotations reverse."""
    vertices = {
        vid: Vertex(vid, v.kind, tuple(reversed(v.rotation)))
        for vid, v in chart.vertices.items()
    }
    out = Chart(chart.name, chart.degree, vertices, dict(chart.edges), {}, None)

    def remap(face_key: str) -> str:
        old = chart.faces[face_key][0]
        return out.face_of_dart[old.twin()]

    placements = {
        comp: Placement(pl.parent, remap(pl.parent_face), remap(pl.child_outer))
        for comp, pl in chart.placements.items()
    }
    infinity = remap(chart.infinity) if chart.infinity else None
    return out.but(placements=placements, infinity=infinity)


LOR_OPS = ("stabilize", "mirror", "shift", "reverse", "reflect")


def lor_transform(chart: Chart, op: str, k: int = 1) -> Chart:
    if op == "stabilize":
        return stabilize(chart)
    if op == "mirror":
        return mirror_labels(chart)
    if op == "shift":
        return shift_labels(chart, k)
    if op == "reverse":
        return reverse_orientation(chart)
    if op == "reflect":
        return reflect(chart)
    raise ChartError(f"unknown lor operation {op!r}")
