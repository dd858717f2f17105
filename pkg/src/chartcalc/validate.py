"""Chart axiom validation.

A valid chart satisfies, at every vertex and edge:

  (i)   vertex degrees are 1 (black), 4 (crossing), or 6 (white);
  (ii)  edge labels lie in 1..degree-1;
  (iii) around a white vertex the six labels alternate between some m
        and m+1, and the six orientations are three consecutive inward
        arcs followed by three consecutive outward arcs;
  (iv)  at a crossing, opposite darts carry the same label and coherent
        orientation (the arc runs straight through), and the two labels
        differ by more than 1;

plus global sanity: every component embeds in the sphere (V - E + F = 2)
and the containment relation is a forest.

Violations are values, not exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    BLACK,
    CROSSING,
    WHITE,
    Chart,
    ChartError,
    DEGREE_OF_KIND,
    euler_characteristics,
)


@dataclass(frozen=True)
class Violation:
    condition: str  # degree | label-range | white-labels | white-orientation
    #               | crossing-labels | crossing-orientation | euler | containment
    subject: str  # offending vertex, edge, or component id
    message: str

    def __str__(self) -> str:
        return f"{self.condition} at {self.subject}: {self.message}"


def _check_white(chart: Chart, vid: str) -> list[Violation]:
    v = chart.vertices[vid]
    out: list[Violation] = []
    labels = [chart.label_of(d) for d in v.rotation]
    lo, hi = min(labels), max(labels)
    evens, odds = labels[0::2], labels[1::2]
    alternates = hi == lo + 1 and (
        (set(evens) == {lo} and set(odds) == {hi})
        or (set(evens) == {hi} and set(odds) == {lo})
    )
    if not alternates:
        out.append(Violation(
            "white-labels", vid,
            f"labels {labels} do not alternate m, m+1"))
    outward = [chart.is_outward(d) for d in v.rotation]
    if sum(outward) != 3 or not _consecutive_run(outward):
        out.append(Violation(
            "white-orientation", vid,
            "orientations are not three consecutive inward and three outward"))
    return out


def _consecutive_run(flags: list[bool]) -> bool:
    """True if the True entries form one cyclically consecutive block."""
    n = len(flags)
    k = sum(flags)
    if k in (0, n):
        return True
    return any(all(flags[(i + j) % n] for j in range(k)) for i in range(n))


def _check_crossing(chart: Chart, vid: str) -> list[Violation]:
    v = chart.vertices[vid]
    out: list[Violation] = []
    rot = v.rotation
    l0, l1, l2, l3 = (chart.label_of(d) for d in rot)
    if l0 != l2 or l1 != l3:
        out.append(Violation(
            "crossing-labels", vid,
            f"diagonal labels must match, got {[l0, l1, l2, l3]}"))
    elif abs(l0 - l1) <= 1:
        out.append(Violation(
            "crossing-labels", vid,
            f"diagonal labels {l0} and {l1} must differ by more than 1"))
    for a, b in ((0, 2), (1, 3)):
        if chart.is_outward(rot[a]) == chart.is_outward(rot[b]):
            out.append(Violation(
                "crossing-orientation", vid,
                f"diagonal through positions {a},{b} is not oriented coherently"))
    return out


def validate(chart: Chart) -> list[Violation]:
    """Return all axiom violations ([] iff the chart is valid)."""
    out: list[Violation] = []
    for vid in sorted(chart.vertices):
        v = chart.vertices[vid]
        want = DEGREE_OF_KIND[v.kind]
        if v.degree != want:
            out.append(Violation(
                "degree", vid,
                f"{v.kind} vertex must have degree {want}, got {v.degree}"))
            continue
        if v.kind == WHITE:
            out.extend(_check_white(chart, vid))
        elif v.kind == CROSSING:
            out.extend(_check_crossing(chart, vid))
    for eid in sorted(chart.edges):
        e = chart.edges[eid]
        if not 1 <= e.label <= chart.degree - 1:
            out.append(Violation(
                "label-range", eid,
                f"label {e.label} outside 1..{chart.degree - 1}"))
    try:
        for comp, chi in sorted(euler_characteristics(chart).items()):
            # a hoop component is a bare circle: V=0, E=1, F=2, so chi=1
            want = 1 if comp in chart.edges and chart.edges[comp].is_hoop else 2
            if chi != want:
                out.append(Violation(
                    "euler", comp,
                    f"component has V - E + F = {chi}, expected {want} "
                    "(not a sphere embedding)"))
        chart.root_component
        for comp in chart.placements:
            chart.region_of(chart.placements[comp].child_outer)
    except ChartError as exc:
        out.append(Violation("containment", chart.name, str(exc)))
    return out


def is_valid(chart: Chart) -> bool:
    return not validate(chart)
