"""Built-in chart corpus.

Every entry is constructed programmatically and serialized on demand;
the builders are the single source of truth for tests, the CLI, and the
service.  Entries carry a provenance note that the CLI prints as a
header comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .cmf import serialize
from .model import BLACK, CROSSING, WHITE, Chart, ChartBuilder
from . import lor


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    note: str
    build: Callable[[], Chart]

    def chart(self) -> Chart:
        return self.build()

    def cmf(self) -> str:
        return serialize(self.chart())

    def document(self) -> str:
        return f"# {self.note}\n" + self.cmf()


def _fig17() -> Chart:
    """The two-crossing linear chart: a label-1 circle and a label-3
    circle crossing twice, one white on each of the four arcs, the
    whites joined pairwise by parallel label-2 edges through the outer
    region and through the lens, and eight terminal edges."""
    b = ChartBuilder("fig17", 4)
    for v in ("c1", "c2"):
        b.vertex(v, CROSSING)
    for v in ("w1", "w2", "w3", "w4"):
        b.vertex(v, WHITE)
    for v in ("k1", "k2", "k3", "k4", "k5", "k6", "k7", "k8"):
        b.vertex(v, BLACK)
    # label-1 circle: flows out of w3 both ways, into w1 both ways
    b.edge("a1", 1, "c1", "w1")
    b.edge("a2", 1, "c2", "w1")
    b.edge("a3", 1, "w3", "c2")
    b.edge("a4", 1, "w3", "c1")
    # label-3 circle: flows out of w2 both ways, into w4 both ways
    b.edge("b1", 3, "w2", "c1")
    b.edge("b2", 3, "w2", "c2")
    b.edge("b3", 3, "c2", "w4")
    b.edge("b4", 3, "c1", "w4")
    # label-2 side-edge pairs
    b.edge("s1", 2, "w1", "w2")  # through the outer region
    b.edge("s2", 2, "w1", "w2")
    b.edge("s3", 2, "w4", "w3")  # through the lens
    b.edge("s4", 2, "w4", "w3")
    # terminal edges
    b.edge("t1", 1, "w1", "k1")
    b.edge("t2", 3, "k2", "w2")
    b.edge("t3", 1, "k3", "w3")
    b.edge("t4", 3, "w4", "k4")
    b.edge("u1", 2, "k5", "w1")
    b.edge("u2", 2, "w2", "k6")
    b.edge("u3", 2, "w3", "k7")
    b.edge("u4", 2, "k8", "w4")
    # rotations (counterclockwise)
    b.rot("w1", "u1.h", "a1.h", "s1.t", "t1.t", "s2.t", "a2.h")
    b.rot("w2", "b1.t", "u2.t", "b2.t", "s2.h", "t2.h", "s1.h")
    b.rot("w3", "u3.t", "a4.t", "s3.h", "t3.h", "s4.h", "a3.t")
    b.rot("w4", "b4.h", "u4.h", "b3.h", "s4.t", "t4.t", "s3.t")
    b.rot("c1", "a1.t", "b4.t", "a4.h", "b1.h")
    b.rot("c2", "b2.h", "a3.h", "b3.t", "a2.t")
    for k, d in (("k1", "t1.h"), ("k2", "t2.t"), ("k3", "t3.t"),
                 ("k4", "t4.h"), ("k5", "u1.t"), ("k6", "u2.h"),
                 ("k7", "u3.h"), ("k8", "u4.t")):
        b.rot(k, d)
    return b.build()


def _trefoil() -> Chart:
    """The three-crossing linear chart describing a 2-twist spun
    trefoil: a label-3 circle through three crossings, a label-1 theta
    graph with one junction inside and one outside, and the label-2
    edges forced by the vertex axioms."""
    b = ChartBuilder("trefoil", 4)
    for v in ("c1", "c2", "c3"):
        b.vertex(v, CROSSING)
    for v in ("w1", "w2", "w4", "w5", "m1", "m2"):
        b.vertex(v, WHITE)
    for v in ("k1", "k2", "k3", "k4", "k5", "k6"):
        b.vertex(v, BLACK)
    # theta graph of label 1: w1 inside the circle, w2 outside
    b.edge("g1", 1, "c1", "w1")
    b.edge("g2", 1, "w1", "w5")
    b.edge("g3", 1, "c2", "w5")
    b.edge("g4", 1, "c3", "w1")
    b.edge("h1", 1, "w4", "w2")
    b.edge("h2", 1, "w4", "c1")
    b.edge("h3", 1, "w2", "c2")
    b.edge("h4", 1, "w2", "c3")
    # the label-3 circle, with two whites on the arc between c1 and c2
    b.edge("r1", 3, "m1", "c1")
    b.edge("r2", 3, "c1", "c3")
    b.edge("r3", 3, "c3", "c2")
    b.edge("r4", 3, "c2", "m2")
    b.edge("r5", 3, "m1", "m2")
    b.edge("tm1", 3, "k5", "m1")
    b.edge("tm2", 3, "m2", "k6")
    # label-2 edges
    b.edge("e1", 2, "k1", "w1")
    b.edge("e2", 2, "w1", "m1")
    b.edge("e3", 2, "w1", "w5")
    b.edge("p1", 2, "w5", "m1")
    b.edge("p2", 2, "w5", "m2")
    b.edge("q1", 2, "m2", "w2")
    b.edge("q2", 2, "w4", "w2")
    b.edge("q3", 2, "m2", "w4")
    b.edge("q4", 2, "m1", "w4")
    b.edge("e6", 2, "w2", "k2")
    b.edge("t4", 1, "k3", "w4")
    b.edge("t5", 1, "w5", "k4")
    # rotations
    b.rot("w1", "g2.t", "e2.t", "g1.h", "e1.h", "g4.h", "e3.t")
    b.rot("w5", "g3.h", "p2.t", "t5.t", "p1.t", "g2.h", "e3.h")
    b.rot("m1", "r5.t", "q4.t", "r1.t", "e2.h", "tm1.h", "p1.h")
    b.rot("m2", "q1.t", "tm2.t", "q3.t", "r5.h", "p2.h", "r4.h")
    b.rot("w4", "q3.h", "h1.t", "q2.t", "h2.t", "q4.h", "t4.h")
    b.rot("w2", "e6.t", "h4.t", "q2.h", "h1.h", "q1.h", "h3.t")
    b.rot("c1", "g1.t", "r1.h", "h2.h", "r2.t")
    b.rot("c2", "h3.h", "r4.t", "g3.t", "r3.h")
    b.rot("c3", "r3.t", "g4.t", "r2.h", "h4.h")
    for k, d in (("k1", "e1.t"), ("k2", "e6.h"), ("k3", "t4.t"),
                 ("k4", "t5.h"), ("k5", "tm1.t"), ("k6", "tm2.h")):
        b.rot(k, d)
    return b.build()


def _malcycle_demo() -> Chart:
    """A label-2 square around one crossing satisfying the mal-cycle
    conditions: coherently directed cycle, alternating white types,
    label-3 terminals outside at the two (2,3)-whites.  The exterior
    closes with label-1 loops at the (1,2)-whites and two chords."""
    b = ChartBuilder("malcycle_demo", 4)
    b.vertex("x", CROSSING)
    for v in ("v1", "v2", "w1", "w2"):
        b.vertex(v, WHITE)
    for v in ("k1", "k2", "k3", "k4"):
        b.vertex(v, BLACK)
    # the square, coherently directed
    b.edge("a", 2, "v1", "w1")
    b.edge("b", 2, "w1", "v2")
    b.edge("c", 2, "v2", "w2")
    b.edge("d", 2, "w2", "v1")
    # interior arcs through the crossing
    b.edge("n2", 1, "v1", "x")
    b.edge("n1", 1, "x", "v2")
    b.edge("m1", 3, "w1", "x")
    b.edge("m2", 3, "x", "w2")
    # terminal edges
    b.edge("t1", 2, "k1", "v1")
    b.edge("t2", 2, "v2", "k2")
    b.edge("t3", 3, "w1", "k3")
    b.edge("t4", 3, "k4", "w2")
    # label-1 loops at the (1,2)-whites, chords between the (2,3)-whites
    b.edge("l1", 1, "v1", "v1")
    b.edge("l2", 1, "v2", "v2")
    b.edge("q2", 2, "w2", "w1")
    b.edge("q3", 3, "w2", "w1")
    b.rot("v1", "n2.t", "a.t", "l1.t", "t1.h", "l1.h", "d.h")
    b.rot("w1", "a.h", "m1.t", "b.t", "t3.t", "q2.h", "q3.h")
    b.rot("v2", "b.h", "n1.h", "c.t", "l2.t", "t2.t", "l2.h")
    b.rot("w2", "d.t", "q3.t", "q2.t", "t4.h", "c.h", "m2.h")
    b.rot("x", "n1.t", "m1.h", "n2.h", "m2.t")
    for k, d_ in (("k1", "t1.t"), ("k2", "t2.h"), ("k3", "t3.h"), ("k4", "t4.t")):
        b.rot(k, d_)
    return b.build()


ENTRIES: dict[str, CorpusEntry] = {}


def _register(name: str, note: str, build: Callable[[], Chart]) -> None:
    ENTRIES[name] = CorpusEntry(name, note, build)


_register("fig17", "linear minimal 4-chart with two crossings "
          "(turned torus-link of a Hopf link)", _fig17)
_register("trefoil", "linear minimal 4-chart with three crossings "
          "(2-twist spun trefoil)", _trefoil)
_register("malcycle_demo", "chart with one mal-cycle", _malcycle_demo)


def names() -> list[str]:
    return sorted(ENTRIES)


def get(name: str) -> CorpusEntry:
    if name not in ENTRIES:
        raise KeyError(f"no corpus entry {name!r}")
    return ENTRIES[name]
