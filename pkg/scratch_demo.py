"""Exhaustive search for a clean malcycle_demo embedding.

The square corners have fixed slot geometry; we enumerate terminal
placements, orientation runs, stub pairings, and the optional crossing
between the label-1 and label-3 exterior chords, then let the engine
validate.
"""
import sys, itertools
sys.path.insert(0, "src")
from chartcalc.model import ChartBuilder
from chartcalc.validate import validate
from chartcalc.detect import (complexity, find_mal_cycles, find_pinwheels,
                              non_minimality_witnesses)
from chartcalc.cmf import serialize

# Walk positions of the 12 exterior slots, counterclockwise:
#   v1: slots A(0) B(1) C(2)  -- rotation order [n, a, A, B, C, d]
#   w2: slots A(3) B(4) C(5)  -- rotation order [d, A, B, C, c, m]
#   v2: slots A(6) B(7) C(8)  -- rotation order [b, n, c, A, B, C]
#   w1: slots A(9) B(10) C(11) -- rotation order [a, m, b, A, B, C]
# Slot labels: v-corners: A,C label1, B label2; w-corners: A,C label3, B label2.

SLOTS = {  # white -> (walk positions of its three exterior slots)
    "v1": (0, 1, 2), "w2": (3, 4, 5), "v2": (6, 7, 8), "w1": (9, 10, 11),
}
SLOT_LABEL = {}
for w, (pA, pB, pC) in SLOTS.items():
    lab = 1 if w.startswith("v") else 3
    SLOT_LABEL[pA] = lab
    SLOT_LABEL[pB] = 2
    SLOT_LABEL[pC] = lab


def rotations(runs):
    """runs: white -> 6-bool outward flags in rotation order."""


def build(term_slot, flags, pairing, y1rot):
    """term_slot: white -> walk position of its terminal.
    flags: white -> tuple of 6 bools (outward) in rotation order.
    pairing: list of (src_pos, dst_pos) chords, given stub orientations.
    """
    b = ChartBuilder("malcycle_demo", 4)
    b.vertex("x", "crossing")
    for v in ("v1", "v2", "w1", "w2"):
        b.vertex(v, "white")
    for spec in [("a", 2, "v1", "w1"), ("b", 2, "w1", "v2"),
                 ("c", 2, "v2", "w2"), ("d", 2, "w2", "v1")]:
        b.edge(*spec)
    # rotation templates: index -> germ meaning
    # v1: [n, a, s0, s1, s2, d]; w1: [a, m, b, s9, s10, s11]
    # v2: [b, n, c, s6, s7, s8]; w2: [d, s3, s4, s5, c, m]
    rot_slots = {"v1": (2, 3, 4), "w2": (1, 2, 3),
                 "v2": (3, 4, 5), "w1": (3, 4, 5)}
    # interior arcs: direction from flags
    f = flags
    nv1_out = f["v1"][0]
    b.edge("n2", 1, "v1", "x") if nv1_out else b.edge("n2", 1, "x", "v1")
    nv2_out = f["v2"][1]
    b.edge("n1", 1, "v2", "x") if nv2_out else b.edge("n1", 1, "x", "v2")
    if nv1_out == nv2_out:
        return None
    mw1_out = f["w1"][1]
    b.edge("m1", 3, "w1", "x") if mw1_out else b.edge("m1", 3, "x", "w1")
    mw2_out = f["w2"][5]
    b.edge("m2", 3, "w2", "x") if mw2_out else b.edge("m2", 3, "x", "w2")
    if mw1_out == mw2_out:
        return None
    # cycle orientation must match flags
    if not (f["v1"][1] and not f["w1"][0]):  # a: v1->w1
        return None
    if not (f["w1"][2] and not f["v2"][0]):  # b: w1->v2
        return None
    if not (f["v2"][2] and not f["w2"][4]):  # c: v2->w2
        return None
    if not (f["w2"][0] and not f["v1"][5]):  # d: w2->v1
        return None
    # stubs: terminal or chord ends
    stub_dart = {}
    kn = 0
    pos_owner = {}
    for w, slots in SLOTS.items():
        for i, pos in enumerate(slots):
            pos_owner[pos] = (w, rot_slots[w][i])
    for w, slots in SLOTS.items():
        for i, pos in enumerate(slots):
            ridx = rot_slots[w][i]
            out = f[w][ridx]
            if term_slot[w] == pos:
                kn += 1
                kid = f"k{kn}"
                b.vertex(kid, "black")
                eid = f"t{kn}"
                if out:
                    b.edge(eid, SLOT_LABEL[pos], w, kid)
                    b.rot(kid, f"{eid}.h")
                    stub_dart[pos] = f"{eid}.t"
                else:
                    b.edge(eid, SLOT_LABEL[pos], kid, w)
                    b.rot(kid, f"{eid}.t")
                    stub_dart[pos] = f"{eid}.h"
    # find the crossing pair, if any
    def crosses(p, q):
        (a1, b1), (c1, d1) = sorted(p), sorted(q)
        return (a1 < c1 < b1 < d1) or (c1 < a1 < d1 < b1)
    crossing_pairs = [(p, q) for p, q in itertools.combinations(pairing, 2)
                      if crosses(p, q)]
    if len(crossing_pairs) > 1:
        return None
    crossing_chords = set()
    if crossing_pairs:
        crossing_chords = {crossing_pairs[0][0], crossing_pairs[0][1]}
        b.vertex("y1", "crossing")
    ci = 0
    ydarts = {}
    for src, dst in pairing:
        wsrc, rs = pos_owner[src]
        wdst, rd = pos_owner[dst]
        if not f[wsrc][rs] or f[wdst][rd]:
            return None  # need out -> in
        lab = SLOT_LABEL[src]
        if SLOT_LABEL[dst] != lab:
            return None
        ci += 1
        if (src, dst) in crossing_chords:
            e1, e2 = f"q{ci}a", f"q{ci}b"
            b.edge(e1, lab, wsrc, "y1")
            b.edge(e2, lab, "y1", wdst)
            stub_dart[src] = f"{e1}.t"
            stub_dart[dst] = f"{e2}.h"
            ydarts[lab] = (f"{e1}.h", f"{e2}.t")
        else:
            eid = f"q{ci}"
            b.edge(eid, lab, wsrc, wdst)
            stub_dart[src] = f"{eid}.t"
            stub_dart[dst] = f"{eid}.h"
    if crossing_pairs:
        l1 = ydarts.get(1)
        l3 = ydarts.get(3)
        if not l1 or not l3:
            return None
        if y1rot == 0:
            b.rot("y1", l1[0], l3[0], l1[1], l3[1])
        else:
            b.rot("y1", l1[0], l3[1], l1[1], l3[0])
    # rotations
    def germ(w, ridx, names):
        return names[ridx]

    sv = {w: {rot_slots[w][i]: stub_dart[SLOTS[w][i]] for i in range(3)}
          for w in SLOTS}
    b.rot("v1", "n2.t" if nv1_out else "n2.h", "a.t",
          sv["v1"][2], sv["v1"][3], sv["v1"][4], "d.h")
    b.rot("w1", "a.h", "m1.t" if mw1_out else "m1.h", "b.t",
          sv["w1"][3], sv["w1"][4], sv["w1"][5])
    b.rot("v2", "b.h", "n1.t" if nv2_out else "n1.h", "c.t",
          sv["v2"][3], sv["v2"][4], sv["v2"][5])
    b.rot("w2", "d.t", sv["w2"][1], sv["w2"][2], sv["w2"][3],
          "c.h", "m2.t" if mw2_out else "m2.h")
    b.rot("x",
          "n1.h" if nv2_out else "n1.t",
          "m1.h" if mw1_out else "m1.t",
          "n2.h" if nv1_out else "n2.t",
          "m2.h" if mw2_out else "m2.t")
    return b.build()


def crossings_ok(pairing):
    """Chords must not cross, except one label1 x label3 crossing."""
    def crosses(p, q):
        (a, b_), (c, d) = sorted(p), sorted(q)
        return (a < c < b_ < d) or (c < a < d < b_)
    bad = 0
    lcross = 0
    for p, q in itertools.combinations(pairing, 2):
        if crosses(p, q):
            lp, lq = SLOT_LABEL[p[0]], SLOT_LABEL[q[0]]
            if {lp, lq} == {1, 3}:
                lcross += 1
            else:
                return None
    return lcross


def run_flags(outknown):
    """All 3-consecutive-out patterns compatible with known flags."""
    pats = []
    for j in range(6):
        pat = tuple((j <= i < j + 3) or (j + 3 > 6 and i < (j + 3) % 6)
                    for i in range(6))
        ok = all(outknown.get(i) is None or outknown[i] == pat[i]
                 for i in range(6))
        if ok and sum(pat) == 3:
            pats.append(pat)
    return pats


# enumerate: run patterns per white (cycle flags known)
known = {
    "v1": {1: True, 5: False},
    "w1": {0: False, 2: True},
    "v2": {0: False, 2: True},
    "w2": {0: True, 4: False},
}
options = {w: run_flags(k) for w, k in known.items()}

count = 0
sols = []
for fv1 in options["v1"]:
    for fw1 in options["w1"]:
        for fv2 in options["v2"]:
            for fw2 in options["w2"]:
                flags = {"v1": fv1, "w1": fw1, "v2": fv2, "w2": fw2}
                # terminal slots: try all; w-corners need label-3 term
                tslots = {}
                wopts = {w: list(SLOTS[w]) for w in SLOTS}
                for t_v1 in SLOTS["v1"]:
                    for t_v2 in SLOTS["v2"]:
                        for t_w1 in (SLOTS["w1"][0], SLOTS["w1"][2]):
                            for t_w2 in (SLOTS["w2"][0], SLOTS["w2"][2]):
                                term = {"v1": t_v1, "v2": t_v2,
                                        "w1": t_w1, "w2": t_w2}
                                rest = [p for p in range(12)
                                        if p not in term.values()]
                                # pair rest by label / orientation
                                by_lab = {}
                                for p in rest:
                                    by_lab.setdefault(SLOT_LABEL[p], []).append(p)
                                if any(len(v) % 2 for v in by_lab.values()):
                                    continue
                                pair_sets = [[]]
                                for lab, ps in sorted(by_lab.items()):
                                    new = []
                                    for base in pair_sets:
                                        for perm in itertools.permutations(ps):
                                            pairs = [tuple(perm[i:i+2])
                                                     for i in range(0, len(perm), 2)]
                                            new.append(base + pairs)
                                    pair_sets = new
                                seen_ps = set()
                                for pairing in pair_sets:
                                    keyp = frozenset(tuple(sorted(p)) + (p[0],)
                                                     for p in pairing)
                                    if keyp in seen_ps:
                                        continue
                                    seen_ps.add(keyp)
                                    lc = crossings_ok(pairing)
                                    if lc is None or lc > 1:
                                        continue
                                    for yr in ((0, 1) if lc else (0,)):
                                        count += 1
                                        try:
                                            c = build(term, flags, pairing, yr)
                                        except Exception:
                                            continue
                                        if c is None or validate(c):
                                            continue
                                        mcs = find_mal_cycles(c)
                                        if len(mcs) != 1:
                                            continue
                                        rep = non_minimality_witnesses(c)
                                        lines = rep.lines()
                                        kinds = {l.split()[1] for l in lines}
                                        score = (len(kinds - {"mal-cycle"}), len(lines))
                                        sols.append((score, term, flags, tuple(pairing), yr,
                                                     lines))

sols.sort(key=lambda s: s[0])
print("tried", count, "built solutions:", len(sols))
for s in sols[:4]:
    print(s)
    print()
