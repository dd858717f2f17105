"""Scratch harness used while building; not part of the package."""
import sys
sys.path.insert(0, "src")

from chartcalc.model import ChartBuilder, Dart
from chartcalc.cmf import parse_chart, serialize
from chartcalc.validate import validate
from chartcalc.moves import enumerate_sites, apply_move, MoveSite, RULES
from chartcalc.detect import complexity, classify_edges, find_bigons

def show(tag, c):
    print(f"--- {tag}: v={len(c.vertices)} e={len(c.edges)} f={len(c.faces)} "
          f"cx={complexity(c)} viol={[str(x) for x in validate(c)]}")

def wheel(name="wheel", lab=(1, 2)):
    """One white vertex, six terminal edges."""
    b = ChartBuilder(name, 4)
    b.vertex("w", "white")
    rot = []
    for i in range(1, 7):
        b.vertex(f"k{i}", "black")
        label = lab[(i + 1) % 2]
        if i <= 3:  # outward
            b.edge(f"s{i}", label, "w", f"k{i}")
            b.rot(f"k{i}", f"s{i}.h")
            rot.append(f"s{i}.t")
        else:
            b.edge(f"s{i}", label, f"k{i}", "w")
            b.rot(f"k{i}", f"s{i}.t")
            rot.append(f"s{i}.h")
    b.rot("w", *rot)
    return b.build()

c = wheel()
show("wheel", c)

sites = enumerate_sites(c, "CIII")
print("CIII sites:", [s.fingerprint for s in sites])
for s in sites:
    if s.rule != "CIII-":
        continue
    ca, inva = apply_move(c, s)
    cb, invb = apply_move(ca, inva)
    print(f"  {s.fingerprint}: mid {complexity(ca)} viol={validate(ca)}; back {complexity(cb)} viol={validate(cb)}")

# white pair for CI-M3
def pair_chart():
    b = ChartBuilder("pair", 4)
    b.vertex("u", "white"); b.vertex("v", "white")
    b.edge("e0", 2, "u", "v")
    lab = [1, 2, 1, 2, 1]
    urot, vrot = ["e0.t"], ["e0.h"]
    # u: outs at rotation 0(e0),1,5; ins at 2,3,4
    for i in range(1, 6):
        b.vertex(f"a{i}", "black")
        if i in (1, 5):
            b.edge(f"ea{i}", lab[i - 1], "u", f"a{i}")
            b.rot(f"a{i}", f"ea{i}.h"); urot.append(f"ea{i}.t")
        else:
            b.edge(f"ea{i}", lab[i - 1], f"a{i}", "u")
            b.rot(f"a{i}", f"ea{i}.t"); urot.append(f"ea{i}.h")
    # v: ins at 0(e0),1,5; outs at 2,3,4
    for i in range(1, 6):
        b.vertex(f"c{i}", "black")
        if i in (1, 5):
            b.edge(f"ec{i}", lab[i - 1], f"c{i}", "v")
            b.rot(f"c{i}", f"ec{i}.t"); vrot.append(f"ec{i}.h")
        else:
            b.edge(f"ec{i}", lab[i - 1], "v", f"c{i}")
            b.rot(f"c{i}", f"ec{i}.h"); vrot.append(f"ec{i}.t")
    b.rot("u", *urot)
    b.rot("v", *vrot)
    return b.build()

cp = pair_chart()
show("white pair", cp)
m3 = enumerate_sites(cp, "CI-M3")
print("M3 sites:", [s.fingerprint for s in m3])
for s in m3:
    if s.rule != "CI-M3-":
        continue
    ca, inva = apply_move(cp, s)
    print("  cancel ->", complexity(ca), "viol:", validate(ca))
    print("  inverse:", inva.fingerprint)
    cb, invb = apply_move(ca, inva)
    print("  recreate ->", complexity(cb), "viol:", validate(cb))

# CII and R2: wheel labels 1,2 plus a label-3 free edge beside it... need degree 4
b = ChartBuilder("mix", 4)
b.vertex("w", "white")
rot = []
for i in range(1, 7):
    b.vertex(f"k{i}", "black")
    label = (1, 2)[(i + 1) % 2]
    if i <= 3:
        b.edge(f"s{i}", label, "w", f"k{i}")
        b.rot(f"k{i}", f"s{i}.h")
        rot.append(f"s{i}.t")
    else:
        b.edge(f"s{i}", label, f"k{i}", "w")
        b.rot(f"k{i}", f"s{i}.t")
        rot.append(f"s{i}.h")
b.rot("w", *rot)
b.vertex("p1", "black"); b.vertex("p2", "black")
b.edge("t3", 3, "p1", "p2")
b.rot("p1", "t3.t"); b.rot("p2", "t3.h")
b.place("p1", "s1.t", "t3.h")
cm = b.build()
show("mix", cm)
cii = enumerate_sites(cm, "CII")
print("CII sites:", [s.fingerprint for s in cii])
for s in cii[:3]:
    ca, inva = apply_move(cm, s)
    print(f"  {s.fingerprint} -> {complexity(ca)} viol={validate(ca)}")
    cb, invb = apply_move(ca, inva)
    print(f"    back -> {complexity(cb)} viol={validate(cb)}")

r2 = enumerate_sites(cm, "CI-R2")
print("R2 sites:", len(r2))
for s in r2[:4]:
    ca, inva = apply_move(cm, s)
    print(f"  {s.fingerprint} -> {complexity(ca)} viol={validate(ca)}")
    cb, invb = apply_move(ca, inva)
    print(f"    back {inva.fingerprint} -> {complexity(cb)} viol={validate(cb)}")
