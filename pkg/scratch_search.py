"""Probe: best-first reduction of malcycle_demo."""
import sys, heapq, time
sys.path.insert(0, "src")
from chartcalc.corpus import get
from chartcalc.detect import complexity
from chartcalc.moves import enumerate_sites, apply_move
from chartcalc.canon import canonical_code

RULES_TO_TRY = ["CIII", "CI-M3", "CI-R2", "CII", "CI-M4", "CI-M2", "CI-M1"]

def reduce_search(chart, max_nodes=4000, verbose=False):
    start = complexity(chart).as_tuple()
    seen = {canonical_code(chart)}
    heap = [(start, 0, canonical_code(chart), chart, [])]
    best = (start, chart, [])
    n = 0
    t0 = time.time()
    while heap and n < max_nodes:
        cx, _, code, cur, path = heapq.heappop(heap)
        n += 1
        if cx < best[0]:
            best = (cx, cur, path)
            if verbose:
                print(f"  n={n} new best {cx} via {[p.rule for p in path]} ({time.time()-t0:.1f}s)")
        for fam in RULES_TO_TRY:
            for site in enumerate_sites(cur, fam, tested=False):
                try:
                    nxt, _ = apply_move(cur, site, want_inverse=False)
                except Exception:
                    continue
                ncode = canonical_code(nxt)
                if ncode in seen:
                    continue
                seen.add(ncode)
                ncx = complexity(nxt).as_tuple()
                if ncx > (start[0] + 1, start[1] + 2, 99, 99):
                    continue
                heapq.heappush(heap, (ncx, n, ncode, nxt, path + [site]))
    return best, n

c = get("malcycle_demo").chart()
print("start:", complexity(c))
(best_cx, best_chart, path), n = reduce_search(c, max_nodes=1500, verbose=True)
print("best:", best_cx, "nodes:", n)
print("path:", [s.fingerprint for s in path])
