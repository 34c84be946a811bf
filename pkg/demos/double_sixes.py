"""Double sixes on the cubic, and their analogues on the quartic.

A double 2d is a pair of disjoint 2d-sets of pairwise skew lines where
every line meets exactly d+2 lines of the other set.  For the cubic these
are Schlafli's 36 double sixes.  Each one splits into two quadric
configurations in 10 ways.  At q = 3 there are 527310 double eights; the
count comes from the 651 of them containing one fixed skew triple and the
transitive action on ordered skew triples.
"""

from __future__ import annotations

import time

from extremal import build_field, build_surface
from extremal.doubles import chord_pairs, decompose, search_doubles, seeded_count

x2 = build_surface(build_field(2, 1), "fermat")
t = time.perf_counter()
found = sorted(search_doubles(x2), key=lambda d: (d.setA, d.setB))
print(f"q=2: {len(found)} double sixes in {time.perf_counter() - t:.2f}s")
dd = found[0]
print(f"  first one: A = {dd.setA}, B = {dd.setB}")
print("  incidence matrix (rows A, columns B):")
for row in dd.matrix():
    print("   ", " ".join(str(v) for v in row))
print(f"  quadric pairs splitting it: {len(decompose(x2, dd))}")

x3 = build_surface(build_field(3, 1), "fermat")
t = time.perf_counter()
pairs = chord_pairs(x3)
print(f"q=3: {len(pairs)} configuration pairs sharing four star chords ({time.perf_counter() - t:.1f}s)")
t = time.perf_counter()
s = seeded_count(x3)
print(f"  doubles through the skew triple {s['triple']}: {s['through_triple']}")
print(f"  ordered skew triples: {s['ordered_skew_triples']}, per double: {s['per_double']}")
print(f"  so the quartic carries {s['total']} double eights ({time.perf_counter() - t:.1f}s)")
dec = [len(decompose(x3, d)) for d in s["doubles"]]
print(f"  quadric pairs per seeded double: {sorted(set(dec))}; undecomposed: {dec.count(0)}")
