"""The unitary group acting on lines, chords and skew triples.

Generators of PU(4, F_{q^2}) are built from coordinate permutations,
diagonal matrices and unipotent maps fixing a point.  Breadth-first orbits
of the induced permutations exhaust each census, which certifies
transitivity.  At q = 2 the group order 25920 is also checked by counting
unitary matrices directly.
"""

from __future__ import annotations

import time

from extremal import build_field, build_surface
from extremal.autos import (CENSUS_KINDS, census_sextuples, generators, group_order, pair_stabilizer_order,
                            projective_unitary_order, transitivity_certificate)

for p in (2, 3):
    x = build_surface(build_field(p, 1), "fermat")
    gens = generators(x)
    print(f"q={x.q}: |PU| = {group_order(x.q)}, generators {gens.counts()}")
    for kind in CENSUS_KINDS:
        t = time.perf_counter()
        cert = transitivity_certificate(x, gens, kind)
        print(f"  orbit of one {kind:<11} {cert['orbit']:>8} / {cert['census']:<8} ({time.perf_counter() - t:.2f}s)")
    print(f"  ordered sextuples of two skew triples meeting pairwise: {census_sextuples(x)}")
    print(f"  stabilizer of two points of X joined by no line of X: {pair_stabilizer_order(x.F)}")

F4 = build_field(2, 1)
t = time.perf_counter()
print(f"q=2: projective unitary matrices counted directly: {projective_unitary_order(build_surface(F4, 'fermat').form)}"
      f" ({time.perf_counter() - t:.1f}s)")
