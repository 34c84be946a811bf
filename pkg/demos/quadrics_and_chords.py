"""Quadrics through three skew lines, and the star chords they carry.

Any three pairwise skew lines of X lie on one smooth quadric Q, and X meets
Q in exactly 2d lines: d from each ruling.  Between star points there are
star chords, lines off X meeting exactly q+1 star points; each chord has a
dual chord, the common line of the star planes along it.  This script
walks one configuration at q = 3.
"""

from __future__ import annotations

from extremal import build_field, build_surface
from extremal.chords import chord_table
from extremal.quadrics import chord_config_incidence, chords_in_rulings, config_table, quadric_through, surface_lines_on

x = build_surface(build_field(3, 1), "fermat")
tab = config_table(x)
print(f"{len(tab.configs)} quadric configurations on the q=3 quartic (1/2(q^3+1)(q^2+1)q^4 = 11340)")

a = 0
b = next(l for l in range(x.n_lines) if x.skew(a, l))
c = next(l for l in range(x.n_lines) if x.skew(a, l) and x.skew(b, l))
Q = quadric_through(x.lines[a], x.lines[b], x.lines[c])
on = surface_lines_on(x, Q)
print(f"skew lines {a}, {b}, {c} lie on the quadric {Q}")
print(f"  it contains {len(on)} lines of X: {on}")

cfg = tab.configs[tab.by_line[a][0]]
print(f"  rulings of one configuration through line {a}: {cfg.ruling_L} | {cfg.ruling_M}")

ct = chord_table(x)
print(f"{len(ct.chords)} star chords (q^4(q^2-q+1)(q^2+1) = 5670)")
ch = ct.chords[0]
print(f"  chord 0 carries star points {list(ch.star_points)}; its dual is chord {int(ct.dual[0])}")

A, B = chords_in_rulings(x, cfg)
print(f"  the configuration carries {len(A)} + {len(B)} star chords, one group per ruling (q^2-q = 6 each)")
inc = chord_config_incidence(x)
shared = set(inc.configs_of[A[0]]) & set(inc.configs_of[B[0]])
print(f"  two chords from opposite rulings lie together on {len(shared)} configuration quadrics (q+1)")
