"""A double eight on the quartic over F_9 that no chord pair explains.

On x^4 + y^4 + z^4 + w^4 take the quadric Q1 = V(xw - yz) with its rulings
L and M, and the quadric
    Q2 = V(x^2 + xy + xz - xw - y^2 + yz + yw + z^2 - zw - w^2)
with line sets N and P written using the roots a, a' of T^2 - T - 1.  The
sets L + N and M + P form a double eight, yet Q1 and Q2 share no line at
all, so the pair Q1, Q2 is not one of the chord-sharing pairs.
"""

from __future__ import annotations

from extremal import build_field, build_surface
from extremal.doubles import chord_pairs, decompose, validate_double
from extremal.proj import line_from_equations
from extremal.quadrics import config_key, config_table, lines_on_quadric, quadric_config, quadric_from_dict

F = build_field(3, 1)
x = build_surface(F, "fermat")
neg = F.NEG
m1 = neg[1]
a, ab = [v for v in range(F.s) if F.mul(v, v) == F.add(v, 1)]
alphas = [t for t in range(F.s) if F.pow(t, 4) == m1]
print(f"roots of T^2 - T - 1 in F_9: {F(a)}, {F(ab)}")


def line(*eqs):
    return x.index_of_line(line_from_equations(F, eqs))


L = [line([1, neg[t], 0, 0], [0, 0, 1, neg[t]]) for t in alphas]
M = [line([1, 0, neg[t], 0], [0, 1, 0, neg[t]]) for t in alphas]
N = [line([1, 0, 0, neg[a]], [0, 1, neg[a], 0]), line([1, 0, 0, neg[ab]], [0, 1, neg[ab], 0]),
     line([m1, m1, 0, 1], [1, m1, m1, 0]), line([m1, m1, 0, m1], [1, m1, 1, 0])]
P = [line([1, a, 0, 0], [0, 0, 1, neg[ab]]), line([1, ab, 0, 0], [0, 0, 1, neg[a]]),
     line([m1, 1, 0, 1], [m1, m1, 1, 0]), line([m1, m1, 0, 1], [1, m1, 1, 0])]
print(f"line indices: L={L} M={M} N={N} P={P}")

Q1 = quadric_from_dict(F, {"xw": 1, "yz": -1})
Q2 = quadric_from_dict(F, {"xx": 1, "xy": 1, "xz": 1, "xw": -1, "yy": -1, "yz": 1, "yw": 1,
                           "zz": 1, "zw": -1, "ww": -1})
print("N and P lie on Q2:", all(Q2.contains_line(x.lines[i]) for i in N + P))

dd = validate_double(x, L + N, M + P)
print("L+N, M+P is a double eight; row sums", dd.matrix().sum(axis=1).tolist())

r1, r2 = lines_on_quadric(Q1)
print(f"Q1 has {len(r1)} + {len(r2)} lines; on Q2: {sum(Q2.contains_line(l) for l in r1 + r2)}")

tab = config_table(x)
keys = tuple(sorted(tab.index[config_key(c.mask_L, c.mask_M)] for c in (quadric_config(x, Q1), quadric_config(x, Q2))))
dec = decompose(x, dd)
cp = {(p.q1, p.q2) for p in chord_pairs(x)}
print(f"quadric pairs splitting it: {dec}; contains (Q1, Q2) = {keys}: {keys in dec}")
print("any of them a chord-sharing pair:", any(p in cp for p in dec))
