"""Points, lines, planes and collineations of PG(3, q^2).

All objects carry integer element codes (see :mod:`extremal.gf`) and are
stored in a canonical form, so structural equality is projective equality.
The field reference is excluded from equality and hashing.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple

from . import linalg as la
from .gf import GF, FieldElem


@dataclass(frozen=True)
class ProjPoint:
    coords: tuple[int, ...]
    F: GF = field(compare=False, hash=False, repr=False)

    @property
    def elems(self) -> tuple[FieldElem, ...]:
        return tuple(FieldElem(c, self.F) for c in self.coords)

    def __repr__(self):
        return "[" + ":".join(str(c) for c in self.coords) + "]"


@dataclass(frozen=True)
class ProjPlane:
    normal: tuple[int, ...]
    F: GF = field(compare=False, hash=False, repr=False)

    def contains(self, p: ProjPoint) -> bool:
        return la.dot(self.F, self.normal, p.coords) == 0

    def __repr__(self):
        return "V(" + ",".join(str(c) for c in self.normal) + ")"


@dataclass(frozen=True)
class ProjLine:
    """A line as the row space of its canonical 2x4 RREF basis."""

    basis: tuple[tuple[int, ...], tuple[int, ...]]
    F: GF = field(compare=False, hash=False, repr=False)

    @property
    def key(self) -> tuple[int, ...]:
        return self.basis[0] + self.basis[1]

    def points(self) -> list[ProjPoint]:
        return [ProjPoint(c, self.F) for c in line_point_coords(self.F, self.basis)]

    def contains(self, p: ProjPoint) -> bool:
        return la.rank(self.F, [self.basis[0], self.basis[1], p.coords]) == 2

    def equations(self) -> list[tuple[int, ...]]:
        """Two independent covectors cutting out the line."""
        return [tuple(v) for v in la.nullspace(self.F, list(self.basis))]

    def __repr__(self):
        return f"Line({self.basis[0]}, {self.basis[1]})"


@dataclass(frozen=True)
class ProjTransform:
    matrix: tuple[tuple[int, ...], ...]
    F: GF = field(compare=False, hash=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def rows(self):
        return [list(r) for r in self.matrix]

    def inverse(self) -> ProjTransform:
        return transform(self.F, la.inverse(self.F, self.rows()))

    def compose(self, other: ProjTransform) -> ProjTransform:
        """self after other."""
        return transform(self.F, la.matmul(self.F, self.rows(), other.rows()))


class Incidence(NamedTuple):
    kind: str  # 'equal', 'meet' or 'skew'
    point: ProjPoint | None = None


# ---------------------------------------------------------------------------
# constructors


def point(F: GF, coords) -> ProjPoint:
    c = [int(x) for x in coords]
    if len(c) != 4:
        raise ValueError("points of PG(3) need four coordinates")
    return ProjPoint(la.normalize(F, c), F)


def plane(F: GF, normal) -> ProjPlane:
    return ProjPlane(la.normalize(F, [int(x) for x in normal]), F)


def line_from_rows(F: GF, rows) -> ProjLine:
    R, piv = la.rref(F, [[int(x) for x in r] for r in rows])
    if len(piv) != 2:
        raise ValueError(f"rows span a subspace of dimension {len(piv)}, not a line")
    return ProjLine((tuple(R[0]), tuple(R[1])), F)


def line_from_equations(F: GF, eqs) -> ProjLine:
    """The line cut out by two independent linear forms."""
    ker = la.nullspace(F, [[int(x) for x in e] for e in eqs], 4)
    if len(ker) != 2:
        raise ValueError("equations do not cut out a line")
    return line_from_rows(F, ker)


def canonical_line(p1: ProjPoint, p2: ProjPoint) -> ProjLine:
    if p1 == p2:
        raise ValueError("a line needs two distinct points")
    return line_from_rows(p1.F, [p1.coords, p2.coords])


def transform(F: GF, matrix) -> ProjTransform:
    M = [[int(x) for x in r] for r in matrix]
    if la.det(F, M) == 0:
        raise ValueError("singular matrix does not define a collineation")
    flat = la.normalize(F, [a for r in M for a in r])
    n = len(M)
    return ProjTransform(tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n)), F)


def identity_transform(F: GF, n: int = 4) -> ProjTransform:
    return transform(F, la.identity(n))


def permutation_transform(F: GF, perm) -> ProjTransform:
    """The map sending coordinate i to position perm[i]."""
    n = len(perm)
    M = [[0] * n for _ in range(n)]
    for i, j in enumerate(perm):
        M[j][i] = 1
    return transform(F, M)


# ---------------------------------------------------------------------------
# enumeration


def normalized_vectors(F: GF, n: int):
    """Canonical representatives of PG(n-1, F), in lexicographic code order."""
    out = []
    for lead in range(n):
        for tail in product(range(F.s), repeat=n - lead - 1):
            out.append((0,) * lead + (1,) + tail)
    out.sort()
    return out


def all_points(F: GF) -> list[ProjPoint]:
    return [ProjPoint(c, F) for c in normalized_vectors(F, 4)]


def all_planes(F: GF) -> list[ProjPlane]:
    return [ProjPlane(c, F) for c in normalized_vectors(F, 4)]


def line_point_coords(F: GF, basis) -> list[tuple[int, ...]]:
    """The s+1 normalized points of the line with RREF rows (u, v)."""
    u, v = basis
    ADD, MUL = F.ADD, F.MUL
    pts = [tuple(v)]
    for t in range(F.s):
        row = MUL[t]
        pts.append(tuple(ADD[a][row[b]] for a, b in zip(u, v)))
    # u has the leading pivot, so u + t v is already normalized; v is too
    return pts


# ---------------------------------------------------------------------------
# incidence


def incidence(a: ProjLine, b: ProjLine) -> Incidence:
    F = a.F
    if a.basis == b.basis:
        return Incidence("equal")
    M = [list(a.basis[0]), list(a.basis[1]), list(b.basis[0]), list(b.basis[1])]
    r = la.rank(F, M)
    if r == 4:
        return Incidence("skew")
    return Incidence("meet", meet_point(a, b))


def meet_point(a: ProjLine, b: ProjLine) -> ProjPoint:
    """Intersection point of two distinct coplanar lines."""
    F = a.F
    eqs = a.equations() + b.equations()
    ker = la.nullspace(F, [list(e) for e in eqs], 4)
    if len(ker) != 1:
        raise ValueError("lines do not meet in a single point")
    return point(F, ker[0])


def plane_span(l: ProjLine, p: ProjPoint) -> ProjPlane:
    F = l.F
    M = [list(l.basis[0]), list(l.basis[1]), list(p.coords)]
    ker = la.nullspace(F, M, 4)
    if len(ker) != 1:
        raise ValueError("point lies on the line; the spanned plane is not unique")
    return plane(F, ker[0])


def plane_meet(h1: ProjPlane, h2: ProjPlane) -> ProjLine:
    return line_from_equations(h1.F, [h1.normal, h2.normal])


def line_in_plane(l: ProjLine, h: ProjPlane) -> bool:
    F = l.F
    return la.dot(F, h.normal, l.basis[0]) == 0 and la.dot(F, h.normal, l.basis[1]) == 0


# ---------------------------------------------------------------------------
# action


def apply(g: ProjTransform, obj):
    """Image of a point, line or plane under g (planes via the inverse transpose)."""
    F = g.F
    M = g.rows()
    if isinstance(obj, ProjPoint):
        return point(F, la.matvec(F, M, obj.coords))
    if isinstance(obj, ProjLine):
        return line_from_rows(F, [la.matvec(F, M, r) for r in obj.basis])
    if isinstance(obj, ProjPlane):
        Minv = la.inverse(F, M)
        # covector n maps to n g^{-1}
        return plane(F, la.matvec(F, la.transpose(Minv), obj.normal))
    raise TypeError(f"cannot apply a collineation to {type(obj).__name__}")


# ---------------------------------------------------------------------------
# serialization: one row per object, coordinates as element codes, which are
# also the row indices of the field's log table


def points_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "x", "y", "z", "w"])
    for i, p in enumerate(points):
        w.writerow([i, *p.coords])
    return buf.getvalue()


def planes_csv(planes) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "a", "b", "c", "d"])
    for i, h in enumerate(planes):
        w.writerow([i, *h.normal])
    return buf.getvalue()


def lines_csv(lines) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "u0", "u1", "u2", "u3", "v0", "v1", "v2", "v3"])
    for i, l in enumerate(lines):
        w.writerow([i, *l.basis[0], *l.basis[1]])
    return buf.getvalue()


def read_lines_csv(F: GF, text: str) -> list[ProjLine]:
    rows = list(csv.reader(io.StringIO(text)))[1:]
    return [line_from_rows(F, [r[1:5], r[5:9]]) for r in rows]


def read_points_csv(F: GF, text: str) -> list[ProjPoint]:
    rows = list(csv.reader(io.StringIO(text)))[1:]
    return [point(F, r[1:5]) for r in rows]
