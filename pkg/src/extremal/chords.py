"""Star chords: lines off X through at least two star points, and their duals.

Every rational point of X is a star point, so a star chord is the join of
two surface points that is not itself a line of X.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .proj import ProjLine, ProjPlane, ProjPoint, line_from_equations, line_from_rows
from .surface import CensusMismatch, Surface


@dataclass(frozen=True)
class StarChord:
    line: ProjLine
    star_points: tuple[int, ...]  # sorted surface point indices


@dataclass(frozen=True)
class OnSurfaceLine:
    line_index: int


def _point_idx(x: Surface, p) -> int:
    if isinstance(p, (int, np.integer)):
        return int(p)
    i = x.index_of_point(p)
    if i is None:
        raise ValueError(f"{p} is not a star point of the surface")
    return i


def surface_points_on(x: Surface, L: ProjLine) -> tuple[int, ...]:
    idx = x.point_index
    return tuple(sorted(i for i in (idx.get(p.coords) for p in L.points()) if i is not None))


def chord(x: Surface, p1, p2) -> StarChord | OnSurfaceLine:
    i, j = _point_idx(x, p1), _point_idx(x, p2)
    if i == j:
        raise ValueError("a chord needs two distinct star points")
    L = line_from_rows(x.F, [x.point_coords[i], x.point_coords[j]])
    li = x.index_of_line(L)
    if li is not None:
        return OnSurfaceLine(li)
    return StarChord(L, surface_points_on(x, L))


def dual_line(x: Surface, c: StarChord) -> ProjLine:
    """The common line of the tangent planes along c, checked against all of them."""
    F = x.F
    a, b = c.star_points[0], c.star_points[1]
    L = line_from_equations(F, [x.tangent_array[a].tolist(), x.tangent_array[b].tolist()])
    for p in c.star_points:
        t = x.tangent_array[p].tolist()
        if la.dot(F, t, L.basis[0]) or la.dot(F, t, L.basis[1]):
            raise CensusMismatch(f"tangent plane at point {p} does not contain the dual line")
    return L


def dual_chord(x: Surface, c: StarChord) -> StarChord:
    L = dual_line(x, c)
    if x.index_of_line(L) is not None:
        raise CensusMismatch("dual of a star chord lies on the surface")
    return StarChord(L, surface_points_on(x, L))


@dataclass
class ChordTable:
    chords: list[StarChord]
    index: dict  # line key -> chord index
    by_pair: dict  # (i, j) with i < j -> chord index
    dual: np.ndarray
    through_point: list  # point index -> chord indices


def chord_table(x: Surface) -> ChordTable:
    """All star chords of X, sorted by canonical line key, with their duals."""
    if "chords" in x.cache:
        return x.cache["chords"]
    F = x.F
    n = x.n_points
    found: dict = {}
    covered = [0] * n
    for i in range(n):
        # points off the tangent plane at i join to chords
        t = x.tangent_array[i]
        acc = np.zeros(n, dtype=np.int64)
        for k in range(4):
            if t[k]:
                acc = F.vadd(acc, F.vmul(int(t[k]), x.point_array[:, k]))
        for j in np.nonzero(acc)[0].tolist():
            if j <= i or covered[i] >> j & 1:
                continue
            L = line_from_rows(F, [x.point_coords[i], x.point_coords[j]])
            pts = surface_points_on(x, L)
            found[L.key] = (L, pts)
            m = 0
            for p in pts:
                m |= 1 << p
            for p in pts:
                covered[p] |= m
    keys = sorted(found)
    chords = [StarChord(found[k][0], found[k][1]) for k in keys]
    index = {k: c for c, k in enumerate(keys)}
    by_pair = {}
    through = [[] for _ in range(n)]
    for ci, c in enumerate(chords):
        sp = c.star_points
        for a in range(len(sp)):
            through[sp[a]].append(ci)
            for b in range(a + 1, len(sp)):
                by_pair[(sp[a], sp[b])] = ci
    dual = np.full(len(chords), -1, dtype=np.int64)
    for ci, c in enumerate(chords):
        L = dual_line(x, c)
        di = index.get(L.key)
        if di is None:
            raise CensusMismatch(f"dual of chord {ci} is not a star chord")
        dual[ci] = di
    tab = ChordTable(chords, index, by_pair, dual, through)
    x.cache["chords"] = tab
    return tab


def enumerate_chords(x: Surface) -> list[StarChord]:
    return list(chord_table(x).chords)


def enumerate_chords_naive(x: Surface) -> list[StarChord]:
    """Reference oracle: join every pair of points, discard surface lines, dedupe."""
    seen = {}
    for i in range(x.n_points):
        for j in range(i + 1, x.n_points):
            c = chord(x, i, j)
            if isinstance(c, StarChord):
                seen.setdefault(c.line.key, c)
    return [seen[k] for k in sorted(seen)]


def chord_index_of_line(x: Surface, L: ProjLine) -> int | None:
    return chord_table(x).index.get(L.key)


def chord_lies_in_star_plane(x: Surface, c: StarChord, p: int) -> bool:
    t = x.tangent_array[p].tolist()
    F = x.F
    return la.dot(F, t, c.line.basis[0]) == 0 and la.dot(F, t, c.line.basis[1]) == 0


def chords_csv(x: Surface) -> str:
    tab = chord_table(x)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "u0", "u1", "u2", "u3", "v0", "v1", "v2", "v3", "star_points", "dual"])
    for i, c in enumerate(tab.chords):
        w.writerow([i, *c.line.basis[0], *c.line.basis[1], " ".join(map(str, c.star_points)), int(tab.dual[i])])
    return buf.getvalue()
