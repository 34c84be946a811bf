"""The smooth extremal surface X = V(h) of degree q+1 over F_{q^2}.

Building a :class:`Surface` scans PG(3, q^2) for the rational points, finds
the lines through the sesquilinear Gram matrix of those points, and caches
the line incidence graph both as a numpy bool matrix and as Python-int
neighbour bitsets (the representation used by the combinatorial searches).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .forms import (
    FrobeniusForm,
    SectionClass,
    antidiagonal_form,
    classify_section,
    fermat_form,
    form,
    is_degenerate,
    is_hermitian,
    line_on_form,
    rank,
    restrict_to_plane,
    tangent_covector,
)
from .gf import GF
from .proj import ProjLine, ProjPlane, ProjPoint, line_from_rows, normalized_vectors, plane


class SingularSurfaceError(ValueError):
    pass


class NonHermitianError(ValueError):
    pass


class CensusMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class Star:
    center: int  # point index
    plane: ProjPlane
    lines: tuple[int, ...]


@dataclass
class Check:
    name: str
    formula: str
    expected: int
    observed: int | None
    passed: bool
    witness: object = None


@dataclass
class CensusReport:
    q: int
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, formula, expected, observed, witness=None, passed=None):
        if passed is None:
            passed = expected == observed
        self.checks.append(Check(name, formula, expected, observed, passed, witness))

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def form_values(F: GF, A, X: np.ndarray) -> np.ndarray:
    """(x^{[q]})^T A x for every row x of X."""
    n = X.shape[1]
    out = np.zeros(X.shape[0], dtype=np.int64)
    for i in range(n):
        acc = np.zeros(X.shape[0], dtype=np.int64)
        for j in range(n):
            if A[i][j]:
                acc = F.vadd(acc, F.vmul(A[i][j], X[:, j]))
        out = F.vadd(out, F.vmul(F.vfrob(X[:, i]), acc))
    return out


def bitset(indices) -> int:
    b = 0
    for i in indices:
        b |= 1 << int(i)
    return b


def bits(b: int) -> list[int]:
    out = []
    while b:
        low = b & -b
        out.append(low.bit_length() - 1)
        b ^= low
    return out


def popcount(b: int) -> int:
    return b.bit_count()


class Surface:
    """Cached combinatorics of X.  Treat as immutable after construction."""

    def __init__(self, F: GF, f: FrobeniusForm, model: str):
        self.F = F
        self.form = f
        self.model = model
        self.q = F.q
        self.d = F.q + 1
        self.cache: dict = {}  # derived tables (chords, configurations, ...)
        self._build_points()
        self._build_lines()
        self._build_incidence()

    # -- construction ----------------------------------------------------------
    def _build_points(self):
        F = self.F
        allv = np.array(normalized_vectors(F, 4), dtype=np.int64)
        vals = form_values(F, self.form.rows, allv)
        P = allv[vals == 0]
        self.point_array = P
        self.point_coords = [tuple(int(c) for c in r) for r in P]
        self.points = [ProjPoint(c, F) for c in self.point_coords]
        self.point_index = {c: i for i, c in enumerate(self.point_coords)}
        # tangent covectors A^T p^{[q]}
        AT = la.transpose(self.form.rows)
        T = np.zeros_like(P)
        Pq = F.vfrob(P)
        for i in range(4):
            acc = np.zeros(P.shape[0], dtype=np.int64)
            for j in range(4):
                if AT[i][j]:
                    acc = F.vadd(acc, F.vmul(AT[i][j], Pq[:, j]))
            T[:, i] = acc
        self.tangent_array = T

    def _orthogonal(self, i: int) -> np.ndarray:
        """Indices of surface points in the tangent plane at point i."""
        F = self.F
        P = self.point_array
        t = self.tangent_array[i]
        acc = np.zeros(P.shape[0], dtype=np.int64)
        for k in range(4):
            if t[k]:
                acc = F.vadd(acc, F.vmul(int(t[k]), P[:, k]))
        return np.nonzero(acc == 0)[0]

    def _build_lines(self):
        F = self.F
        found: dict[tuple, list[int]] = {}
        idx = self.point_index
        for i in range(len(self.points)):
            nb = set(int(j) for j in self._orthogonal(i))
            nb.discard(i)
            while nb:
                j = min(nb)
                L = line_from_rows(F, [self.point_coords[i], self.point_coords[j]])
                pts = [idx.get(p.coords) for p in L.points()]
                if any(p is None for p in pts):
                    # two orthogonal points whose join leaves X; impossible for Hermitian forms
                    raise CensusMismatch(f"join of points {i},{j} is not on the surface")
                nb.difference_update(pts)
                found.setdefault(L.key, sorted(pts))
        keys = sorted(found)
        self.lines = [ProjLine((k[:4], k[4:]), F) for k in keys]
        self.line_index = {k: n for n, k in enumerate(keys)}
        self.line_points = np.array([found[k] for k in keys], dtype=np.int64)
        for L in self.lines:
            if not line_on_form(self.form, L):  # pragma: no cover - guarded by construction
                raise CensusMismatch(f"{L} is not contained in the surface")

    def _build_incidence(self):
        nL = len(self.lines)
        nP = len(self.points)
        through = [[] for _ in range(nP)]
        for li, pts in enumerate(self.line_points):
            for p in pts:
                through[int(p)].append(li)
        self.point_lines = through
        meet = np.full((nL, nL), -1, dtype=np.int64)
        for p, ls in enumerate(through):
            for a in ls:
                for b in ls:
                    if a != b:
                        meet[a, b] = p
        self.meet_point = meet
        self.incidence = meet >= 0
        self.neighbours = [bitset(np.nonzero(self.incidence[i])[0]) for i in range(nL)]
        self.all_lines_mask = (1 << nL) - 1

    # -- queries -----------------------------------------------------------------
    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    def index_of_line(self, L: ProjLine) -> int | None:
        return self.line_index.get(L.key)

    def index_of_point(self, p) -> int | None:
        c = p.coords if isinstance(p, ProjPoint) else tuple(p)
        return self.point_index.get(c)

    def tangent_plane(self, i: int) -> ProjPlane:
        return plane(self.F, self.tangent_array[i].tolist())

    def meets(self, a: int, b: int) -> bool:
        return bool(self.incidence[a, b])

    def skew(self, a: int, b: int) -> bool:
        return a != b and not self.incidence[a, b]

    def skew_mask(self, a: int) -> int:
        return self.all_lines_mask & ~self.neighbours[a] & ~(1 << a)

    def is_on_surface(self, p) -> bool:
        return self.index_of_point(p) is not None

    def star_points(self) -> list[int]:
        """Indices of points whose tangent section is a star (all of them, for X)."""
        return [i for i in range(self.n_points) if self.is_star_point(i)]

    def is_star_point(self, i: int) -> bool:
        return is_degenerate(restrict_to_plane(self.form, self.tangent_plane(i)))

    def __repr__(self):
        return f"Surface(q={self.q}, model={self.model}, points={self.n_points}, lines={self.n_lines})"


def build_surface(F: GF, model="fermat", matrix=None) -> Surface:
    """Build X for a standard model name or a custom Hermitian rank-4 matrix."""
    if isinstance(model, FrobeniusForm):
        f, name = model, "custom"
    elif model == "fermat":
        f, name = fermat_form(F, 4), "fermat"
    elif model == "antidiagonal":
        f, name = antidiagonal_form(F, 4), "antidiagonal"
    elif model == "custom" or not isinstance(model, str):
        M = matrix if model == "custom" else model
        if M is None:
            raise ValueError("custom model needs a matrix")
        f, name = form(F, M), "custom"
    else:
        raise ValueError(f"unknown model {model!r}")
    if f.n != 4:
        raise ValueError("surface forms need four variables")
    r = rank(f)
    if r < 4:
        raise SingularSurfaceError(f"singular surface: matrix has rank {r}")
    if not is_hermitian(f):
        raise NonHermitianError("matrix is not Hermitian; rational star points are not guaranteed")
    return Surface(F, f, name)


def star_at(x: Surface, p) -> Star:
    i = p if isinstance(p, int) else x.index_of_point(p)
    if i is None:
        raise ValueError(f"{p} is not a point of the surface")
    H = x.tangent_plane(i)
    sec = classify_section(restrict_to_plane(x.form, H))
    if sec is not SectionClass.Star:
        raise CensusMismatch(f"tangent section at point {i} is {sec.value}, not a star")
    ls = tuple(x.point_lines[i])
    F = x.F
    for li in ls:
        for r in x.lines[li].basis:
            if la.dot(F, H.normal, r):
                raise CensusMismatch(f"line {li} through point {i} leaves its tangent plane")
    return Star(i, H, ls)


def stars(x: Surface) -> list[Star]:
    return [star_at(x, i) for i in range(x.n_points)]


def enumerate_lines_naive(x: Surface) -> list[ProjLine]:
    """Reference enumeration: join every pair of surface points and test containment."""
    F = x.F
    seen = {}
    pts = x.point_coords
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            L = line_from_rows(F, [pts[i], pts[j]])
            if L.key in seen:
                continue
            if line_on_form(x.form, L):
                seen[L.key] = L
    return [seen[k] for k in sorted(seen)]


def enumerate_lines(x: Surface) -> list[ProjLine]:
    q = x.q
    expected = (q**3 + 1) * (q + 1)
    if len(x.lines) != expected:
        raise CensusMismatch(f"found {len(x.lines)} lines, expected {expected}")
    return list(x.lines)


def verify_census(x: Surface, planes: bool = True) -> CensusReport:
    t0 = time.perf_counter()
    q = x.q
    rep = CensusReport(q)
    F = x.F
    nL = x.n_lines

    rep.add("points", "(q^3+1)(q^2+1)", (q**3 + 1) * (q**2 + 1), x.n_points)
    rep.add("lines", "(q^3+1)(q+1)", (q**3 + 1) * (q + 1), nL)
    rep.add("lines_identity", "d^2(d^2-3d+3) = (q^3+1)(q+1)", x.d**2 * (x.d**2 - 3 * x.d + 3), (q**3 + 1) * (q + 1))

    nonstar = [i for i in range(x.n_points) if not x.is_star_point(i)]
    rep.add("star_points", "(q^3+1)(q^2+1)", (q**3 + 1) * (q**2 + 1), x.n_points - len(nonstar),
            witness=nonstar[:1] or None)

    per_line = x.line_points.shape[1] if nL else 0
    rep.add("star_points_per_line", "q^2+1", q**2 + 1, per_line)

    deg = x.incidence.sum(axis=1)
    bad = np.nonzero(deg != q * (q**2 + 1))[0]
    rep.add("meeting_lines_per_line", "q(q^2+1)", q * (q**2 + 1), int(deg.min()) if nL else 0,
            witness=bad[:1].tolist() or None, passed=len(bad) == 0)
    sk = nL - 1 - deg
    bad = np.nonzero(sk != q**4)[0]
    rep.add("skew_lines_per_line", "q^4", q**4, int(sk.min()) if nL else 0,
            witness=bad[:1].tolist() or None, passed=len(bad) == 0)
    sym = bool((x.incidence == x.incidence.T).all()) and not bool(np.diag(x.incidence).any())
    rep.add("incidence_symmetric", "symmetric, zero diagonal", 1, int(sym))

    # lines per star and star-plane point counts
    sizes = {len(ls) for ls in x.point_lines}
    rep.add("lines_per_star", "q+1", q + 1, min(sizes), passed=sizes == {q + 1})
    in_plane = []
    P = x.point_array
    for i in range(x.n_points):
        t = x.tangent_array[i]
        acc = np.zeros(P.shape[0], dtype=np.int64)
        for k in range(4):
            if t[k]:
                acc = F.vadd(acc, F.vmul(int(t[k]), P[:, k]))
        in_plane.append(int((acc == 0).sum()))
    rep.add("star_points_per_star_plane", "q^3+q^2+1", q**3 + q**2 + 1, min(in_plane),
            passed=set(in_plane) == {q**3 + q**2 + 1})

    # common transversals of skew pairs and absence of triangles
    nb = x.neighbours
    bad_skew = None
    bad_tri = None
    for a in range(nL):
        na = nb[a]
        for b in range(a + 1, nL):
            common = (na & nb[b]).bit_count()
            if x.incidence[a, b]:
                p = int(x.meet_point[a, b])
                star_mask = bitset(x.point_lines[p]) & ~(1 << a) & ~(1 << b)
                if common != q - 1 or (na & nb[b]) != star_mask:
                    bad_tri = bad_tri or (a, b)
            elif common != q**2 + 1:
                bad_skew = bad_skew or (a, b)
    rep.add("transversals_of_skew_pair", "q^2+1", q**2 + 1, q**2 + 1 if bad_skew is None else None,
            witness=bad_skew, passed=bad_skew is None)
    rep.add("triangle_free", "common neighbours of meeting lines lie in their star", 1,
            int(bad_tri is None), witness=bad_tri)

    if planes:
        counts = plane_section_census(x)
        n_star = counts.get(SectionClass.Star, 0)
        n_smooth = counts.get(SectionClass.SmoothExtremalCurve, 0)
        other = sum(v for k, v in counts.items() if k not in (SectionClass.Star, SectionClass.SmoothExtremalCurve))
        rep.add("star_planes", "(q^3+1)(q^2+1)", (q**3 + 1) * (q**2 + 1), n_star)
        s = q * q
        rep.add("smooth_planes", "s^3+s^2+s+1 - (q^3+1)(q^2+1)",
                s**3 + s**2 + s + 1 - (q**3 + 1) * (q**2 + 1), n_smooth)
        rep.add("other_plane_sections", "0", 0, other)
        tangent = {tuple(la.normalize(F, t.tolist())) for t in x.tangent_array}
        rep.add("star_planes_are_tangent_planes", "distinct tangent planes", (q**3 + 1) * (q**2 + 1), len(tangent))
    rep.seconds = time.perf_counter() - t0
    return rep


def plane_section_census(x: Surface) -> dict:
    """Classify X ∩ H over every plane H of PG(3, q^2)."""
    F = x.F
    out: dict[SectionClass, int] = {}
    for nrm in normalized_vectors(F, 4):
        h = ProjPlane(nrm, F)
        c = classify_section(restrict_to_plane(x.form, h))
        out[c] = out.get(c, 0) + 1
    return out
