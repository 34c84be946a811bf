"""Quadrics in PG(3, q^2) and quadric configurations on X.

A quadric is kept as its ten upper-triangular coefficients c_ij (i <= j),
never as a symmetric matrix, so that characteristic 2 needs no special
casing.  Tangent planes come from the polar form B(x, y) = f(x+y)-f(x)-f(y).

A quadric configuration is the set of 2d lines of X on a smooth quadric,
split into its two rulings of d skew lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import linalg as la
from .gf import GF
from .proj import ProjLine, line_from_rows, normalized_vectors
from .surface import CensusMismatch, Surface, bits, bitset

MONOMIALS = [(i, j) for i in range(4) for j in range(i, 4)]


@dataclass(frozen=True)
class QuadricForm:
    coeffs: tuple[int, ...]  # c_ij for (i, j) in MONOMIALS
    F: GF = field(compare=False, hash=False, repr=False)

    def value(self, x) -> int:
        F = self.F
        ADD, MUL = F.ADD, F.MUL
        acc = 0
        for c, (i, j) in zip(self.coeffs, MONOMIALS):
            if c and x[i] and x[j]:
                acc = ADD[acc][MUL[c][MUL[x[i]][x[j]]]]
        return acc

    def polar_matrix(self):
        F = self.F
        B = [[0] * 4 for _ in range(4)]
        for c, (i, j) in zip(self.coeffs, MONOMIALS):
            if i == j:
                B[i][i] = F.add(c, c)
            else:
                B[i][j] = c
                B[j][i] = c
        return B

    def polar(self, x, y) -> int:
        return la.dot(self.F, x, la.matvec(self.F, self.polar_matrix(), y))

    def tangent_covector(self, p) -> tuple[int, ...]:
        return tuple(la.matvec(self.F, self.polar_matrix(), p))

    def polar_rank(self) -> int:
        return la.rank(self.F, self.polar_matrix())

    def contains_line(self, L: ProjLine) -> bool:
        u, v = L.basis
        return self.value(u) == 0 and self.value(v) == 0 and self.polar(u, v) == 0

    def upper_matrix(self):
        M = [[0] * 4 for _ in range(4)]
        for c, (i, j) in zip(self.coeffs, MONOMIALS):
            M[i][j] = c
        return M

    def __repr__(self):
        names = "xyzw"
        terms = [f"{c}*{names[i]}{names[j]}" for c, (i, j) in zip(self.coeffs, MONOMIALS) if c]
        return "Q(" + " + ".join(terms) + ")"


def quadric(F: GF, coeffs) -> QuadricForm:
    c = [int(v) for v in coeffs]
    if len(c) != 10:
        raise ValueError("a quadric in four variables has ten coefficients")
    return QuadricForm(la.normalize(F, c), F)


def quadric_from_dict(F: GF, terms: dict) -> QuadricForm:
    """Build from {'xw': 1, 'yz': -1, ...}; integer values are read in F_p."""
    names = "xyzw"
    c = [0] * 10
    for mono, val in terms.items():
        i, j = sorted(names.index(ch) for ch in mono)
        c[MONOMIALS.index((i, j))] = int(val) % F.p if isinstance(val, int) else int(val)
    return quadric(F, c)


def monomial_row(F: GF, x) -> list[int]:
    return [F.mul(x[i], x[j]) for i, j in MONOMIALS]


def quadric_through(l1: ProjLine, l2: ProjLine, l3: ProjLine) -> QuadricForm:
    """The unique quadric containing three pairwise skew lines."""
    F = l1.F
    rows = []
    for L in (l1, l2, l3):
        u, v = L.basis
        w = [F.add(a, b) for a, b in zip(u, v)]  # third point u + v
        rows.extend(monomial_row(F, p) for p in (u, v, w))
    ker = la.nullspace(F, rows, 10)
    if len(ker) != 1:
        raise ValueError(f"quadrics through the lines form a space of dimension {len(ker)}, not 1")
    Q = quadric(F, ker[0])
    if Q.polar_rank() != 4:
        raise ValueError("quadric through the lines is singular")
    return Q


# ---------------------------------------------------------------------------
# point sets and rulings


def _monomials_of(F: GF, X: np.ndarray) -> np.ndarray:
    return np.stack([F.vmul(X[..., i], X[..., j]) for i, j in MONOMIALS], axis=-1)


def _values(F: GF, coeffs, X: np.ndarray) -> np.ndarray:
    mon = _monomials_of(F, X)
    acc = np.zeros(mon.shape[:-1], dtype=np.int64)
    for k, c in enumerate(coeffs):
        if c:
            acc = F.vadd(acc, F.vmul(c, mon[..., k]))
    return acc


def _space_points(F: GF) -> np.ndarray:
    key = "_space_points"
    cache = F.__dict__.setdefault("_extra_cache", {})
    if key not in cache:
        cache[key] = np.array(normalized_vectors(F, 4), dtype=np.int64)
    return cache[key]


def quadric_points(Q: QuadricForm) -> np.ndarray:
    P = _space_points(Q.F)
    return P[_values(Q.F, Q.coeffs, P) == 0]


def lines_on_quadric(Q: QuadricForm) -> tuple[list[ProjLine], list[ProjLine]]:
    """Both rulings of a hyperbolic quadric, q^2+1 rational lines each.

    The polar plane at a point p meets Q in the two lines through p; walking
    the points of one of them produces the whole opposite ruling.
    """
    F = Q.F
    s = F.s
    if Q.polar_rank() != 4:
        raise ValueError("quadric is singular")
    P = quadric_points(Q)
    if len(P) != (s + 1) ** 2:
        raise ValueError(f"quadric has {len(P)} rational points; it is not hyperbolic")
    B = Q.polar_matrix()

    def lines_through(p):
        t = la.matvec(F, B, p)
        acc = np.zeros(len(P), dtype=np.int64)
        for k in range(4):
            if t[k]:
                acc = F.vadd(acc, F.vmul(t[k], P[:, k]))
        nbr = [tuple(r) for r in P[acc == 0].tolist()]
        p = tuple(p)
        out = []
        seen = {p}
        for c in nbr:
            if c in seen:
                continue
            L = line_from_rows(F, [p, c])
            out.append(L)
            seen.update(pt.coords for pt in L.points())
        if len(out) != 2 or len(nbr) != 2 * s + 1:
            raise ValueError("polar section is not a pair of lines")
        return out

    p0 = tuple(P[0].tolist())
    A0, B0 = lines_through(p0)
    ruling_a, ruling_b = {A0.key: A0}, {B0.key: B0}
    for base, other, target in ((A0, B0, ruling_b), (B0, A0, ruling_a)):
        for pt in base.points():
            ls = lines_through(pt.coords)
            for L in ls:
                if L.key != base.key:
                    target[L.key] = L
    ra = [ruling_a[k] for k in sorted(ruling_a)]
    rb = [ruling_b[k] for k in sorted(ruling_b)]
    _check_bipartition(F, ra, rb)
    return ra, rb


def _check_bipartition(F, ra, rb):
    s = F.s
    if len(ra) != s + 1 or len(rb) != s + 1:
        raise CensusMismatch("rulings do not have q^2+1 lines each")

    def kind(a, b):
        M = [list(a.basis[0]), list(a.basis[1]), list(b.basis[0]), list(b.basis[1])]
        return la.rank(F, M)

    for R in (ra, rb):
        for a, b in combinations(R, 2):
            if kind(a, b) != 4:
                raise CensusMismatch("two lines of one ruling meet")
    for a in ra:
        for b in rb:
            if kind(a, b) != 3:
                raise CensusMismatch("lines of opposite rulings are skew")


# ---------------------------------------------------------------------------
# configurations


@dataclass(frozen=True)
class QuadricConfiguration:
    quadric: QuadricForm
    ruling_L: tuple[int, ...]
    ruling_M: tuple[int, ...]

    @property
    def lines(self) -> tuple[int, ...]:
        return tuple(sorted(self.ruling_L + self.ruling_M))

    @property
    def mask_L(self) -> int:
        return bitset(self.ruling_L)

    @property
    def mask_M(self) -> int:
        return bitset(self.ruling_M)

    @property
    def mask(self) -> int:
        return self.mask_L | self.mask_M

    def to_json(self) -> dict:
        return {"quadric": list(self.quadric.coeffs), "ruling_L": list(self.ruling_L), "ruling_M": list(self.ruling_M)}


def _orient(a: tuple, b: tuple):
    a, b = tuple(sorted(a)), tuple(sorted(b))
    return (a, b) if a[0] < b[0] else (b, a)


def split_rulings(x: Surface, lines) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Split a line set into two rulings of d skew lines, or None."""
    lines = sorted(lines)
    d = x.d
    if len(lines) != 2 * d:
        return None
    first = lines[0]
    A = [first] + [l for l in lines[1:] if x.skew(first, l)]
    Bs = [l for l in lines if l not in A]
    if len(A) != d or len(Bs) != d:
        return None
    for R in (A, Bs):
        for a, b in combinations(R, 2):
            if not x.skew(a, b):
                return None
    for a in A:
        for b in Bs:
            if not x.meets(a, b):
                return None
    return _orient(A, Bs)


def _three_point_array(x: Surface) -> np.ndarray:
    if "line3" not in x.cache:
        x.cache["line3"] = x.point_array[x.line_points[:, :3]]
    return x.cache["line3"]


def surface_lines_on(x: Surface, Q: QuadricForm) -> list[int]:
    """Indices of lines of X contained in Q (three points per line suffice)."""
    vals = _values(x.F, Q.coeffs, _three_point_array(x))
    return np.nonzero((vals == 0).all(axis=1))[0].tolist()


def quadric_config(x: Surface, qf: QuadricForm, method: str = "containment") -> QuadricConfiguration | None:
    """The configuration cut on X by qf, or None when it is not one.

    ``method='containment'`` tests each line of X against qf; ``'rulings'``
    enumerates the rational lines of qf and intersects with the lines of X.
    Both give the same line set.
    """
    if qf.polar_rank() != 4:
        return None
    if method == "rulings":
        try:
            ra, rb = lines_on_quadric(qf)
        except ValueError:
            return None
        la_ = [i for i in (x.index_of_line(L) for L in ra) if i is not None]
        lb_ = [i for i in (x.index_of_line(L) for L in rb) if i is not None]
        if len(la_) != x.d or len(lb_) != x.d:
            return None
        A, B = _orient(la_, lb_)
        return QuadricConfiguration(qf, A, B)
    if method != "containment":
        raise ValueError(f"unknown method {method!r}")
    split = split_rulings(x, surface_lines_on(x, qf))
    if split is None:
        return None
    return QuadricConfiguration(qf, *split)


@dataclass
class ConfigTable:
    configs: list[QuadricConfiguration]
    index: dict  # (mask_L, mask_M) -> config index
    by_line: list  # line index -> config indices
    ordered_triples: int = 0


def config_key(mask_a: int, mask_b: int) -> tuple[int, int]:
    return (mask_a, mask_b) if mask_a < mask_b else (mask_b, mask_a)


def ruling_masks_of_triple(x: Surface, a: int, b: int, c: int):
    """For a skew triple: (lines of its ruling, transversal lines), as bitsets."""
    nb = x.neighbours
    T = nb[a] & nb[b] & nb[c]
    R = x.all_lines_mask
    for t in bits(T):
        R &= nb[t]
    return R, T


def config_table(x: Surface, verify: bool = True) -> ConfigTable:
    """All quadric configurations, found combinatorially from skew triples.

    The transversals of three skew lines of X form the opposite ruling of
    their configuration, and the lines meeting every transversal form the
    ruling of the triple itself.  The quadric is then solved once per
    configuration and every line re-checked against it.
    """
    if "configs" in x.cache:
        return x.cache["configs"]
    nb = x.neighbours
    nL = x.n_lines
    found: dict = {}
    n_unordered = 0
    for a in range(nL):
        hi_a = x.skew_mask(a) >> (a + 1) << (a + 1)
        for b in bits(hi_a):
            hi_b = hi_a & x.skew_mask(b) >> (b + 1) << (b + 1)
            nab = nb[a] & nb[b]
            for c in bits(hi_b):
                n_unordered += 1
                T = nab & nb[c]
                R = x.all_lines_mask
                for t in bits(T):
                    R &= nb[t]
                key = config_key(R, T)
                if key not in found:
                    found[key] = (a, b, c)
    keys = sorted(found, key=lambda k: (bits(k[0]), bits(k[1])))
    configs = []
    for k in keys:
        a, b, c = found[k]
        la_, lb_ = bits(k[0]), bits(k[1])
        Q = quadric_through(x.lines[a], x.lines[b], x.lines[c])
        A, B = _orient(la_, lb_)
        configs.append(QuadricConfiguration(Q, A, B))
    if verify:
        _verify_configs(x, configs)
    index = {config_key(c.mask_L, c.mask_M): i for i, c in enumerate(configs)}
    by_line = [[] for _ in range(nL)]
    for i, c in enumerate(configs):
        for l in c.lines:
            by_line[l].append(i)
    tab = ConfigTable(configs, index, by_line, ordered_triples=6 * n_unordered)
    x.cache["configs"] = tab
    return tab


def _verify_configs(x: Surface, configs):
    """Every configuration: d + d lines, correct incidences, all on its quadric."""
    if not configs:
        return
    d = x.d
    P3 = _three_point_array(x)
    F = x.F
    coeffs = np.array([c.quadric.coeffs for c in configs], dtype=np.int64)  # (C, 10)
    lines = np.array([c.ruling_L + c.ruling_M for c in configs], dtype=np.int64)  # (C, 2d)
    pts = P3[lines]  # (C, 2d, 3, 4)
    mon = _monomials_of(F, pts)  # (C, 2d, 3, 10)
    acc = np.zeros(mon.shape[:-1], dtype=np.int64)
    for k in range(10):
        acc = F.vadd(acc, F.vmul(coeffs[:, k][:, None, None], mon[..., k]))
    if (acc != 0).any():
        bad = int(np.nonzero((acc != 0).any(axis=(1, 2)))[0][0])
        raise CensusMismatch(f"configuration {bad} has a line off its quadric")
    inc = x.incidence
    for i, c in enumerate(configs):
        A, B = list(c.ruling_L), list(c.ruling_M)
        if len(A) != d or len(B) != d:
            raise CensusMismatch(f"configuration {i} has rulings of sizes {len(A)}, {len(B)}")
        if inc[np.ix_(A, A)].any() or inc[np.ix_(B, B)].any() or not inc[np.ix_(A, B)].all():
            raise CensusMismatch(f"configuration {i} has the wrong incidence pattern")


def enumerate_configs(x: Surface) -> list[QuadricConfiguration]:
    return list(config_table(x).configs)


def config_of_triple(x: Surface, a: int, b: int, c: int) -> int:
    tab = config_table(x)
    R, T = ruling_masks_of_triple(x, a, b, c)
    return tab.index[config_key(R, T)]


# ---------------------------------------------------------------------------
# star chords on configuration quadrics


def chords_in_rulings(x: Surface, cfg: QuadricConfiguration):
    """Star chords lying on the quadric, as chord indices split by ruling.

    The first list holds chords in the ruling of ``cfg.ruling_L``.
    """
    from .chords import chord_table

    tab = chord_table(x)
    ra, rb = lines_on_quadric(cfg.quadric)
    side = {}
    for L in ra:
        side[L.key] = 0
    for L in rb:
        side[L.key] = 1
    l_side = side[x.lines[cfg.ruling_L[0]].key]
    out = ([], [])
    for L in ra + rb:
        if x.index_of_line(L) is not None:
            continue
        ci = tab.index.get(L.key)
        if ci is None:
            continue
        out[0 if side[L.key] == l_side else 1].append(ci)
    return sorted(out[0]), sorted(out[1])


@dataclass
class ChordConfigIncidence:
    chords_of: list  # config index -> (chords in L-ruling, chords in M-ruling)
    configs_of: list  # chord index -> sorted config indices


def chord_config_incidence(x: Surface) -> ChordConfigIncidence:
    """Which star chords lie on which configuration quadrics.

    A chord on a configuration quadric meets each line of the opposite ruling
    in one of its q+1 star points.  So the configurations through a chord
    correspond to skew triples taken from the stars at three of its points.
    """
    if "chord_configs" in x.cache:
        return x.cache["chord_configs"]
    from .chords import chord_table

    tab = chord_table(x)
    ctab = config_table(x)
    nb = x.neighbours
    configs_of = []
    chords_of = [([], []) for _ in ctab.configs]
    for ci, ch in enumerate(tab.chords):
        p1, p2, p3 = ch.star_points[:3]
        mine = set()
        for m1 in x.point_lines[p1]:
            for m2 in x.point_lines[p2]:
                if not x.skew(m1, m2):
                    continue
                n12 = nb[m1] & nb[m2]
                for m3 in x.point_lines[p3]:
                    if not (x.skew(m1, m3) and x.skew(m2, m3)):
                        continue
                    T = n12 & nb[m3]
                    R = x.all_lines_mask
                    for t in bits(T):
                        R &= nb[t]
                    k = ctab.index[config_key(R, T)]
                    if k in mine:
                        continue
                    mine.add(k)
                    cfg = ctab.configs[k]
                    # the chord shares a ruling with the transversals T
                    in_L = (T & cfg.mask_L) != 0
                    chords_of[k][0 if in_L else 1].append(ci)
        configs_of.append(sorted(mine))
    chords_of = [(sorted(a), sorted(b)) for a, b in chords_of]
    inc = ChordConfigIncidence(chords_of, configs_of)
    x.cache["chord_configs"] = inc
    return inc


def configs_json(x: Surface) -> str:
    return json.dumps([c.to_json() for c in config_table(x).configs], separators=(",", ":"))
