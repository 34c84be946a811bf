"""Unitary automorphisms of X: membership, generators, orbits, order checks.

Orbits are computed on index sets (points, lines, chords, ordered tuples of
lines) by breadth-first closure under the permutations induced by a
generator list.  An orbit that exhausts its census certifies transitivity
of the subgroup generated, hence of the full automorphism group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from . import linalg as la
from .chords import chord_table
from .forms import FrobeniusForm, antidiagonal_form
from .gf import GF, solve_trace
from .proj import ProjTransform, transform
from .surface import Surface, bits


def is_unitary(g: ProjTransform | list, f: FrobeniusForm) -> bool:
    """True iff (g^{[q]})^T A g is a nonzero multiple of A."""
    F = f.F
    G = g.rows() if isinstance(g, ProjTransform) else [list(r) for r in g]
    if len(G) != f.n:
        raise ValueError("dimension mismatch")
    if la.det(F, G) == 0:
        return False
    img = la.matmul(F, la.matmul(F, la.transpose(la.frob_mat(F, G)), f.rows), G)
    c = la.scalar_multiple(F, f.rows, img)
    return c is not None and c != 0


def hermitian_orthonormal_basis(f: FrobeniusForm) -> list[list[int]]:
    """Matrix g with (g^{[q]})^T A g = I for a non-degenerate Hermitian A."""
    F = f.F
    n = f.n
    cols: list[list[int]] = []
    # work inside the orthogonal complement of the chosen columns
    space = la.identity(n)
    while len(cols) < n:
        v = None
        for coeffs in product(range(F.s), repeat=len(space)):
            if not any(coeffs):
                continue
            cand = [0] * n
            for c, b in zip(coeffs, space):
                if c:
                    cand = [F.add(x, F.mul(c, y)) for x, y in zip(cand, b)]
            if f.value(cand):
                v = cand
                break
        if v is None:
            raise ValueError("form is degenerate")
        h = f.value(v)  # lies in F_q^*
        lam = next(t for t in range(1, F.s) if F.norm(t) == F.INV[h])
        v = la.scale(F, lam, v)
        cols.append(v)
        # complement: u with (v^{[q]})^T A u = 0
        eqs = [la.matvec(F, la.transpose(f.rows), la.frob_vec(F, c)) for c in cols]
        space = la.nullspace(F, eqs, n) if len(cols) < n else []
    return la.transpose(cols)


@dataclass
class AutGenerators:
    gens: list[ProjTransform]
    provenance: list[str]

    def counts(self) -> dict:
        out: dict[str, int] = {}
        for p in self.provenance:
            out[p] = out.get(p, 0) + 1
        return out

    def subset(self, kinds) -> AutGenerators:
        keep = [i for i, p in enumerate(self.provenance) if p in kinds]
        return AutGenerators([self.gens[i] for i in keep], [self.provenance[i] for i in keep])

    def __len__(self):
        return len(self.gens)


def unipotent(F: GF, a: int, b: int, c: int) -> list[list[int]]:
    """[x : y - a x : z - b x : w + c^q x + b^q y + a^q z] as a matrix."""
    n = F.NEG
    fr = F.FROB
    return [[1, 0, 0, 0], [n[a], 1, 0, 0], [n[b], 0, 1, 0], [fr[c], fr[b], fr[a], 1]]


def antidiagonal_generators(F: GF) -> AutGenerators:
    gens, prov = [], []
    # coordinate permutations commuting with x<->w, y<->z
    for perm in permutations(range(4)):
        if all(perm[3 - i] == 3 - perm[i] for i in range(4)):
            M = [[0] * 4 for _ in range(4)]
            for i, j in enumerate(perm):
                M[j][i] = 1
            gens.append(transform(F, M))
            prov.append("permutation")
    g = F.gen_index
    for a, b in ((g, 1), (1, g)):
        da = F.INV[F.FROB[a]]
        db = F.INV[F.FROB[b]]
        gens.append(transform(F, [[a, 0, 0, 0], [0, b, 0, 0], [0, 0, db, 0], [0, 0, 0, da]]))
        prov.append("torus")
    swap = [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
    for a in range(F.s):
        for b in range(F.s):
            target = F.NEG[F.add(F.mul(F.FROB[a], b), F.mul(F.FROB[b], a))]
            for c in sorted(t.value for t in solve_trace(F(target))):
                U = unipotent(F, a, b, c)
                gens.append(transform(F, U))
                prov.append("unipotent")
                gens.append(transform(F, la.matmul(F, la.matmul(F, swap, U), swap)))
                prov.append("unipotent")
    return AutGenerators(gens, prov)


def fermat_generators(F: GF) -> AutGenerators:
    gens, prov = [], []
    for perm in permutations(range(4)):
        M = [[0] * 4 for _ in range(4)]
        for i, j in enumerate(perm):
            M[j][i] = 1
        gens.append(transform(F, M))
        prov.append("permutation")
    for mu in range(1, F.s):
        if F.norm(mu) == 1 and mu != 1:
            gens.append(transform(F, [[mu if i == j == 0 else int(i == j) for j in range(4)] for i in range(4)]))
            prov.append("torus")
    conj = conjugated(F, antidiagonal_generators(F).subset({"unipotent", "torus"}), la.identity(4))
    gens += conj.gens
    prov += conj.provenance
    return AutGenerators(gens, prov)


def conjugated(F: GF, anti: AutGenerators, A) -> AutGenerators:
    """Carry generators of the antidiagonal model to the model with matrix A."""
    from .forms import form

    gA = hermitian_orthonormal_basis(form(F, A))
    gJ = hermitian_orthonormal_basis(antidiagonal_form(F))
    # h = gJ gA^{-1} maps A-coordinates to J-coordinates with h*(J) = A
    h = la.matmul(F, gJ, la.inverse(F, gA))
    hinv = la.inverse(F, h)
    gens = [transform(F, la.matmul(F, la.matmul(F, hinv, g.rows()), h)) for g in anti.gens]
    return AutGenerators(gens, list(anti.provenance))


def generators(x: Surface, allow_custom: bool = False) -> AutGenerators:
    F = x.F
    if x.model == "antidiagonal":
        out = antidiagonal_generators(F)
    elif x.model == "fermat":
        out = fermat_generators(F)
    elif allow_custom:
        out = conjugated(F, antidiagonal_generators(F), x.form.rows)
    else:
        raise ValueError("generators are provided for the fermat and antidiagonal models only")
    for g in out.gens:
        if not is_unitary(g, x.form):  # pragma: no cover - construction guarantees it
            raise AssertionError(f"generator {g.matrix} does not preserve the form")
    return out


# ---------------------------------------------------------------------------
# induced permutations


def _point_lookup(x: Surface) -> np.ndarray:
    if "point_lookup" not in x.cache:
        s = x.F.s
        table = np.full(s**4, -1, dtype=np.int64)
        codes = x.point_array @ (s ** np.arange(4))
        table[codes] = np.arange(x.n_points)
        x.cache["point_lookup"] = table
    return x.cache["point_lookup"]


def _normalize_rows(F: GF, P: np.ndarray) -> np.ndarray:
    nz = P != 0
    first = np.argmax(nz, axis=1)
    lead = P[np.arange(len(P)), first]
    inv = F.vinv(lead)
    return F.vmul(inv[:, None], P)


def point_permutation(x: Surface, g: ProjTransform) -> np.ndarray:
    F = x.F
    P = x.point_array
    M = g.rows()
    img = np.zeros_like(P)
    for i in range(4):
        acc = np.zeros(len(P), dtype=np.int64)
        for j in range(4):
            if M[i][j]:
                acc = F.vadd(acc, F.vmul(M[i][j], P[:, j]))
        img[:, i] = acc
    img = _normalize_rows(F, img)
    perm = _point_lookup(x)[img @ (F.s ** np.arange(4))]
    if (perm < 0).any():
        raise ValueError("transformation does not preserve the surface")
    return perm


def _pair_table(x: Surface) -> np.ndarray:
    """Dense N x N table: the line (>= 0) or chord (encoded -2 - index) joining two points."""
    if "pair_table" not in x.cache:
        n = x.n_points
        T = np.full((n, n), -1, dtype=np.int64)
        for l, pts in enumerate(x.line_points.tolist()):
            idx = np.array(pts)
            T[np.ix_(idx, idx)] = l
        for (a, b), c in chord_table(x).by_pair.items():
            T[a, b] = T[b, a] = -2 - c
        np.fill_diagonal(T, -1)
        x.cache["pair_table"] = T
    return x.cache["pair_table"]


def line_permutation(x: Surface, ppoint: np.ndarray) -> np.ndarray:
    T = _pair_table(x)
    ends = x.line_points[:, :2]
    out = T[ppoint[ends[:, 0]], ppoint[ends[:, 1]]]
    if (out < 0).any():
        raise ValueError("point permutation does not map lines to lines")
    return out


def chord_permutation(x: Surface, ppoint: np.ndarray) -> np.ndarray:
    T = _pair_table(x)
    key = "chord_ends"
    if key not in x.cache:
        x.cache[key] = np.array([c.star_points[:2] for c in chord_table(x).chords], dtype=np.int64)
    ends = x.cache[key]
    out = -2 - T[ppoint[ends[:, 0]], ppoint[ends[:, 1]]]
    if (out < 0).any():
        raise ValueError("point permutation does not map chords to chords")
    return out


@dataclass
class Action:
    points: list[np.ndarray]
    lines: list[np.ndarray]
    _chords: list | None = field(default=None, repr=False)


def induced_action(x: Surface, gens: AutGenerators) -> Action:
    key = ("action", id(gens))
    if key in x.cache:
        return x.cache[key]
    pts = [point_permutation(x, g) for g in gens.gens]
    # drop generators inducing the same point permutation
    seen = {}
    for p in pts:
        seen.setdefault(p.tobytes(), p)
    pts = list(seen.values())
    lines = [line_permutation(x, p) for p in pts]
    act = Action(pts, lines)
    x.cache[key] = act
    return act


def _chord_perms(x: Surface, act: Action):
    if act._chords is None:
        act._chords = [chord_permutation(x, p) for p in act.points]
    return act._chords


# ---------------------------------------------------------------------------
# orbits


CENSUS_KINDS = ("line", "star_point", "chord", "skew_pair", "skew_triple")


def census_size(x: Surface, kind: str) -> int:
    """Size of the set acted on (ordered tuples for pairs and triples)."""
    nL = x.n_lines
    q = x.q
    if kind == "line":
        return nL
    if kind == "star_point":
        return x.n_points
    if kind == "chord":
        return len(chord_table(x).chords)
    if kind == "skew_pair":
        return nL * q**4
    if kind == "skew_triple":
        return nL * q**4 * q * (q**2 + 1) * (q - 1)
    raise ValueError(f"unknown orbit kind {kind!r}")


def _encode_seed(x: Surface, kind: str, seed):
    nL = x.n_lines
    if kind in ("line", "star_point", "chord"):
        return int(seed), {"line": nL, "star_point": x.n_points, "chord": len(chord_table(x).chords)}[kind]
    t = tuple(int(v) for v in seed)
    k = 2 if kind == "skew_pair" else 3
    if len(t) != k or len(set(t)) != k:
        raise ValueError(f"{kind} seed needs {k} distinct line indices")
    for i in range(k):
        for j in range(i + 1, k):
            if not x.skew(t[i], t[j]):
                raise ValueError("seed lines are not pairwise skew")
    code = 0
    for v in t:
        code = code * nL + v
    return code, nL**k


def orbit(x: Surface, gens: AutGenerators, seed, kind: str) -> int:
    """Size of the orbit of seed under the group generated by gens."""
    if kind not in CENSUS_KINDS:
        raise ValueError(f"unknown orbit kind {kind!r}")
    act = induced_action(x, gens)
    if kind == "star_point":
        perms = act.points
    elif kind == "chord":
        perms = _chord_perms(x, act)
    else:
        perms = act.lines
    code, domain = _encode_seed(x, kind, seed)
    if not 0 <= code < domain:
        raise ValueError("seed out of range")
    nL = x.n_lines
    k = {"skew_pair": 2, "skew_triple": 3}.get(kind, 1)
    visited = np.zeros(domain, dtype=bool)
    visited[code] = True
    frontier = np.array([code], dtype=np.int64)
    size = 1
    while len(frontier):
        if k == 1:
            parts = [frontier]
        else:
            parts = []
            rest = frontier
            for _ in range(k):
                parts.append(rest % nL)
                rest = rest // nL
            parts = parts[::-1]
        new = []
        for p in perms:
            img = p[parts[0]]
            for part in parts[1:]:
                img = img * nL + p[part]
            fresh = img[~visited[img]]
            if len(fresh):
                fresh = np.unique(fresh)
                visited[fresh] = True
                new.append(fresh)
        frontier = np.concatenate(new) if new else np.empty(0, dtype=np.int64)
        size += len(frontier)
    return size


def default_seed(x: Surface, kind: str):
    if kind in ("line", "star_point", "chord"):
        return 0
    a = 0
    b = bits(x.skew_mask(a))[0]
    if kind == "skew_pair":
        return (a, b)
    c = bits(x.skew_mask(a) & x.skew_mask(b))[0]
    return (a, b, c)


def group_order(q: int) -> int:
    return q**6 * (q**2 - 1) * (q**3 + 1) * (q**4 - 1)


def transitivity_certificate(x: Surface, gens: AutGenerators, kind: str, seed=None) -> dict:
    seed = default_seed(x, kind) if seed is None else seed
    size = orbit(x, gens, seed, kind)
    census = census_size(x, kind)
    return {
        "kind": kind,
        "seed": seed if isinstance(seed, int) else list(seed),
        "orbit": size,
        "census": census,
        "transitive": size == census,
        "divides_group_order": group_order(x.q) % size == 0,
        "generators": gens.counts(),
    }


# ---------------------------------------------------------------------------
# order formulas


def census_sextuples(x: Surface) -> int:
    """Ordered (L1, L2, L3, M1, M2, M3): two skew triples with every L_i meeting every M_j."""
    nb = x.neighbours
    total = 0
    for a in range(x.n_lines):
        sa = x.skew_mask(a)
        for b in bits(sa >> (a + 1) << (a + 1)):
            sab = sa & x.skew_mask(b)
            nab = nb[a] & nb[b]
            for c in bits(sab >> (b + 1) << (b + 1)):
                T = bits(nab & nb[c])
                ordered = 0
                for m1 in T:
                    for m2 in T:
                        if m2 == m1 or not x.skew(m1, m2):
                            continue
                        for m3 in T:
                            if m3 != m1 and m3 != m2 and x.skew(m1, m3) and x.skew(m2, m3):
                                ordered += 1
                total += 6 * ordered  # orderings of the L-triple
    return total


def pair_stabilizer_matrices(F: GF) -> list[list[list[int]]]:
    """Projective stabilizer of ([1:0:0:0], [0:0:0:1]) on the antidiagonal model.

    It fixes both tangent planes, so it is block diagonal diag(a, h, e) with
    h a 2x2 block; we enumerate all such matrices with leading entry 1.
    """
    f = antidiagonal_form(F)
    out = []
    nonzero = range(1, F.s)
    for e in nonzero:
        for h in product(range(F.s), repeat=4):
            M = [[1, 0, 0, 0], [0, h[0], h[1], 0], [0, h[2], h[3], 0], [0, 0, 0, e]]
            if F.sub(F.mul(h[0], h[3]), F.mul(h[1], h[2])) == 0:
                continue
            if is_unitary(M, f):
                out.append(M)
    return out


def pair_stabilizer_order(F: GF) -> int:
    return len(pair_stabilizer_matrices(F))


def unitary_matrices(f: FrobeniusForm) -> int:
    """Number of g with (g^{[q]})^T A g = A exactly, by column backtracking.

    Candidate columns are kept as boolean masks over all of F^n and each
    chosen column cuts the masks of the later ones.
    """
    F = f.F
    n = f.n
    A = f.rows
    At = la.transpose(A)
    V = np.array(list(product(range(F.s), repeat=n)), dtype=np.int64)
    Vq = F.vfrob(V)

    def lin(W, coeffs):
        acc = np.zeros(len(W), dtype=np.int64)
        for k, c in enumerate(coeffs):
            if c:
                acc = F.vadd(acc, F.vmul(int(c), W[:, k]))
        return acc

    def pair_from(u):  # v -> pair(u, v)
        return lin(V, la.matvec(F, At, la.frob_vec(F, u)))

    def pair_to(u):  # v -> pair(v, u)
        return lin(Vq, la.matvec(F, A, u))

    # pair(v, v) for all v at once
    selfpair = np.zeros(len(V), dtype=np.int64)
    for i in range(n):
        selfpair = F.vadd(selfpair, F.vmul(Vq[:, i], lin(V, A[i])))

    count = 0

    def rec(j, allowed):
        nonlocal count
        if j == n:
            count += 1
            return
        for vi in np.nonzero(allowed[j])[0].tolist():
            u = V[vi].tolist()
            a, b = pair_from(u), pair_to(u)
            nxt = list(allowed)
            for k in range(j + 1, n):
                nxt[k] = allowed[k] & (a == A[j][k]) & (b == A[k][j])
            rec(j + 1, nxt)

    rec(0, [selfpair == A[j][j] for j in range(n)])
    return count


def projective_unitary_order(f: FrobeniusForm) -> int:
    """|PU| = |U| / (q+1): the scalars in U are the (q+1)-st roots of unity."""
    return unitary_matrices(f) // (f.F.q + 1)


def pu2_three_transitive(F: GF) -> bool:
    """PU(2) acts three-transitively on the q+1 zeros of y^{q+1} + z^{q+1} in PG(1)."""
    from .forms import fermat_form

    f = fermat_form(F, 2)
    zeros = [v for v in ((1, t) for t in range(F.s)) if f.value(v) == 0]
    zeros += [(0, 1)] if f.value((0, 1)) == 0 else []
    zero_idx = {z: i for i, z in enumerate(zeros)}
    triples = set()
    vecs = list(product(range(F.s), repeat=2))
    for c0 in vecs:
        if f.value(c0) != 1:
            continue
        for c1 in vecs:
            if f.value(c1) != 1 or f.pairing(c0, c1) != 0:
                continue
            G = [[c0[0], c1[0]], [c0[1], c1[1]]]
            img = []
            for z in zeros[:3]:
                w = la.normalize(F, la.matvec(F, G, z))
                img.append(zero_idx[w])
            triples.add(tuple(img))
    n = len(zeros)
    return len(triples) == n * (n - 1) * (n - 2)


def certificate_json(cert: dict) -> str:
    return json.dumps(cert, sort_keys=True)
