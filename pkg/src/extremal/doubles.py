"""Double-2d configurations of lines on X.

A double 2d is a pair of disjoint 2d-sets of pairwise skew lines in which
every line meets exactly d+2 lines of the other set.  This module validates
them, builds them from pairs of quadric configurations, counts the quadric
pairs sharing star chords, runs exhaustive searches, and splits a double
back into pairs of configurations.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .chords import chord_table
from .gf import FieldElem, roots_of_unity, solve_norm
from .proj import line_from_equations
from .quadrics import (
    QuadricConfiguration,
    chord_config_incidence,
    config_key,
    config_table,
    ruling_masks_of_triple,
)
from .surface import Surface, bits, bitset

CHECKPOINT_VERSION = 1


class DoubleRejected(ValueError):
    def __init__(self, reason: str, witness=None):
        super().__init__(f"{reason}: {witness}" if witness is not None else reason)
        self.reason = reason
        self.witness = witness


class SearchGuardError(RuntimeError):
    pass


@dataclass(frozen=True)
class Double2d:
    setA: tuple[int, ...]
    setB: tuple[int, ...]
    m: tuple[tuple[int, ...], ...] = field(compare=False, hash=False, repr=False)

    @property
    def lines(self) -> tuple[int, ...]:
        return tuple(sorted(self.setA + self.setB))

    def matrix(self) -> np.ndarray:
        return np.array(self.m, dtype=np.int64)

    def to_json(self) -> dict:
        return {"setA": list(self.setA), "setB": list(self.setB)}


def canonical_sides(setA, setB):
    a, b = tuple(sorted(setA)), tuple(sorted(setB))
    return (a, b) if a <= b else (b, a)


def validate_double(x: Surface, setA, setB, d: int | None = None) -> Double2d:
    """Check both defining conditions; raise :class:`DoubleRejected` otherwise."""
    d = x.d if d is None else d
    A, B = sorted(int(a) for a in setA), sorted(int(b) for b in setB)
    if len(A) != 2 * d or len(B) != 2 * d:
        raise DoubleRejected("size", (len(A), len(B)))
    if len(set(A)) != len(A) or len(set(B)) != len(B):
        raise DoubleRejected("repeated line")
    common = set(A) & set(B)
    if common:
        raise DoubleRejected("sides overlap", min(common))
    nL = x.n_lines
    if any(not 0 <= l < nL for l in A + B):
        raise DoubleRejected("line index out of range")
    for name, S in (("A", A), ("B", B)):
        for a, b in combinations(S, 2):
            if x.meets(a, b):
                raise DoubleRejected(f"skewness of side {name}", (a, b))
    A, B = canonical_sides(A, B)
    m = x.incidence[np.ix_(list(A), list(B))].astype(np.int64)
    for i, r in enumerate(m.sum(axis=1)):
        if r != d + 2:
            raise DoubleRejected("row marginal", (A[i], int(r)))
    for j, c in enumerate(m.sum(axis=0)):
        if c != d + 2:
            raise DoubleRejected("column marginal", (B[j], int(c)))
    return Double2d(A, B, tuple(tuple(int(v) for v in r) for r in m))


def is_double(x: Surface, setA, setB) -> bool:
    try:
        validate_double(x, setA, setB)
    except DoubleRejected:
        return False
    return True


# ---------------------------------------------------------------------------
# the mu-quadric construction on the Fermat model


def _as_code(v) -> int:
    return v.value if isinstance(v, FieldElem) else int(v)


def mu_rulings(x: Surface, mu) -> tuple[list[int], list[int]]:
    """Lines of X on V(mu xw - yz): V(x - a y, z - mu a w) and V(x - b z, y - mu b w)."""
    F = x.F
    mu = _as_code(mu)
    if F.norm(mu) != 1:
        raise ValueError("mu must be a (q+1)-st root of unity")
    roots = sorted(r.value for r in solve_norm(F(F.NEG[1])))
    neg = F.NEG
    L, M = [], []
    for a in roots:
        l1 = line_from_equations(F, [[1, neg[a], 0, 0], [0, 0, 1, neg[F.mul(mu, a)]]])
        l2 = line_from_equations(F, [[1, 0, neg[a], 0], [0, 1, 0, neg[F.mul(mu, a)]]])
        for l, out in ((l1, L), (l2, M)):
            i = x.index_of_line(l)
            if i is None:
                raise ValueError("mu-quadric lines need the Fermat model")
            out.append(i)
    return sorted(L), sorted(M)


def mu_pair(x: Surface, mu1, mu2) -> Double2d:
    """A = L_{mu1} + M_{mu2}, B = L_{mu2} + M_{mu1}."""
    if _as_code(mu1) == _as_code(mu2):
        raise ValueError("the two roots of unity must differ")
    L1, M1 = mu_rulings(x, mu1)
    L2, M2 = mu_rulings(x, mu2)
    return validate_double(x, L1 + M2, L2 + M1)


def mu_determinant(F, alpha: int, beta: int, mu1: int, mu2: int) -> int:
    """Determinant of the four linear forms cutting L_{mu1}(alpha) and M_{mu2}(beta)."""
    from .linalg import det

    n = F.NEG
    M = [[1, n[alpha], 0, 0], [0, 0, 1, n[F.mul(mu1, alpha)]], [1, 0, n[beta], 0], [0, 1, 0, n[F.mul(mu2, beta)]]]
    return det(F, M)


# ---------------------------------------------------------------------------
# pairs of configurations


def pair_to_doubles(x: Surface, c1: QuadricConfiguration, c2: QuadricConfiguration) -> list[Double2d]:
    """All ruling pairings of two line-disjoint configurations that give a double."""
    if c1.mask & c2.mask:
        raise ValueError("configurations share a line of the surface")
    out = []
    for R2, S2 in ((c2.ruling_M, c2.ruling_L), (c2.ruling_L, c2.ruling_M)):
        A = c1.ruling_L + R2
        B = c1.ruling_M + S2
        try:
            out.append(validate_double(x, A, B))
        except DoubleRejected:
            continue
    return out


def pair_to_double(x: Surface, c1: QuadricConfiguration, c2: QuadricConfiguration) -> Double2d | None:
    found = pair_to_doubles(x, c1, c2)
    return found[0] if found else None


@dataclass(frozen=True)
class QuadricPairClass:
    q1: int  # configuration indices
    q2: int
    kind: str  # 'FourStarChords' or 'Other'
    chords: tuple[int, ...] = ()  # (l, l', m, m') when kind is FourStarChords


def chord_pairs(x: Surface) -> list[QuadricPairClass]:
    """Unordered configuration pairs sharing a star chord but no line of X."""
    if "chord_pairs" in x.cache:
        return x.cache["chord_pairs"]
    ctab = config_table(x)
    inc = chord_config_incidence(x)
    dual = chord_table(x).dual
    out = []
    for i, (ca, cb) in enumerate(inc.chords_of):
        shared: dict[int, list[int]] = {}
        for side, chs in ((0, ca), (1, cb)):
            for ch in chs:
                for j in inc.configs_of[ch]:
                    if j > i:
                        shared.setdefault(j, []).append(ch)
        for j, chs in sorted(shared.items()):
            if ctab.configs[i].mask & ctab.configs[j].mask:
                continue
            out.append(_classify_pair(inc, dual, i, j, sorted(chs)))
    x.cache["chord_pairs"] = out
    return out


def _classify_pair(inc, dual, i, j, chs) -> QuadricPairClass:
    if len(chs) != 4:
        return QuadricPairClass(i, j, "Other", tuple(chs))
    sides_i = inc.chords_of[i]
    sides_j = inc.chords_of[j]
    l = chs[0]
    lp = int(dual[l])
    rest = [c for c in chs if c not in (l, lp)]
    if lp not in chs or len(rest) != 2 or int(dual[rest[0]]) != rest[1]:
        return QuadricPairClass(i, j, "Other", tuple(chs))
    m, mp = rest

    def side(sides, c):
        return 0 if c in sides[0] else 1

    for sides in (sides_i, sides_j):
        if side(sides, l) != side(sides, lp) or side(sides, m) != side(sides, mp) or side(sides, l) == side(sides, m):
            return QuadricPairClass(i, j, "Other", tuple(chs))
    return QuadricPairClass(i, j, "FourStarChords", (l, lp, m, mp))


# ---------------------------------------------------------------------------
# decomposition into configuration pairs


def decompose(x: Surface, dd: Double2d) -> list[tuple[int, int]]:
    """All unordered pairs of configurations whose union is the double.

    A configuration inside the double takes one ruling from each side, so it
    is reached from any three of its lines in setA.
    """
    ctab = config_table(x)
    d = x.d
    A, B = set(dd.setA), set(dd.setB)
    allm = bitset(dd.setA + dd.setB)
    pairs = set()
    for a, b, c in combinations(dd.setA, 3):
        R, T = ruling_masks_of_triple(x, a, b, c)
        k = ctab.index.get(config_key(R, T))
        if k is None:
            continue
        cfg = ctab.configs[k]
        if cfg.mask & ~allm:
            continue
        if len(A.intersection(cfg.lines)) != d or len(B.intersection(cfg.lines)) != d:
            continue
        rest = allm & ~cfg.mask
        restA = [l for l in bits(rest) if l in A]
        R2, T2 = ruling_masks_of_triple(x, *restA[:3])
        k2 = ctab.index.get(config_key(R2, T2))
        if k2 is None or ctab.configs[k2].mask != rest:
            continue
        pairs.add((min(k, k2), max(k, k2)))
    return sorted(pairs)


# ---------------------------------------------------------------------------
# searches


def doubles_from_chord_pairs(x: Surface) -> dict[tuple, list[tuple[int, int]]]:
    """Doubles produced by chord-sharing configuration pairs, with their pairs."""
    ctab = config_table(x)
    out: dict[tuple, list] = {}
    for pc in chord_pairs(x):
        c1, c2 = ctab.configs[pc.q1], ctab.configs[pc.q2]
        for dd in pair_to_doubles(x, c1, c2):
            out.setdefault((dd.setA, dd.setB), []).append((pc.q1, pc.q2))
    return out


def _search_from_line(x: Surface, A1: int) -> list[tuple[tuple, tuple]]:
    """All doubles whose least line is A1, placed in side A.

    The B-lines meeting A1 pass through d+2 distinct points of A1, one line
    each, and are automatically skew because X has no triangles.  Every other
    A-line meets at least four of them; that bound drives the pruning.
    """
    d = x.d
    nb = x.neighbours
    full = x.all_lines_mask
    above = full & ~((1 << (A1 + 1)) - 1)
    S = x.skew_mask(A1) & above
    skew_of = [x.skew_mask(l) for l in range(x.n_lines)]
    pts = x.line_points[A1].tolist()
    opts = [[l for l in x.point_lines[p] if l > A1] for p in pts]
    nA = 2 * d - 1  # A-lines other than A1
    nBp = d + 2
    found = []

    def finish_b(Ap, Bp, need):
        # B'' : d-2 skew lines skew to A1 and to all of B', meeting exactly d+2 of A''
        Apm = bitset(Ap)
        cand = S & ~Apm
        for b in Bp:
            cand &= skew_of[b]
        cl = [b for b in bits(cand) if (nb[b] & Apm).bit_count() == d + 2]
        k = d - 2
        if len(cl) < k:
            return
        for combo in combinations(cl, k):
            ok = True
            for u, v in combinations(combo, 2):
                if not (skew_of[u] >> v & 1):
                    ok = False
                    break
            if not ok:
                continue
            cm = bitset(combo)
            if all((nb[a] & cm).bit_count() == need[a] for a in Ap):
                found.append(((A1, *Ap), tuple(sorted(Bp + list(combo)))))

    def grow_a(cands, chosen, bcount, Bp, Bmasks):
        if len(chosen) == nA:
            if all(c == d + 1 for c in bcount):
                need = {}
                for a in chosen:
                    c = sum(1 for bm in Bmasks if bm >> a & 1)
                    need[a] = d + 2 - c
                finish_b(chosen, Bp, need)
            return
        remaining = nA - len(chosen)
        if cands.bit_count() < remaining:
            return
        for i, c in enumerate(bcount):
            if c + (Bmasks[i] & cands).bit_count() < d + 1:
                return
        rest = cands
        while rest:
            low = rest & -rest
            a = low.bit_length() - 1
            rest ^= low
            if rest.bit_count() + 1 < remaining:
                return
            nbc = list(bcount)
            bad = False
            for i, bm in enumerate(Bmasks):
                if bm >> a & 1:
                    nbc[i] += 1
                    if nbc[i] > d + 1:
                        bad = True
                        break
            if bad:
                continue
            grow_a(rest & skew_of[a], chosen + [a], nbc, Bp, Bmasks)

    def choose_b(start, chosen, ge):
        k = len(chosen)
        if k == nBp:
            cand = ge[3] & S
            if cand.bit_count() >= nA:
                Bmasks = [nb[b] for b in chosen]
                grow_a(cand, [], [0] * nBp, chosen, Bmasks)
            return
        left = nBp - k
        for pi in range(start, len(pts) - left + 1):
            for b in opts[pi]:
                N = nb[b]
                ng = (ge[0] | N, ge[1] | (ge[0] & N), ge[2] | (ge[1] & N), ge[3] | (ge[2] & N))
                need = k + 1 - nBp + 4
                if need >= 1 and (ng[need - 1] & S).bit_count() < nA:
                    continue
                choose_b(pi + 1, chosen + [b], ng)

    choose_b(0, [], (0, 0, 0, 0))
    return found


def _search_with_triple(x: Surface, triple) -> list[tuple[tuple, tuple]]:
    """All doubles having the given skew triple inside one side (that side first)."""
    d = x.d
    nb = x.neighbours
    skew_of = [x.skew_mask(l) for l in range(x.n_lines)]
    t = list(triple)
    cand = x.all_lines_mask
    for a in t:
        cand &= skew_of[a]
    found = []
    nA = 2 * d

    def complete(A):
        Am = bitset(A)
        V = [b for b in bits(x.all_lines_mask & ~Am) if (nb[b] & Am).bit_count() == d + 2]
        if len(V) < nA:
            return
        # choose 2d pairwise skew lines of V, each line of A met exactly d+2 times
        need = {a: d + 2 for a in A}

        def grow(vs, chosen, cnt):
            if len(chosen) == nA:
                if all(cnt[a] == d + 2 for a in A):
                    found.append((tuple(sorted(A)), tuple(sorted(chosen))))
                return
            if len(vs) < nA - len(chosen):
                return
            for idx, b in enumerate(vs):
                if len(vs) - idx < nA - len(chosen):
                    return
                nc = dict(cnt)
                bad = False
                for a in A:
                    if nb[b] >> a & 1:
                        nc[a] += 1
                        if nc[a] > d + 2:
                            bad = True
                            break
                if bad:
                    continue
                grow([v for v in vs[idx + 1:] if skew_of[b] >> v & 1], chosen + [b], nc)

        grow(V, [], {a: 0 for a in A})
        del need

    def grow_a(cands, chosen):
        if len(chosen) == nA:
            complete(chosen)
            return
        rest = cands
        while rest:
            if rest.bit_count() < nA - len(chosen):
                return
            low = rest & -rest
            a = low.bit_length() - 1
            rest ^= low
            grow_a(rest & skew_of[a], chosen + [a])

    grow_a(cand, t)
    return found


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("EXTREMAL_THREADS", "1")))
    except ValueError:
        return 1


_WORKER: dict = {}


def _worker_line(A1: int):
    return A1, _search_from_line(_WORKER["x"], A1)


def search_doubles(
    x: Surface,
    mode: str = "exhaustive",
    *,
    long_running: bool = False,
    checkpoint: str | None = None,
    threads: int | None = None,
    lines=None,
    progress=None,
) -> set[Double2d]:
    """Enumerate doubles.

    ``exhaustive`` finds every double by a pruned search rooted at the least
    line of the double; ``chord_pairs_only`` collects the doubles coming from
    chord-sharing configuration pairs.  Exhaustive runs above q = 3 need
    ``long_running=True``.  With ``checkpoint`` the exhaustive search records
    each finished root line and resumes from the file.
    """
    if mode in ("chord_pairs_only", "chord-pairs", "chord_pairs"):
        return {validate_double(x, a, b) for a, b in doubles_from_chord_pairs(x)}
    if mode != "exhaustive":
        raise ValueError(f"unknown search mode {mode!r}")
    if x.q > 3 and not long_running:
        raise SearchGuardError(f"exhaustive search at q={x.q} is long-running; pass long_running=True (--long-running on the command line)")
    state = load_checkpoint(checkpoint, x) if checkpoint and os.path.exists(checkpoint) else None
    done = set(state["completed"]) if state else set()
    raw = {tuple(map(tuple, r)) for r in state["doubles"]} if state else set()
    todo = [l for l in (range(x.n_lines) if lines is None else lines) if l not in done]
    threads = default_threads() if threads is None else threads

    def record(A1, res):
        raw.update(res)
        done.add(A1)
        if checkpoint:
            save_checkpoint(checkpoint, x, done, raw)
        if progress:
            progress(A1, len(res), len(raw))

    if threads > 1 and len(todo) > 1:
        import multiprocessing as mp

        _WORKER["x"] = x
        ctx = mp.get_context("fork")
        with ctx.Pool(threads) as pool:
            for A1, res in pool.imap_unordered(_worker_line, todo):
                record(A1, res)
    else:
        for A1 in todo:
            record(A1, _search_from_line(x, A1))
    return {validate_double(x, a, b) for a, b in raw}


def seeded_count(x: Surface, triple=None) -> dict:
    """Count doubles through a fixed ordered skew triple.

    When the automorphism group is transitive on ordered skew triples, every
    such triple lies in the same number n of doubles, and double counting
    (double, ordered skew triple in one side) gives
    #doubles = n * (#ordered skew triples) / (2 * 2d(2d-1)(2d-2)).
    """
    if triple is None:
        triple = first_skew_triple(x)
    found = _search_with_triple(x, triple)
    n = len(found)
    d = x.d
    ctab = config_table(x)
    per_double = 2 * (2 * d) * (2 * d - 1) * (2 * d - 2)
    total = n * ctab.ordered_triples
    return {
        "triple": list(triple),
        "through_triple": n,
        "ordered_skew_triples": ctab.ordered_triples,
        "per_double": per_double,
        "total": total // per_double if total % per_double == 0 else None,
        "doubles": [validate_double(x, a, b) for a, b in found],
    }


def first_skew_triple(x: Surface):
    for a in range(x.n_lines):
        for b in bits(x.skew_mask(a)):
            if b <= a:
                continue
            for c in bits(x.skew_mask(a) & x.skew_mask(b)):
                if c > b:
                    return (a, b, c)
    raise ValueError("surface has no skew triple")


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(path: str, x: Surface, done, raw):
    data = {
        "version": CHECKPOINT_VERSION,
        "field": x.F.describe(),
        "model": x.model,
        "completed": sorted(done),
        "doubles": sorted([list(a), list(b)] for a, b in raw),
        "saved": time.time(),
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(data, fh)
    os.replace(tmp, path)


class CorruptCheckpoint(ValueError):
    pass


def load_checkpoint(path: str, x: Surface) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptCheckpoint(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(data, dict) or data.get("version") != CHECKPOINT_VERSION:
        raise CorruptCheckpoint("checkpoint version mismatch")
    if data.get("field") != x.F.describe() or data.get("model") != x.model:
        raise CorruptCheckpoint("checkpoint was written for a different surface")
    try:
        data["completed"] = [int(v) for v in data["completed"]]
        data["doubles"] = [[[int(v) for v in a], [int(v) for v in b]] for a, b in data["doubles"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptCheckpoint(f"malformed checkpoint: {exc}") from exc
    return data


# ---------------------------------------------------------------------------


def ell_bound(d: int) -> int:
    """ceil(ceil((d+1)(d+2)/(2d-1)) * d / (2d-2))."""
    if d < 3:
        raise ValueError("the bound needs d >= 3")
    inner = -(-(d + 1) * (d + 2) // (2 * d - 1))
    return -(-inner * d // (2 * d - 2))


def mu_roots(x: Surface) -> list[int]:
    return sorted(r.value for r in roots_of_unity(x.F, x.q + 1))


def doubles_json(x: Surface, doubles, with_decompositions: bool = True) -> str:
    ctab = config_table(x)
    recs = []
    pcs = {(p.q1, p.q2): p.kind for p in chord_pairs(x)} if with_decompositions else {}
    for dd in sorted(doubles, key=lambda t: (t.setA, t.setB)):
        rec = dd.to_json()
        if with_decompositions:
            rec["decompositions"] = [
                {"q1": list(ctab.configs[i].quadric.coeffs), "q2": list(ctab.configs[j].quadric.coeffs),
                 "kind": pcs.get((i, j), "Other")}
                for i, j in decompose(x, dd)
            ]
        recs.append(rec)
    return json.dumps(recs, separators=(",", ":"))
