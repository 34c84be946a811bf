from __future__ import annotations

import json
from itertools import combinations, permutations

import numpy as np
import pytest

from extremal import doubles as D
from extremal.doubles import (CorruptCheckpoint, DoubleRejected, SearchGuardError, chord_pairs, decompose,
                              ell_bound, mu_determinant, mu_pair, mu_roots, mu_rulings, pair_to_double,
                              pair_to_doubles, search_doubles, seeded_count, validate_double)
from extremal.quadrics import config_key, config_table, lines_on_quadric, quadric_config, quadric_from_dict
from extremal.surface import build_surface


def _leibniz_det(F, M):
    n = len(M)
    tot = 0
    for perm in permutations(range(n)):
        sign = sum(1 for i, j in combinations(range(n), 2) if perm[i] > perm[j]) % 2
        t = 1
        for i in range(n):
            t = F.mul(t, M[i][perm[i]])
        tot = F.sub(tot, t) if sign else F.add(tot, t)
    return tot


def _brute_doubles(x):
    """Every double by walking all skew 2d-sets of lines (small q only)."""
    d = x.d
    inc = x.incidence
    skew = ~inc
    np.fill_diagonal(skew, False)
    out = set()

    def cliques(cands, chosen, k):
        if len(chosen) == k:
            yield tuple(chosen)
            return
        for i, c in enumerate(cands):
            yield from cliques([e for e in cands[i + 1:] if skew[c, e]], chosen + [c], k)

    for A in cliques(list(range(x.n_lines)), [], 2 * d):
        rows = inc[list(A)]
        cand = [l for l in range(x.n_lines) if l not in A and rows[:, l].sum() == d + 2]
        for B in cliques(cand, [], 2 * d):
            if (inc[np.ix_(list(A), list(B))].sum(axis=0) == d + 2).all():
                out.add(D.canonical_sides(A, B))
    return out


# ---------------------------------------------------------------------------
# validation


def test_validate_double_accepts_mu_pair(X2):
    r = mu_roots(X2)
    dd = mu_pair(X2, r[0], r[1])
    assert len(dd.setA) == len(dd.setB) == 6
    m = dd.matrix()
    assert (m.sum(axis=0) == 5).all() and (m.sum(axis=1) == 5).all()
    assert validate_double(X2, dd.setB, dd.setA) == dd  # sides are unordered


def test_validate_double_rejections(X2):
    r = mu_roots(X2)
    dd = mu_pair(X2, r[0], r[1])
    A, B = list(dd.setA), list(dd.setB)
    with pytest.raises(DoubleRejected) as e:
        validate_double(X2, A[:-1], B)
    assert e.value.reason == "size"
    with pytest.raises(DoubleRejected) as e:
        validate_double(X2, A[:-1] + [B[0]], B)
    assert e.value.reason == "sides overlap"
    # swap one line across: side A now contains two meeting lines
    meets = next(b for b in B if X2.meets(A[0], b))
    with pytest.raises(DoubleRejected) as e:
        validate_double(X2, [meets] + A[1:], [A[0]] + [b for b in B if b != meets])
    assert e.value.reason.startswith("skewness")
    with pytest.raises(DoubleRejected):
        validate_double(X2, A, B, d=4)


def test_validate_double_marginals(X2):
    # two skew sixes that are not a double
    r = mu_roots(X2)
    L1, M1 = mu_rulings(X2, r[0])
    _, M2 = mu_rulings(X2, r[1])
    L3, _ = mu_rulings(X2, r[2])
    try:
        validate_double(X2, L1 + M2, L3 + M1)
    except DoubleRejected as exc:
        assert exc.reason in ("row marginal", "column marginal", "skewness of side A", "skewness of side B")
    else:  # pragma: no cover
        pytest.fail("accepted a non-double")


# ---------------------------------------------------------------------------
# mu quadrics


def test_mu_pairs_q2(X2):
    r = mu_roots(X2)
    assert len(r) == 3
    seen = {mu_pair(X2, a, b) for a, b in combinations(r, 2)}
    assert len(seen) == 3
    with pytest.raises(ValueError):
        mu_pair(X2, r[0], r[0])


def test_mu_pair_q3_one_and_i(X3):
    F = X3.F
    i = next(v for v in range(F.s) if F.mul(v, v) == F.NEG[1])
    assert F.norm(i) == 1
    dd = mu_pair(X3, 1, i)
    assert len(dd.setA) == 8
    assert (dd.matrix().sum(axis=1) == 6).all()
    assert len(decompose(X3, dd)) >= 1


def test_mu_rulings_need_norm_one(X2):
    with pytest.raises(ValueError):
        mu_rulings(X2, 0)


def test_mu_rulings_need_fermat(A2):
    with pytest.raises(ValueError):
        mu_rulings(A2, 1)


def test_mu_determinant_closed_form(F4, F9):
    for F in (F4, F9):
        for al, be, m1, m2 in [(1, 1, 1, 0), (2, 3, 1, 2), (3, 2, 2, 1), (1, 2, 3, 3)]:
            if max(al, be, m1, m2) >= F.s:
                continue
            n = F.NEG
            M = [[1, n[al], 0, 0], [0, 0, 1, n[F.mul(m1, al)]], [1, 0, n[be], 0], [0, 1, 0, n[F.mul(m2, be)]]]
            got = mu_determinant(F, al, be, m1, m2)
            assert got == _leibniz_det(F, M)
            assert got == F.mul(F.mul(al, be), F.sub(m2, m1))


def test_cross_lines_meet_other_quadric_twice(X2, X3):
    for x in (X2, X3):
        F = x.F
        r = mu_roots(x)
        m1, m2 = r[0], r[1]
        Q2 = quadric_from_dict(F, {"xw": F(m2), "yz": -1})
        L1, _ = mu_rulings(x, m1)
        for l in L1:
            on = [p for p in x.lines[l].points() if Q2.value(p.coords) == 0]
            assert len(on) == 2


# ---------------------------------------------------------------------------
# pairs of configurations


def test_pair_to_double_mu_quadrics(X2):
    F = X2.F
    r = mu_roots(X2)
    c1 = quadric_config(X2, quadric_from_dict(F, {"xw": F(r[0]), "yz": -1}))
    c2 = quadric_config(X2, quadric_from_dict(F, {"xw": F(r[1]), "yz": -1}))
    dd = pair_to_double(X2, c1, c2)
    assert dd is not None
    assert dd == mu_pair(X2, r[0], r[1])
    assert len(pair_to_doubles(X2, c1, c2)) == 1


def test_pair_to_double_rejects_shared_line(X2):
    ctab = config_table(X2)
    c = ctab.configs[0]
    other = next(k for k in ctab.configs[1:] if k.mask & c.mask)
    with pytest.raises(ValueError):
        pair_to_double(X2, c, other)


@pytest.mark.parametrize("xname,total,partners", [("X2", 360, 2), ("A2", 360, 2), ("X3", 153090, 27)])
def test_chord_pair_counts(request, xname, total, partners):
    x = request.getfixturevalue(xname)
    pairs = chord_pairs(x)
    assert len(pairs) == total
    assert all(p.kind == "FourStarChords" for p in pairs)
    per = np.zeros(len(config_table(x).configs), dtype=int)
    for p in pairs:
        per[p.q1] += 1
        per[p.q2] += 1
    assert set(per.tolist()) == {partners}


def test_chord_pairs_structure(X2):
    from extremal.chords import chord_table

    dual = chord_table(X2).dual
    ctab = config_table(X2)
    for p in chord_pairs(X2)[:40]:
        l, lp, m, mp = p.chords
        assert dual[l] == lp and dual[m] == mp
        assert not ctab.configs[p.q1].mask & ctab.configs[p.q2].mask


# ---------------------------------------------------------------------------
# searches


def test_exhaustive_q2_matches_brute_force(X2):
    found = search_doubles(X2, "exhaustive")
    assert len(found) == 36
    assert {(dd.setA, dd.setB) for dd in found} == _brute_doubles(X2)
    assert {len(decompose(X2, dd)) for dd in found} == {10}


def test_exhaustive_q2_antidiagonal(A2):
    found = search_doubles(A2, "exhaustive")
    assert len(found) == 36
    assert all(decompose(A2, dd) for dd in found)


def test_chord_pairs_mode_equals_exhaustive_q2(X2):
    a = search_doubles(X2, "chord_pairs_only")
    b = search_doubles(X2, "exhaustive")
    assert a == b
    # 360 chord pairs, each double reached by 10 of them
    assert sum(len(v) for v in D.doubles_from_chord_pairs(X2).values()) == 360


def test_threads_agree(X2):
    assert search_doubles(X2, threads=2) == search_doubles(X2, threads=1)


def test_search_rejects_unknown_mode(X2):
    with pytest.raises(ValueError):
        search_doubles(X2, "sideways")


def test_guard_above_q3(F16):
    x = build_surface(F16, "fermat")
    with pytest.raises(SearchGuardError, match="long_running"):
        search_doubles(x, "exhaustive")


def test_seeded_count_q2_matches_exhaustive(X2):
    s = seeded_count(X2)
    assert s["total"] == 36
    through = {(dd.setA, dd.setB) for dd in s["doubles"]}
    assert through <= {(dd.setA, dd.setB) for dd in search_doubles(X2)}


def test_seeded_count_q3(X3):
    s = seeded_count(X3)
    assert s["through_triple"] == 651
    assert s["per_double"] == 2 * 8 * 7 * 6
    assert s["total"] == 527310
    # lower bound from chord pairs holds
    assert s["total"] >= 153090
    dec = [len(decompose(X3, dd)) for dd in s["doubles"]]
    assert min(dec) >= 1
    assert sorted(set(dec)) == [1, 3]


def test_search_from_late_root_q3(X3):
    # doubles whose least line is 50, checked line by line
    res = D._search_from_line(X3, 50)
    assert res
    for a, b in res:
        dd = validate_double(X3, a, b)
        assert min(dd.lines) == 50
        assert decompose(X3, dd)


@pytest.mark.slow
def test_exhaustive_q3_full(X3):
    found = search_doubles(X3, "exhaustive")
    assert len(found) == 527310
    assert all(decompose(X3, dd) for dd in found)


# ---------------------------------------------------------------------------
# checkpoints


def test_checkpoint_resume(X2, tmp_path):
    ck = str(tmp_path / "ck.json")
    part = search_doubles(X2, checkpoint=ck, lines=range(5))
    data = json.load(open(ck))
    assert data["completed"] == [0, 1, 2, 3, 4]
    full = search_doubles(X2, checkpoint=ck)
    assert len(full) == 36 and part <= full
    assert json.load(open(ck))["completed"] == list(range(27))


def test_checkpoint_corrupt(X2, A2, tmp_path):
    ck = tmp_path / "bad.json"
    ck.write_text("{not json")
    with pytest.raises(CorruptCheckpoint):
        search_doubles(X2, checkpoint=str(ck))
    ck2 = str(tmp_path / "ok.json")
    search_doubles(X2, checkpoint=ck2, lines=[0])
    with pytest.raises(CorruptCheckpoint, match="different surface"):
        search_doubles(A2, checkpoint=ck2)
    data = json.load(open(ck2))
    data["version"] = 99
    json.dump(data, open(ck2, "w"))
    with pytest.raises(CorruptCheckpoint):
        search_doubles(X2, checkpoint=ck2)


# ---------------------------------------------------------------------------
# the line bound


def test_ell_bound():
    assert [ell_bound(d) for d in (3, 4, 11)] == [3, 4, 5]
    for d in range(3, 60):
        inner = -(-(d + 1) * (d + 2) // (2 * d - 1))
        assert ell_bound(d) * (2 * d - 2) >= inner * d
    with pytest.raises(ValueError):
        ell_bound(2)


# ---------------------------------------------------------------------------
# a double eight on the char 3 quartic with no chord-sharing decomposition


def test_char3_lines_on_second_quadric(X3, char3_double):
    c = char3_double
    assert len(set(c["N"] + c["P"])) == 8
    assert all(c["Q2"].contains_line(X3.lines[i]) for i in c["N"] + c["P"])
    assert all(c["Q1"].contains_line(X3.lines[i]) for i in c["L"] + c["M"])


def test_char3_double_is_valid(X3, char3_double):
    c = char3_double
    dd = validate_double(X3, c["L"] + c["N"], c["M"] + c["P"])
    assert (dd.matrix().sum(axis=0) == 6).all()


def test_char3_quadrics_share_no_line(X3, char3_double):
    c = char3_double
    r1, r2 = lines_on_quadric(c["Q1"])
    assert len(r1) == len(r2) == 10
    assert not any(c["Q2"].contains_line(l) for l in r1 + r2)


def test_char3_decomposition_avoids_chord_pairs(X3, char3_double):
    c = char3_double
    dd = validate_double(X3, c["L"] + c["N"], c["M"] + c["P"])
    ctab = config_table(X3)
    keys = []
    for Q in (c["Q1"], c["Q2"]):
        cfg = quadric_config(X3, Q)
        keys.append(ctab.index[config_key(cfg.mask_L, cfg.mask_M)])
    pair = tuple(sorted(keys))
    dec = decompose(X3, dd)
    assert pair in dec
    cp = {(p.q1, p.q2) for p in chord_pairs(X3)}
    assert not any(p in cp for p in dec)
