from __future__ import annotations

from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremal.chords import chord_table
from extremal.doubles import mu_roots, mu_rulings
from extremal.proj import incidence, line_from_equations
from extremal.quadrics import (_monomials_of, chord_config_incidence, chords_in_rulings, config_of_triple, config_table,
                               configs_json, enumerate_configs, lines_on_quadric, quadric, quadric_config,
                               quadric_from_dict, quadric_points, quadric_through, surface_lines_on)


def n_configs(q):
    return (q**3 + 1) * (q**2 + 1) * q**4 // 2


def skew_triples(x):
    for a in range(x.n_lines):
        for b in range(a + 1, x.n_lines):
            if not x.skew(a, b):
                continue
            for c in range(b + 1, x.n_lines):
                if x.skew(a, c) and x.skew(b, c):
                    yield a, b, c


def XW_YZ(F, mu=1):
    """V(mu xw - yz); mu is an element code."""
    return quadric_from_dict(F, {"xw": F(mu), "yz": -1})


# -- the quadric through three skew lines ---------------------------------------------


def test_quadric_through_examples(F4, X2):
    F = F4
    L, M = mu_rulings(X2, 1)
    Q = quadric_through(*(X2.lines[i] for i in L))
    assert Q == XW_YZ(F)
    l1 = line_from_equations(F, [(1, 0, 0, 0), (0, 1, 0, 0)])
    l2 = line_from_equations(F, [(0, 0, 1, 0), (0, 0, 0, 1)])
    l3 = line_from_equations(F, [(1, 0, 1, 0), (0, 1, 0, 1)])
    Q = quadric_through(l1, l2, l3)
    assert Q == XW_YZ(F)
    for l in (l1, l2, l3):
        assert Q.contains_line(l)
        assert all(Q.value(p.coords) == 0 for p in l.points())
    with pytest.raises(ValueError):
        quadric_through(l1, l1, l2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4319))
def test_quadric_through_order_independent(k):
    x = _surface(2)
    tri = _triples(x)[k % len(_triples(x))]
    base = quadric_through(*(x.lines[i] for i in tri))
    for perm in permutations(tri):
        assert quadric_through(*(x.lines[i] for i in perm)) == base


_C = {}


def _surface(q):
    if q not in _C:
        from extremal.gf import build_field
        from extremal.surface import build_surface

        _C[q] = build_surface(build_field(q, 1), "fermat")
    return _C[q]


def _triples(x):
    key = ("tri", x.q)
    if key not in _C:
        _C[key] = list(skew_triples(x))
    return _C[key]


# -- rulings -------------------------------------------------------------------------


@pytest.mark.parametrize("Fx,n", [("F4", 10), ("F9", 20)])
def test_lines_on_quadric(Fx, n, request):
    F = request.getfixturevalue(Fx)
    ra, rb = lines_on_quadric(XW_YZ(F))
    assert len(ra) + len(rb) == n and len(ra) == len(rb) == F.s + 1
    for a, b in combinations(ra, 2):
        assert incidence(a, b).kind == "skew"
    for a in ra:
        for b in rb:
            assert incidence(a, b).kind == "meet"
    # oracle: every rational point of Q lies on exactly one line of each ruling
    pts = {tuple(p) for p in quadric_points(XW_YZ(F)).tolist()}
    for R in (ra, rb):
        cover = [p.coords for L in R for p in L.points()]
        assert sorted(cover) == sorted(pts)


def test_lines_on_quadric_rejects(F4):
    cone = quadric_from_dict(F4, {"xy": 1, "zz": 1})
    with pytest.raises(ValueError):
        lines_on_quadric(cone)


def test_polar_tangent_nonzero(F4, F9):
    for F in (F4, F9):
        Q = XW_YZ(F)
        for p in quadric_points(Q).tolist():
            assert any(Q.tangent_covector(p))


# -- configurations --------------------------------------------------------------------


def test_mu_quadric_configs(X2):
    F = X2.F
    cfg = quadric_config(X2, XW_YZ(F))
    L, M = mu_rulings(X2, 1)
    assert cfg is not None and set(cfg.lines) == set(L + M)
    assert len(cfg.ruling_L) == len(cfg.ruling_M) == 3
    w = F.gen_index
    for mu in mu_roots(X2):
        c = quadric_config(X2, XW_YZ(F, mu))
        assert c is not None
        assert quadric_config(X2, XW_YZ(F, mu), method="rulings") == c
    # a quadric that is not through any surface line
    assert quadric_config(X2, quadric_from_dict(F, {"xx": 1, "yz": 1, "ww": w})) is None


@pytest.mark.parametrize("fixture", ["X2", "X3", "A2"])
def test_config_counts(fixture, request):
    x = request.getfixturevalue(fixture)
    tab = config_table(x)
    q = x.q
    assert len(tab.configs) == n_configs(q)
    assert tab.ordered_triples == len(tab.configs) * 2 * (q + 1) * q * (q - 1)
    assert len(set(c.quadric for c in tab.configs)) == len(tab.configs)
    assert all(len(v) == len(tab.configs) * 2 * x.d // x.n_lines for v in tab.by_line)


def test_every_skew_triple_exhaustive_q2(X2):
    """Every skew triple determines a configuration (all 720 unordered triples)."""
    tab = config_table(X2)
    hits = {}
    n = 0
    for tri in skew_triples(X2):
        n += 1
        Q = quadric_through(*(X2.lines[i] for i in tri))
        cfg = quadric_config(X2, Q)
        assert cfg is not None and set(tri) <= set(cfg.lines)
        k = config_of_triple(X2, *tri)
        assert tab.configs[k] == cfg
        hits[k] = hits.get(k, 0) + 1
    assert n == 720
    assert len(hits) == 360 and set(hits.values()) == {2}  # 12 ordered = 2 unordered


def test_random_skew_triples_q3(X3):
    """10^4 random skew triples at q=3, via the linear solve and the containment test."""
    x = X3
    tab = config_table(x)
    rng = np.random.default_rng(2024)
    done = 0
    while done < 10_000:
        a, b, c = (int(v) for v in rng.choice(x.n_lines, 3, replace=False))
        if not (x.skew(a, b) and x.skew(a, c) and x.skew(b, c)):
            continue
        Q = quadric_through(x.lines[a], x.lines[b], x.lines[c])
        lines = surface_lines_on(x, Q)
        k = config_of_triple(x, a, b, c)
        assert set(lines) == set(tab.configs[k].lines)
        assert Q == tab.configs[k].quadric
        done += 1
    # the slower ruling-based path on a subsample
    for k in rng.choice(len(tab.configs), 50, replace=False).tolist():
        cfg = tab.configs[k]
        assert quadric_config(x, cfg.quadric, method="rulings") == cfg


# -- chords on configuration quadrics ----------------------------------------------------


@pytest.mark.parametrize("fixture", ["X2", "X3"])
def test_chords_in_rulings(fixture, request):
    x = request.getfixturevalue(fixture)
    q = x.q
    tab = config_table(x)
    ctab = chord_table(x)
    inc = chord_config_incidence(x)
    step = max(1, len(tab.configs) // 120)
    for k in range(0, len(tab.configs), step):
        cfg = tab.configs[k]
        A, B = chords_in_rulings(x, cfg)
        assert (A, B) == inc.chords_of[k]
        assert len(A) == len(B) == q**2 - q
        lines = [x.lines[i] for i in cfg.ruling_L]
        for ci in A:
            ch = ctab.chords[ci].line
            assert cfg.quadric.contains_line(ch)
            assert all(incidence(ch, l).kind == "skew" for l in lines)
            assert int(ctab.dual[ci]) in A  # the dual chord lies in the same ruling
        for a in A:
            for b in B:
                inc_ab = incidence(ctab.chords[a].line, ctab.chords[b].line)
                assert inc_ab.kind == "meet" and x.index_of_point(inc_ab.point) is None


def test_opposite_chords_on_q_plus_one_quadrics(X3):
    """Scan every configuration quadric for the pair of chords (no incidence table)."""
    x = X3
    tab = config_table(x)
    ctab = chord_table(x)
    coeffs = np.array([c.quadric.coeffs for c in tab.configs])
    F = x.F
    rng = np.random.default_rng(11)
    for k in rng.choice(len(tab.configs), 6, replace=False).tolist():
        A, B = chords_in_rulings(x, tab.configs[k])
        l, m = ctab.chords[A[0]].line, ctab.chords[B[-1]].line
        pts = np.array([p.coords for p in l.points()[:3] + m.points()[:3]])
        mon = _monomials_of(F, pts)  # (6, 10)
        acc = np.zeros((len(coeffs), len(pts)), dtype=np.int64)
        for j in range(10):
            acc = F.vadd(acc, F.vmul(coeffs[:, j][:, None], mon[None, :, j]))
        assert int((acc == 0).all(axis=1).sum()) == x.q + 1


def test_configs_json_deterministic(X2):
    a = configs_json(X2)
    assert a == configs_json(X2)
    assert len(enumerate_configs(X2)) == 360
    assert quadric(X2.F, [0, 0, 2, 0, 0, 0, 0, 0, 0, 0]).coeffs[2] == 1
