from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremal.chords import (OnSurfaceLine, StarChord, chord, chord_index_of_line, chord_lies_in_star_plane,
                             chord_table, chords_csv, dual_chord, dual_line, enumerate_chords,
                             enumerate_chords_naive, surface_points_on)
from extremal.gf import norm_fibre
from extremal.proj import incidence, line_from_equations, point


def V(F, *coords):
    return line_from_equations(F, [[1 if k == c else 0 for k in range(4)] for c in coords])


def n_chords(q):
    return q**4 * (q**2 - q + 1) * (q**2 + 1)


@pytest.mark.parametrize("fixture,count", [("X2", 240), ("X3", 5670), ("A2", 240)])
def test_chord_count_and_oracle(fixture, count, request):
    x = request.getfixturevalue(fixture)
    chords = enumerate_chords(x)
    assert len(chords) == count == n_chords(x.q)
    naive = enumerate_chords_naive(x)
    assert [c.line for c in naive] == [c.line for c in chords]
    assert [c.star_points for c in naive] == [c.star_points for c in chords]


def test_fermat_example_chord(X2, X3):
    for x in (X2, X3):
        F = x.F
        a, a2 = norm_fibre(F, F.NEG[1])[:2]
        c = chord(x, point(F, (0, 0, a, 1)), point(F, (0, 0, a2, 1)))
        assert isinstance(c, StarChord)
        assert c.line == V(F, 0, 1)
        assert len(c.star_points) == x.q + 1
        d = dual_chord(x, c)
        assert d.line == V(F, 2, 3)
        assert dual_chord(x, d).line == V(F, 0, 1)


def test_chord_on_surface_line(X2):
    p, q = X2.line_points[0][:2]
    assert chord(X2, int(p), int(q)) == OnSurfaceLine(0)
    with pytest.raises(ValueError):
        chord(X2, 0, 0)
    with pytest.raises(ValueError):
        chord(X2, point(X2.F, (1, 0, 0, 0)), 1)


@pytest.mark.parametrize("fixture", ["X2", "X3"])
def test_chord_properties(fixture, request):
    x = request.getfixturevalue(fixture)
    tab = chord_table(x)
    n = len(tab.chords)
    dual = tab.dual
    # duality: fixed-point-free involution, duals skew
    assert (dual[dual] == np.arange(n)).all() and not (dual == np.arange(n)).any()
    for i, c in enumerate(tab.chords):
        assert len(c.star_points) == x.q + 1
        assert incidence(c.line, tab.chords[int(dual[i])].line).kind == "skew"
        assert not any(chord_lies_in_star_plane(x, c, p) for p in c.star_points)
        # the stars along a chord share no line
        lines = [l for p in c.star_points for l in x.point_lines[p]]
        assert len(lines) == len(set(lines))
        # every star plane along c contains the dual, and symmetrically
        dc = tab.chords[int(dual[i])]
        assert all(chord_lies_in_star_plane(x, dc, p) for p in c.star_points)
        assert all(chord_lies_in_star_plane(x, c, p) for p in dc.star_points)
    # ordered star-point pairs spanning chords
    q = x.q
    pairs = sum(len(c.star_points) * (len(c.star_points) - 1) for c in tab.chords)
    assert pairs == q**5 * (q**3 + 1) * (q**2 + 1)
    assert len(tab.by_pair) == pairs // 2


def test_point_pair_census(X2):
    # oracle for the q^5 count: at a star point, the other points not on its star-plane
    x = X2
    for p in range(x.n_points):
        others = [r for r in range(x.n_points) if r != p and isinstance(chord(x, p, r), StarChord)]
        assert len(others) == x.q**5


def test_chord_index_and_csv(X2):
    tab = chord_table(X2)
    c = tab.chords[17]
    assert chord_index_of_line(X2, c.line) == 17
    assert chord_index_of_line(X2, X2.lines[0]) is None
    text = chords_csv(X2)
    assert len(text.strip().splitlines()) == 241
    assert text == chords_csv(X2)
    assert surface_points_on(X2, c.line) == c.star_points


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5669))
def test_dual_line_independent_of_choice(i):
    x = _x3()
    tab = chord_table(x)
    c = tab.chords[i]
    base = dual_line(x, c)
    # intersecting the tangent planes at any other pair of points gives the same line
    pts = c.star_points
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            L = line_from_equations(x.F, [x.tangent_array[pts[a]].tolist(), x.tangent_array[pts[b]].tolist()])
            assert L == base


_CACHE = {}


def _x3():
    if "x" not in _CACHE:
        from extremal.gf import build_field
        from extremal.surface import build_surface

        _CACHE["x"] = build_surface(build_field(3, 1), "fermat")
    return _CACHE["x"]
