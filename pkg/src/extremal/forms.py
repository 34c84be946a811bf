"""Frobenius forms h(x) = (x^{[q]})^T A x of degree q+1.

A form is stored through its coefficient matrix A; row i of A is the linear
form multiplying x_i^q.  Coordinate changes act by A -> (g^{[q]})^T A g.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import linalg as la
from .gf import GF, FieldElem
from .proj import ProjLine, ProjPlane, ProjPoint, ProjTransform


class SectionClass(enum.Enum):
    SmoothExtremalCurve = "SmoothExtremalCurve"
    CuspidalCurve = "CuspidalCurve"
    LinePlusTangentCurve = "LinePlusTangentCurve"
    Star = "Star"
    NonReducedDouble = "NonReducedDouble"  # x^q y
    NonReducedPower = "NonReducedPower"  # x^{q+1}

    @property
    def reduced(self) -> bool:
        return self not in (SectionClass.NonReducedDouble, SectionClass.NonReducedPower)


@dataclass(frozen=True)
class FrobeniusForm:
    A: tuple[tuple[int, ...], ...]
    F: GF = field(compare=False, hash=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def rows(self):
        return [list(r) for r in self.A]

    def evaluate(self, pt) -> FieldElem:
        x = pt.coords if isinstance(pt, ProjPoint) else [int(c) for c in pt]
        if len(x) != self.n:
            raise ValueError(f"point has {len(x)} coordinates, form has {self.n} variables")
        return FieldElem(self.value(x), self.F)

    def value(self, x) -> int:
        """(x^{[q]})^T A x on raw coordinate codes."""
        F = self.F
        return la.dot(F, la.frob_vec(F, x), la.matvec(F, self.rows, x))

    def pairing(self, u, v) -> int:
        """The sesquilinear value (u^{[q]})^T A v."""
        F = self.F
        return la.dot(F, la.frob_vec(F, u), la.matvec(F, self.rows, v))

    def vanishes_at(self, pt) -> bool:
        x = pt.coords if isinstance(pt, ProjPoint) else pt
        return self.value(x) == 0

    def __repr__(self):
        return f"FrobeniusForm({[list(r) for r in self.A]})"


def form(F: GF, A) -> FrobeniusForm:
    M = tuple(tuple(int(a) for a in r) for r in A)
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("matrix of a Frobenius form must be square")
    return FrobeniusForm(M, F)


def fermat_form(F: GF, n: int = 4) -> FrobeniusForm:
    return form(F, la.identity(n))


def antidiagonal_form(F: GF, n: int = 4) -> FrobeniusForm:
    """x^q w + w^q x + y^q z + z^q y for n = 4."""
    return form(F, [[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)])


def evaluate(f: FrobeniusForm, pt) -> FieldElem:
    return f.evaluate(pt)


def line_on_form(f: FrobeniusForm, l: ProjLine) -> bool:
    """True iff the form vanishes identically on the line.

    On t1 u + t2 v the form expands as t1^{q+1} a + t1^q t2 b + t1 t2^q c + t2^{q+1} e,
    so containment means the four pairings of u, v all vanish.
    """
    if f.n != 4:
        raise ValueError("line containment needs a form in four variables")
    u, v = l.basis
    for a in (u, v):
        for b in (u, v):
            if f.pairing(a, b):
                return False
    return True


def rank(f: FrobeniusForm) -> int:
    return la.rank(f.F, f.rows)


def change_coords(f: FrobeniusForm, g: ProjTransform | list) -> FrobeniusForm:
    """Matrix of the pulled-back form x -> f(g x)."""
    F = f.F
    G = g.rows() if isinstance(g, ProjTransform) else [list(r) for r in g]
    if len(G) != f.n:
        raise ValueError("dimension mismatch between form and transform")
    if la.det(F, G) == 0:
        raise ValueError("coordinate change must be invertible")
    Gq = la.frob_mat(F, G)
    return form(F, la.matmul(F, la.matmul(F, la.transpose(Gq), f.rows), G))


def is_hermitian(f: FrobeniusForm) -> bool:
    F = f.F
    return la.transpose(la.frob_mat(F, f.rows)) == f.rows


def radical(f: FrobeniusForm) -> list[list[int]]:
    """Basis of {v : A v = 0 and A^T v^{[q]} = 0}.

    With v = sum c_i b_i over a basis of ker A, the second condition reads
    sum c_i^q (A^T b_i^{[q]}) = 0, which is linear in the c_i^q.  Since the
    q-power is an involution of F_{q^2}, the solutions c are the q-powers of
    a kernel, and the radical is a subspace.
    """
    F = f.F
    kerA = la.nullspace(F, f.rows, f.n)
    if not kerA:
        return []
    AT = la.transpose(f.rows)
    cols = [la.matvec(F, AT, la.frob_vec(F, b)) for b in kerA]
    # matrix whose columns are A^T b_i^{[q]}
    M = la.transpose(cols)
    coeffs = la.nullspace(F, M, len(kerA))
    out = []
    for dvec in coeffs:
        c = la.frob_vec(F, dvec)
        v = [0] * f.n
        for ci, b in zip(c, kerA):
            if ci:
                v = [F.add(x, F.mul(ci, y)) for x, y in zip(v, b)]
        out.append(v)
    # re-echelonize for a canonical basis
    if out:
        R, _ = la.rref(F, out)
        out = R
    return out


def degeneracy_witness(f: FrobeniusForm):
    """A nonzero v exhibiting the form as a form in fewer variables, or None."""
    rad = radical(f)
    if not rad:
        return None
    return list(la.normalize(f.F, rad[0]))


def is_degenerate(f: FrobeniusForm) -> bool:
    return bool(radical(f))


def tangent_covector(f: FrobeniusForm, x) -> tuple[int, ...]:
    """The covector A^T x^{[q]}; on a Hermitian form it is the formal gradient."""
    F = f.F
    return tuple(la.matvec(F, la.transpose(f.rows), la.frob_vec(F, x)))


def plane_parametrization(F: GF, h: ProjPlane) -> list[list[int]]:
    """4x3 matrix whose columns are the canonical basis of the plane."""
    basis = la.nullspace(F, [list(h.normal)], 4)
    return la.transpose(basis)


def restrict_to_plane(f: FrobeniusForm, h: ProjPlane) -> FrobeniusForm:
    """Pull back along the canonical parametrization P of h: (P^{[q]})^T A P."""
    if f.n != 4:
        raise ValueError("plane restriction needs a form in four variables")
    F = f.F
    P = plane_parametrization(F, h)
    Pq = la.frob_mat(F, P)
    return form(F, la.matmul(F, la.matmul(F, la.transpose(Pq), f.rows), P))


def _complete_basis(F: GF, vecs, n):
    """Extend independent vecs to a basis; returns the added standard vectors."""
    cur = [list(v) for v in vecs]
    extra = []
    for i in range(n):
        e = [1 if j == i else 0 for j in range(n)]
        if la.rank(F, cur + [e]) > len(cur):
            cur.append(e)
            extra.append(e)
        if len(cur) == n:
            break
    return extra


def reduce_variables(f: FrobeniusForm) -> FrobeniusForm:
    """Equivalent form in n - dim(radical) variables."""
    F = f.F
    rad = radical(f)
    if not rad:
        return f
    extra = _complete_basis(F, rad, f.n)
    G = la.transpose(extra + rad)  # radical vectors become the last coordinates
    g = change_coords(f, G)
    m = len(extra)
    return form(F, [r[:m] for r in g.rows[:m]])


def _classify_small(f: FrobeniusForm) -> SectionClass:
    """Classify a non-degenerate form in one or two variables."""
    r = rank(f)
    if f.n == 1:
        return SectionClass.NonReducedPower
    if f.n == 2:
        if r == 2:
            return SectionClass.Star
        return SectionClass.NonReducedDouble
    raise ValueError("expected at most two variables")


def classify_section(f3: FrobeniusForm) -> SectionClass:
    """Projective class of the plane curve cut out by a ternary Frobenius form."""
    if f3.n != 3:
        raise ValueError("classify_section expects a form in three variables")
    F = f3.F
    r = rank(f3)
    if r == 0:
        raise ValueError("the zero form does not define a curve")
    if not is_degenerate(f3):
        if r == 3:
            return SectionClass.SmoothExtremalCurve
        if r == 2:
            # v spans ker A and u spans ker A^T; (v^{[q]})^T A u^{[q]} is a
            # coordinate-invariant (up to scalars) separating the two classes
            v = la.nullspace(F, f3.rows, 3)[0]
            u = la.nullspace(F, la.transpose(f3.rows), 3)[0]
            if f3.pairing(v, la.frob_vec(F, u)):
                return SectionClass.CuspidalCurve
            return SectionClass.LinePlusTangentCurve
        raise AssertionError("rank one ternary forms are always degenerate")  # pragma: no cover
    red = reduce_variables(f3)
    return _classify_small(red)


# ---------------------------------------------------------------------------
# serialization: n followed by n*n element codes, row-major


def dumps(f: FrobeniusForm) -> str:
    return " ".join(str(x) for x in [f.n, *[a for r in f.A for a in r]])


def loads(F: GF, text: str) -> FrobeniusForm:
    toks = [int(t) for t in text.split()]
    if not toks:
        raise ValueError("empty form serialization")
    n = toks[0]
    vals = toks[1:]
    if len(vals) != n * n:
        raise ValueError(f"expected {n * n} matrix entries, got {len(vals)}")
    if any(not 0 <= v < F.s for v in vals):
        raise ValueError("matrix entry out of range for the field")
    return form(F, [vals[i * n:(i + 1) * n] for i in range(n)])
