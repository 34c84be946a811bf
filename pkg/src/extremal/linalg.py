"""Dense linear algebra over a :class:`~extremal.gf.GF`.

Matrices are lists of lists of integer element codes.  Everything here is
small (at most 10 columns in practice) so plain Python loops over the lookup
tables beat numpy dispatch overhead.
"""

from __future__ import annotations

from .gf import GF


def rref(F: GF, M):
    """Reduced row echelon form.  Returns ``(R, pivots)`` with zero rows dropped."""
    ADD, MUL, NEG, INV = F.ADD, F.MUL, F.NEG, F.INV
    R = [list(r) for r in M]
    if not R:
        return [], []
    ncols = len(R[0])
    pivots = []
    row = 0
    for col in range(ncols):
        piv = None
        for i in range(row, len(R)):
            if R[i][col]:
                piv = i
                break
        if piv is None:
            continue
        R[row], R[piv] = R[piv], R[row]
        pr = R[row]
        inv = INV[pr[col]]
        if inv != 1:
            pr = [MUL[inv][v] for v in pr]
            R[row] = pr
        for i in range(len(R)):
            if i != row:
                c = R[i][col]
                if c:
                    nc = NEG[c]
                    mrow = MUL[nc]
                    ri = R[i]
                    R[i] = [ADD[a][mrow[b]] for a, b in zip(ri, pr)]
        pivots.append(col)
        row += 1
        if row == len(R):
            break
    return R[:row], pivots


def rank(F: GF, M) -> int:
    return len(rref(F, M)[1])


def nullspace(F: GF, M, ncols: int | None = None):
    """Basis of {v : M v = 0}, one vector per free column, in the standard form
    where the free coordinate is 1 and the other free coordinates are 0."""
    if ncols is None:
        ncols = len(M[0])
    if not M:
        return [[1 if j == i else 0 for j in range(ncols)] for i in range(ncols)]
    R, pivots = rref(F, M)
    free = [c for c in range(ncols) if c not in pivots]
    NEG = F.NEG
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, pc in zip(R, pivots):
            v[pc] = NEG[r[f]]
        basis.append(v)
    return basis


def left_nullspace(F: GF, M):
    return nullspace(F, transpose(M))


def transpose(M):
    return [list(c) for c in zip(*M)]


def matmul(F: GF, A, B):
    ADD, MUL = F.ADD, F.MUL
    Bt = transpose(B)
    out = []
    for r in A:
        row = []
        for c in Bt:
            acc = 0
            for a, b in zip(r, c):
                if a and b:
                    acc = ADD[acc][MUL[a][b]]
            row.append(acc)
        out.append(row)
    return out


def matvec(F: GF, A, v):
    ADD, MUL = F.ADD, F.MUL
    out = []
    for r in A:
        acc = 0
        for a, b in zip(r, v):
            if a and b:
                acc = ADD[acc][MUL[a][b]]
        out.append(acc)
    return out


def dot(F: GF, u, v) -> int:
    ADD, MUL = F.ADD, F.MUL
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc = ADD[acc][MUL[a][b]]
    return acc


def frob_vec(F: GF, v):
    FR = F.FROB
    return [FR[a] for a in v]


def frob_mat(F: GF, M):
    FR = F.FROB
    return [[FR[a] for a in r] for r in M]


def scale(F: GF, c: int, v):
    row = F.MUL[c]
    return [row[a] for a in v]


def identity(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def inverse(F: GF, M):
    n = len(M)
    aug = [list(r) + identity(n)[i] for i, r in enumerate(M)]
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)) or len(R) < n:
        raise ValueError("matrix is singular")
    return [r[n:] for r in R]


def det(F: GF, M) -> int:
    ADD, MUL, NEG, INV = F.ADD, F.MUL, F.NEG, F.INV
    A = [list(r) for r in M]
    n = len(A)
    d = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            d = NEG[d]
        pv = A[col][col]
        d = MUL[d][pv]
        inv = INV[pv]
        for i in range(col + 1, n):
            c = A[i][col]
            if c:
                f = NEG[MUL[c][inv]]
                A[i] = [ADD[a][MUL[f][b]] for a, b in zip(A[i], A[col])]
    return d


def normalize(F: GF, v):
    """Scale so the first nonzero entry is 1; raises on the zero vector."""
    for a in v:
        if a:
            if a == 1:
                return tuple(v)
            inv = F.INV[a]
            row = F.MUL[inv]
            return tuple(row[b] for b in v)
    raise ValueError("zero vector has no projective class")


def is_zero(M) -> bool:
    return all(a == 0 for r in M for a in r)


def scalar_multiple(F: GF, A, B):
    """Return c with B = c*A entrywise, or None.  A must be nonzero."""
    c = None
    for ra, rb in zip(A, B):
        for a, b in zip(ra, rb):
            if a == 0:
                if b:
                    return None
                continue
            r = F.div(b, a)
            if c is None:
                c = r
            elif r != c:
                return None
    return c
