"""Arithmetic in the tower F_p <= F_q <= F_{q^2}.

Elements are encoded as integers ``sum(c_k * p**k)`` where ``c_0 + c_1 t + ...``
is the reduced polynomial representative modulo the defining modulus.  All
hot paths in the package work directly on these integers through the lookup
tables held by :class:`GF`; :class:`FieldElem` is a thin value wrapper for
interactive use and for the public API.
"""

from __future__ import annotations

import warnings
from functools import cached_property
from itertools import product

import numpy as np

DEFAULT_SIZE_CAP = 2**16
# full s x s add/mul tables are built up to this size; beyond it Zech logs are used
TABLE_LIMIT = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    i = 2
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            while n % i == 0:
                n //= i
        i += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomials over F_p as coefficient lists, lowest degree first


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = _poly_trim(a)
    m = _poly_trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = (a[-1] * inv_lead) % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a = _poly_trim(a)
    return a


def _is_irreducible(m, p):
    n = len(m) - 1
    for deg in range(1, n // 2 + 1):
        for low in product(range(p), repeat=deg):
            divisor = list(low) + [1]
            if not _poly_mod(m, divisor, p):
                return False
    return True


def least_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Monic irreducible polynomial of degree ``n`` over F_p of least integer code.

    The code of ``c_0 + c_1 t + ... + t^n`` is ``sum(c_k p^k)``, so the search
    order is lexicographic with the constant term least significant.
    """
    if n == 1:
        return (0, 1)
    for code in range(p**n):
        low = [(code // p**k) % p for k in range(n)]
        m = low + [1]
        if low[0] == 0:
            continue
        if _is_irreducible(m, p):
            return tuple(m)
    raise RuntimeError("no irreducible polynomial found")  # unreachable


class GF:
    """The field F_{q^2} with q = p^e, together with its distinguished subfields.

    Instances are immutable after construction and may be shared freely.
    """

    def __init__(self, p: int, e: int = 1, cap: int = DEFAULT_SIZE_CAP):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if e < 1:
            raise ValueError("exponent e must be positive")
        n = 2 * e
        s = p**n
        if s > cap:
            raise ValueError(f"field size {s} exceeds the cap {cap}")
        self.p = p
        self.e = e
        self.q = p**e
        self.s = s
        self.d = self.q + 1
        self.degree = n
        self.modulus = least_irreducible(p, n)

        digits = np.array([[(x // p**k) % p for k in range(n)] for x in range(s)], dtype=np.int64)
        self._digits = digits
        self._weights = p ** np.arange(n, dtype=np.int64)

        # polynomial multiplication by t, used to walk powers of a generator
        def mul_poly(a, b):
            prod = [0] * (2 * n - 1)
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        prod[i + j] = (prod[i + j] + ai * bj) % p
            r = _poly_mod(prod, self.modulus, p)
            return r + [0] * (n - len(r))

        def encode(c):
            return int(sum(int(ci) * p**k for k, ci in enumerate(c)))

        order = s - 1
        factors = prime_factors(order)
        gen = None
        for cand in range(2 if s > 2 else 1, s):
            # order test by repeated multiplication; fields here are small
            base = list(digits[cand])
            powers = [1]
            cur = list(digits[1])
            for _ in range(order):
                cur = mul_poly(cur, base)
                powers.append(encode(cur))
            if all(powers[order // r] != 1 for r in factors):
                gen = cand
                exp = powers[:order]
                break
        if s == 2:  # pragma: no cover - F_2 never occurs as F_{q^2}
            gen, exp = 1, [1]
        self.gen_index = gen

        exp_arr = np.array(exp + exp, dtype=np.int64)  # doubled for index sums
        log_arr = np.full(s, -1, dtype=np.int64)
        log_arr[np.array(exp, dtype=np.int64)] = np.arange(order)
        self._exp = exp_arr
        self._log = log_arr

        neg = np.array([encode([(-c) % p for c in digits[x]]) for x in range(s)], dtype=np.int64)
        inv = np.zeros(s, dtype=np.int64)
        inv[1:] = exp_arr[(order - log_arr[1:]) % order]
        self._neg = neg
        self._inv = inv

        # Zech logarithms: alpha^z(k) = 1 + alpha^k, with -1 marking 1 + alpha^k = 0
        one_plus = np.array([encode(list((digits[exp[k]] + digits[1]) % p)) for k in range(order)], dtype=np.int64)
        self._zech = np.where(one_plus == 0, -1, log_arr[one_plus])

        if s <= TABLE_LIMIT:
            a = np.arange(s)
            add = ((digits[a][:, None, :] + digits[a][None, :, :]) % p) @ self._weights
            mul = np.zeros((s, s), dtype=np.int64)
            la = log_arr[1:]
            mul[1:, 1:] = exp_arr[la[:, None] + la[None, :]]
            self.add_table = add.astype(np.int64)
            self.mul_table = mul
            self.ADD = self.add_table.tolist()
            self.MUL = self.mul_table.tolist()
        else:
            self.add_table = None
            self.mul_table = None
            self.ADD = _LazyTable(self._add_scalar, s)
            self.MUL = _LazyTable(self._mul_scalar, s)

        self.NEG = neg.tolist()
        self.INV = inv.tolist()
        frob = np.zeros(s, dtype=np.int64)
        frob[1:] = exp_arr[(log_arr[1:] * self.q) % order]
        self._frob = frob
        self.FROB = frob.tolist()

    # -- scalar fallbacks used when no full table is stored ------------------
    def _mul_scalar(self, a, b):
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def _add_scalar(self, a, b):
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = int(self._log[a]), int(self._log[b])
        z = int(self._zech[(lb - la) % (self.s - 1)])
        if z < 0:
            return 0
        return int(self._exp[la + z])

    # -- vectorised operations on integer arrays ------------------------------
    def vadd(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        if self.add_table is not None:
            return self.add_table[a, b]
        s = ((self._digits[a] + self._digits[b]) % self.p) @ self._weights
        return s

    def vmul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        if self.mul_table is not None:
            return self.mul_table[a, b]
        out = self._exp[np.where(a > 0, self._log[a], 0) + np.where(b > 0, self._log[b], 0)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vneg(self, a):
        return self._neg[np.asarray(a)]

    def vinv(self, a):
        return self._inv[np.asarray(a)]

    def vfrob(self, a):
        return self._frob[np.asarray(a)]

    def vpow(self, a, k: int):
        a = np.asarray(a)
        order = self.s - 1
        out = self._exp[(np.where(a > 0, self._log[a], 0) * k) % order]
        if k == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    # -- scalar operations on integer codes ------------------------------------
    def add(self, a: int, b: int) -> int:
        return self.ADD[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.ADD[a][self.NEG[b]]

    def mul(self, a: int, b: int) -> int:
        return self.MUL[a][b]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in finite field")
        return self.MUL[a][self.INV[b]]

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if k == 0 else 0
        return int(self._exp[(int(self._log[a]) * k) % (self.s - 1)])

    def frobq(self, a: int) -> int:
        return self.FROB[a]

    def norm(self, a: int) -> int:
        """x -> x^{q+1}, onto F_q."""
        return self.MUL[a][self.FROB[a]]

    def trace(self, a: int) -> int:
        """x -> x^q + x, onto F_q."""
        return self.ADD[a][self.FROB[a]]

    def log(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of zero")
        return int(self._log[a])

    def exp(self, k: int) -> int:
        return int(self._exp[k % (self.s - 1)])

    def in_subfield_q(self, a: int) -> bool:
        return self.FROB[a] == a

    def in_prime_field(self, a: int) -> bool:
        return self.pow(a, self.p) == a

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p."""
        return n % self.p

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self._digits[a])

    def from_coeffs(self, c) -> int:
        c = list(c) + [0] * (self.degree - len(c))
        reduced = _poly_mod([ci % self.p for ci in c], self.modulus, self.p)
        return int(sum(ci * self.p**k for k, ci in enumerate(reduced)))

    # -- element wrappers ------------------------------------------------------
    def __call__(self, value) -> FieldElem:
        if isinstance(value, FieldElem):
            if value.ctx is not self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (tuple, list)):
            return FieldElem(self.from_coeffs(value), self)
        value = int(value)
        if not 0 <= value < self.s:
            raise ValueError(f"element code {value} out of range for F_{self.s}")
        return FieldElem(value, self)

    @property
    def zero(self) -> FieldElem:
        return FieldElem(0, self)

    @property
    def one(self) -> FieldElem:
        return FieldElem(1, self)

    @property
    def gen(self) -> FieldElem:
        """The primitive element of least code; it generates F_{q^2}^*."""
        return FieldElem(self.gen_index, self)

    def elements(self) -> list[FieldElem]:
        return [FieldElem(i, self) for i in range(self.s)]

    @cached_property
    def subfield_q(self) -> list[int]:
        return [a for a in range(self.s) if self.FROB[a] == a]

    def __repr__(self):
        return f"GF(p={self.p}, e={self.e}; q={self.q}, s={self.s}, modulus={self.modulus})"

    def describe(self) -> dict:
        return {"p": self.p, "e": self.e, "q": self.q, "s": self.s, "modulus": list(self.modulus)}

    def __reduce__(self):
        return (build_field, (self.p, self.e))


class _LazyTable:
    """Row-indexable stand-in for a full table on large fields."""

    def __init__(self, fn, s):
        self._fn = fn
        self._s = s

    def __getitem__(self, a):
        fn = self._fn
        return _LazyRow(lambda b: fn(a, b))


class _LazyRow:
    def __init__(self, fn):
        self._fn = fn

    def __getitem__(self, b):
        return self._fn(b)


_FIELDS: dict[tuple[int, int, int], GF] = {}


def build_field(p: int, e: int = 1, cap: int = DEFAULT_SIZE_CAP) -> GF:
    """Return the (cached) field F_{q^2}, q = p^e."""
    key = (p, e, cap)
    if key not in _FIELDS:
        _FIELDS[key] = GF(p, e, cap)
    return _FIELDS[key]


class FieldElem:
    """An element of F_{q^2}; immutable value type."""

    __slots__ = ("value", "ctx")

    def __init__(self, value: int, ctx: GF):
        self.value = int(value)
        self.ctx = ctx

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.coeffs(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.ctx is not self.ctx:
                raise ValueError("mixing elements of different fields")
            return other.value
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElem(self.ctx.add(self.value, b), self.ctx)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElem(self.ctx.sub(self.value, b), self.ctx)

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElem(self.ctx.sub(b, self.value), self.ctx)

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElem(self.ctx.mul(self.value, b), self.ctx)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElem(self.ctx.div(self.value, b), self.ctx)

    def __rtruediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElem(self.ctx.div(b, self.value), self.ctx)

    def __neg__(self):
        return FieldElem(self.ctx.NEG[self.value], self.ctx)

    def __pow__(self, k: int):
        return FieldElem(self.ctx.pow(self.value, k), self.ctx)

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.ctx is other.ctx and self.value == other.value
        if isinstance(other, int):
            return self.value == self.ctx.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.ctx.p, self.ctx.e))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __lt__(self, other):
        return self.value < other.value

    def __repr__(self):
        if self.value == 0:
            return "0"
        return f"g^{self.ctx.log(self.value)}" if self.value != 1 else "1"

    def frobq(self) -> FieldElem:
        return frobq(self)

    def norm(self) -> FieldElem:
        return FieldElem(self.ctx.norm(self.value), self.ctx)

    def trace(self) -> FieldElem:
        return FieldElem(self.ctx.trace(self.value), self.ctx)

    def in_fq(self) -> bool:
        return self.ctx.in_subfield_q(self.value)


def frobq(x: FieldElem) -> FieldElem:
    """x -> x^q; an involution on F_{q^2} fixing exactly F_q."""
    return FieldElem(x.ctx.FROB[x.value], x.ctx)


def solve_trace(c: FieldElem) -> set[FieldElem]:
    """All t in F_{q^2} with t^q + t = c.  Exactly q solutions when c lies in F_q."""
    F = c.ctx
    if F.FROB[c.value] != c.value:
        warnings.warn("trace equation t^q + t = c has no solutions unless c lies in F_q", stacklevel=2)
        return set()
    return {FieldElem(t, F) for t in range(F.s) if F.trace(t) == c.value}


def solve_norm(c: FieldElem) -> set[FieldElem]:
    """All t in F_{q^2} with t^{q+1} = c."""
    F = c.ctx
    return {FieldElem(t, F) for t in range(F.s) if F.norm(t) == c.value}


def roots_of_unity(F: GF, m: int) -> set[FieldElem]:
    """The m-th roots of unity; m must divide q^2 - 1."""
    if m <= 0 or (F.s - 1) % m:
        raise ValueError(f"{m} does not divide q^2 - 1 = {F.s - 1}")
    return {FieldElem(t, F) for t in range(1, F.s) if F.pow(t, m) == 1}


def norm_fibre(F: GF, c: int) -> list[int]:
    """Integer codes t with t^{q+1} = c, sorted."""
    return [t for t in range(F.s) if F.norm(t) == c]


def trace_fibre(F: GF, c: int) -> list[int]:
    return [t for t in range(F.s) if F.trace(t) == c]
