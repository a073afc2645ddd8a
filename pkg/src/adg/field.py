"""Arithmetic in GF(p^e).

Elements are carried as integer codes in ``[0, q)``: the element with
little-endian coefficient vector ``c`` over F_p has code ``sum(c[i] * p**i)``.
All vectorized operations accept and return numpy integer arrays of codes.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

MAX_ORDER = 2**31
TABLE_LIMIT = 2**12


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``; raise FieldError if q is not a prime power."""
    if q < 2:
        raise FieldError(f"field order must be a prime power, got {q}")
    fs = prime_factors(q)
    if len(fs) != 1:
        raise FieldError(f"field order must be a prime power, got {q}")
    p = fs[0]
    e = 0
    while q > 1:
        q //= p
        e += 1
    return p, e


# -- polynomials over F_p as little-endian coefficient tuples ---------------

def _poly_mod(a: list[int], m: tuple[int, ...], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv_lead % p
        if c:
            for k in range(dm + 1):
                a[i - dm + k] = (a[i - dm + k] - c * m[k]) % p
    return a[:dm] if dm > 0 else []


def _monic_polys(p: int, d: int):
    for low in itertools.product(range(p), repeat=d):
        yield tuple(low) + (1,)


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for f in _monic_polys(p, d):
            if not any(_poly_mod(list(poly), f, p)):
                return False
    return True


def least_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree ``e`` (low-degree coefficients compared first)."""
    for low in itertools.product(range(p), repeat=e):
        poly = tuple(low) + (1,)
        if is_irreducible(poly, p):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {e} over F_{p}")  # unreachable


class Field:
    """The finite field GF(p^e) with a fixed modulus polynomial.

    ``modulus`` is a little-endian monic coefficient tuple of length e + 1,
    or ``None`` for prime fields.
    """

    def __init__(self, p: int, e: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise FieldError(f"characteristic must be prime, got {p}")
        if e < 1:
            raise FieldError(f"extension degree must be >= 1, got {e}")
        if p**e > MAX_ORDER:
            raise FieldError(f"field order {p}^{e} exceeds 2^31")
        self.p = p
        self.e = e
        self.q = p**e
        if e == 1:
            if modulus is not None:
                raise FieldError("prime fields take no modulus")
            self.modulus = None
        else:
            if modulus is None:
                modulus = least_irreducible(p, e)
            modulus = tuple(int(c) for c in modulus)
            if len(modulus) != e + 1 or modulus[-1] != 1:
                raise FieldError(f"modulus must be monic of degree {e}: {modulus}")
            if any(not 0 <= c < p for c in modulus):
                raise FieldError(f"modulus coefficients must lie in [0, {p})")
            if not is_irreducible(modulus, p):
                raise FieldError(f"modulus {format_poly(modulus)} is reducible over F_{p}")
            self.modulus = modulus
        self._pows = np.array([p**i for i in range(e)], dtype=np.int64)

    def __repr__(self):
        if self.modulus is None:
            return f"GF({self.q})"
        return f"GF({self.p}^{self.e}, {format_poly(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    # -- representation --------------------------------------------------

    def elements(self) -> range:
        return range(self.q)

    def coeffs(self, a: int) -> tuple[int, ...]:
        self._check(a)
        return tuple((a // self.p**i) % self.p for i in range(self.e))

    def from_coeffs(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.e or any(not 0 <= c < self.p for c in coeffs):
            raise FieldError(f"not a reduced element of {self!r}: {coeffs}")
        return sum(c * self.p**i for i, c in enumerate(coeffs))

    def from_int(self, n: int) -> int:
        """Image of an integer literal in the prime subfield."""
        return n % self.p

    def _check(self, a):
        if not (isinstance(a, (int, np.integer)) and 0 <= a < self.q):
            raise FieldError(f"not an element of {self!r}: {a!r}")

    # -- generic digit arithmetic (used to build tables and for large q) --

    def _digits(self, a: np.ndarray) -> np.ndarray:
        return (a[..., None] // self._pows) % self.p

    def _undigits(self, d: np.ndarray) -> np.ndarray:
        return (d * self._pows).sum(axis=-1)

    def _generic_add(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        a, b = np.broadcast_arrays(a, b)
        return self._undigits((self._digits(a) + self._digits(b)) % self.p)

    def _generic_neg(self, a):
        if self.e == 1:
            return (-a) % self.p
        return self._undigits((-self._digits(a)) % self.p)

    def _generic_mul(self, a, b):
        if self.e == 1:
            return (a * b) % self.p
        p, e, m = self.p, self.e, self.modulus
        a, b = np.broadcast_arrays(a, b)
        da, db = self._digits(a), self._digits(b)
        prod = np.zeros(da.shape[:-1] + (2 * e - 1,), dtype=np.int64)
        for i in range(e):
            for j in range(e):
                prod[..., i + j] += da[..., i] * db[..., j]
        prod %= p
        for i in range(2 * e - 2, e - 1, -1):
            c = prod[..., i].copy()
            for k in range(e + 1):
                prod[..., i - e + k] = (prod[..., i - e + k] - c * m[k]) % p
        return self._undigits(prod[..., :e])

    # -- tables -----------------------------------------------------------

    @property
    def tabulated(self) -> bool:
        return self.q <= TABLE_LIMIT

    def _build_table(self, op) -> np.ndarray:
        # row blocks keep the digit arrays near 2^22 cells
        r = np.arange(self.q, dtype=np.int64)
        step = max(1, (1 << 22) // (self.q * 2 * self.e))
        out = np.empty((self.q, self.q), dtype=self._dtype)
        for i in range(0, self.q, step):
            out[i:i + step] = op(r[i:i + step, None], r[None, :])
        return out.ravel()

    @cached_property
    def _add_table(self) -> np.ndarray:
        if self.p == 2:
            r = np.arange(self.q, dtype=self._dtype)
            return (r[:, None] ^ r[None, :]).ravel()
        return self._build_table(self._generic_add)

    @cached_property
    def _neg_table(self) -> np.ndarray:
        return self._generic_neg(np.arange(self.q, dtype=np.int64)).astype(self._dtype)

    @cached_property
    def _sub_table(self) -> np.ndarray:
        return self._add_table.reshape(self.q, self.q)[:, self._neg_table].ravel()

    @cached_property
    def _mul_table(self) -> np.ndarray:
        if self.e == 1:
            return self._build_table(self._generic_mul)
        exp, log = self._exp_log
        a = log[:, None] + log[None, :]
        out = exp[a % (self.q - 1)].astype(self._dtype)
        out[0, :] = 0
        out[:, 0] = 0
        return out.ravel()

    @cached_property
    def _exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        """Powers of the least primitive element and their discrete logs."""
        r = np.arange(self.q, dtype=np.int64)
        for g in range(2, self.q):
            times_g = self._generic_mul(r, np.int64(g))
            exp = np.empty(self.q - 1, dtype=np.int64)
            x = 1
            for i in range(self.q - 1):
                exp[i] = x
                x = int(times_g[x])
                if x == 1:
                    break
            if i == self.q - 2:
                log = np.zeros(self.q, dtype=np.int64)
                log[exp] = np.arange(self.q - 1)
                return exp, log
        raise FieldError(f"no primitive element found in {self!r}")  # unreachable

    @cached_property
    def _inv_table(self) -> np.ndarray:
        mt = self._mul_table.reshape(self.q, self.q)
        inv = np.zeros(self.q, dtype=self._dtype)
        rows, cols = np.nonzero(mt[1:] == 1)
        inv[rows + 1] = cols
        return inv

    @property
    def _dtype(self):
        return np.int64 if self.q <= 256 else np.int32

    # -- vectorized ops on code arrays -------------------------------------

    def vadd(self, a, b):
        if self.tabulated:
            return self._add_table[np.asarray(a) * self.q + b]
        return self._generic_add(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def vsub(self, a, b):
        if self.tabulated:
            return self._sub_table[np.asarray(a) * self.q + b]
        return self.vadd(a, self.vneg(b))

    def vneg(self, a):
        if self.tabulated:
            return self._neg_table[a]
        return self._generic_neg(np.asarray(a, dtype=np.int64))

    def vmul(self, a, b):
        if self.tabulated:
            return self._mul_table[np.asarray(a) * self.q + b]
        return self._generic_mul(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def vpow(self, a, k: int):
        a = np.asarray(a)
        result = np.ones_like(a)
        base = a
        while k:
            if k & 1:
                result = self.vmul(result, base)
            k >>= 1
            if k:
                base = self.vmul(base, base)
        return result

    # -- scalar ops ----------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        self._check(a), self._check(b)
        return int(self.vadd(a, b))

    def sub(self, a: int, b: int) -> int:
        self._check(a), self._check(b)
        return int(self.vsub(a, b))

    def neg(self, a: int) -> int:
        self._check(a)
        return int(self.vneg(a))

    def mul(self, a: int, b: int) -> int:
        self._check(a), self._check(b)
        return int(self.vmul(a, b))

    def pow(self, a: int, k: int) -> int:
        self._check(a)
        if k < 0:
            return self.pow(self.inv(a), -k)
        return int(self.vpow(a, k))

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self!r}")
        if self.tabulated:
            return int(self._inv_table[a])
        return int(self.vpow(a, self.q - 2))

    def arith(self, op: str, a: int, b: int) -> int:
        try:
            fn = {"add": self.add, "sub": self.sub, "mul": self.mul}[op]
        except KeyError:
            raise FieldError(f"unknown operation {op!r}") from None
        return fn(a, b)

    def format(self, a: int) -> str:
        """Human form, e.g. ``x+1`` in GF(4)."""
        if self.e == 1:
            return str(int(a))
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs(int(a))))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms) or "0"


def format_poly(coeffs) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if not mono:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) or "0"


def make_field(p: int, e: int = 1, modulus=None) -> Field:
    return Field(p, e, modulus)


def field_from_order(q: int, modulus=None) -> Field:
    """Field of order ``q``, factoring q into p^e."""
    if q > MAX_ORDER:
        raise FieldError(f"field order {q} exceeds 2^31")
    p, e = factor_prime_power(q)
    return Field(p, e, modulus)


def parse_modulus(text: str) -> tuple[int, ...]:
    """Parse ``"1,1,0,1"`` (little-endian, monic) into a coefficient tuple."""
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise FieldError(f"bad modulus {text!r}; expected comma-separated integers") from None
