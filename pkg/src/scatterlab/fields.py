"""Finite fields F_p ⊂ F_q ⊂ F_{q^m} with integer-coded elements.

Every element of a field of order ``b**d`` built over a subfield of order
``b`` is the integer ``sum(c_i * b**i)`` of its polynomial-basis coefficients.
Because coefficients are themselves codes of the subfield, the code of an
element of F_{q^m} is also its string of base-p digits, and F_q sits inside
F_{q^m} as the codes ``0..q-1``.  Arithmetic methods accept Python ints or
numpy integer arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ValidationError

MAX_ORDER = 1 << 20
_TABLE_LIMIT = 1 << 10


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p**e, or raise ValidationError."""
    if q < 2:
        raise ValidationError(f"{q} is not a prime power")
    factors = prime_factors(q)
    if len(factors) != 1:
        raise ValidationError(f"{q} is not a prime power")
    p = factors[0]
    e = 0
    while q > 1:
        q //= p
        e += 1
    return p, e


def _scalar(x):
    return int(x) if np.ndim(x) == 0 else x


class _PrimeScalars:
    """Arithmetic mod p; the subfield used to build F_{p^e}."""

    def __init__(self, p: int):
        self.p = p
        self.order = p

    def add(self, a, b):
        return _scalar((np.asarray(a, dtype=np.int64) + b) % self.p)

    def sub(self, a, b):
        return _scalar((np.asarray(a, dtype=np.int64) - b) % self.p)

    def neg(self, a):
        return _scalar((-np.asarray(a, dtype=np.int64)) % self.p)

    def mul(self, a, b):
        return _scalar((np.asarray(a, dtype=np.int64) * b) % self.p)

    def inv(self, a):
        a = int(a)
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)


# polynomials: coefficient lists, lowest degree first, over a scalar ops object


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], f: Sequence[int], F) -> list[int]:
    a = _trim(list(a))
    df = len(f) - 1
    lead_inv = F.inv(f[-1])
    while len(a) - 1 >= df:
        c = F.mul(a[-1], lead_inv)
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, fc))
        _trim(a)
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], F) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(out)


def _poly_powmod(a: Sequence[int], e: int, f: Sequence[int], F) -> list[int]:
    result = [1]
    base = _poly_mod(list(a), f, F)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, F), f, F)
        base = _poly_mod(_poly_mul(base, base, F), f, F)
        e >>= 1
    return result


def _poly_sub(a: Sequence[int], b: Sequence[int], F) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([F.sub(x, y) for x, y in zip(a, b)])


def _poly_gcd(a: Sequence[int], b: Sequence[int], F) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, F)
    return a


def is_irreducible(f: Sequence[int], F) -> bool:
    """Rabin's test for a monic polynomial over the field with ops ``F``."""
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    b = F.order
    x = [0, 1]

    def frob_iter(times: int) -> list[int]:
        cur = x
        for _ in range(times):
            cur = _poly_powmod(cur, b, f, F)
        return cur

    if _poly_sub(frob_iter(d), x, F):
        return False
    for r in prime_factors(d):
        h = _poly_sub(frob_iter(d // r), x, F)
        if len(_poly_gcd(f, h, F)) != 1:
            return False
    return True


def least_irreducible(degree: int, F) -> tuple[int, ...]:
    """Least monic irreducible of ``degree``, ordering by the integer code of its lower coefficients."""
    b = F.order
    for code in range(b**degree):
        coeffs = [(code // b**i) % b for i in range(degree)] + [1]
        if is_irreducible(coeffs, F):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FiniteField:
    """The field F_b[x]/(modulus), where F_b is ``base`` or the prime field.

    Elements are integer codes in ``[0, order)``; 0 and 1 are the additive
    and multiplicative identities.
    """

    def __init__(self, p: int, degree: int, modulus: Sequence[int] | None = None,
                 base: FiniteField | None = None):
        if not is_prime(p):
            raise ValidationError(f"p={p} is not prime")
        if degree < 1:
            raise ValidationError("extension degree must be >= 1")
        if base is not None and base.p != p:
            raise ValidationError("base field characteristic mismatch")
        sub = base if base is not None else _PrimeScalars(p)
        self.p = p
        self.base = base
        self.degree = degree
        self.base_order = sub.order
        self.order = sub.order**degree
        if self.order > MAX_ORDER:
            raise ValidationError(f"field order {self.order} exceeds cap {MAX_ORDER}")
        self._sub = sub
        if modulus is None:
            modulus = least_irreducible(degree, sub)
        else:
            modulus = tuple(int(c) for c in modulus)
            if len(modulus) != degree + 1 or modulus[-1] != 1:
                raise ValidationError("modulus must be monic of the stated degree")
            if any(not 0 <= c < sub.order for c in modulus):
                raise ValidationError("modulus coefficient out of range")
            if not is_irreducible(modulus, sub):
                raise ValidationError(f"modulus {modulus} is reducible")
        self.modulus = tuple(modulus)
        self.prime_degree = round(np.log(self.order) / np.log(p))
        self._is_prime_field = base is None and degree == 1
        self._build_log_tables()
        if self.order <= _TABLE_LIMIT:
            codes = np.arange(self.order, dtype=np.int64)
            self._add_t = self._add_digits(codes[:, None], codes[None, :])
            self._mul_t = self._mul_log(codes[:, None], codes[None, :])
        else:
            self._add_t = self._mul_t = None

    def __repr__(self) -> str:
        return f"FiniteField(order={self.order}, modulus={self.modulus})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteField) and self.order == other.order
                and self.signature == other.signature)

    def __hash__(self) -> int:
        return hash(self.signature)

    @property
    def signature(self) -> tuple:
        base_sig = self.base.signature if self.base is not None else ()
        return (self.p, self.modulus, base_sig)

    # construction helpers

    def _digits(self, codes: np.ndarray) -> np.ndarray:
        b = self.base_order
        return np.stack([(codes // b**i) % b for i in range(self.degree)], axis=-1)

    def _mul_by_table(self, g: int) -> np.ndarray:
        """g * a for every code a, via the multiplication matrix of g."""
        sub, b, d = self._sub, self.base_order, self.degree
        cols = []
        for i in range(d):
            xi = [0] * i + [1]
            prod = _poly_mod(_poly_mul(self._poly(g), xi, sub), self.modulus, sub)
            cols.append(prod + [0] * (d - len(prod)))
        A = self._digits(np.arange(self.order, dtype=np.int64))
        out = np.zeros(self.order, dtype=np.int64)
        for j in range(d):
            acc = np.zeros(self.order, dtype=np.int64)
            for i in range(d):
                if cols[i][j]:
                    acc = sub.add(acc, sub.mul(A[:, i], cols[i][j]))
            out += np.asarray(acc, dtype=np.int64) * b**j
        return out

    def _poly(self, code: int) -> list[int]:
        b = self.base_order
        return _trim([(code // b**i) % b for i in range(self.degree)])

    def _poly_pow_code(self, g: int, e: int) -> int:
        res = _poly_powmod(self._poly(g), e, self.modulus, self._sub)
        return sum(int(c) * self.base_order**i for i, c in enumerate(res))

    def _build_log_tables(self) -> None:
        Q = self.order
        n = Q - 1
        factors = prime_factors(n) if n > 1 else []
        g = 1
        if n > 1:
            for g in range(2, Q):
                if all(self._poly_pow_code(g, n // r) != 1 for r in factors):
                    break
            else:  # pragma: no cover
                raise AssertionError("no primitive element")
        table = self._mul_by_table(g).tolist()
        exp = [1] * n
        x = 1
        for i in range(1, n):
            x = table[x]
            exp[i] = x
        self.primitive = g
        self._exp = np.array(exp + exp, dtype=np.int64)
        log = np.zeros(Q, dtype=np.int64)
        log[self._exp[:n]] = np.arange(n)
        self._log = log

    def _add_digits(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self._is_prime_field:
            return (a + b) % self.p
        p = self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for i in range(self.prime_degree):
            w = p**i
            out += (((a // w) % p + (b // w) % p) % p) * w
        return out

    def _mul_log(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._is_prime_field:
            return (a * b) % self.p
        n = self.order - 1
        r = self._exp[(self._log[a] + self._log[b]) % n] if n else np.ones(np.broadcast(a, b).shape, np.int64)
        return np.where((a == 0) | (b == 0), 0, r)

    # arithmetic (ints or arrays)

    def add(self, a, b):
        if self._add_t is not None:
            return _scalar(self._add_t[a, b])
        return _scalar(self._add_digits(a, b))

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return _scalar(a)
        p = self.p
        out = np.zeros(a.shape, dtype=np.int64)
        for i in range(self.prime_degree):
            w = p**i
            out += ((-((a // w) % p)) % p) * w
        return _scalar(out)

    def sub(self, a, b):
        if self.p == 2:
            return self.add(a, b)
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self._mul_t is not None:
            return _scalar(self._mul_t[a, b])
        return _scalar(self._mul_log(a, b))

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        n = self.order - 1
        return _scalar(self._exp[(n - self._log[a]) % n] if n else np.ones(a.shape, np.int64))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        n = self.order - 1
        if e == 0:
            return _scalar(np.ones(a.shape, dtype=np.int64))
        r = self._exp[(self._log[a] * e) % n] if n else np.ones(a.shape, np.int64)
        return _scalar(np.where(a == 0, 0, r))

    def log(self, a):
        return _scalar(self._log[np.asarray(a, dtype=np.int64)])

    def exp(self, k):
        n = self.order - 1
        return _scalar(self._exp[np.asarray(k, dtype=np.int64) % n] if n else np.ones(np.shape(k), np.int64))

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.order, dtype=np.int64)

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.order if value >= 0 else self.neg(-value % self.order), self)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: FiniteField

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValidationError("elements of different fields")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.field.add(self.value, self._other(other)), self.field)

    def __sub__(self, other):
        return FieldElement(self.field.sub(self.value, self._other(other)), self.field)

    def __mul__(self, other):
        return FieldElement(self.field.mul(self.value, self._other(other)), self.field)

    def __truediv__(self, other):
        return FieldElement(self.field.div(self.value, self._other(other)), self.field)

    def __neg__(self):
        return FieldElement(self.field.neg(self.value), self.field)

    def __pow__(self, e: int):
        if e < 0:
            return FieldElement(self.field.pow(self.field.inv(self.value), -e), self.field)
        return FieldElement(self.field.pow(self.value, e), self.field)

    def __int__(self) -> int:
        return self.value


class FieldTower:
    """F_p ⊂ F_q ⊂ F_{q^m}, with F_{q^m} built as a degree-m extension of F_q.

    The ordered F_q-basis of F_{q^m} is the polynomial basis 1, x, ..., x^{m-1},
    whose codes are ``q**j``; ``coords`` is then base-q digit extraction.
    """

    def __init__(self, base: FiniteField, top: FiniteField):
        if top.base is not base and top.base != base:
            raise ValidationError("top field must be an extension of the base field")
        self.base = base
        self.top = top

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def e(self) -> int:
        return self.base.prime_degree

    @property
    def q(self) -> int:
        return self.base.order

    @property
    def m(self) -> int:
        return self.top.degree

    @property
    def Q(self) -> int:
        return self.top.order

    @cached_property
    def basis(self) -> tuple[int, ...]:
        return tuple(self.q**j for j in range(self.m))

    def __repr__(self) -> str:
        return f"FieldTower(p={self.p}, e={self.e}, m={self.m})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldTower) and self.to_tuple() == other.to_tuple()

    def __hash__(self) -> int:
        return hash(self.to_tuple())

    def frobenius(self, x, i: int = 1):
        """x ** (q ** i) in F_{q^m}."""
        n = self.Q - 1
        x = np.asarray(x, dtype=np.int64)
        if n == 0:
            return _scalar(x)
        e = pow(self.q, i, n)
        r = self.top._exp[(self.top._log[x] * e) % n]
        return _scalar(np.where(x == 0, 0, r))

    def trace(self, x):
        """Relative trace F_{q^m} -> F_q."""
        acc = np.zeros(np.shape(x), dtype=np.int64)
        for i in range(self.m):
            acc = self.top.add(acc, self.frobenius(x, i))
        return _scalar(acc)

    def coords(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        return np.stack([(x // self.q**j) % self.q for j in range(self.m)], axis=-1)

    def uncoords(self, v) -> int | np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        return _scalar((v * (self.q ** np.arange(self.m, dtype=np.int64))).sum(axis=-1))

    def to_tuple(self) -> tuple:
        return (self.p, self.e, self.m, self.base.modulus, self.top.modulus)

    @classmethod
    def from_tuple(cls, data) -> FieldTower:
        p, e, m, base_mod, top_mod = data
        return make_tower(p, e, m, moduli=(base_mod, top_mod))


def make_field(q: int, modulus: Sequence[int] | None = None) -> FiniteField:
    p, e = prime_power(q)
    return FiniteField(p, e, modulus)


def make_tower(p: int, e: int = 1, m: int = 1,
               moduli: tuple[Sequence[int] | None, Sequence[int] | None] | None = None) -> FieldTower:
    """Build F_p ⊂ F_{p^e} ⊂ F_{p^{em}}; default moduli are least irreducibles."""
    if not is_prime(p):
        raise ValidationError(f"p={p} is not prime")
    if e < 1 or m < 1:
        raise ValidationError("e and m must be >= 1")
    if p ** (e * m) > MAX_ORDER:
        raise ValidationError(f"q^m = {p ** (e * m)} exceeds cap {MAX_ORDER}")
    base_mod, top_mod = moduli if moduli is not None else (None, None)
    base = FiniteField(p, e, base_mod)
    top = FiniteField(p, m, top_mod, base=base)
    return FieldTower(base, top)


def tower_for(q: int, m: int) -> FieldTower:
    p, e = prime_power(q)
    return make_tower(p, e, m)
