"""Exact integer helpers: q-binomials and friends."""

from __future__ import annotations

from math import comb


def gauss_binomial(a: int, b: int, q: int) -> int:
    """Number of b-dimensional subspaces of F_q^a; zero when b is out of range."""
    if b < 0 or a < 0 or b > a:
        return 0
    num = den = 1
    for i in range(b):
        num *= q ** (a - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def binom2(x: int) -> int:
    """C(x, 2), with C(x, 2) = 0 for x < 2."""
    return comb(x, 2) if x >= 2 else 0


def ilog(value: int, base: int) -> int:
    """Exact integer log; raises ValueError if value is not a power of base."""
    k = 0
    while value > 1:
        if value % base:
            raise ValueError(f"{value} is not a power of {base}")
        value //= base
        k += 1
    if value != 1:
        raise ValueError(f"{value} is not a power of {base}")
    return k
