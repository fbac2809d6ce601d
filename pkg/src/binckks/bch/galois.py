"""GF(2^m) arithmetic with log/antilog tables.

Field elements are ints in [0, 2^m); bit i is the coefficient of alpha^i.
"""

import numpy as np

from ..errors import ParameterError


class GfContext:
    def __init__(self, m: int, primitive_poly: int):
        if m < 2 or m > 16:
            raise ParameterError(f"unsupported extension degree {m}")
        if primitive_poly >> m != 1:
            raise ParameterError("primitive polynomial must have degree m")
        self.m = m
        self.primitive_poly = primitive_poly
        self.order = (1 << m) - 1
        n = self.order
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.full(n + 1, -1, dtype=np.int64)
        x = 1
        for i in range(n):
            if log[x] != -1:
                raise ParameterError(f"polynomial {primitive_poly:#x} is not primitive")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x >> m:
                x ^= primitive_poly
        if x != 1:
            raise ParameterError(f"polynomial {primitive_poly:#x} is not primitive")
        exp[n:] = exp[:n]
        self.exp = exp
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp[(self.order - self.log[a]) % self.order])

    def pow_alpha(self, e: int) -> int:
        return int(self.exp[e % self.order])

    def poly_eval(self, coeffs, x: int) -> int:
        """Horner evaluation; coeffs[i] multiplies X^i."""
        acc = 0
        for c in reversed(coeffs):
            acc = self.mul(acc, x) ^ c
        return acc


def gf2_mul(a: int, b: int) -> int:
    """Carry-less product of bit-int polynomials over GF(2)."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_mod(a: int, g: int) -> int:
    dg = g.bit_length() - 1
    while a and a.bit_length() - 1 >= dg:
        a ^= g << (a.bit_length() - 1 - dg)
    return a


def gf2_divmod(a: int, g: int):
    dg = g.bit_length() - 1
    q = 0
    while a and a.bit_length() - 1 >= dg:
        s = a.bit_length() - 1 - dg
        q |= 1 << s
        a ^= g << s
    return q, a


def bits_to_int(bits) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b:
            out |= 1 << i
    return out


def int_to_bits(x: int, n: int) -> np.ndarray:
    return np.array([(x >> i) & 1 for i in range(n)], dtype=np.uint8)
