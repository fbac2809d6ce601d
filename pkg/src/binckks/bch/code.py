"""Binary BCH codes: construction, systematic encoding, decoding.

Codeword bit i is the coefficient of X^i. Parity occupies positions
0..n-k-1 and the message the top k positions.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DecodeFailure, ParameterError
from .galois import GfContext, gf2_mod, gf2_mul, int_to_bits

# x^7 + x^3 + 1
DEFAULT_PRIMITIVE_POLY = 0b10001001


@dataclass(frozen=True, eq=False)
class BchCode:
    gf: GfContext
    t: int
    g: int

    @property
    def n(self) -> int:
        return self.gf.order

    @property
    def k(self) -> int:
        return self.n - (self.g.bit_length() - 1)

    @property
    def m(self) -> int:
        return self.gf.m

    def g_bits(self) -> np.ndarray:
        return int_to_bits(self.g, self.n - self.k + 1)

    def g_terms(self) -> list:
        return [i for i in range(self.g.bit_length() - 1, -1, -1) if (self.g >> i) & 1]

    def __repr__(self):
        return f"BchCode(n={self.n}, k={self.k}, t={self.t}, g={self.g:#x})"


def conjugacy_class(i: int, n: int) -> list:
    out, j = [], i % n
    while j not in out:
        out.append(j)
        j = 2 * j % n
    return out


def minimal_polynomial(gf: GfContext, i: int) -> int:
    """prod_{c in class(i)} (X - alpha^c), returned as a GF(2) bit-int."""
    poly = [1]  # coefficients in GF(2^m), index = power of X
    for c in conjugacy_class(i, gf.order):
        root = gf.pow_alpha(c)
        nxt = [0] * (len(poly) + 1)
        for d, a in enumerate(poly):
            nxt[d + 1] ^= a
            nxt[d] ^= gf.mul(a, root)
        poly = nxt
    out = 0
    for d, a in enumerate(poly):
        if a not in (0, 1):
            raise ArithmeticError("minimal polynomial left GF(2)")
        out |= a << d
    return out


def build_code(m: int, t: int, primitive_poly: int = DEFAULT_PRIMITIVE_POLY) -> BchCode:
    """Generator = lcm of the minimal polynomials of alpha^1..alpha^2t."""
    gf = GfContext(m, primitive_poly)
    if t < 0 or 2 * t >= gf.order:
        raise ParameterError(f"need 0 <= 2t < {gf.order}")
    g, seen = 1, set()
    for i in range(1, 2 * t + 1):
        rep = min(conjugacy_class(i, gf.order))
        if rep in seen:
            continue
        seen.add(rep)
        g = gf2_mul(g, minimal_polynomial(gf, i))
    return BchCode(gf, t, g)


def _parity_matrix(code: BchCode) -> np.ndarray:
    """Row i: parity bits of x^(n-k+i) mod g."""
    r = code.n - code.k
    rows = [int_to_bits(gf2_mod(1 << (r + i), code.g), r) for i in range(code.k)]
    return np.array(rows, dtype=np.uint8).reshape(code.k, r)


_PARITY_CACHE = {}


def parity_matrix(code: BchCode) -> np.ndarray:
    key = (code.m, code.gf.primitive_poly, code.g)
    if key not in _PARITY_CACHE:
        _PARITY_CACHE[key] = _parity_matrix(code)
    return _PARITY_CACHE[key]


def bch_encode(code: BchCode, u) -> np.ndarray:
    """Systematic encoding of one k-bit word or a (blocks, k) array."""
    u = np.asarray(u, dtype=np.uint8)
    single = u.ndim == 1
    U = u.reshape(1, -1) if single else u
    if U.shape[1] != code.k:
        raise ParameterError(f"message must have {code.k} bits, got {U.shape[1]}")
    if np.any(U > 1):
        raise ParameterError("message bits must be 0/1")
    P = parity_matrix(code)
    parity = (U.astype(np.int64) @ P.astype(np.int64)) & 1
    out = np.concatenate((parity.astype(np.uint8), U), axis=1)
    return out[0] if single else out


def _power_table(code: BchCode) -> np.ndarray:
    """E[i-1, j] = alpha^(i*j) for i = 1..2t, j = 0..n-1."""
    n = code.n
    i = np.arange(1, 2 * code.t + 1)[:, None]
    j = np.arange(n)[None, :]
    return code.gf.exp[(i * j) % n]


def syndromes(code: BchCode, R: np.ndarray) -> np.ndarray:
    """S[b, i-1] = r_b(alpha^i) for a (blocks, n) bit array."""
    E = _power_table(code)
    prod = R[:, None, :].astype(np.int64) * E[None, :, :]
    return np.bitwise_xor.reduce(prod, axis=2)


def berlekamp_massey(gf: GfContext, S) -> list:
    """Error-locator polynomial Lambda (index = power of X)."""
    C, B = [1], [1]
    L, shift, b = 0, 1, 1
    for r in range(len(S)):
        d = S[r]
        for i in range(1, L + 1):
            if i < len(C):
                d ^= gf.mul(C[i], S[r - i])
        if d == 0:
            shift += 1
            continue
        coef = gf.mul(d, gf.inv(b))
        T = list(C)
        need = len(B) + shift
        if len(C) < need:
            C = C + [0] * (need - len(C))
        for i, bi in enumerate(B):
            C[i + shift] ^= gf.mul(coef, bi)
        if 2 * L <= r:
            L = r + 1 - L
            B, b, shift = T, d, 1
        else:
            shift += 1
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    return C


def chien_search(gf: GfContext, lam: list, n: int) -> np.ndarray:
    """Positions j with Lambda(alpha^-j) = 0."""
    j = np.arange(n)
    acc = np.zeros(n, dtype=np.int64)
    for d, c in enumerate(lam):
        if c == 0:
            continue
        # c * alpha^(-j*d)
        e = (gf.log[c] - j * d) % gf.order
        acc ^= gf.exp[e]
    return np.flatnonzero(acc == 0)


def _correct(code: BchCode, r: np.ndarray, S) -> tuple:
    gf = code.gf
    lam = berlekamp_massey(gf, [int(s) for s in S])
    deg = len(lam) - 1
    if deg > code.t:
        raise DecodeFailure("locator degree exceeds t")
    pos = chien_search(gf, lam, code.n)
    if len(pos) != deg:
        raise DecodeFailure("locator roots do not match its degree")
    fixed = r.copy()
    fixed[pos] ^= 1
    if np.any(syndromes(code, fixed[None, :])):
        raise DecodeFailure("nonzero syndrome after correction")
    return fixed, deg


def bch_decode_blocks(code: BchCode, R) -> tuple:
    """Decode a (blocks, n) array. Returns (messages, corrected counts).

    Raises DecodeFailure naming the first uncorrectable block.
    """
    R = np.asarray(R, dtype=np.uint8)
    if R.ndim != 2 or R.shape[1] != code.n:
        raise ParameterError(f"words must have {code.n} bits")
    S = syndromes(code, R)
    counts = np.zeros(len(R), dtype=np.int64)
    bad = np.flatnonzero(S.any(axis=1))
    if len(bad):
        R = R.copy()
        for b in bad:
            try:
                R[b], counts[b] = _correct(code, R[b], S[b])
            except DecodeFailure as exc:
                raise DecodeFailure(exc.args[0], block=int(b)) from None
    return R[:, code.n - code.k:], counts


def bch_decode(code: BchCode, r) -> tuple:
    """Decode one n-bit word into (k-bit message, corrected count)."""
    r = np.asarray(r, dtype=np.uint8)
    if r.shape != (code.n,):
        raise ParameterError(f"word must have {code.n} bits")
    u, counts = bch_decode_blocks(code, r[None, :])
    return u[0], int(counts[0])
