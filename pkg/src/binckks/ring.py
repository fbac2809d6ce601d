"""Negacyclic rings R = Z[X]/(X^N+1) and BP = Z[x]/(x^K+1), K = N*lambda_B.

Coefficient vectors are numpy int64 arrays while the values fit and
object arrays of Python ints otherwise, so Exact mode never wraps.
"""

import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import ntt
from .errors import CoefficientOverflow, ParameterError

LAMBDA_CHOICES = (2, 4, 8, 16, 32)
_SAFE = 1 << 62


@dataclass(frozen=True)
class RingParams:
    """Ring dimensions. modulus=None means the Exact coefficient domain."""

    N: int
    lambda_B: int
    modulus: Optional[int] = None

    def __post_init__(self):
        N, lam = self.N, self.lambda_B
        if N < 8 or N & (N - 1):
            raise ParameterError(f"N must be a power of two >= 8, got {N}")
        if lam not in LAMBDA_CHOICES:
            raise ParameterError(f"lambda_B must be one of {LAMBDA_CHOICES}, got {lam}")
        q = self.modulus
        if q is not None and (q < 3 or q % 2 == 0):
            raise ParameterError(f"modulus must be an odd integer >= 3, got {q}")

    @property
    def K(self) -> int:
        return self.N * self.lambda_B

    @property
    def M(self) -> int:
        return 2 * self.N

    @property
    def B(self) -> int:
        return 1 << self.lambda_B

    @property
    def exact(self) -> bool:
        return self.modulus is None

    @property
    def ntt_modulus(self) -> bool:
        q = self.modulus
        return q is not None and q < (1 << 31) and (q - 1) % (2 * self.K) == 0

    @property
    def domain(self) -> str:
        return "exact" if self.modulus is None else f"modular:{self.modulus}"

    def digest(self) -> bytes:
        tag = f"N={self.N};lambda_B={self.lambda_B};domain={self.domain}"
        return hashlib.sha256(tag.encode()).digest()


def modular_params(N: int, lambda_B: int, q: Optional[int] = None) -> RingParams:
    """Modular-domain params; q defaults to the largest NTT prime for K."""
    if q is None:
        q = ntt.primes_for(N * lambda_B, 1)[0]
    return RingParams(N, lambda_B, q)


# ---- coefficient helpers ----

def max_abs(arr: np.ndarray) -> int:
    if len(arr) == 0:
        return 0
    if arr.dtype == object:
        return max(abs(int(x)) for x in arr)
    return int(np.abs(arr).max())


def normalize(arr) -> np.ndarray:
    """Coerce to int64 if every value fits, else to an object array."""
    arr = np.asarray(arr)
    if arr.dtype == object:
        if max_abs(arr) < _SAFE:
            return arr.astype(np.int64)
        return arr
    if arr.dtype.kind == "f":
        raise TypeError("float coefficients are not allowed")
    return arr.astype(np.int64, copy=False)


def _centered(arr: np.ndarray, q: int) -> np.ndarray:
    r = arr % q
    return normalize(np.where(r > q // 2, r - q, r))


def _reduce(arr: np.ndarray, params: RingParams) -> np.ndarray:
    arr = normalize(arr)
    if params.modulus is None:
        return arr
    return _centered(arr, params.modulus)


def _widen(a: np.ndarray, b: np.ndarray):
    """Pick a dtype so that a +/- b cannot overflow."""
    if a.dtype == object or b.dtype == object or max_abs(a) + max_abs(b) >= _SAFE:
        return a.astype(object), b.astype(object)
    return a, b


class _Poly:
    __slots__ = ("coeffs", "params")
    dim_name = ""

    def __init__(self, coeffs, params: RingParams, reduce: bool = True):
        arr = np.asarray(coeffs)
        expected = self._dim(params)
        if arr.ndim != 1 or len(arr) != expected:
            raise ParameterError(f"{type(self).__name__} needs {expected} coefficients, got {arr.shape}")
        self.coeffs = _reduce(arr, params) if reduce else normalize(arr)
        self.params = params

    @staticmethod
    def _dim(params):
        raise NotImplementedError

    @classmethod
    def zero(cls, params: RingParams):
        return cls(np.zeros(cls._dim(params), dtype=np.int64), params)

    @classmethod
    def monomial(cls, params: RingParams, i: int, c: int = 1):
        v = np.zeros(cls._dim(params), dtype=object if abs(c) >= _SAFE else np.int64)
        v[i] = c
        return cls(v, params)

    def __eq__(self, other):
        if type(self) is not type(other) or self.params != other.params:
            return NotImplemented
        return bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((type(self).__name__, self.params, tuple(int(x) for x in self.coeffs)))

    def __repr__(self):
        nz = np.flatnonzero(self.coeffs)
        return f"{type(self).__name__}(N={self.params.N}, nnz={len(nz)}, max={max_abs(self.coeffs)})"

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def terms(self) -> list:
        """(exponent, coefficient) pairs, highest exponent first."""
        nz = np.flatnonzero(self.coeffs)[::-1]
        return [(int(i), int(self.coeffs[i])) for i in nz]


class RPoly(_Poly):
    """Element of R = Z[X]/(X^N+1)."""

    @staticmethod
    def _dim(params):
        return params.N


class BPoly(_Poly):
    """Element of BP = Z[x]/(x^K+1)."""

    @staticmethod
    def _dim(params):
        return params.K

    def __add__(self, other):
        return bp_add(self, other)

    def __sub__(self, other):
        return bp_sub(self, other)

    def __neg__(self):
        return bp_neg(self)

    def __mul__(self, other):
        return bp_mul(self, other)


def _check_pair(a: _Poly, b: _Poly):
    if a.params.K != b.params.K or len(a.coeffs) != len(b.coeffs):
        raise ParameterError("dimension mismatch")
    if a.params.modulus != b.params.modulus:
        raise ParameterError("coefficient domain mismatch")


def bp_add(a: BPoly, b: BPoly) -> BPoly:
    _check_pair(a, b)
    x, y = _widen(a.coeffs, b.coeffs)
    return BPoly(x + y, a.params)


def bp_sub(a: BPoly, b: BPoly) -> BPoly:
    _check_pair(a, b)
    x, y = _widen(a.coeffs, b.coeffs)
    return BPoly(x - y, a.params)


def bp_neg(a: BPoly) -> BPoly:
    return BPoly(-a.coeffs, a.params)


def bp_scale(a: BPoly, c: int) -> BPoly:
    """Multiply every coefficient by the integer c."""
    c = int(c)
    if a.coeffs.dtype != object and max_abs(a.coeffs) * abs(c) < _SAFE:
        return BPoly(a.coeffs * c, a.params)
    return BPoly(a.coeffs.astype(object) * c, a.params)


def _constant_term(a: np.ndarray):
    """The constant if a is a constant polynomial, else None."""
    if a.dtype == object:
        if any(a[1:]):
            return None
    elif np.any(a[1:]):
        return None
    return int(a[0])


def bp_mul(a: BPoly, b: BPoly) -> BPoly:
    """Negacyclic product in BP."""
    _check_pair(a, b)
    params = a.params
    for x, y in ((a, b), (b, a)):
        c = _constant_term(x.coeffs)
        if c is not None:
            return bp_scale(y, c)
    if params.ntt_modulus:
        q = params.modulus
        return BPoly(ntt.negacyclic_mul_mod(a.coeffs, b.coeffs, q), params)
    return BPoly(ntt.negacyclic_convolve(a.coeffs, b.coeffs), params)


def bp_mul_schoolbook(a: BPoly, b: BPoly) -> BPoly:
    """O(K^2) reference product: one shifted vector add per coefficient of a."""
    _check_pair(a, b)
    K = a.params.K
    bound = ntt.product_bound(a.coeffs, b.coeffs)
    dtype = np.int64 if bound < _SAFE else object
    bv = b.coeffs.astype(dtype)
    acc = np.zeros(K, dtype=dtype)
    for i in range(K):
        ai = int(a.coeffs[i])
        if ai == 0:
            continue
        # b * x^i: entries j >= i come from b[j-i], wrapped ones change sign
        shifted = np.concatenate((-bv[K - i:], bv[: K - i]))
        acc = acc + ai * shifted
    return BPoly(acc, a.params)


def monomial_shift(a: BPoly, i: int) -> BPoly:
    """a * x^i for 0 <= i < K."""
    K = a.params.K
    if not 0 <= i < K:
        raise ParameterError(f"shift {i} out of range [0, {K})")
    c = a.coeffs
    return BPoly(np.concatenate((-c[K - i:], c[: K - i])), a.params)


# ---- binary expansion ----

def bin_contract(m: BPoly) -> RPoly:
    """p: a_i = sum_j 2^j * coeff(i*lambda_B + j)."""
    params = m.params
    N, lam = params.N, params.lambda_B
    cols = m.coeffs.reshape(N, lam)
    if cols.dtype != object and max_abs(m.coeffs) < (_SAFE >> (lam + 1)):
        weights = np.int64(1) << np.arange(lam, dtype=np.int64)
        return RPoly(cols @ weights, params, reduce=False)
    cols = cols.astype(object)
    acc = cols[:, lam - 1].copy()
    for j in range(lam - 2, -1, -1):
        acc = acc * 2 + cols[:, j]
    return RPoly(acc, params, reduce=False)


def signed_digits(v, lambda_B: int) -> np.ndarray:
    """Signed binary digits of each entry, shape (len(v), lambda_B)."""
    v = normalize(np.asarray(v))
    if len(v) == 0:
        return np.zeros((0, lambda_B), dtype=np.int64)
    bound = 1 << lambda_B
    mags = np.abs(v.astype(object)) if v.dtype == object else np.abs(v)
    big = np.flatnonzero(mags >= bound)
    if len(big):
        i = int(big[0])
        raise CoefficientOverflow(bound, i, int(v[i]))
    v = v.astype(np.int64)
    mag = np.abs(v)
    bits = (mag[:, None] >> np.arange(lambda_B, dtype=np.int64)) & 1
    return bits * np.sign(v)[:, None]


def bin_expand(a: RPoly) -> BPoly:
    """p^{-1}: signed bit decomposition of each coefficient."""
    params = a.params
    digits = signed_digits(a.coeffs, params.lambda_B)
    return BPoly(digits.reshape(-1), params)


def embed_layer0(v, params: RingParams) -> BPoly:
    """X^i -> x^{i*lambda_B}; a ring homomorphism R -> BP."""
    v = normalize(np.asarray(v))
    if len(v) != params.N:
        raise ParameterError(f"need {params.N} coefficients")
    out = np.zeros(params.K, dtype=v.dtype)
    out[:: params.lambda_B] = v
    return BPoly(out, params)


def abs_contract_l1(a: BPoly) -> int:
    """Weighted 1-norm sum_k |a_k| 2^(k mod lambda_B).

    Every term of a*b lands at most as heavy under p as the product of its
    weights, so ||p(a*b)||_1 <= l1(a) * l1(b) even though p is not
    multiplicative.
    """
    lam = a.params.lambda_B
    cols = np.abs(a.coeffs.astype(object)).reshape(-1, lam)
    return int(sum(int(cols[:, j].sum()) << j for j in range(lam)))


# ---- canonical embedding ----

def _twist(N: int) -> np.ndarray:
    return np.exp(-1j * np.pi * np.arange(N) / N)


def embed(coeffs) -> np.ndarray:
    """a(zeta^j) for j = 2t+1, t = 0..N-1, with zeta = exp(-2 pi i / 2N)."""
    c = np.asarray(coeffs)
    if c.dtype == object:
        c = np.array([float(x) for x in c])
    c = c.astype(np.float64)
    return np.fft.fft(c * _twist(len(c)))


def inverse_embed(values: np.ndarray) -> np.ndarray:
    """Real coefficient vector whose embedding is `values` (all N roots)."""
    N = len(values)
    return np.real(np.fft.ifft(values) * np.conj(_twist(N)))


def canonical_norm(a: RPoly) -> float:
    if a.is_zero():
        return 0.0
    return float(np.max(np.abs(embed(a.coeffs))))


def r_norm(a: BPoly) -> float:
    return canonical_norm(bin_contract(a))
