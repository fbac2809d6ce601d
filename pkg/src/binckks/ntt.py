"""Negacyclic number theoretic transform over word-size primes.

Primes are below 2^31 so that a product of two residues fits in int64.
Exact products of arbitrary integer vectors go through several primes
and are recombined with Garner's CRT.
"""

from functools import lru_cache

import numpy as np

PRIME_BITS = 31
# primes congruent to 1 mod 2^20 support every K up to 2^19 with one list
_DEFAULT_ORDER = 1 << 20


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    # deterministic for n < 3.3e24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def ntt_primes(order: int, count: int) -> tuple:
    """Largest `count` primes p < 2^31 with p = 1 mod order (descending)."""
    out = []
    k = ((1 << PRIME_BITS) - 2) // order
    while len(out) < count and k > 0:
        p = k * order + 1
        if _is_prime(p):
            out.append(p)
        k -= 1
    if len(out) < count:
        raise ValueError(f"not enough NTT primes for order {order}")
    return tuple(out)


def primes_for(K: int, count: int) -> tuple:
    order = max(_DEFAULT_ORDER, 2 * K)
    return ntt_primes(order, count)


def _primitive_root_of_unity(order: int, p: int) -> int:
    # order is a power of two; find g with g^(order/2) = -1
    e = (p - 1) // order
    for g in range(2, p):
        w = pow(g, e, p)
        if pow(w, order // 2, p) == p - 1:
            return w
    raise ValueError("no root of unity")


def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


class NttPlan:
    """Precomputed tables for the length-K negacyclic transform mod p."""

    def __init__(self, K: int, p: int):
        if K & (K - 1) or K < 2:
            raise ValueError("K must be a power of two")
        if (p - 1) % (2 * K):
            raise ValueError(f"prime {p} does not support K={K}")
        self.K = K
        self.p = p
        psi = _primitive_root_of_unity(2 * K, p)
        psi_inv = pow(psi, p - 2, p)
        self.psi = self._powers(psi, K)
        self.psi_inv = self._powers(psi_inv, K)
        omega = psi * psi % p
        omega_inv = psi_inv * psi_inv % p
        self.tw = self._stages(omega)
        self.tw_inv = self._stages(omega_inv)
        self.k_inv = pow(K, p - 2, p)
        self.rev = _bitrev(K)

    def _powers(self, w, n):
        out = np.empty(n, dtype=np.int64)
        acc = 1
        for i in range(n):
            out[i] = acc
            acc = acc * w % self.p
        return out

    def _stages(self, omega):
        K, p = self.K, self.p
        full = self._powers(omega, K // 2)
        stages = []
        m = 1
        while m < K:
            stages.append(full[:: K // (2 * m)][:m].copy())
            m *= 2
        return stages

    def _cyclic(self, a, tw):
        p, K = self.p, self.K
        a = a[..., self.rev]
        lead = a.shape[:-1]
        m = 1
        for w in tw:
            a = a.reshape(lead + (K // (2 * m), 2, m))
            u = a[..., 0, :]
            v = a[..., 1, :] * w % p
            a = np.stack(((u + v) % p, (u - v) % p), axis=-2)
            m *= 2
        return a.reshape(lead + (K,))

    def forward(self, a: np.ndarray) -> np.ndarray:
        """Evaluate a (residues in [0, p)) at the odd powers of psi."""
        return self._cyclic(a * self.psi % self.p, self.tw)

    def inverse(self, A: np.ndarray) -> np.ndarray:
        a = self._cyclic(A, self.tw_inv)
        return a * self.k_inv % self.p * self.psi_inv % self.p


@lru_cache(maxsize=64)
def plan(K: int, p: int) -> NttPlan:
    return NttPlan(K, p)


def _residues(a: np.ndarray, p: int) -> np.ndarray:
    if a.dtype == object:
        return (a % p).astype(np.int64)
    return a % p


def negacyclic_mul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product in Z_p[x]/(x^K+1); output residues in [0, p)."""
    pl = plan(len(a), p)
    A = pl.forward(_residues(a, p))
    B = pl.forward(_residues(b, p))
    return pl.inverse(A * B % p)


def _norms(a: np.ndarray):
    if a.dtype == object:
        absa = [abs(int(x)) for x in a]
        return sum(absa), max(absa, default=0)
    absa = np.abs(a)
    return int(absa.sum(dtype=object)), int(absa.max(initial=0))


def product_bound(a: np.ndarray, b: np.ndarray) -> int:
    """Upper bound on any coefficient of the negacyclic product."""
    a1, ainf = _norms(a)
    b1, binf = _norms(b)
    return min(a1 * binf, ainf * b1)


def _garner(res: list, primes: tuple) -> np.ndarray:
    """Recombine residues into centered integers modulo prod(primes)."""
    t = len(primes)
    v = [res[0]]
    for i in range(1, t):
        p = primes[i]
        acc = np.zeros_like(res[i])
        coef = 1
        for j in range(i):
            acc = (acc + v[j] * coef) % p
            coef = coef * primes[j] % p
        inv = pow(coef, p - 2, p)
        v.append((res[i] - acc) % p * inv % p)
    modulus = 1
    for p in primes:
        modulus *= p
    half = modulus // 2
    if modulus < (1 << 62):
        x = np.zeros_like(v[0])
        scale = 1
        for j in range(t):
            x = x + v[j] * scale
            scale *= primes[j]
        return np.where(x > half, x - modulus, x)
    x = v[t - 1].astype(object)
    for j in range(t - 2, -1, -1):
        x = x * primes[j] + v[j].astype(object)
    return np.where(x > half, x - modulus, x)


def negacyclic_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer negacyclic product, int64 when it fits, else object."""
    K = len(a)
    bound = product_bound(a, b)
    if bound == 0:
        return np.zeros(K, dtype=np.int64)
    need = 2 * bound + 1
    count = 1
    while True:
        primes = primes_for(K, count)
        prod = 1
        for p in primes:
            prod *= p
        if prod > need:
            break
        count += 1
    res = [negacyclic_mul_mod(a, b, p) for p in primes]
    out = _garner(res, primes)
    if out.dtype == object and bound < (1 << 62):
        out = out.astype(np.int64)
    return out
