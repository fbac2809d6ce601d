"""The binary-ring CKKS cryptosystem: keys, encryption, homomorphic ops, refresh.

Masks (v), public randomness (a, a0) and the secret live in the bit-0
layer of BP, i.e. on the positions x^{i*lambda_B}. Multiplying by a layer-0
element commutes with the contraction map p, so all key and encryption
noise contracts to the same polynomial it would be in R.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from .errors import KeyMaterialError, ParameterError
from .encoding import decode
from .noise import NoiseParams, b_enc, b_flood, b_mult_bin
from .ring import (BPoly, RingParams, abs_contract_l1, embed_layer0,
                   monomial_shift, r_norm)
from .sampling import (RngHandle, binarize, binarize_wide, sample_binary,
                       sample_dg, sample_hwt, sample_zo)

ZO_RHO = 0.5


@dataclass(frozen=True)
class SecretKey:
    s: BPoly
    h: int
    # key-generation errors, kept only so the key relations can be audited
    pk_error: Optional[BPoly] = field(default=None, repr=False, compare=False)
    evk_error: Optional[BPoly] = field(default=None, repr=False, compare=False)

    @property
    def params(self) -> RingParams:
        return self.s.params


@dataclass(frozen=True)
class PublicKey:
    b: BPoly
    a: BPoly
    h: int
    sigma: float

    @property
    def params(self) -> RingParams:
        return self.b.params


@dataclass(frozen=True)
class EvalKey:
    b0: BPoly
    a0: BPoly
    h: int
    sigma: float

    @property
    def params(self) -> RingParams:
        return self.b0.params


@dataclass(frozen=True)
class Ciphertext:
    c0: BPoly
    c1: BPoly
    noise_bound: float
    scale: float = 1.0
    # bound following the textbook rule (reset to B_enc on refresh)
    nominal_bound: Optional[float] = None

    def __post_init__(self):
        if self.c0.params != self.c1.params:
            raise ParameterError("ciphertext components disagree on params")
        if self.nominal_bound is None:
            object.__setattr__(self, "nominal_bound", self.noise_bound)

    @property
    def params(self) -> RingParams:
        return self.c0.params


@dataclass(frozen=True)
class RefreshKey:
    """Encryptions of every R-coefficient s_k of the secret.

    Entry k sits at BP position k*lambda_B; the binarized ternary secret is
    zero on every other position, so those entries would encrypt zero.
    """

    entries: Tuple[Ciphertext, ...]
    tau: float
    kappa: int
    # weighted 1-norm bound of the aggregated key noise (see refresh)
    noise_l1: int = 0
    agg0: Optional[BPoly] = field(default=None, repr=False, compare=False)
    agg1: Optional[BPoly] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.agg0 is None and self.entries:
            a0, a1 = aggregate_refresh_key(self.entries)
            object.__setattr__(self, "agg0", a0)
            object.__setattr__(self, "agg1", a1)

    @property
    def params(self) -> RingParams:
        return self.entries[0].params


@dataclass(frozen=True)
class KeySet:
    sk: SecretKey
    pk: PublicKey
    evk: EvalKey
    rk: Optional[RefreshKey]
    tau: float

    def __iter__(self):
        return iter((self.sk, self.pk, self.evk, self.rk, self.tau))


def noise_params(params: RingParams, h: int, sigma: float, **kw) -> NoiseParams:
    return NoiseParams(sigma=sigma, h=h, N=params.N, B=float(params.B),
                       lambda_B=params.lambda_B, **kw)


def _layer0(vec, params):
    return embed_layer0(vec, params)


def aggregate_refresh_key(entries) -> Tuple[BPoly, BPoly]:
    """sum_k x^{k*lambda_B} * rk[k], componentwise."""
    params = entries[0].params
    lam = params.lambda_B
    acc0 = BPoly.zero(params)
    acc1 = BPoly.zero(params)
    for k, ct in enumerate(entries):
        acc0 = acc0 + monomial_shift(ct.c0, k * lam)
        acc1 = acc1 + monomial_shift(ct.c1, k * lam)
    return acc0, acc1


def _pow2_ceil(x: int) -> int:
    return 0 if x <= 0 else 1 << (int(x) - 1).bit_length()


def keygen(params: RingParams, h: int, sigma: float, kappa: int, B_max: float,
           rng: RngHandle, with_refresh_key: bool = True,
           noiseless_refresh_key: bool = False) -> KeySet:
    N = params.N
    if h > N:
        raise ParameterError(f"h={h} exceeds N={N}")
    if kappa < 0:
        raise ParameterError("kappa must be non-negative")
    s_vec = sample_hwt(h, N, rng.stream(1))
    s = binarize(s_vec, params)
    a = _layer0(sample_binary(N, rng.stream(2)), params)
    e = binarize(sample_dg(sigma, N, rng.stream(3)), params)
    b = e - a * s
    a0 = _layer0(sample_binary(N, rng.stream(4)), params)
    e0 = binarize(sample_dg(sigma, N, rng.stream(5)), params)
    b0 = e0 + s * s - a0 * s
    sk = SecretKey(s, h, pk_error=e, evk_error=e0)
    pk = PublicKey(b, a, h, sigma)
    evk = EvalKey(b0, a0, h, sigma)
    tau = float(2 ** kappa) * B_max
    rk = None
    if with_refresh_key:
        rk = make_refresh_key(sk, pk, s_vec, tau, kappa, rng.stream(6), noiseless_refresh_key)
    return KeySet(sk, pk, evk, rk, tau)


def make_refresh_key(sk: SecretKey, pk: PublicKey, s_vec, tau: float, kappa: int,
                     rng: RngHandle, noiseless: bool = False) -> RefreshKey:
    params = pk.params
    entries = []
    for k, sk_coef in enumerate(np.asarray(s_vec)):
        m = BPoly.monomial(params, 0, int(sk_coef))
        entries.append(encrypt(pk, m, rng.stream(k), noiseless=noiseless))
    entries = tuple(entries)
    agg0, agg1 = aggregate_refresh_key(entries)
    # noise of the aggregate is Dec(agg) - s
    n_agg = agg0 + agg1 * sk.s - sk.s
    return RefreshKey(entries, tau, kappa, _pow2_ceil(abs_contract_l1(n_agg)), agg0, agg1)


def encrypt(pk: PublicKey, m: BPoly, rng: RngHandle, *, scale: float = 1.0,
            sigma: float = None, noiseless: bool = False) -> Ciphertext:
    """c = v*pk + (m + e0, e1)."""
    params = pk.params
    if m.params != params:
        raise ParameterError("plaintext params differ from key params")
    if noiseless:
        return Ciphertext(m, BPoly.zero(params), 0.0, scale)
    sigma = pk.sigma if sigma is None else sigma
    N = params.N
    v = _layer0(sample_zo(ZO_RHO, N, rng.stream(1)), params)
    e0 = binarize(sample_dg(sigma, N, rng.stream(2)), params)
    e1 = binarize(sample_dg(sigma, N, rng.stream(3)), params)
    c0 = v * pk.b + m + e0
    c1 = v * pk.a + e1
    bound = b_enc(noise_params(params, pk.h, sigma))
    return Ciphertext(c0, c1, bound, scale)


def decrypt_raw(sk: SecretKey, c: Ciphertext) -> BPoly:
    """b + a*s, i.e. m + e with no rounding."""
    if c.params != sk.params:
        raise ParameterError("ciphertext params differ from key params")
    return c.c0 + c.c1 * sk.s


def decrypt(sk: SecretKey, c: Ciphertext, exact: bool = True) -> np.ndarray:
    return decode(decrypt_raw(sk, c), c.scale, exact=exact)


def _same_shape(c1: Ciphertext, c2: Ciphertext):
    if c1.params != c2.params:
        raise ParameterError("ciphertext params mismatch")


def _same_scale(c1: Ciphertext, c2: Ciphertext):
    if not math.isclose(c1.scale, c2.scale, rel_tol=1e-12):
        raise ParameterError(f"scale mismatch: {c1.scale} vs {c2.scale}")


def add(c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    _same_shape(c1, c2)
    _same_scale(c1, c2)
    return Ciphertext(c1.c0 + c2.c0, c1.c1 + c2.c1, c1.noise_bound + c2.noise_bound,
                      c1.scale, c1.nominal_bound + c2.nominal_bound)


def sub(c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    _same_shape(c1, c2)
    _same_scale(c1, c2)
    return Ciphertext(c1.c0 - c2.c0, c1.c1 - c2.c1, c1.noise_bound + c2.noise_bound,
                      c1.scale, c1.nominal_bound + c2.nominal_bound)


def mult_bound(evk: EvalKey, B1: float, B2: float) -> float:
    return b_mult_bin(B1, B2, noise_params(evk.params, evk.h, evk.sigma))


def mult(evk: EvalKey, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    """Tensor, then relinearize d2 with the evaluation key. Scales multiply."""
    _same_shape(c1, c2)
    if evk.params != c1.params:
        raise ParameterError("evaluation key params mismatch")
    d0 = c1.c0 * c2.c0
    d1 = c1.c1 * c2.c0 + c2.c1 * c1.c0
    d2 = c1.c1 * c2.c1
    out0 = d0 + d2 * evk.b0
    out1 = d1 + d2 * evk.a0
    return Ciphertext(out0, out1, mult_bound(evk, c1.noise_bound, c2.noise_bound),
                      c1.scale * c2.scale,
                      mult_bound(evk, c1.nominal_bound, c2.nominal_bound))


def add_const(c: Ciphertext, a: BPoly) -> Ciphertext:
    return replace(c, c0=c.c0 + a)


def mul_const(c: Ciphertext, a: BPoly, scale: float = 1.0) -> Ciphertext:
    """(a*c0, a*c1); bound grows by r_norm(a)."""
    factor = r_norm(a)
    return Ciphertext(a * c.c0, a * c.c1, factor * c.noise_bound, c.scale * scale,
                      factor * c.nominal_bound)


def thresh(B_max: float, B0: float) -> bool:
    return B0 > B_max


def refresh(c: Ciphertext, rk: RefreshKey, pk: PublicKey, rng: RngHandle, *,
            tau: float = None, flood: bool = True, method: str = "aggregate") -> Ciphertext:
    """Homomorphically re-encrypt b + a*s, then flood with DG(tau^2) noise.

    t = (b, 0) + sum_k (a * x^{k*lambda_B}) * rk[k]. The aggregate method
    precomputes sum_k x^{k*lambda_B} * rk[k] and needs two products; the
    loop method evaluates the sum term by term.
    """
    params = c.params
    if rk is None or len(rk.entries) != params.N or rk.params != params:
        raise KeyMaterialError("refresh key does not cover the secret")
    tau = rk.tau if tau is None else tau
    if method == "aggregate":
        t0 = c.c0 + c.c1 * rk.agg0
        t1 = c.c1 * rk.agg1
    elif method == "loop":
        lam = params.lambda_B
        t0, t1 = c.c0, BPoly.zero(params)
        for k, ct in enumerate(rk.entries):
            rot = monomial_shift(c.c1, k * lam)
            t0 = t0 + rot * ct.c0
            t1 = t1 + rot * ct.c1
    else:
        raise ParameterError(f"unknown refresh method {method!r}")
    # Dec(t) = Dec(c) + a * (aggregate key noise); ||p(a*n)|| <= l1(a) l1(n)
    bound = c.noise_bound + float(abs_contract_l1(c.c1)) * rk.noise_l1
    npar = noise_params(params, pk.h, pk.sigma)
    if flood:
        N = params.N
        v = _layer0(sample_zo(ZO_RHO, N, rng.stream(1)), params)
        f0 = binarize_wide(sample_dg(tau, N, rng.stream(2)), params)
        f1 = binarize_wide(sample_dg(tau, N, rng.stream(3)), params)
        t0 = t0 + f0 + v * pk.b
        t1 = t1 + f1 + v * pk.a
        bound += b_flood(npar, tau)
    return Ciphertext(t0, t1, bound, c.scale, b_enc(npar))
