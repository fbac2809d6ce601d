"""Closed-form noise bounds, comparison formulas and the memory model.

Everything is evaluated in float64. Its range (2^1023) covers every bound
the tracker meets; overflowing iterations saturate to inf.
"""

import math
from dataclasses import dataclass, replace

from .errors import ParameterError


@dataclass(frozen=True)
class NoiseParams:
    sigma: float = 3.19
    h: int = 192
    N: int = 8192
    delta: float = 2.0 ** 40
    B: float = 2.0 ** 40
    B_star: float = 2.0 ** 39
    B_max: float = 2.0 ** 39
    P: float = 2.0 ** 60
    q_ell: float = 2.0 ** 200
    lambda_B: int = 32

    def with_(self, **kw) -> "NoiseParams":
        return replace(self, **kw)

    @property
    def K(self) -> int:
        return self.N * self.lambda_B


def seal_like() -> NoiseParams:
    """Reference point used for the binary vs standard comparison."""
    return NoiseParams(sigma=3.19, h=192, N=8192, delta=2.0 ** 40, B=2.0 ** 40,
                       B_star=2.0 ** 39, B_max=2.0 ** 39, P=2.0 ** 60, q_ell=2.0 ** 200)


def b_enc(p: NoiseParams, sigma: float = None) -> float:
    s = p.sigma if sigma is None else sigma
    N, h = p.N, p.h
    return 8 * math.sqrt(2) * s * N + 6 * s * math.sqrt(N) + 16 * s * math.sqrt(h * N)


def b_flood(p: NoiseParams, tau: float) -> float:
    """Fresh-encryption shape with the e-terms widened to tau."""
    N, h = p.N, p.h
    return 8 * math.sqrt(2) * p.sigma * N + 6 * tau * math.sqrt(N) + 16 * tau * math.sqrt(h * N)


def b_ecd(p: NoiseParams) -> float:
    if p.delta <= 0:
        raise ParameterError("delta must be positive")
    return math.sqrt(p.N) / (2 * p.delta)


def b_ecd_worst(p: NoiseParams) -> float:
    """Rigorous rounding bound: every coefficient contributes at most 1/2."""
    return p.N / (2 * p.delta)


def b_mult_bin(B1: float, B2: float, p: NoiseParams, use_K: bool = False) -> float:
    h, B = p.h, p.B
    dim = p.K if use_K else p.N
    return B1 * B2 + (B1 + B2) * (B + h) + h * B1 * B2 + h * (B1 + B2) + 6 * p.sigma * dim


def b_mult_std(nu1: float, nu2: float, B1: float, B2: float, p: NoiseParams) -> float:
    return nu1 * B2 + nu2 * B1 + B1 * B2 + _std_residual(p)


def b_add(B1: float, B2: float) -> float:
    return B1 + B2


def prop1_threshold(p: NoiseParams, benc: float = None) -> float:
    """Right-hand side of delta > 4h + h*B_enc + 6 sigma N / B_enc."""
    benc = b_enc(p) if benc is None else benc
    if benc == 0:
        return 0.0 if p.sigma == 0 or p.N == 0 else math.inf
    return 4 * p.h + p.h * benc + 6 * p.sigma * p.N / benc


def prop1_holds(p: NoiseParams, benc: float = None) -> bool:
    return p.delta > prop1_threshold(p, benc)


def _std_residual(p: NoiseParams) -> float:
    return p.q_ell / p.P * 8 * p.sigma * p.N / math.sqrt(3) + p.N + 8 / 3 * math.sqrt(p.h)


def threshold_gap(p: NoiseParams, benc: float = None) -> float:
    """b_mult_std - b_mult_bin for fresh inputs, nu = delta, B = delta/2."""
    benc = b_enc(p) if benc is None else benc
    q = p.with_(B=p.delta / 2)
    return b_mult_std(p.delta, p.delta, benc, benc, q) - b_mult_bin(benc, benc, q)


def prop1_exact_threshold(p: NoiseParams, benc: float = None) -> float:
    """Smallest delta at which the binary bound drops below the standard one.

    Differs from prop1_threshold by the positive std-only residual, so
    prop1_holds is sufficient but not necessary.
    """
    benc = b_enc(p) if benc is None else benc
    return 4 * p.h + p.h * benc + (6 * p.sigma * p.N - _std_residual(p)) / benc


def phi(B: float, p: NoiseParams) -> float:
    """One squaring step: (1+h)B^2 + (2B_coef + 4h)B + 6 sigma N."""
    h = p.h
    return (1 + h) * B * B + (2 * p.B + 4 * h) * B + 6 * p.sigma * p.N


def phi_square_update(Bprev: float, p: NoiseParams) -> float:
    return phi(Bprev, p)


def phi_iterate(B0: float, i: int, p: NoiseParams) -> float:
    B = B0
    for _ in range(i):
        B = phi(B, p)
    return B


def relative_error(B: float, delta: float) -> float:
    return B / delta


def series_bound(coeffs, p: NoiseParams, benc: float = None) -> float:
    """min(sum |a_j| * B_enc, B*) for the every-squaring-refreshes schedule."""
    benc = b_enc(p) if benc is None else benc
    return min(sum(abs(a) for a in coeffs) * benc, p.B_star)


@dataclass(frozen=True)
class MemoryFootprint:
    ct_ckks: int
    ct_bin: int
    evk_ckks: int
    evk_bin: int

    def megabytes(self) -> dict:
        return {k: v / 2 ** 20 for k, v in self.__dict__.items()}


def memory_model(N: int, lambda_B: int) -> MemoryFootprint:
    """Byte counts: 30-byte RNS words for CKKS, 8 bytes per BP coefficient."""
    if N <= 0 or lambda_B <= 0:
        raise ParameterError("N and lambda_B must be positive")
    M = N * lambda_B
    return MemoryFootprint(2 * N * 30, 2 * M * 8, 4 * N * 30, 4 * M * 8)
