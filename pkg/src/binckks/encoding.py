"""Encoding of complex slot vectors into BP via the canonical embedding.

Slots are the evaluations at zeta^j for j = 1 (mod 4), zeta = exp(-2 pi i/2N),
ordered by increasing j. The conjugate roots carry the conjugate values,
so the underlying polynomial has real coefficients.
"""

import math
from fractions import Fraction

import numpy as np

from .errors import CoefficientOverflow, ParameterError
from .ring import (BPoly, RingParams, RPoly, bin_contract, bin_expand,
                   embed, embed_layer0, inverse_embed, normalize)

__all__ = ["encode", "decode", "encode_constant", "slots_to_coeffs",
           "coeffs_to_slots", "round_half_up", "bin_expand", "bin_contract"]


def round_half_up(x):
    return np.floor(np.asarray(x) + 0.5)


def _full_spectrum(z: np.ndarray) -> np.ndarray:
    N = 2 * len(z)
    vals = np.empty(N, dtype=np.complex128)
    vals[0::2] = z
    # root j = 4u+1 pairs with -j, which sits at fft index N-1-2u
    vals[N - 1 - 2 * np.arange(N // 2)] = np.conj(z)
    return vals


def slots_to_coeffs(z) -> np.ndarray:
    """Real coefficient vector (unrounded) whose slots are z."""
    z = np.asarray(z, dtype=np.complex128)
    return inverse_embed(_full_spectrum(z))


def coeffs_to_slots(coeffs) -> np.ndarray:
    return embed(coeffs)[0::2]


def _check_slots(z, params: RingParams) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    if len(z) != params.N // 2:
        raise ParameterError(f"need {params.N // 2} slots, got {len(z)}")
    if not np.all(np.isfinite(z)):
        raise ParameterError("slots must be finite")
    return z


def encode_rpoly(z, delta: float, params: RingParams) -> RPoly:
    """Rounded integer polynomial Delta * pi^{-1}(z), before binarization."""
    z = _check_slots(z, params)
    if delta < 1:
        raise ParameterError("delta must be >= 1")
    c = round_half_up(slots_to_coeffs(z * delta))
    if np.max(np.abs(c), initial=0.0) >= 2.0 ** 62:
        i = int(np.argmax(np.abs(c)))
        raise CoefficientOverflow(params.B, i)
    return RPoly(c.astype(np.int64), params, reduce=False)


def encode(z, delta: float, params: RingParams) -> BPoly:
    """Scale, round in the coefficient domain, then binary-expand."""
    return bin_expand(encode_rpoly(z, delta, params))


def decode(m: BPoly, delta: float, params: RingParams = None, exact: bool = True) -> np.ndarray:
    """Contract, evaluate at the slot roots, divide by delta.

    exact=True rounds each slot to the nearest Gaussian integer.
    """
    params = params or m.params
    if m.params.K != params.K:
        raise ParameterError("dimension mismatch")
    vals = coeffs_to_slots(bin_contract(m).coeffs) / float(delta)
    if exact:
        return round_half_up(vals.real) + 1j * round_half_up(vals.imag)
    return vals


def encode_constant(value, scale, params: RingParams) -> BPoly:
    """Constant round(value*scale) placed at x^0.

    Not binary-expanded: the constant lives in the bit-0 layer, where
    multiplication commutes with the contraction map, so arbitrarily large
    scales are allowed. A real constant c occupies every slot as c*scale.
    """
    v = complex(value)
    if v.imag != 0:
        raise ParameterError("encode_constant takes real values")
    if not math.isfinite(v.real):
        raise ParameterError("constant must be finite")
    c = Fraction(v.real) * Fraction(scale)
    k = math.floor(c + Fraction(1, 2))
    vec = np.zeros(params.N, dtype=object)
    vec[0] = k
    return embed_layer0(normalize(vec), params)
