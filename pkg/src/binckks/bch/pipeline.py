"""Block coding of plaintext bits before encryption and after decryption.

pre_encode: pad the message to h*k_blk bits, extend each block of k_blk
bits with zeros to the code dimension, BCH-encode every block,
concatenate, apply the public permutation and place the nh bits on the
first nh coefficients of a BP element. post_decode reverses the steps.
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from ..errors import CapacityError, DecodeFailure, ParameterError
from ..ring import BPoly, RingParams
from .code import BchCode, bch_decode_blocks, bch_encode

DEFAULT_K_BLOCK = 101


@dataclass(frozen=True, eq=False)
class Permutation:
    size: int
    seed: bytes
    forward: np.ndarray
    inverse: np.ndarray

    def apply(self, bits: np.ndarray) -> np.ndarray:
        """out[j] = bits[forward[j]]."""
        return bits[..., self.forward]

    def undo(self, bits: np.ndarray) -> np.ndarray:
        return bits[..., self.inverse]


class _XofStream:
    """Unbounded SHAKE-256 output consumed in 32-bit words."""

    def __init__(self, seed: bytes, chunk: int = 1 << 16):
        self.seed = seed
        self.chunk = chunk
        self.counter = 0
        self.buf = np.zeros(0, dtype="<u4")
        self.pos = 0

    def _refill(self):
        h = hashlib.shake_256(self.seed + self.counter.to_bytes(8, "little"))
        self.buf = np.frombuffer(h.digest(4 * self.chunk), dtype="<u4")
        self.pos = 0
        self.counter += 1

    def word(self) -> int:
        if self.pos >= len(self.buf):
            self._refill()
        w = int(self.buf[self.pos])
        self.pos += 1
        return w

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection."""
        limit = (1 << 32) - (1 << 32) % bound
        while True:
            w = self.word()
            if w < limit:
                return w % bound


def make_permutation(size: int, seed) -> Permutation:
    """Fisher-Yates shuffle driven by a SHAKE-256 stream of the seed."""
    if size <= 0:
        raise ParameterError("permutation size must be positive")
    seed = bytes.fromhex(seed) if isinstance(seed, str) else bytes(seed)
    xof = _XofStream(b"perm" + seed)
    fwd = list(range(size))
    for i in range(size - 1, 0, -1):
        j = xof.below(i + 1)
        fwd[i], fwd[j] = fwd[j], fwd[i]
    fwd = np.array(fwd, dtype=np.int64)
    inv = np.empty_like(fwd)
    inv[fwd] = np.arange(size)
    return Permutation(size, seed, fwd, inv)


@dataclass(frozen=True)
class PipelineParams:
    M_bits: int
    k_blk: int = DEFAULT_K_BLOCK
    n: int = 127

    @property
    def h_blocks(self) -> int:
        return math.ceil(self.M_bits / self.k_blk)

    @property
    def coded_bits(self) -> int:
        return self.h_blocks * self.n


def _check_layout(code: BchCode, k_blk: int, M_bits: int):
    if not 0 < k_blk <= code.k:
        raise ParameterError(f"block payload {k_blk} must lie in (0, {code.k}]")
    if M_bits <= 0:
        raise ParameterError("message must be non-empty")


def encode_blocks(bits, code: BchCode, k_blk: int = DEFAULT_K_BLOCK) -> np.ndarray:
    """Concatenated codewords (before permutation), length h*n."""
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    _check_layout(code, k_blk, len(bits))
    h = math.ceil(len(bits) / k_blk)
    U = np.zeros((h, code.k), dtype=np.uint8)
    padded = np.zeros(h * k_blk, dtype=np.uint8)
    padded[: len(bits)] = bits
    U[:, :k_blk] = padded.reshape(h, k_blk)
    return bch_encode(code, U).reshape(-1)


def encode_permuted(bits, code: BchCode, perm: Permutation,
                    k_blk: int = DEFAULT_K_BLOCK) -> np.ndarray:
    """Coded and permuted bit string of length h*n."""
    coded = encode_blocks(bits, code, k_blk)
    if perm.size != len(coded):
        raise ParameterError(f"permutation size {perm.size} != coded length {len(coded)}")
    return perm.apply(coded)


def pre_encode(bits, code: BchCode, perm: Permutation, params: RingParams,
               k_blk: int = DEFAULT_K_BLOCK) -> BPoly:
    permuted = encode_permuted(bits, code, perm, k_blk)
    nh = len(permuted)
    if nh > params.K:
        raise CapacityError(f"{nh} coded bits exceed ring dimension K={params.K}")
    out = np.zeros(params.K, dtype=np.int64)
    out[:nh] = permuted
    return BPoly(out, params)


def extract_bits(m: BPoly, nh: int) -> np.ndarray:
    """Nearest of {0, 1} per centered coefficient, ties to 0."""
    v = m.coeffs[:nh]
    if v.dtype == object:
        return np.array([1 if 2 * int(x) > 1 else 0 for x in v], dtype=np.uint8)
    return (v > 0).astype(np.uint8)


def decode_permuted(permuted, code: BchCode, perm: Permutation, M_bits: int,
                    k_blk: int = DEFAULT_K_BLOCK, return_counts: bool = False):
    """Inverse of encode_permuted; raises DecodeFailure on any bad block."""
    _check_layout(code, k_blk, M_bits)
    h = math.ceil(M_bits / k_blk)
    nh = h * code.n
    permuted = np.asarray(permuted, dtype=np.uint8)
    if perm.size != nh or len(permuted) != nh:
        raise ParameterError("layout does not match the encoded message")
    coded = perm.undo(permuted)
    U, counts = bch_decode_blocks(code, coded.reshape(h, code.n))
    pad = U[:, k_blk:]
    if np.any(pad):
        # a block decoded to a different codeword: fail rather than guess
        raise DecodeFailure("padding bits nonzero", block=int(np.flatnonzero(pad.any(axis=1))[0]))
    bits = U[:, :k_blk].reshape(-1)[:M_bits].copy()
    return (bits, counts) if return_counts else bits


def post_decode(m_noisy: BPoly, code: BchCode, perm: Permutation, M_bits: int,
                k_blk: int = DEFAULT_K_BLOCK, return_counts: bool = False):
    _check_layout(code, k_blk, M_bits)
    nh = math.ceil(M_bits / k_blk) * code.n
    if nh > m_noisy.params.K:
        raise ParameterError("layout does not match the encoded message")
    return decode_permuted(extract_bits(m_noisy, nh), code, perm, M_bits, k_blk, return_counts)


def inject_flips(m: BPoly, pattern=None, *, rate: float = None, rng=None, limit: int = None):
    """Flip listed coefficients (v -> 1 - v). Returns (BPoly, flipped indices).

    With rate, each of the first `limit` positions (default K) flips
    independently with that probability.
    """
    K = m.params.K
    limit = K if limit is None else limit
    if pattern is not None and rate is not None:
        raise ParameterError("give either pattern or rate")
    if rate is not None:
        if rng is None:
            raise ParameterError("rate mode needs an rng")
        gen = getattr(rng, "gen", rng)
        idx = np.flatnonzero(gen.random(limit) < rate)
    else:
        idx = np.asarray([] if pattern is None else list(pattern), dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= K):
        raise ParameterError("flip index out of range")
    if len(np.unique(idx)) != len(idx):
        raise ParameterError("duplicate flip index")
    c = m.coeffs.copy()
    c[idx] = 1 - c[idx]
    return BPoly(c, m.params), idx


def flips_per_block(ledger, perm: Permutation, n: int, blocks: int) -> np.ndarray:
    """Flip counts per code block: a flip at BP position j hits codeword bit forward[j]."""
    ledger = np.asarray(ledger, dtype=np.int64)
    ledger = ledger[ledger < perm.size]
    return np.bincount(perm.forward[ledger] // n, minlength=blocks)


@dataclass(frozen=True)
class FailureModel:
    p_bit: float
    lam: float
    pr_block: float
    success: float


def failure_prob(p_coef: float, lambda_B: int, n: int, t: int, blocks: int) -> FailureModel:
    """Poisson estimate of per-block failure and whole-message success."""
    if p_coef <= 0 or lambda_B <= 0 or n <= 0 or t < 0 or blocks <= 0:
        raise ParameterError("all inputs must be positive")
    p_bit = lambda_B * p_coef
    lam = n * p_bit
    pr = lam ** (t + 1) / math.factorial(t + 1)
    success = math.exp(blocks * math.log1p(-pr)) if pr < 1 else 0.0
    return FailureModel(p_bit, lam, pr, success)
