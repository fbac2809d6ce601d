"""Seeded samplers for secrets, errors and encryption masks."""

import hashlib
import math

import numpy as np

from .errors import ParameterError
from .ring import BPoly, RingParams, normalize, signed_digits

TAIL_CUT = 6.0


class RngHandle:
    """Deterministic generator keyed by a 32-byte seed and a stream id.

    Identical (seed, stream_id) pairs replay identical sample sequences.
    Child streams are derived with `stream`, so independent consumers
    never share state.
    """

    def __init__(self, seed=b"\x00" * 32, stream_id=0):
        self.seed = _seed_bytes(seed)
        self.stream_id = tuple(stream_id) if isinstance(stream_id, (tuple, list)) else (int(stream_id),)
        entropy = int.from_bytes(self.seed, "little")
        ss = np.random.SeedSequence(entropy, spawn_key=self.stream_id)
        self.gen = np.random.Generator(np.random.PCG64(ss))

    @classmethod
    def from_hex(cls, text: str, stream_id=0):
        return cls(bytes.fromhex(text), stream_id)

    def stream(self, k: int) -> "RngHandle":
        return RngHandle(self.seed, self.stream_id + (int(k),))

    def __repr__(self):
        return f"RngHandle(seed={self.seed.hex()[:16]}..., stream={self.stream_id})"


def _seed_bytes(seed) -> bytes:
    if isinstance(seed, RngHandle):
        return seed.seed
    if isinstance(seed, int):
        if seed < 0:
            raise ParameterError("seed must be non-negative")
        return seed.to_bytes(32, "little") if seed < (1 << 256) else hashlib.sha256(str(seed).encode()).digest()
    if isinstance(seed, str):
        seed = bytes.fromhex(seed)
    seed = bytes(seed)
    if len(seed) == 32:
        return seed
    # shorter or longer seeds are hashed down to 32 bytes
    return hashlib.sha256(seed).digest()


def sample_hwt(h: int, dim: int, rng: RngHandle) -> np.ndarray:
    """Exactly h entries of +-1 at uniformly random distinct positions."""
    if h <= 0 or h > dim:
        raise ParameterError(f"need 0 < h <= dim, got h={h}, dim={dim}")
    out = np.zeros(dim, dtype=np.int64)
    pos = rng.gen.choice(dim, size=h, replace=False)
    out[pos] = rng.gen.choice(np.array([-1, 1]), size=h)
    return out


def sample_dg(sigma: float, dim: int, rng: RngHandle) -> np.ndarray:
    """Rounded continuous Gaussian, tails clipped at 6 sigma."""
    if sigma < 0:
        raise ParameterError("sigma must be non-negative")
    x = rng.gen.normal(0.0, 1.0, dim) * sigma
    cut = math.ceil(TAIL_CUT * sigma)
    x = np.clip(np.floor(x + 0.5), -cut, cut)
    if cut < (1 << 62):
        return x.astype(np.int64)
    return normalize(np.array([int(v) for v in x], dtype=object))


def sample_zo(rho: float, dim: int, rng: RngHandle) -> np.ndarray:
    """0 with probability 1-rho, +-1 with probability rho/2 each."""
    if not 0 < rho <= 1:
        raise ParameterError(f"rho must lie in (0, 1], got {rho}")
    u = rng.gen.random(dim)
    out = np.zeros(dim, dtype=np.int64)
    out[u < rho / 2] = -1
    out[(u >= rho / 2) & (u < rho)] = 1
    return out


def sample_binary(dim: int, rng: RngHandle) -> np.ndarray:
    return rng.gen.integers(0, 2, dim, dtype=np.int64)


def binarize(v, params: RingParams) -> BPoly:
    """Signed bit decomposition of an R-layout vector into BP."""
    v = np.asarray(v)
    if len(v) != params.N:
        raise ParameterError(f"need {params.N} entries, got {len(v)}")
    return BPoly(signed_digits(v, params.lambda_B).reshape(-1), params)


def binarize_wide(v, params: RingParams) -> BPoly:
    """Like binarize, but magnitudes above 2^lambda_B stay in the top digit.

    Used for flooding noise, which can exceed the plaintext bound; the
    result still contracts back to v exactly.
    """
    lam = params.lambda_B
    v = normalize(np.asarray(v))
    lo_mask = (1 << (lam - 1)) - 1
    vo = v.astype(object)
    mag = np.abs(vo)
    sign = np.sign(vo)
    low = (mag & lo_mask)
    top = (mag >> (lam - 1))
    low_digits = signed_digits(normalize(sign * low), lam - 1)
    out = np.zeros((len(v), lam), dtype=object)
    out[:, : lam - 1] = low_digits
    out[:, lam - 1] = sign * top
    return BPoly(out.reshape(-1), params)
