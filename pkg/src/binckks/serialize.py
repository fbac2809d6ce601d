"""Binary artifact files for keys, ciphertexts and code descriptors.

Layout (all integers little-endian):
    b"BCKS" | u16 version | u8 kind | 32-byte params digest
    | u64 meta length | JSON meta | u64 poly count
    | per poly: u64 coefficient count, u32 byte width, signed coefficients
"""

import hashlib
import io
import json
import os
import struct
import tempfile

import numpy as np

from .bch.code import BchCode, build_code
from .bch.pipeline import Permutation, make_permutation
from .errors import DigestMismatch, ParameterError
from .ring import BPoly, RingParams, max_abs
from .scheme import Ciphertext, EvalKey, PublicKey, RefreshKey, SecretKey

MAGIC = b"BCKS"
VERSION = 1
KINDS = {"sk": 1, "pk": 2, "evk": 3, "rk": 4, "ct": 5, "code": 6}
_KIND_NAMES = {v: k for k, v in KINDS.items()}


class CodeDescriptor:
    """BCH code plus the public permutation and block layout."""

    def __init__(self, code: BchCode, perm: Permutation, k_blk: int, M_bits: int):
        self.code = code
        self.perm = perm
        self.k_blk = k_blk
        self.M_bits = M_bits

    def meta(self) -> dict:
        return {"m": self.code.m, "primitive_poly": self.code.gf.primitive_poly,
                "t": self.code.t, "g": self.code.g, "perm_seed": self.perm.seed.hex(),
                "perm_size": self.perm.size, "k_blk": self.k_blk, "M_bits": self.M_bits}

    def digest(self) -> bytes:
        return hashlib.sha256(json.dumps(self.meta(), sort_keys=True).encode()).digest()


def _params_meta(p: RingParams) -> dict:
    return {"N": p.N, "lambda_B": p.lambda_B, "modulus": p.modulus}


def _params_from(meta: dict) -> RingParams:
    return RingParams(meta["N"], meta["lambda_B"], meta["modulus"])


def _write_poly(buf, arr):
    if arr is None:
        buf.write(struct.pack("<QI", 0, 0))
        return
    n = len(arr)
    if arr.dtype != object:
        buf.write(struct.pack("<QI", n, 8))
        buf.write(np.asarray(arr, dtype="<i8").tobytes())
        return
    width = max(9, (max_abs(arr).bit_length() + 8) // 8)
    buf.write(struct.pack("<QI", n, width))
    for x in arr:
        buf.write(int(x).to_bytes(width, "little", signed=True))


def _read_poly(buf):
    n, width = struct.unpack("<QI", _read(buf, 12))
    if n == 0 and width == 0:
        return None
    raw = _read(buf, n * width)
    if width == 8:
        return np.frombuffer(raw, dtype="<i8").astype(np.int64)
    vals = [int.from_bytes(raw[i * width:(i + 1) * width], "little", signed=True) for i in range(n)]
    return np.array(vals, dtype=object)


def _read(buf, n):
    data = buf.read(n)
    if len(data) != n:
        raise ParameterError("truncated artifact")
    return data


def _pack(kind: str, digest: bytes, meta: dict, polys: list) -> bytes:
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<HB", VERSION, KINDS[kind]))
    buf.write(digest)
    mb = json.dumps(meta, sort_keys=True).encode()
    buf.write(struct.pack("<Q", len(mb)))
    buf.write(mb)
    buf.write(struct.pack("<Q", len(polys)))
    for p in polys:
        _write_poly(buf, None if p is None else p.coeffs)
    return buf.getvalue()


def _ct_meta(c: Ciphertext) -> dict:
    return {"noise_bound": c.noise_bound, "scale": c.scale, "nominal_bound": c.nominal_bound}


def dumps(obj) -> bytes:
    if isinstance(obj, CodeDescriptor):
        return _pack("code", obj.digest(), obj.meta(), [])
    params = obj.params
    meta = {"params": _params_meta(params)}
    if isinstance(obj, SecretKey):
        meta["h"] = obj.h
        return _pack("sk", params.digest(), meta, [obj.s, obj.pk_error, obj.evk_error])
    if isinstance(obj, PublicKey):
        meta.update(h=obj.h, sigma=obj.sigma)
        return _pack("pk", params.digest(), meta, [obj.b, obj.a])
    if isinstance(obj, EvalKey):
        meta.update(h=obj.h, sigma=obj.sigma)
        return _pack("evk", params.digest(), meta, [obj.b0, obj.a0])
    if isinstance(obj, Ciphertext):
        meta.update(_ct_meta(obj))
        return _pack("ct", params.digest(), meta, [obj.c0, obj.c1])
    if isinstance(obj, RefreshKey):
        meta.update(tau=obj.tau, kappa=obj.kappa, noise_l1=obj.noise_l1,
                    entries=[_ct_meta(c) for c in obj.entries])
        polys = [obj.agg0, obj.agg1]
        for c in obj.entries:
            polys += [c.c0, c.c1]
        return _pack("rk", params.digest(), meta, polys)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def loads(data: bytes, expected_params: RingParams = None, expected_kind: str = None):
    buf = io.BytesIO(data)
    if _read(buf, 4) != MAGIC:
        raise ParameterError("not a BCKS artifact")
    version, kind_tag = struct.unpack("<HB", _read(buf, 3))
    if version != VERSION:
        raise ParameterError(f"unsupported format version {version}")
    kind = _KIND_NAMES.get(kind_tag)
    if kind is None:
        raise ParameterError(f"unknown artifact kind {kind_tag}")
    if expected_kind and kind != expected_kind:
        raise ParameterError(f"expected a {expected_kind} artifact, found {kind}")
    digest = _read(buf, 32)
    (mlen,) = struct.unpack("<Q", _read(buf, 8))
    meta = json.loads(_read(buf, mlen))
    (count,) = struct.unpack("<Q", _read(buf, 8))
    raw = [_read_poly(buf) for _ in range(count)]
    if buf.read(1):
        raise ParameterError("trailing bytes in artifact")

    if kind == "code":
        code = build_code(meta["m"], meta["t"], meta["primitive_poly"])
        if code.g != meta["g"]:
            raise ParameterError("generator polynomial does not match its descriptor")
        perm = make_permutation(meta["perm_size"], bytes.fromhex(meta["perm_seed"]))
        desc = CodeDescriptor(code, perm, meta["k_blk"], meta["M_bits"])
        if desc.digest() != digest:
            raise DigestMismatch("code descriptor digest mismatch")
        return desc

    params = _params_from(meta["params"])
    if params.digest() != digest:
        raise DigestMismatch("embedded params do not match digest")
    if expected_params is not None and expected_params.digest() != digest:
        raise DigestMismatch("artifact belongs to a different parameter set")
    polys = [None if r is None else BPoly(r, params, reduce=False) for r in raw]

    if kind == "sk":
        return SecretKey(polys[0], meta["h"], polys[1], polys[2])
    if kind == "pk":
        return PublicKey(polys[0], polys[1], meta["h"], meta["sigma"])
    if kind == "evk":
        return EvalKey(polys[0], polys[1], meta["h"], meta["sigma"])
    if kind == "ct":
        return Ciphertext(polys[0], polys[1], meta["noise_bound"], meta["scale"], meta["nominal_bound"])
    entries = tuple(
        Ciphertext(polys[2 + 2 * i], polys[3 + 2 * i], m["noise_bound"], m["scale"], m["nominal_bound"])
        for i, m in enumerate(meta["entries"]))
    return RefreshKey(entries, meta["tau"], meta["kappa"], meta["noise_l1"], polys[0], polys[1])


def save(path, obj):
    """Write atomically: temp file in the target directory, then rename."""
    data = dumps(obj)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".bcks-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path, expected_params: RingParams = None, expected_kind: str = None):
    with open(path, "rb") as f:
        return loads(f.read(), expected_params, expected_kind)
