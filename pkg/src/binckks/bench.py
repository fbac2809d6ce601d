"""Timing harness for scheme operations and the BCH layer.

Plaintexts for the scheme timings are random binary BP elements; the
cost of every operation depends on the ring size, not on the message.
"""

import csv
import io
import math
import statistics
import time
from dataclasses import asdict, dataclass
from typing import Callable, List

import numpy as np

from .bch.code import bch_decode_blocks, build_code
from .bch.pipeline import DEFAULT_K_BLOCK, encode_blocks, make_permutation
from .errors import ParameterError
from .presets import ParamPreset
from .ring import BPoly
from .sampling import RngHandle
from .scheme import add, decrypt_raw, encrypt, keygen, mult

SCHEME_OPS = ("keygen", "encrypt", "decrypt", "add", "mult")
BCH_STAGES = ("enc", "perm", "inv-perm", "dec")


@dataclass
class BenchRow:
    preset: str
    op: str
    trials: int
    median_ms: float
    mean_ms: float
    stdev_ms: float


def _time(fn: Callable, trials: int) -> List[float]:
    out = []
    for _ in range(trials):
        t0 = time.perf_counter()
        fn()
        out.append((time.perf_counter() - t0) * 1e3)
    return out


def _row(preset, op, samples) -> BenchRow:
    sd = statistics.stdev(samples) if len(samples) > 1 else 0.0
    return BenchRow(preset, op, len(samples), statistics.median(samples),
                    statistics.fmean(samples), sd)


def _check_trials(trials: int):
    if not isinstance(trials, int) or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials}")


def bench_scheme(preset: ParamPreset, ops=SCHEME_OPS, trials: int = 20, seed=0,
                 domain: str = None, modulus: int = None) -> List[BenchRow]:
    _check_trials(trials)
    unknown = set(ops) - set(SCHEME_OPS)
    if unknown:
        raise ParameterError(f"unknown ops {sorted(unknown)}")
    params = preset.ring(domain, modulus)
    rng = RngHandle(seed)
    ks = keygen(params, preset.h, preset.sigma, preset.kappa, preset.B_max,
                rng.stream(1), with_refresh_key=False)
    gen = rng.stream(2).gen
    m1 = BPoly(gen.integers(0, 2, params.K), params)
    m2 = BPoly(gen.integers(0, 2, params.K), params)
    c1 = encrypt(ks.pk, m1, rng.stream(3))
    c2 = encrypt(ks.pk, m2, rng.stream(4))
    counter = iter(range(10 ** 9))
    fns = {
        "keygen": lambda: keygen(params, preset.h, preset.sigma, preset.kappa, preset.B_max,
                                 rng.stream(100 + next(counter)), with_refresh_key=False),
        "encrypt": lambda: encrypt(ks.pk, m1, rng.stream(10 ** 6 + next(counter))),
        "decrypt": lambda: decrypt_raw(ks.sk, c1),
        "add": lambda: add(c1, c2),
        "mult": lambda: mult(ks.evk, c1, c2),
    }
    return [_row(preset.name, op, _time(fns[op], trials)) for op in ops]


@dataclass
class BchBenchRow:
    N: int
    M_bits: int
    blocks: int
    enc_us: float
    perm_us: float
    inv_perm_us: float
    dec_us: float
    total_us: float


def bench_bch(N: int, trials: int = 100, seed=0, k_blk: int = DEFAULT_K_BLOCK) -> BchBenchRow:
    """Median stage times for an M = 8N bit message."""
    _check_trials(trials)
    code = build_code(7, 3)
    M = 8 * N
    h = math.ceil(M / k_blk)
    perm = make_permutation(h * code.n, RngHandle(seed).seed)
    bits = RngHandle(seed, 1).gen.integers(0, 2, M).astype(np.uint8)
    coded = encode_blocks(bits, code, k_blk)
    permuted = perm.apply(coded)

    def dec():
        U, _ = bch_decode_blocks(code, coded.reshape(h, code.n))
        if np.any(U[:, k_blk:]):
            raise AssertionError("padding check failed")
        return U

    stages = {
        "enc": lambda: encode_blocks(bits, code, k_blk),
        "perm": lambda: perm.apply(coded),
        "inv-perm": lambda: perm.undo(permuted),
        "dec": dec,
    }
    med = {k: statistics.median(_time(f, trials)) * 1e3 for k, f in stages.items()}
    total = sum(med.values())
    return BchBenchRow(N, M, h, med["enc"], med["perm"], med["inv-perm"], med["dec"], total)


def to_csv(rows) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    fields = list(asdict(rows[0]))
    w = csv.DictWriter(buf, fieldnames=fields)
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.4f}" if isinstance(v, float) else v) for k, v in asdict(r).items()})
    return buf.getvalue()


def to_text(rows) -> str:
    if not rows:
        return ""
    fields = list(asdict(rows[0]))
    cells = [[f"{v:.3f}" if isinstance(v, float) else str(v) for v in asdict(r).values()] for r in rows]
    widths = [max(len(f), *(len(c[i]) for c in cells)) for i, f in enumerate(fields)]
    lines = ["  ".join(f.rjust(w) for f, w in zip(fields, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)
