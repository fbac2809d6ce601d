"""Noise-bound report for a parameter preset."""

import math

import numpy as np

from .encoding import encode
from .noise import (b_ecd, b_ecd_worst, b_enc, b_mult_bin, b_mult_std, memory_model,
                    prop1_exact_threshold, prop1_holds, prop1_threshold, seal_like)
from .presets import PRESETS, ParamPreset
from .ring import r_norm
from .sampling import RngHandle
from .scheme import decrypt_raw, encrypt, keygen

EMPIRICAL_MAX_N = 1024


def _log2(x: float) -> float:
    return math.log2(x) if x > 0 else float("-inf")


def analytic_rows(preset: ParamPreset) -> list:
    p = preset.noise()
    be = b_enc(p)
    rows = [
        ("B_enc", be),
        ("B_ecd", b_ecd(p)),
        ("B_ecd_worst", b_ecd_worst(p)),
        ("B_mult_bin(B_enc,B_enc)", b_mult_bin(be, be, p)),
        ("B_mult_bin(B_enc,B_enc) [K-dim relin]", b_mult_bin(be, be, p, use_K=True)),
        ("relative_error(B_enc)", be / p.delta),
        ("prop1_threshold", prop1_threshold(p)),
        ("prop1_holds", prop1_holds(p)),
        ("tau", preset.tau),
    ]
    return rows


def seal_rows() -> list:
    p = seal_like()
    x = 2.0 ** 40
    bin_ = b_mult_bin(x, x, p)
    std = b_mult_std(x, x, x, x, p)
    return [
        ("seal B_enc", b_enc(p)),
        ("seal log2 B_mult_bin", _log2(bin_)),
        ("seal log2 B_mult_std", _log2(std)),
        ("seal log2 std/bin", _log2(std) - _log2(bin_)),
        ("seal prop1_holds", prop1_holds(p)),
        ("seal prop1_exact_threshold", prop1_exact_threshold(p)),
    ]


def memory_rows() -> list:
    rows = []
    for name in ("paper-1024", "paper-2048", "paper-4096", "paper-8192"):
        pr = PRESETS[name]
        mem = memory_model(pr.N, pr.lambda_B)
        mb = mem.megabytes()
        rows.append((f"memory N={pr.N} lambda_B={pr.lambda_B} (MB) ct_ckks/ct_bin/evk_ckks/evk_bin",
                     "/".join(f"{mb[k]:.2f}" for k in ("ct_ckks", "ct_bin", "evk_ckks", "evk_bin"))))
    return rows


def empirical_rows(preset: ParamPreset, trials: int = 20, seed=0) -> list:
    """Measured fresh-encryption noise against B_enc."""
    if preset.N > EMPIRICAL_MAX_N:
        return [("empirical", "skipped (N too large)")]
    params = preset.ring("exact")
    rng = RngHandle(seed)
    ks = keygen(params, preset.h, preset.sigma, preset.kappa, preset.B_max, rng.stream(1),
                with_refresh_key=False)
    z = np.zeros(params.N // 2)
    m = encode(z, preset.delta, params)
    worst = 0.0
    for i in range(trials):
        c = encrypt(ks.pk, m, rng.stream(10 + i), scale=preset.delta)
        worst = max(worst, r_norm(decrypt_raw(ks.sk, c) - m))
    be = b_enc(preset.noise())
    return [("empirical max fresh noise", worst), ("empirical / B_enc", worst / be)]


def noise_report(preset: ParamPreset, trials: int = 20, seed=0) -> list:
    return (analytic_rows(preset) + seal_rows() + memory_rows()
            + empirical_rows(preset, trials, seed))


def format_report(rows) -> str:
    width = max(len(k) for k, _ in rows)
    out = []
    for k, v in rows:
        if isinstance(v, float):
            v = f"{v:.6g}"
        out.append(f"{k.ljust(width)}  {v}")
    return "\n".join(out)
