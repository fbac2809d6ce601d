"""Acceptance criteria. Each test prints one PASS/FAIL line."""

import itertools
import math
import time

import numpy as np
import pytest

from binckks.bch import (build_code, bch_decode_blocks, bch_encode, failure_prob,
                         flips_per_block, inject_flips, make_permutation, post_decode,
                         pre_encode, PipelineParams)
from binckks.bench import bench_bch, bench_scheme
from binckks.encoding import decode, encode
from binckks.errors import DecodeFailure
from binckks.evaluate import EvalContext, analytic_eval, exp_series
from binckks.noise import b_enc, b_mult_bin, b_mult_std, prop1_holds, seal_like
from binckks.presets import PRESETS, get_preset
from binckks.ring import BPoly, RingParams, bp_mul, bp_mul_schoolbook, r_norm
from binckks.sampling import RngHandle
from binckks.scheme import (add, decrypt, decrypt_raw, encrypt, keygen, mul_const, mult,
                            refresh)


@pytest.fixture
def report(capsys):
    def emit(num, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {num:>2}] {'PASS' if ok else 'FAIL'}  {title}  {detail}")
        assert ok, f"criterion {num}: {detail}"
    return emit


def gaussian_ints(gen, n, bound=100):
    return gen.integers(-bound, bound + 1, n) + 1j * gen.integers(-bound, bound + 1, n)


def test_c01_ring_oracle(report):
    gen = np.random.default_rng(1)
    t0 = time.perf_counter()
    bad = 0
    for K in (64, 128, 256):
        p = RingParams(K // 8, 8)
        for _ in range(1000):
            a = BPoly(gen.integers(-(1 << 20), 1 << 20, K), p)
            b = BPoly(gen.integers(-(1 << 20), 1 << 20, K), p)
            bad += bp_mul(a, b) != bp_mul_schoolbook(a, b)
    dt = time.perf_counter() - t0
    report(1, "NTT product == schoolbook, 3x1000 pairs", bad == 0 and dt < 10,
           f"mismatches={bad} runtime={dt:.2f}s (limit 10s)")


def test_c02_encode_decode_exact(report):
    gen = np.random.default_rng(2)
    fails, total = 0, 0
    for N, h in ((32, 16), (256, 64), (1024, 64)):
        p = RingParams(N, 32)
        ks = keygen(p, h, 3.19, 16, 2.0 ** 19, RngHandle(200 + N), with_refresh_key=False)
        for i in range(500):
            z = gaussian_ints(gen, N // 2)
            c = encrypt(ks.pk, encode(z, 2.0 ** 20, p), RngHandle(N, i), scale=2.0 ** 20)
            fails += not np.array_equal(decrypt(ks.sk, c), z)
            total += 1
    report(2, "Dcd(Dec(Enc(Ecd(z)))) == z", fails == 0, f"{total - fails}/{total} exact")


def test_c03_add_mult_identities(report, keys64):
    sk, evk = keys64.sk, keys64.evk
    gen = np.random.default_rng(3)
    p = sk.params
    bad_add = bad_mult = 0
    for i in range(100):
        c1 = encrypt(keys64.pk, encode(gaussian_ints(gen, 32), 2.0 ** 20, p), RngHandle(3, 2 * i))
        c2 = encrypt(keys64.pk, encode(gaussian_ints(gen, 32), 2.0 ** 20, p), RngHandle(3, 2 * i + 1))
        d1, d2 = decrypt_raw(sk, c1), decrypt_raw(sk, c2)
        bad_add += decrypt_raw(sk, add(c1, c2)) != d1 + d2
        bad_mult += decrypt_raw(sk, mult(evk, c1, c2)) != d1 * d2 + (c1.c1 * c2.c1) * sk.evk_error
    report(3, "Dec(add) and Dec(mult) identities, 100 trials", bad_add == bad_mult == 0,
           f"add mismatches={bad_add} mult mismatches={bad_mult}")


def _random_circuit(ks, gen, delta, seed):
    """Depth <= 3 circuit over add/mult/mul_const/refresh with a BP-level reference."""
    p = ks.pk.params

    def fresh(scale, k):
        m = encode(gaussian_ints(gen, p.N // 2, 2), delta, p)
        return encrypt(ks.pk, m, RngHandle(seed, k), scale=scale), m

    c, m = fresh(delta, 0)
    for d in range(int(gen.integers(1, 4))):
        op = gen.choice(["add", "mult", "const", "refresh"])
        if op == "add":
            c2, m2 = fresh(c.scale, d + 1)
            c, m = add(c, c2), m + m2
        elif op == "mult":
            c2, m2 = fresh(c.scale, d + 1)
            c, m = mult(ks.evk, c, c2), m * m2
        elif op == "const":
            k = BPoly.monomial(p, 0, int(gen.integers(1, 4)))
            c, m = mul_const(c, k), m * k
        else:
            c = refresh(c, ks.rk, ks.pk, RngHandle(seed, 100 + d))
    return r_norm(decrypt_raw(ks.sk, c) - m), c.noise_bound


def test_c04_noise_bound_soundness(report):
    pr = get_preset("desk-64")
    gen = np.random.default_rng(4)
    ok = total = 0
    worst = 0.0
    for N in (64, 128):
        p = RingParams(N, 32)
        ks = keygen(p, pr.h, pr.sigma, pr.kappa, pr.B_max, RngHandle(400 + N))
        for i in range(250):
            err, bound = _random_circuit(ks, gen, 2.0 ** 10, (N, i))
            ok += err <= bound
            total += 1
            worst = max(worst, err / bound)
    report(4, "measured error <= tracked bound", ok >= 0.99 * total,
           f"{ok}/{total} within bound, worst err/bound={worst:.3g}")


def test_c05_formulas(report):
    p = seal_like()
    x = 2.0 ** 40
    be = b_enc(p)
    lb = math.log2(b_mult_bin(x, x, p))
    ls = math.log2(b_mult_std(x, x, x, x, p))
    checks = {
        "b_enc": abs(be / 3.3e5 - 1) <= 0.15,
        "log2 bin": abs(lb - 88) <= 2,
        "log2 std": abs(ls - 140) <= 2,
        "ratio": abs((ls - lb) - 52) <= 3,
    }
    detail = (f"b_enc={be:.4g} (3.3e5+-15%) log2_bin={lb:.2f} (88+-2) "
              f"log2_std={ls:.2f} (140+-2) ratio={ls - lb:.2f} (52+-3) "
              f"failing={[k for k, v in checks.items() if not v]}")
    report(5, "formula reproduction", all(checks.values()), detail)


def test_c06_threshold_predicate(report):
    p = seal_like()
    hi, lo = prop1_holds(p), prop1_holds(p.with_(delta=2.0 ** 10))
    report(6, "refresh-free threshold predicate", hi and not lo, f"delta=2^40 -> {hi}, delta=2^10 -> {lo}")


def test_c07_reference_generator(report):
    reference = [21, 20, 19, 14, 13, 12, 11, 10, 7, 6, 5, 3, 0]
    code = build_code(7, 3)
    report(7, "build_code(7,3) reproduces reference g", code.g_terms() == reference,
           f"built terms={code.g_terms()} reference={reference}")


def test_c08_bch_correction(report):
    code = build_code(7, 3)
    gen = np.random.default_rng(8)
    t0 = time.perf_counter()
    pats = [(i,) for i in range(127)] + list(itertools.combinations(range(127), 2))
    assert len(pats) == 8128
    rand3 = [tuple(gen.choice(127, 3, replace=False)) for _ in range(10_000)]
    wrong = failures = 0
    for group in (pats, rand3):
        U = gen.integers(0, 2, (len(group), code.k)).astype(np.uint8)
        R = bch_encode(code, U)
        for row, pat in enumerate(group):
            R[row, list(pat)] ^= 1
        try:
            got, _ = bch_decode_blocks(code, R)
            wrong += int((got != U).any(axis=1).sum())
        except DecodeFailure:
            failures += 1
    dt = time.perf_counter() - t0
    report(8, "weight<=2 exhaustive + 10^4 weight-3", wrong == failures == 0 and dt < 60,
           f"miscorrections={wrong} failures={failures} runtime={dt:.2f}s (limit 60s)")


def test_c09_pipeline(report):
    code = build_code(7, 3)
    M = 8192
    pp = PipelineParams(M)
    params = RingParams(1024, 16)
    perm = make_permutation(pp.coded_bits, b"\x09" * 32)
    gen = np.random.default_rng(9)
    agree = 0
    recovered = 0
    total = 0
    for rate in (1e-3, 4e-3):
        for _ in range(1000):
            bits = gen.integers(0, 2, M).astype(np.uint8)
            noisy, ledger = inject_flips(pre_encode(bits, code, perm, params), rate=rate,
                                         rng=gen, limit=pp.coded_bits)
            expect = flips_per_block(ledger, perm, code.n, pp.h_blocks).max(initial=0) <= code.t
            try:
                ok = np.array_equal(post_decode(noisy, code, perm, M), bits)
            except DecodeFailure:
                ok = False
            agree += ok == expect
            recovered += ok
            total += 1
    report(9, "pipeline exact iff <=3 flips per block", agree == total and pp.h_blocks == 82,
           f"ledger agreement {agree}/{total} (recovered {recovered}) h={pp.h_blocks}")


def test_c10_poisson(report):
    f = failure_prob(3e-7, 4, 127, 3, 257)
    ok = (abs(f.lam / 1.52e-4 - 1) <= 0.01 and abs(f.pr_block / 2.3e-17 - 1) <= 0.10
          and abs(1 - f.success) <= 1e-12)
    report(10, "Poisson failure model", ok,
           f"lambda={f.lam:.4g} Pr[X>=4]={f.pr_block:.3g} 1-success={1 - f.success:.3g}")


def test_c11_exp(report):
    pr = get_preset("desk-256")
    params = pr.ring("exact")
    t0 = time.perf_counter()
    ks = keygen(params, pr.h, pr.sigma, pr.kappa, pr.B_max, RngHandle(11))
    gen = np.random.default_rng(11)
    z = np.zeros(params.N // 2)
    z[:64] = gen.uniform(-1, 1, 64)
    c = encrypt(ks.pk, encode(z, pr.delta, params), RngHandle(12), scale=pr.delta)
    ctx = EvalContext(pr.B_star, pr.noise(), ks.evk, ks.rk, ks.pk, RngHandle(13))
    eps = 1e-4
    out = analytic_eval(c, exp_series(1.0, eps), ctx)
    got = decode(decrypt_raw(ks.sk, out), out.scale, exact=False)[:64].real
    err = float(np.abs(got - np.exp(z[:64])).max())
    allowed = eps + out.noise_bound / out.scale
    dt = time.perf_counter() - t0
    report(11, "encrypted exp within eps + tracked/delta_out", err <= allowed and dt < 60,
           f"D={ctx.degree} refreshes={ctx.refresh_count} max_err={err:.3g} "
           f"allowed={allowed:.3g} (tracked/delta_out={out.noise_bound / out.scale:.3g}, "
           f"nominal/delta_out={out.nominal_bound / out.scale:.3g}) runtime={dt:.1f}s")


def test_c12_refresh_identity(report, keys64_test_mode):
    sk, pk, evk, rk, _ = keys64_test_mode
    gen = np.random.default_rng(12)
    p = sk.params
    bad = 0
    for i in range(20):
        c = encrypt(pk, encode(gaussian_ints(gen, 32), 2.0 ** 20, p), RngHandle(12, i))
        if i % 2:
            c = mult(evk, c, c)
        bad += decrypt_raw(sk, refresh(c, rk, pk, RngHandle(13, i), flood=False)) != decrypt_raw(sk, c)
    report(12, "Dec_raw(Refresh(c)) == Dec_raw(c), test-mode key", bad == 0, f"mismatches={bad}/20")


def test_c13_ordering(report):
    lines = []
    ok = True
    for name in PRESETS:
        rows = {r.op: r.median_ms for r in bench_scheme(get_preset(name), ("add", "mult"), trials=20)}
        ok &= rows["add"] < rows["mult"]
        lines.append(f"{name}: add={rows['add']:.3f}ms mult={rows['mult']:.2f}ms")
    bch = bench_bch(8192, trials=20)
    total_ms = bch.total_us / 1e3
    ok &= total_ms < 50
    report(13, "Add < Mult on every preset; BCH total < 50 ms at N=8192", ok,
           "; ".join(lines) + f"; bch_total={total_ms:.2f}ms")
