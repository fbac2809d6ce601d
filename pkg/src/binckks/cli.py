"""Command-line interface.

Exit codes: 0 ok, 2 parameter error, 3 decode failure, 4 I/O error.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import serialize
from .bch.code import build_code
from .bch.pipeline import DEFAULT_K_BLOCK, decode_permuted, encode_permuted, make_permutation
from .bench import SCHEME_OPS, bench_bch, bench_scheme, to_csv, to_text
from .encoding import encode
from .errors import (CapacityError, CoefficientOverflow, ConvergenceError, DecodeFailure,
                     DigestMismatch, KeyMaterialError, ParameterError)
from .evaluate import EvalContext, analytic_eval, exp_series, poly_eval
from .presets import PRESETS, get_preset
from .report import format_report, noise_report
from .sampling import RngHandle
from .scheme import add, decrypt, encrypt, keygen, mult, refresh

EXIT_OK, EXIT_PARAM, EXIT_DECODE, EXIT_IO = 0, 2, 3, 4
DEFAULT_SEED = "00" * 32


def _seed(args) -> RngHandle:
    try:
        return RngHandle.from_hex(args.seed)
    except ValueError as exc:
        raise ParameterError(f"--seed must be hex: {exc}") from None


def _ring(args):
    preset = get_preset(args.preset)
    if args.modular is not None:
        q = None if args.modular == "auto" else int(args.modular, 0)
        return preset, preset.ring("modular", q)
    if args.exact:
        return preset, preset.ring("exact")
    # desk presets default to exact, paper presets to modular
    return preset, preset.ring()


def _load(path, params, kind):
    return serialize.load(path, expected_params=params, expected_kind=kind)


def _out_path(args, default):
    return args.out or default


def _read_slots(path, n_slots):
    with open(path) as f:
        data = json.load(f)
    if isinstance(data, dict):
        data = data.get("slots", [])
    vals = []
    for x in data:
        if isinstance(x, (list, tuple)):
            if len(x) != 2:
                raise ParameterError("complex entries must be [re, im]")
            vals.append(complex(float(x[0]), float(x[1])))
        else:
            vals.append(complex(float(x)))
    if len(vals) > n_slots:
        raise ParameterError(f"at most {n_slots} slots, got {len(vals)}")
    z = np.zeros(n_slots, dtype=np.complex128)
    z[: len(vals)] = vals
    return z


def _write_json(path, obj):
    text = json.dumps(obj)
    if path in (None, "-"):
        print(text)
        return
    tmp = path + ".tmp"
    with open(tmp, "w") as f:
        f.write(text + "\n")
    os.replace(tmp, path)


def cmd_keygen(args):
    preset, params = _ring(args)
    ks = keygen(params, preset.h, preset.sigma, preset.kappa, preset.B_max, _seed(args),
                with_refresh_key=not args.no_rk)
    out = _out_path(args, ".")
    os.makedirs(out, exist_ok=True)
    for name, obj in (("sk", ks.sk), ("pk", ks.pk), ("evk", ks.evk), ("rk", ks.rk)):
        if obj is not None:
            serialize.save(os.path.join(out, f"{name}.bcks"), obj)
    print(f"keys written to {out} (N={params.N}, K={params.K}, tau={ks.tau:g})")


def cmd_encrypt(args):
    preset, params = _ring(args)
    pk = _load(args.pk, params, "pk")
    z = _read_slots(args.input, params.N // 2)
    scale = args.scale or preset.delta
    c = encrypt(pk, encode(z, scale, params), _seed(args), scale=scale)
    serialize.save(_out_path(args, "ct.bcks"), c)


def cmd_decrypt(args):
    _, params = _ring(args)
    sk = _load(args.sk, params, "sk")
    c = _load(args.ct, params, "ct")
    z = decrypt(sk, c, exact=not args.approx)
    _write_json(args.out, {"slots": [[float(v.real), float(v.imag)] for v in z],
                           "noise_bound": c.noise_bound, "scale": c.scale})


def cmd_add(args):
    _, params = _ring(args)
    a = _load(args.ct1, params, "ct")
    b = _load(args.ct2, params, "ct")
    serialize.save(_out_path(args, "sum.bcks"), add(a, b))


def cmd_mul(args):
    _, params = _ring(args)
    evk = _load(args.evk, params, "evk")
    a = _load(args.ct1, params, "ct")
    b = _load(args.ct2, params, "ct")
    serialize.save(_out_path(args, "prod.bcks"), mult(evk, a, b))


def cmd_refresh(args):
    _, params = _ring(args)
    rk = _load(args.rk, params, "rk")
    pk = _load(args.pk, params, "pk")
    c = _load(args.ct, params, "ct")
    out = refresh(c, rk, pk, _seed(args), flood=not args.no_flood)
    serialize.save(_out_path(args, "refreshed.bcks"), out)


def _eval_ctx(args, preset, params):
    evk = _load(args.evk, params, "evk")
    pk = _load(args.pk, params, "pk")
    rk = _load(args.rk, params, "rk") if args.rk else None
    B_star = args.b_star or preset.B_star
    noise = preset.noise(B_star=B_star)
    return EvalContext(B_star, noise, evk, rk, pk, _seed(args), flood=not args.no_flood)


def cmd_eval_poly(args):
    preset, params = _ring(args)
    ctx = _eval_ctx(args, preset, params)
    c = _load(args.ct, params, "ct")
    coeffs = [float(x) for x in args.coeffs.split(",")]
    out = poly_eval(c, coeffs, ctx)
    serialize.save(_out_path(args, "poly.bcks"), out)
    print(f"refreshes={ctx.refresh_count} bound={out.noise_bound:g} scale=2^{math.log2(out.scale):.1f}")


def cmd_eval_exp(args):
    preset, params = _ring(args)
    ctx = _eval_ctx(args, preset, params)
    c = _load(args.ct, params, "ct")
    out = analytic_eval(c, exp_series(args.bound, args.epsilon), ctx)
    serialize.save(_out_path(args, "exp.bcks"), out)
    print(f"degree={ctx.degree} refreshes={ctx.refresh_count} bound={out.noise_bound:g}")


def _code_desc(args, M_bits):
    code = build_code(7, 3)
    h = math.ceil(M_bits / args.k_blk)
    perm = make_permutation(h * code.n, RngHandle.from_hex(args.seed).seed)
    return serialize.CodeDescriptor(code, perm, args.k_blk, M_bits)


def cmd_bch_encode(args):
    with open(args.input, "rb") as f:
        data = f.read()
    if not data:
        raise ParameterError("input file is empty")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    desc = _code_desc(args, len(bits))
    permuted = encode_permuted(bits, desc.code, desc.perm, desc.k_blk)
    out = _out_path(args, "coded.bin")
    with open(out + ".tmp", "wb") as f:
        f.write(np.packbits(permuted, bitorder="little").tobytes())
    os.replace(out + ".tmp", out)
    serialize.save(args.code, desc)
    print(f"{len(bits)} bits -> {len(permuted)} coded bits in {desc.perm.size // desc.code.n} blocks")


def cmd_bch_decode(args):
    desc = serialize.load(args.code, expected_kind="code")
    with open(args.input, "rb") as f:
        raw = np.frombuffer(f.read(), dtype=np.uint8)
    permuted = np.unpackbits(raw, bitorder="little")[: desc.perm.size]
    bits, counts = decode_permuted(permuted, desc.code, desc.perm, desc.M_bits, desc.k_blk,
                                   return_counts=True)
    out = _out_path(args, "decoded.bin")
    with open(out + ".tmp", "wb") as f:
        f.write(np.packbits(bits, bitorder="little").tobytes())
    os.replace(out + ".tmp", out)
    print(f"corrected {int(counts.sum())} bit(s) in {int((counts > 0).sum())} block(s)")


def cmd_bench(args):
    rows = []
    ops = tuple(args.ops.split(",")) if args.ops else SCHEME_OPS
    if not args.bch_only:
        preset = get_preset(args.preset)
        domain = "exact" if args.exact else ("modular" if args.modular else None)
        q = None if args.modular in (None, "auto") else int(args.modular, 0)
        rows = bench_scheme(preset, ops, args.trials, RngHandle.from_hex(args.seed).seed,
                            domain, q)
    text = []
    if rows:
        text.append(to_csv(rows) if args.format == "csv" else to_text(rows))
    if args.bch or args.bch_only:
        N = get_preset(args.preset).N
        brow = bench_bch(N, args.trials)
        text.append(to_csv([brow]) if args.format == "csv" else to_text([brow]))
    out = "\n".join(text)
    if args.out:
        with open(args.out, "w") as f:
            f.write(out + "\n")
    else:
        print(out)


def cmd_noise_report(args):
    preset = get_preset(args.preset)
    rows = noise_report(preset, trials=args.trials, seed=RngHandle.from_hex(args.seed).seed)
    if args.format == "csv":
        text = "name,value\n" + "\n".join(f"{k},{v}" for k, v in rows)
    else:
        text = format_report(rows)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", default="desk-64", choices=sorted(PRESETS))
    common.add_argument("--seed", default=DEFAULT_SEED, help="hex seed (32 bytes; other lengths are hashed)")
    common.add_argument("--out", help="output file or directory")
    dom = common.add_mutually_exclusive_group()
    dom.add_argument("--exact", action="store_true", help="exact integer coefficients")
    dom.add_argument("--modular", nargs="?", const="auto", metavar="Q",
                     help="coefficients mod Q (default: an NTT prime)")

    p = argparse.ArgumentParser(prog="binckks", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("keygen", parents=[common])
    s.add_argument("--no-rk", action="store_true", help="skip the refresh key")
    s.set_defaults(fn=cmd_keygen)

    s = sub.add_parser("encrypt", parents=[common])
    s.add_argument("--pk", required=True)
    s.add_argument("--in", dest="input", required=True, help="JSON list of numbers or [re, im]")
    s.add_argument("--scale", type=float)
    s.set_defaults(fn=cmd_encrypt)

    s = sub.add_parser("decrypt", parents=[common])
    s.add_argument("--sk", required=True)
    s.add_argument("--ct", required=True)
    s.add_argument("--approx", action="store_true", help="return raw complex slots")
    s.set_defaults(fn=cmd_decrypt)

    s = sub.add_parser("add", parents=[common])
    s.add_argument("ct1")
    s.add_argument("ct2")
    s.set_defaults(fn=cmd_add)

    s = sub.add_parser("mul", parents=[common])
    s.add_argument("--evk", required=True)
    s.add_argument("ct1")
    s.add_argument("ct2")
    s.set_defaults(fn=cmd_mul)

    s = sub.add_parser("refresh", parents=[common])
    s.add_argument("--rk", required=True)
    s.add_argument("--pk", required=True)
    s.add_argument("--ct", required=True)
    s.add_argument("--no-flood", action="store_true")
    s.set_defaults(fn=cmd_refresh)

    for name, fn in (("eval-poly", cmd_eval_poly), ("eval-exp", cmd_eval_exp)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--evk", required=True)
        s.add_argument("--pk", required=True)
        s.add_argument("--rk")
        s.add_argument("--ct", required=True)
        s.add_argument("--b-star", type=float)
        s.add_argument("--no-flood", action="store_true")
        if name == "eval-poly":
            s.add_argument("--coeffs", required=True, help="a0,a1,...,aD")
        else:
            s.add_argument("--epsilon", type=float, default=1e-4)
            s.add_argument("--bound", type=float, default=1.0, help="domain bound Q")
        s.set_defaults(fn=fn)

    s = sub.add_parser("bch-encode", parents=[common])
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--code", required=True, help="code descriptor output")
    s.add_argument("--k-blk", type=int, default=DEFAULT_K_BLOCK)
    s.set_defaults(fn=cmd_bch_encode)

    s = sub.add_parser("bch-decode", parents=[common])
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--code", required=True)
    s.set_defaults(fn=cmd_bch_decode)

    s = sub.add_parser("bench", parents=[common])
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--ops", help=f"comma list from {','.join(SCHEME_OPS)}")
    s.add_argument("--bch", action="store_true", help="also time the BCH stages")
    s.add_argument("--bch-only", action="store_true")
    s.add_argument("--format", choices=("text", "csv"), default="text")
    s.set_defaults(fn=cmd_bench)

    s = sub.add_parser("noise-report", parents=[common])
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--format", choices=("text", "csv"), default="text")
    s.set_defaults(fn=cmd_noise_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except DecodeFailure as exc:
        print(f"decode failure: {exc}", file=sys.stderr)
        return EXIT_DECODE
    except (ParameterError, DigestMismatch, CoefficientOverflow, CapacityError,
            KeyMaterialError, ConvergenceError, ValueError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
