import math

import numpy as np
import pytest

from binckks.bch import (PipelineParams, build_code, decode_permuted, encode_blocks,
                         encode_permuted, extract_bits, failure_prob, flips_per_block,
                         inject_flips, make_permutation, post_decode, pre_encode)
from binckks.errors import CapacityError, DecodeFailure, ParameterError
from binckks.ring import BPoly, RingParams

P = RingParams(1024, 16)     # K = 16384 >= 82 * 127
M = 8192


@pytest.fixture(scope="module")
def code():
    return build_code(7, 3)


@pytest.fixture(scope="module")
def perm():
    return make_permutation(82 * 127, b"\x07" * 32)


def test_block_count():
    pp = PipelineParams(M)
    assert pp.h_blocks == 82 and pp.coded_bits == 10414


def test_permutation_basics():
    p1 = make_permutation(1, b"\x00" * 32)
    assert list(p1.forward) == [0]
    p = make_permutation(1016, b"\x01" * 32)
    idx = np.arange(1016)
    assert np.array_equal(p.inverse[p.forward], idx) and np.array_equal(p.forward[p.inverse], idx)
    q = make_permutation(1016, b"\x01" * 32)
    assert np.array_equal(p.forward, q.forward)
    assert not np.array_equal(p.forward, make_permutation(1016, b"\x02" * 32).forward)
    bits = np.random.default_rng(0).integers(0, 2, 1016)
    assert np.array_equal(p.undo(p.apply(bits)), bits)
    with pytest.raises(ParameterError):
        make_permutation(0, b"")


def test_zero_message_packs_to_zero(code, perm):
    assert pre_encode(np.zeros(M, dtype=np.uint8), code, perm, P).is_zero()


def test_layout(code, perm):
    bits = np.random.default_rng(1).integers(0, 2, M).astype(np.uint8)
    m = pre_encode(bits, code, perm, P)
    coded = encode_blocks(bits, code)
    assert np.array_equal(m.coeffs[:10414], coded[perm.forward])
    assert not m.coeffs[10414:].any()
    assert np.array_equal(encode_permuted(bits, code, perm), m.coeffs[:10414])
    # padding bits of every block are zero
    assert not coded.reshape(82, 127)[:, 21 + 101:].any()


def test_roundtrip_without_flips(code, perm):
    gen = np.random.default_rng(2)
    for _ in range(5):
        bits = gen.integers(0, 2, M).astype(np.uint8)
        assert np.array_equal(post_decode(pre_encode(bits, code, perm, P), code, perm, M), bits)


def test_short_message_roundtrip(code):
    bits = np.array([1, 0, 1, 1, 0], dtype=np.uint8)
    pm = make_permutation(127, b"\x03" * 32)
    enc = encode_permuted(bits, code, pm)
    assert np.array_equal(decode_permuted(enc, code, pm, 5), bits)


def _positions_in_block(perm, block, n=127):
    """BP positions j whose codeword bit forward[j] lies in the given block."""
    return np.flatnonzero(perm.forward // n == block)


def test_three_flips_in_one_block(code, perm):
    bits = np.random.default_rng(3).integers(0, 2, M).astype(np.uint8)
    m = pre_encode(bits, code, perm, P)
    pos = _positions_in_block(perm, 17)[:3]
    noisy, ledger = inject_flips(m, pos)
    assert flips_per_block(ledger, perm, 127, 82)[17] == 3
    out, counts = post_decode(noisy, code, perm, M, return_counts=True)
    assert np.array_equal(out, bits) and counts[17] == 3 and counts.sum() == 3


def test_four_flips_in_one_block_not_recovered(code, perm):
    bits = np.random.default_rng(4).integers(0, 2, M).astype(np.uint8)
    m = pre_encode(bits, code, perm, P)
    pos = _positions_in_block(perm, 5)[:4]
    noisy, _ = inject_flips(m, pos)
    try:
        out = post_decode(noisy, code, perm, M)
    except DecodeFailure:
        return
    assert not np.array_equal(out, bits)


def test_capacity_error(code):
    small = RingParams(64, 16)   # K = 1024 < 82 * 127
    perm = make_permutation(82 * 127, b"\x00" * 32)
    with pytest.raises(CapacityError):
        pre_encode(np.zeros(M, dtype=np.uint8), code, perm, small)


def test_extract_bits_rounding():
    p = RingParams(8, 2)
    m = BPoly(np.array([-3, 0, 1, 2, 5, -1, 0, 1] + [0] * 8), p)
    assert list(extract_bits(m, 8)) == [0, 0, 1, 1, 1, 0, 0, 1]


def test_inject_flips_basics():
    m = BPoly(np.random.default_rng(5).integers(0, 2, P.K), P)
    same, led = inject_flips(m, [])
    assert same == m and len(led) == 0
    once, led = inject_flips(m, [3, 99, 1000])
    twice, _ = inject_flips(once, led)
    assert twice == m
    with pytest.raises(ParameterError):
        inject_flips(m, [P.K])
    with pytest.raises(ParameterError):
        inject_flips(m, [1, 1])


def test_inject_rate_mode_count():
    m = BPoly.zero(P)
    nh, rate = 10414, 1e-3
    counts = [len(inject_flips(m, rate=rate, rng=np.random.default_rng(i), limit=nh)[1])
              for i in range(50)]
    mean, sd = nh * rate, math.sqrt(nh * rate * (1 - rate))
    assert abs(np.mean(counts) - mean) <= 3 * sd / math.sqrt(50)


def test_random_flips_match_ledger(code, perm):
    """Recovery is exact iff every block saw at most t flips."""
    gen = np.random.default_rng(6)
    for _ in range(100):
        bits = gen.integers(0, 2, M).astype(np.uint8)
        m = pre_encode(bits, code, perm, P)
        noisy, ledger = inject_flips(m, rate=1e-3, rng=gen, limit=10414)
        ok_expected = flips_per_block(ledger, perm, 127, 82).max(initial=0) <= 3
        try:
            ok = np.array_equal(post_decode(noisy, code, perm, M), bits)
        except DecodeFailure:
            ok = False
        assert ok == ok_expected


def test_failure_prob_examples():
    f = failure_prob(3e-7, 4, 127, 3, 257)
    assert f.p_bit == pytest.approx(1.2e-6)
    assert f.lam == pytest.approx(1.52e-4, rel=0.01)
    assert f.pr_block == pytest.approx(2.3e-17, rel=0.10)
    assert abs(1 - f.success) <= 1e-12
    with pytest.raises(ParameterError):
        failure_prob(0, 4, 127, 3, 257)
