import itertools

import numpy as np
import pytest

from binckks.bch import (DEFAULT_PRIMITIVE_POLY, GfContext, bch_decode, bch_decode_blocks,
                         bch_encode, build_code, syndromes)
from binckks.bch.code import berlekamp_massey, conjugacy_class, minimal_polynomial
from binckks.bch.galois import bits_to_int, gf2_divmod, gf2_mod, gf2_mul, int_to_bits
from binckks.errors import DecodeFailure, ParameterError


@pytest.fixture(scope="module")
def code():
    return build_code(7, 3)


def terms_to_int(terms):
    return sum(1 << e for e in terms)


def long_division_codeword(u: int, g: int, shift: int) -> int:
    """Independent oracle: u x^shift - (u x^shift mod g), by bitwise long division."""
    r = u << shift
    deg_g = g.bit_length() - 1
    while r.bit_length() - 1 >= deg_g:
        r ^= g << (r.bit_length() - 1 - deg_g)
    return (u << shift) ^ r


def test_gf_tables():
    gf = GfContext(7, DEFAULT_PRIMITIVE_POLY)
    for x in range(1, 128):
        assert gf.exp[gf.log[x]] == x
        assert gf.mul(x, gf.inv(x)) == 1
    for a, b in itertools.product(range(0, 128, 7), range(0, 128, 11)):
        assert gf.mul(a, b) == gf2_mod(gf2_mul(a, b), DEFAULT_PRIMITIVE_POLY)


def test_gf_rejects_non_primitive():
    with pytest.raises(ParameterError):
        GfContext(7, 0b10000001)       # x^7 + 1
    with pytest.raises(ParameterError):
        GfContext(4, 0b11111)          # irreducible, order 5
    with pytest.raises(ParameterError):
        build_code(7, 3, 0b10000001)


def test_gf2_helpers():
    q, r = gf2_divmod(0b1101101, 0b1011)
    assert gf2_mul(q, 0b1011) ^ r == 0b1101101 and r.bit_length() < 4
    bits = int_to_bits(0b1011, 6)
    assert list(bits) == [1, 1, 0, 1, 0, 0] and bits_to_int(bits) == 0b1011


def test_hamming_7_4():
    c1 = build_code(3, 1, 0b1011)
    c2 = build_code(3, 1, 0b1101)
    assert (c1.n, c1.k) == (7, 4)
    assert c1.g == 0b1011 and c2.g == 0b1101
    # brute-force: the degree-3 divisors of x^7 - 1 over GF(2)
    divisors = [g for g in range(8, 16) if gf2_mod((1 << 7) | 1, g) == 0]
    assert set(divisors) == {0b1011, 0b1101}


def test_t_zero():
    c = build_code(7, 0)
    assert c.g == 1 and c.k == c.n == 127


def test_bch_127_structure(code):
    assert (code.n, code.k, code.t) == (127, 106, 3)
    assert code.g.bit_length() - 1 == 21
    assert gf2_mod((1 << 127) | 1, code.g) == 0
    gf = code.gf
    for i in range(1, 7):
        coeffs = [(code.g >> d) & 1 for d in range(22)]
        assert gf.poly_eval(coeffs, gf.pow_alpha(i)) == 0
    lcm = 1
    for rep in (1, 3, 5):
        lcm = gf2_mul(lcm, minimal_polynomial(gf, rep))
    assert lcm == code.g
    assert sorted(conjugacy_class(3, 127)) == sorted(3 * 2 ** i % 127 for i in range(7))
    assert code.g_terms() == [21, 18, 17, 15, 14, 12, 11, 8, 7, 6, 5, 1, 0]


def test_oracle_reproduces_reference_worked_codeword():
    # reference inputs: the 13-term g, the x^26 shift, and A without its x^7 term
    g_ref = terms_to_int([21, 20, 19, 14, 13, 12, 11, 10, 7, 6, 5, 3, 0])
    A_ref = terms_to_int([96, 91, 89, 71, 42, 40, 6, 5, 4, 0])
    C_ref = terms_to_int([122, 117, 115, 97, 68, 66, 32, 31, 30, 26, 19, 18, 17, 16,
                        14, 13, 10, 3, 1])
    assert long_division_codeword(A_ref, g_ref, 26) == C_ref


def test_worked_example_against_oracle(code):
    A = terms_to_int([96, 91, 89, 71, 42, 40, 7, 6, 5, 4, 0])
    c = bch_encode(code, int_to_bits(A, code.k))
    want = long_division_codeword(A, code.g, code.n - code.k)
    assert bits_to_int(c) == want
    assert gf2_mod(want, code.g) == 0


def test_encode_properties(code):
    gen = np.random.default_rng(1)
    assert not bch_encode(code, np.zeros(code.k, dtype=np.uint8)).any()
    U = gen.integers(0, 2, (200, code.k)).astype(np.uint8)
    C = bch_encode(code, U)
    for u, c in zip(U, C):
        assert gf2_mod(bits_to_int(c), code.g) == 0
        assert np.array_equal(c[code.n - code.k:], u)
        assert bits_to_int(c) == long_division_codeword(bits_to_int(u), code.g, 21)
    with pytest.raises(ParameterError):
        bch_encode(code, np.zeros(code.k - 1, dtype=np.uint8))


def test_decode_valid_word(code):
    u = np.random.default_rng(2).integers(0, 2, code.k).astype(np.uint8)
    got, n = bch_decode(code, bch_encode(code, u))
    assert np.array_equal(got, u) and n == 0
    with pytest.raises(ParameterError):
        bch_decode(code, np.zeros(126, dtype=np.uint8))


def test_decode_all_single_and_double_flips(code):
    u = np.random.default_rng(3).integers(0, 2, code.k).astype(np.uint8)
    c = bch_encode(code, u)
    pats = [(i,) for i in range(127)] + list(itertools.combinations(range(127), 2))
    R = np.tile(c, (len(pats), 1))
    for row, pat in enumerate(pats):
        R[row, list(pat)] ^= 1
    U, counts = bch_decode_blocks(code, R)
    assert (U == u).all()
    assert list(counts) == [len(p) for p in pats]


def test_decode_random_triple_flips(code):
    gen = np.random.default_rng(4)
    U = gen.integers(0, 2, (500, code.k)).astype(np.uint8)
    R = bch_encode(code, U)
    for row in R:
        row[gen.choice(127, 3, replace=False)] ^= 1
    got, counts = bch_decode_blocks(code, R)
    assert (got == U).all() and (counts == 3).all()


def test_four_flips_fail_or_miscorrect(code):
    """Beyond capacity: count outcomes, never a correct decode."""
    gen = np.random.default_rng(5)
    outcome = {"failure": 0, "miscorrect": 0}
    for _ in range(200):
        u = gen.integers(0, 2, code.k).astype(np.uint8)
        r = bch_encode(code, u)
        r[gen.choice(127, 4, replace=False)] ^= 1
        try:
            got, _ = bch_decode(code, r)
        except DecodeFailure:
            outcome["failure"] += 1
            continue
        assert not np.array_equal(got, u)
        outcome["miscorrect"] += 1
    print(f"4-flip outcomes: {outcome}")
    assert sum(outcome.values()) == 200


def test_failure_names_block(code):
    gen = np.random.default_rng(6)
    R = bch_encode(code, gen.integers(0, 2, (5, code.k)).astype(np.uint8))
    for _ in range(100):
        bad = R.copy()
        bad[3, gen.choice(127, 5, replace=False)] ^= 1
        try:
            bch_decode_blocks(code, bad)
        except DecodeFailure as exc:
            assert exc.block == 3
            return
    pytest.fail("no 5-flip pattern produced a decode failure")


def test_berlekamp_massey_zero_syndrome(code):
    assert berlekamp_massey(code.gf, [0] * 6) == [1]
    assert not syndromes(code, np.zeros((1, 127), dtype=np.uint8)).any()
