"""GF(2^m) arithmetic, BCH codes and the block-coding pipeline."""

from .code import (DEFAULT_PRIMITIVE_POLY, BchCode, bch_decode, bch_decode_blocks,
                   bch_encode, build_code, syndromes)
from .galois import GfContext
from .pipeline import (DEFAULT_K_BLOCK, FailureModel, Permutation, PipelineParams,
                       decode_permuted, encode_blocks, encode_permuted, extract_bits,
                       failure_prob, flips_per_block, inject_flips, make_permutation,
                       post_decode, pre_encode)
