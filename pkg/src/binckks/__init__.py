"""Binary CKKS over Z[x]/(x^K + 1) with a BCH error-correction layer."""

from .encoding import decode, encode, encode_constant
from .errors import (CapacityError, CoefficientOverflow, ConvergenceError, DecodeFailure,
                     DigestMismatch, KeyMaterialError, ParameterError)
from .presets import PRESETS, get_preset
from .ring import BPoly, RingParams, RPoly, modular_params
from .sampling import RngHandle
from .scheme import (Ciphertext, KeySet, add, add_const, decrypt, decrypt_raw, encrypt, keygen,
                     mul_const, mult, refresh, sub)

__version__ = "0.1.0"
