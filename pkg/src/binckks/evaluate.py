"""Circuit evaluation: powers by squaring, polynomials, truncated series.

Refresh policy: after every ciphertext product the candidate bound is
compared against B*; at or above it the product is refreshed. Decisions
use the nominal bound (reset to B_enc by refresh) and are logged per node.

Scales: x^j carries scale delta^j. Term j is multiplied by a constant at
scale delta_c * delta^(D-j), so every term lands on delta_c * delta^D
before summation, and a_0 is added at that scale.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from .encoding import encode_constant
from .errors import ConvergenceError, ParameterError
from .noise import NoiseParams, b_enc
from .ring import BPoly
from .sampling import RngHandle
from .scheme import (Ciphertext, EvalKey, PublicKey, RefreshKey, add,
                     add_const, mul_const, mult, refresh)

TRUNCATION_CAP = 128
_SERIES_LOOKAHEAD = 2 * TRUNCATION_CAP


@dataclass
class EvalContext:
    B_star: float
    noise: NoiseParams
    evk: EvalKey
    rk: Optional[RefreshKey]
    pk: PublicKey
    rng: RngHandle
    flood: bool = True
    refresh_count: int = 0
    log: List[tuple] = field(default_factory=list)
    term_bounds: List[tuple] = field(default_factory=list)
    degree: Optional[int] = None
    _streams: int = 0

    def __post_init__(self):
        if self.B_star <= b_enc(self.noise):
            raise ParameterError("B_star must exceed B_enc")

    def _next_rng(self) -> RngHandle:
        self._streams += 1
        return self.rng.stream(self._streams)

    def maybe_refresh(self, c: Ciphertext, label: str) -> Ciphertext:
        fire = c.nominal_bound >= self.B_star
        self.log.append((label, c.nominal_bound, fire))
        if not fire:
            return c
        if self.rk is None:
            raise ParameterError("refresh needed but no refresh key is loaded")
        self.refresh_count += 1
        return refresh(c, self.rk, self.pk, self._next_rng(), flood=self.flood)

    def square(self, c: Ciphertext, label: str = "sq") -> Ciphertext:
        return self.maybe_refresh(mult(self.evk, c, c), label)

    def product(self, c1: Ciphertext, c2: Ciphertext, label: str = "mul") -> Ciphertext:
        return self.maybe_refresh(mult(self.evk, c1, c2), label)


def _is_pow2(d: int) -> bool:
    return d >= 1 and d & (d - 1) == 0


def power(c: Ciphertext, d: int, ctx: EvalContext) -> Ciphertext:
    """x^d for d = 2^r by r squarings with adaptive refresh."""
    if not isinstance(d, int) or not _is_pow2(d):
        raise ParameterError(f"d must be a power of two, got {d}")
    e = 1
    while e < d:
        e *= 2
        c = ctx.square(c, f"x^{e}")
    return c


class PowerCache:
    """x^j for any j, built from cached powers of two."""

    def __init__(self, c: Ciphertext, ctx: EvalContext):
        self.ctx = ctx
        self.cache: Dict[int, Ciphertext] = {1: c}

    def get(self, j: int) -> Ciphertext:
        if j in self.cache:
            return self.cache[j]
        if j < 1:
            raise ParameterError("exponent must be >= 1")
        if _is_pow2(j):
            half = self.get(j // 2)
            out = self.ctx.square(half, f"x^{j}")
        else:
            top = 1 << (j.bit_length() - 1)
            out = self.ctx.product(self.get(top), self.get(j - top), f"x^{j}")
        self.cache[j] = out
        return out


def _trivial(params, scale: float) -> Ciphertext:
    z = BPoly.zero(params)
    return Ciphertext(z, z, 0.0, scale)


def poly_eval(c: Ciphertext, coeffs, ctx: EvalContext, delta_c: float = None) -> Ciphertext:
    """sum_j a_j x^j; output scale delta_c * delta^D with delta = c.scale."""
    coeffs = [float(a) for a in coeffs]
    if not coeffs:
        raise ParameterError("need at least one coefficient")
    if not all(math.isfinite(a) for a in coeffs):
        raise ParameterError("coefficients must be finite")
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    D = len(coeffs) - 1
    delta = c.scale
    delta_c = delta if delta_c is None else delta_c
    out_scale = delta_c * delta ** D
    params = c.params
    cache = PowerCache(c, ctx)
    acc = None
    ctx.term_bounds = []
    for j in range(1, D + 1):
        a = coeffs[j]
        if a == 0:
            continue
        xj = cache.get(j)
        const = encode_constant(a, delta_c * delta ** (D - j), params)
        term = mul_const(xj, const, delta_c * delta ** (D - j))
        ctx.term_bounds.append((j, abs(a), xj.nominal_bound))
        acc = term if acc is None else add(acc, term)
    if acc is None:
        acc = _trivial(params, out_scale)
    return add_const(acc, encode_constant(coeffs[0], out_scale, params))


def series_tracked(ctx: EvalContext) -> float:
    """sum_j |a_j| * nominal(x^j) over the terms of the last poly_eval."""
    return sum(a * b for _, a, b in ctx.term_bounds)


@dataclass(frozen=True)
class SeriesSpec:
    """f(x) = sum_j coeff(j) x^j on |x| <= Q, truncated at tail <= epsilon."""

    coeff: Callable[[int], float]
    Q: float
    epsilon: float
    name: str = "series"


def exp_series(Q: float = 1.0, epsilon: float = 1e-4) -> SeriesSpec:
    return SeriesSpec(lambda j: math.exp(-math.lgamma(j + 1)), Q, epsilon, "exp")


def identity_series(Q: float = 1.0, epsilon: float = 1e-4) -> SeriesSpec:
    return SeriesSpec(lambda j: 1.0 if j == 1 else 0.0, Q, epsilon, "identity")


def _tail_terms(s: SeriesSpec) -> List[float]:
    out = []
    for j in range(_SERIES_LOOKAHEAD + 1):
        try:
            out.append(abs(float(s.coeff(j))) * s.Q ** j)
        except OverflowError:
            out.append(math.inf)
    return out


def truncation_degree(s: SeriesSpec) -> int:
    """Smallest D <= 128 with sum_{j>D} |a_j| Q^j <= epsilon."""
    if s.epsilon <= 0 or s.Q <= 0:
        raise ParameterError("epsilon and Q must be positive")
    t = _tail_terms(s)
    last, prev = t[-1], t[-2]
    # geometric majorant for everything past the lookahead window
    if last == 0:
        rest = 0.0
    elif prev > 0 and last / prev < 1:
        r = last / prev
        rest = last * r / (1 - r)
    else:
        rest = math.inf
    tail = rest
    tails = [0.0] * len(t)
    for j in range(len(t) - 1, -1, -1):
        tails[j] = tail
        tail += t[j]
    # tails[D] = sum_{j>D} t_j (+ majorant)
    for D in range(TRUNCATION_CAP + 1):
        if tails[D] <= s.epsilon:
            return D
    raise ConvergenceError(f"no truncation degree <= {TRUNCATION_CAP} for {s.name}")


def analytic_eval(c: Ciphertext, s: SeriesSpec, ctx: EvalContext) -> Ciphertext:
    D = truncation_degree(s)
    ctx.degree = D
    return poly_eval(c, [s.coeff(j) for j in range(D + 1)], ctx)
