"""Named parameter sets."""

from dataclasses import dataclass
from typing import Optional

from .errors import ParameterError
from .noise import NoiseParams
from .ring import RingParams, modular_params


@dataclass(frozen=True)
class ParamPreset:
    name: str
    N: int
    lambda_B: int
    sigma: float
    h: int
    delta: float
    B_star: float
    B_max: float
    kappa: int
    coeff_domain: str = "exact"   # "exact" or "modular"
    modulus: Optional[int] = None  # modular only; None picks an NTT prime

    def ring(self, domain: str = None, modulus: int = None) -> RingParams:
        domain = domain or self.coeff_domain
        if domain == "exact":
            return RingParams(self.N, self.lambda_B)
        if domain == "modular":
            return modular_params(self.N, self.lambda_B, modulus or self.modulus)
        raise ParameterError(f"unknown coefficient domain {domain!r}")

    def noise(self, **kw) -> NoiseParams:
        base = dict(sigma=self.sigma, h=self.h, N=self.N, delta=self.delta,
                    B=float(2 ** self.lambda_B), B_star=self.B_star, B_max=self.B_max,
                    lambda_B=self.lambda_B)
        base.update(kw)
        return NoiseParams(**base)

    @property
    def tau(self) -> float:
        return float(2 ** self.kappa) * self.B_max


def _desk(N: int, h: int) -> ParamPreset:
    delta = 2.0 ** 20
    return ParamPreset(f"desk-{N}", N, 32, 3.19, h, delta, delta / 2, delta / 2, 16)


def _paper(N: int, lambda_B: int) -> ParamPreset:
    delta = 2.0 ** 40
    return ParamPreset(f"paper-{N}", N, lambda_B, 3.19, 192, delta, delta / 2, delta / 2,
                       16, coeff_domain="modular")


PRESETS = {p.name: p for p in (
    _desk(64, 16), _desk(256, 64), _desk(1024, 64),
    _paper(1024, 16), _paper(2048, 16), _paper(4096, 32), _paper(8192, 32),
)}


def get_preset(name: str) -> ParamPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
