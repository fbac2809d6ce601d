"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid or inconsistent parameters."""


class CoefficientOverflow(ValueError):
    """A coefficient exceeds the declared bound 2^lambda_B."""

    def __init__(self, bound, index, value=None):
        self.bound = bound
        self.index = index
        self.value = value
        msg = f"coefficient {index} exceeds bound {bound}"
        if value is not None:
            msg += f" (value {value})"
        super().__init__(msg)


class KeyMaterialError(ValueError):
    """Malformed or mismatched key material."""


class DecodeFailure(Exception):
    """A BCH word could not be decoded."""

    def __init__(self, msg="uncorrectable word", block=None):
        self.block = block
        if block is not None:
            msg = f"{msg} (block {block})"
        super().__init__(msg)


class ConvergenceError(ArithmeticError):
    """A series truncation degree could not be found within the cap."""


class CapacityError(ValueError):
    """Coded message does not fit the target ring dimension."""


class DigestMismatch(ValueError):
    """Serialized artifact belongs to a different parameter set."""
