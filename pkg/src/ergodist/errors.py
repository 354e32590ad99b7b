"""Exception types shared across the package."""


class ErgodistError(Exception):
    """Base class for errors raised by this package."""


class AlphabetMismatchError(ErgodistError, ValueError):
    """Operands do not share a compatible alphabet."""


class UnsupportedModelError(ErgodistError, ValueError):
    """The model does not support the requested operation (e.g. exact marginals)."""


class StationaryInitError(ErgodistError, ValueError):
    """The chain has no unique stationary distribution (reducible or periodic)."""


class InfeasibleError(ErgodistError, RuntimeError):
    """The requested output cannot be produced from the available candidates."""


class CalibrationMismatchError(ErgodistError, ValueError):
    """A calibration table does not match the test it is used with."""


class ModelSpecError(ErgodistError, ValueError):
    """A model description file is malformed; carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"model spec field '{field}': {message}")
