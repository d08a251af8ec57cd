"""Exception types shared across the package."""


class CavityError(Exception):
    """Base class for all errors raised by this package."""


class ProtocolError(CavityError):
    """Invalid drive protocol (superluminal, non-positive length, bad junction)."""


class SpliceError(ProtocolError):
    """Time-reversal splice would make the mirror trajectory discontinuous."""


class HorizonError(CavityError):
    """A trace or map evaluation needs the protocol outside its time domain."""


class MonotonicityError(CavityError):
    """Tabulated map lift failed strict monotonicity or degree-one closure."""


class FieldError(CavityError):
    """Invalid field state (non-monotone or empty grid)."""


class ConfigError(CavityError):
    """Run configuration failed schema validation.

    ``path`` locates the offending key, e.g. ``protocol.segments[0].omega``.
    """

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
