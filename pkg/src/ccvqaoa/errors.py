"""Exception hierarchy shared by the simulator, encoder and CLI."""


class CCVError(Exception):
    """Base class for all package errors."""


class InvalidCutoffError(CCVError, ValueError):
    pass


class EncodingError(CCVError, ValueError):
    """Raised when a problem cannot be turned into a Hermitian polynomial."""


class NotGaussianError(CCVError, ValueError):
    pass


class GridTooSmallError(CCVError, RuntimeError):
    pass


class NumericalStateError(CCVError, RuntimeError):
    """Covariance or state vector became numerically invalid."""


class DegenerateMixerError(CCVError, ValueError):
    pass


class ConfigError(CCVError, ValueError):
    pass


class SimulationError(CCVError, RuntimeError):
    pass
