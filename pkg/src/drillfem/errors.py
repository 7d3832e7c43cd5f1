class DrillFEMError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(DrillFEMError, ValueError):
    """Invalid mesh size, boundary selection, material or method setup."""


class DegenerateCellError(DrillFEMError):
    """A cell mapping has a non-positive Jacobian determinant."""


class SolverError(DrillFEMError, RuntimeError):
    """The linear solve failed or missed its residual contract."""
