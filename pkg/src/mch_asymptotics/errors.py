"""Exception hierarchy shared by all modules."""


class MCHError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MCHError, ValueError):
    """Argument outside the domain of a formula (e.g. mu = 0)."""


class SectorError(MCHError, ValueError):
    """Ray slope outside the sector an operation is defined for."""


class SingularDataError(MCHError, ValueError):
    """Reflection data with |r| >= 1 where a finite logarithm is needed."""


class ContractError(MCHError, ValueError):
    """Input violates a structural pre-condition (matrix symmetry, contour, ...)."""


class AccuracyError(MCHError, RuntimeError):
    """Quadrature or fit did not reach the requested tolerance."""


class IntegrationError(MCHError, RuntimeError):
    """Time integration produced non-finite values."""


class InsufficientDataError(MCHError, ValueError):
    """Too few oscillations / samples, or signal below the noise floor."""
