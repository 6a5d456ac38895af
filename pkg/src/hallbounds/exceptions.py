"""Exception types raised by hallbounds."""


class HallBoundsError(ValueError):
    """Base class for all errors raised by this package."""


class InvalidConductivityError(HallBoundsError):
    """A tensor does not describe a valid conductivity (non-PD symmetric part)."""


class DegenerateLaminationError(HallBoundsError):
    """The interface jump system of a laminate is singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class YTransformPoleError(HallBoundsError):
    """The Y-transform is evaluated at its pole (arithmetic-mean effective tensor)."""


class DegeneratePhasesError(HallBoundsError):
    """Phase data for which a requested construction is not defined."""
