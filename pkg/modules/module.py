import logging

"""
Base class for all modules.

Every module lists the static methods that may be invoked from the command line
in COMMANDS; everything else on the class is library surface.
"""
class Module:
    COMMANDS : tuple[str, ...] = ()

    def __init__(self, name : str):
        self.name = name

    def print_help(self):
        logger = logging.getLogger(__name__)
        logger.info(f"Help for module {self.name}")
        raise NotImplementedError("Help method not implemented")

    def print_commands(self):
        print(" ".join(self.COMMANDS))


class LabError(Exception):
    """Base class of every error raised by the library."""


class InputError(LabError):
    """Malformed command line, unreadable JSON or an unwritable output path."""


class DomainError(LabError, ValueError):
    """A mathematical precondition does not hold (point outside the disc, pole, ...)."""


class NotOuterSafeError(DomainError):
    """The function has a zero in (or too close to) the closed unit disc."""


class UnsupportedSpaceError(DomainError):
    """No formula is available for the requested coefficient space."""


class NumericalError(LabError):
    """Rank deficiency or non-convergence of a numerical routine."""


class OrderingViolation(LabError):
    """Two quantities that must be ordered are not, beyond tolerance."""
