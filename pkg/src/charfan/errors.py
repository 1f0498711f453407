"""Exception hierarchy shared by all analysis modules."""


class CharfanError(Exception):
    """Base class for every error raised by the package."""


class ParseError(CharfanError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownIdentifierError(ParseError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier {name!r}", position)
        self.name = name


class DomainError(CharfanError, ArithmeticError):
    """Evaluation left the natural domain of an expression."""


class DegeneratePencilError(CharfanError):
    """The characteristic pencil vanishes identically at a state."""


class CoincidentAnglesError(CharfanError):
    """Two characteristic angles (or speeds) coincide within tolerance."""


class InfiniteSlopeError(CharfanError):
    """A characteristic speed tan(phi) is infinite (phi = pi/2 mod pi)."""


class NotRichError(CharfanError):
    """The G-potential one-form failed its closedness check."""


class FieldDomainError(CharfanError):
    """A solution field was queried outside the region where it is defined."""


class GradientCatastropheError(FieldDomainError):
    """Characteristics of a simple wave cross inside the requested region."""

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


class ConfigError(CharfanError):
    """A run configuration file is malformed."""
