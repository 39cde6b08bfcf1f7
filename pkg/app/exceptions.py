"""
Exception types raised by the simulator services.
"""


class ArgumentError(ValueError):
    """Invalid argument: bad axis, keep-set, permutation or dimension mismatch."""


class StateParseError(ValueError):
    """A state file could not be parsed."""


class LineCountError(StateParseError):
    """State file does not hold exactly 8 amplitude lines."""


class AmplitudeFormatError(StateParseError):
    """An amplitude line (or basis label) is malformed."""


class NormError(StateParseError):
    """Parsed amplitudes are too far from unit norm."""


class NumericalViolation(ArithmeticError):
    """A numerical invariant failed beyond tolerance."""
