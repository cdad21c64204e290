"""Exception types shared across the package."""


class TailmaxError(Exception):
    """Base class for all package errors."""


class SpecError(TailmaxError, ValueError):
    """Invalid model specification: out-of-range parameter, bad schema, bad tree."""


class EvaluationError(TailmaxError, ValueError):
    """Invalid evaluation input: wrong dimension, negative or non-finite data."""


class NumericalError(TailmaxError, ArithmeticError):
    """Numerical failure large enough to indicate a bug rather than round-off."""
