"""Exception hierarchy. The CLI maps these onto exit codes."""


class NNCompressError(Exception):
    """Base class for all package errors."""


class InputError(NNCompressError, ValueError):
    """Malformed or out-of-contract input (shape, sign, parameter range)."""


class NegativeEntryError(InputError):
    """Matrix has an entry below ``-zero_tol``."""


class NumericalFailure(NNCompressError, ArithmeticError):
    """A decomposition failed to converge or produced non-finite output."""


class RankHypothesisViolated(NumericalFailure):
    """A core block does not carry the full rank of the matrix numerically."""


class SearchExhausted(NumericalFailure):
    """No invertible principal minor was found within the search budget."""


class UnsupportedSize(InputError):
    """Matrix order exceeds the cap of an order-limited routine."""


class GenerationError(NumericalFailure):
    """Random instance generator could not satisfy its constraints."""
