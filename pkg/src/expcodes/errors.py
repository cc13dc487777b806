"""Exception types raised across the package."""


class CodingError(Exception):
    """Base class for all errors raised by expcodes."""


class InvalidParameter(CodingError, ValueError):
    pass


class DegenerateRegime(InvalidParameter):
    """The penalty exponent is at most 0.5, so no Renyi order corresponds to it."""


class DivergentPenalty(CodingError, ArithmeticError):
    pass


class DivergentEntropy(CodingError, ArithmeticError):
    pass


class NotVerifiablyLightTailed(CodingError):
    """No index r could be certified for the light-tail construction."""


class NonStabilized(CodingError):
    """Exponential Huffman lengths did not settle while d was doubled."""


class UnsortedWeights(InvalidParameter):
    pass


class OracleLimit(InvalidParameter):
    """The instance is too large for exhaustive enumeration."""


class StreamError(CodingError):
    pass


class TruncatedStream(StreamError):
    pass


class CorruptStream(StreamError):
    pass
