"""Exception hierarchy.

Every failure the engine can report is an ``ArithmeticError`` subclass so
callers can catch the whole family; the CLI maps a few of them to exit codes.
"""


class SL2ParamError(ArithmeticError):
    pass


class NotDivisible(SL2ParamError):
    pass


class NotCoprime(SL2ParamError):
    pass


class NotPrimitive(NotCoprime):
    pass


class NotInvertible(SL2ParamError):
    pass


class NonPrincipal(SL2ParamError):
    pass


class TooLarge(SL2ParamError):
    pass


class SearchExhausted(SL2ParamError):
    pass


class BadModulus(SL2ParamError):
    pass


class NotResidue(SL2ParamError):
    pass


class EvenPlace(SL2ParamError):
    pass


class DegenerateTrace(SL2ParamError):
    pass


class RowMismatch(SL2ParamError):
    pass


class MagicNotIntegral(SL2ParamError):
    pass


class NotDegenerate(SL2ParamError):
    pass


class VerificationFailed(SL2ParamError):
    pass
