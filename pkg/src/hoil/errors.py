"""Exception hierarchy shared by every layer.

Each error carries a short stable ``code`` used in diagnostics and an
optional source position ``(line, col)`` attached by the language front end.
"""

from __future__ import annotations


class HoilError(Exception):
    code = "E-HOIL"

    def __init__(self, message: str, pos: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    def at(self, pos):
        """Attach a source position unless one is already set."""
        if self.pos is None and pos is not None:
            self.pos = pos
        return self


# core values

class ConstructionError(HoilError):
    code = "E-CONSTRUCT"


class MembershipError(HoilError):
    code = "E-MEMBER"


class IndexRangeError(HoilError):
    code = "E-INDEX"


class OperandTypeError(HoilError):
    code = "E-TYPE"


# kinds

class KindError(OperandTypeError):
    code = "E-KIND"


class StrictTypeError(KindError):
    """Bitwise operands of differing tags; bitwise never casts implicitly."""
    code = "E-STRICT"


class UndefinedKindError(HoilError):
    code = "E-UNDEF-KIND"


class ArithmeticFault(HoilError):
    code = "E-ARITH"


# contexts

class ContextConflictError(HoilError):
    code = "E-CTX-CONFLICT"


class TagMembershipError(MembershipError):
    code = "E-TAG-MEMBER"


class TagRangeError(HoilError):
    code = "E-TAG-RANGE"


# bridge

class BridgeError(HoilError):
    code = "E-BRIDGE"


class UnknownProcedureError(BridgeError):
    code = "E-UNKNOWN-PROC"


class ArityError(BridgeError):
    code = "E-ARITY"


class ParameterMismatchError(BridgeError):
    code = "E-PARAM"

    def __init__(self, message, expected=None, actual=None, pos=None):
        super().__init__(message, pos)
        self.expected = expected
        self.actual = actual


class UnmappableParameterError(ParameterMismatchError):
    code = "E-UNMAPPABLE"


class ReturnContractError(BridgeError):
    code = "E-RETURN"


class RegistrationError(BridgeError):
    code = "E-REGISTER"


class HostCallError(BridgeError):
    """The host callable itself raised."""
    code = "E-HOST"


class SignatureSyntaxError(BridgeError):
    code = "E-SIGNATURE"


# language

class ParseError(HoilError):
    code = "E-SYNTAX"


class UnknownIdentifierError(HoilError):
    code = "E-UNKNOWN-ID"


class UnknownDimensionError(HoilError):
    code = "E-UNKNOWN-DIM"


class UnboundDimensionError(HoilError):
    code = "E-UNBOUND-DIM"


class CycleError(HoilError):
    code = "E-CYCLE"


class CheckFailed(HoilError):
    """Raised by :func:`hoil.lang.check_or_raise` with every static error found."""
    code = "E-CHECK"

    def __init__(self, errors):
        first = errors[0]
        super().__init__(first.message, first.pos)
        self.errors = list(errors)
