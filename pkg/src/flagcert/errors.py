"""Exception types shared across the package."""


class FlagcertError(Exception):
    pass


class CapacityError(FlagcertError, ValueError):
    """A requested size exceeds what the exact machinery supports."""


class ContractViolation(FlagcertError, ValueError):
    """Inputs violate an operation's preconditions or an internal cross-check failed."""


class CertificateSyntaxError(FlagcertError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class RoundingError(FlagcertError, ArithmeticError):
    """Rounding a floating solution produced infeasible exact data."""
