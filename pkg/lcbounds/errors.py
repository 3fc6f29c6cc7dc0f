"""
Exception hierarchy for lcbounds.

Every error carries a human readable ``detail`` and the process ``exit_code``
the CLI should terminate with when the error escapes a command.
"""

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_MALFORMED = 2


class LCBoundsError(Exception):
    exit_code = EXIT_VIOLATION

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DomainError(LCBoundsError):
    """Argument outside the domain of an operation"""


class ParameterRangeError(LCBoundsError):
    """Distribution parameters that are infeasible or out of range"""


class NumericalError(LCBoundsError):
    """Iteration cap hit, quadrature failure or oracle disagreement"""


class DivergenceError(NumericalError):
    """Expectation is infinite for every scale"""


class NotLogConcaveError(LCBoundsError):
    """Input is required to be log-concave and is not"""


class UnboundedMajorantError(DomainError):
    """Density vanishes at the matching point"""


class SubfactorialOverflowError(LCBoundsError):
    """Exact subfactorial requested beyond the supported range"""


class MalformedInputError(LCBoundsError):
    exit_code = EXIT_MALFORMED
