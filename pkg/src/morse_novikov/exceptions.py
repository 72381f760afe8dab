"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class UsageError(ValueError):
    """Bad arguments: mismatched rings, wrong variable counts, unsupported input."""


class ParseError(UsageError):
    """Malformed input file or polynomial literal."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ValueError):
    """Input parsed but violates a structural invariant (cocycle condition, d^2 != 0)."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class ResourceCapError(RuntimeError):
    """A computation would exceed the configured memory guard."""


class DegenerateCriticalPointError(ArithmeticError):
    """The reduced Hessian has an eigenvalue within the degeneracy threshold of zero."""


class ClassMismatchError(UsageError):
    """The smooth 1-form and the combinatorial cocycle do not model the same class."""


class HypothesisError(RuntimeError):
    """A theorem hypothesis (beta-Morse, regular value, positivity) does not hold."""


class SolverDisagreementError(RuntimeError):
    """The two independent chord solvers returned different point sets."""

    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second
