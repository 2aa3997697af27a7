"""Exception hierarchy. The CLI maps these onto exit codes."""


class CollinearError(Exception):
    """Base class for all errors raised by this package."""


class BudgetExceeded(CollinearError):
    """An exact enumeration would exceed its configured budget."""


class ValidationError(CollinearError, ValueError):
    """Bad input: violated precondition or malformed spec."""


class DegenerateFamily(CollinearError):
    pass


class NonContracting(CollinearError):
    """Container iteration made no progress or hit its round cap."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


class RetryExhausted(CollinearError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
