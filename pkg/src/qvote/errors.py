"""Exception hierarchy shared by all qvote modules."""


class QVoteError(Exception):
    """Base class for every error raised by qvote."""


class ValidationError(QVoteError, ValueError):
    pass


class CapacityError(ValidationError):
    """Register would exceed the supported number of qubits."""


class QubitIndexError(QVoteError, IndexError):
    pass


class AuthenticationError(QVoteError):
    """The certificate authority rejected a participant."""


class ConsistencyError(QVoteError):
    """An internal cross-check between redundant results failed."""


class ProtocolViolationError(QVoteError):
    pass


class ContractError(QVoteError):
    """An operation was invoked outside the situation it is defined for."""


class AccountingError(QVoteError):
    pass


class UndefinedEfficiencyError(QVoteError, ZeroDivisionError):
    pass


class TamperSignal(QVoteError):
    """A decoded operator lies outside the voter's rule pair."""

    def __init__(self, message, operator=None):
        super().__init__(message)
        self.operator = operator


class ConfigurationError(QVoteError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
