"""Exception types shared by every module."""


class SteinbenchError(Exception):
    pass


class MalformedInputError(SteinbenchError, ValueError):
    """Input data is structurally broken (ragged tables, dangling ids, bad JSON)."""


class DomainError(SteinbenchError, ValueError):
    """Operation is undefined for otherwise well-formed arguments."""


class SizeCapError(SteinbenchError):
    """A materialization or enumeration would exceed its configured cap."""

    def __init__(self, message, required=None, cap=None):
        super().__init__(message)
        self.required = required
        self.cap = cap


class FiniteStateCapError(SteinbenchError):
    """Section exploration exceeded the state cap; the answer is unknown."""

    def __init__(self, message, explored=None):
        super().__init__(message)
        self.explored = explored
