class SeriesLabError(Exception):
    pass


class UsageError(SeriesLabError):
    pass


class InvalidArgument(SeriesLabError, ValueError):
    pass


class DomainMismatch(SeriesLabError):
    pass


class PreconditionViolation(SeriesLabError):
    pass


class NumericFailure(SeriesLabError):
    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class EmptyReport(SeriesLabError):
    pass


class EmptySupport(SeriesLabError):
    pass


class InsufficientData(SeriesLabError):
    pass


class SamplePointUndefined(SeriesLabError):
    pass


class OnsetViolation(SeriesLabError):
    pass


class CheckFailure(SeriesLabError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class HypothesisFailure(SeriesLabError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SearchExhausted(SeriesLabError):
    def __init__(self, message, traces=None):
        super().__init__(message)
        self.traces = traces or []


class IntegralityFailure(SeriesLabError):
    pass


class NotApplicable(SeriesLabError):
    pass


class CapExceeded(SeriesLabError):
    pass


class UnknownClass(SeriesLabError):
    pass
