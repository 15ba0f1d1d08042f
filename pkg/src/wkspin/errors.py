"""Exception types raised across the package."""


class WKError(Exception):
    """Base class for all package errors."""


class DegenerateMetric(WKError):
    pass


class ZeroScalarCurvature(WKError):
    pass


class NegativeRadicand(WKError):
    pass


class SignRuleUndefined(WKError):
    pass


class CalibrationFailed(WKError):
    pass


class NoCommonRoot(WKError):
    pass


class IdenticallyZero(WKError):
    pass


class DegenerateInput(WKError):
    pass


class ZeroLambda(WKError):
    pass


class ZeroSpinor(WKError):
    pass


class ZeroK(WKError):
    pass


class ZeroPoint(WKError):
    pass
