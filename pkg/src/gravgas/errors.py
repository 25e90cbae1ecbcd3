"""Exception hierarchy shared by all gravgas modules."""


class GravGasError(Exception):
    """Base class for every error raised by gravgas."""


class NegativeDensity(GravGasError, ValueError):
    pass


class NonIntegrable(GravGasError, ValueError):
    pass


class OutOfRange(GravGasError, ValueError):
    pass


class NegativeRadicand(GravGasError, ValueError):
    pass


class NoBracket(GravGasError, ValueError):
    pass


class DerivativeUnavailable(GravGasError, ValueError):
    pass


class GridMismatch(GravGasError, ValueError):
    pass


class StepFailure(GravGasError, RuntimeError):
    pass


class ConfigError(GravGasError, ValueError):
    """Malformed scenario configuration; ``line`` and ``key`` locate the problem."""

    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


class BreakdownEvent(GravGasError):
    """The single-stream solution stops being valid at ``time``.

    Not a programming error: collapse and crossing are physical outcomes,
    callers are expected to catch these and report the event time.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class CollapseSingularity(BreakdownEvent):
    pass


class ShellCrossing(BreakdownEvent):
    pass


class SheetCrossing(BreakdownEvent):
    pass


class DegenerateCrossing(BreakdownEvent):
    """More than two sheets met at one instant; ``sheets`` lists their ids."""

    def __init__(self, message, time=None, sheets=()):
        super().__init__(message, time=time)
        self.sheets = tuple(sheets)
