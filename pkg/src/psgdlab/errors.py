"""Exception hierarchy shared by every module of the lab."""


class LabError(Exception):
    """Base class for all errors raised by psgdlab."""


class InvalidInput(LabError, ValueError):
    """Non-finite data, wrong dimensions or out-of-domain parameters."""


class PointNotInSet(LabError, ValueError):
    """A cone query was made at a point outside the constraint set."""


class InvalidSchedule(LabError, ValueError):
    """A step size fell outside (0, 1/2]."""


class NumericalFailure(LabError, ArithmeticError):
    """A NaN or infinity appeared during an iteration."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NonConvergence(LabError, RuntimeError):
    """An inner solver hit its iteration cap."""


class MissingConstant(LabError, ValueError):
    """A bound needs a noise constant that the noise model does not provide."""


class ConfigError(LabError, ValueError):
    """Invalid experiment configuration.

    Carries the JSON path of the offending entry and, when it can be located,
    the line number in the source file.
    """

    def __init__(self, message, path=None, line=None):
        if isinstance(path, str):
            path = [p for p in path.split("/") if p]
        where = []
        if path:
            where.append("at " + "/".join(str(p) for p in path))
        if line is not None:
            where.append(f"line {line}")
        full = message if not where else f"{message} ({', '.join(where)})"
        super().__init__(full)
        self.path = list(path) if path else []
        self.line = line
        self.reason = message


InvalidConfig = ConfigError
