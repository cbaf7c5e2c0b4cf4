"""Exception hierarchy for the hbacsim package."""


class Error(Exception):
    """Base class for all hbacsim errors."""


class FileError(Error):
    """System errors while reading configs or writing reports"""


class StateError(Error, ValueError):
    """An invalid population vector or register operation."""


class RegisterSizeError(StateError):
    """A register would exceed the maximum number of populations."""


class IndexRangeError(Error, IndexError):
    """A qubit or basis index outside the register."""


class ChannelError(Error, ValueError):
    """Malformed channel arguments, such as a non-bijective permutation."""


class ParameterError(Error, ValueError):
    """Invalid physical or numerical parameters."""


class StepTooLargeError(ParameterError):
    """An integration step that violates the stability guard."""


class ReportMismatchError(Error, ValueError):
    """Two run reports that cannot be compared with each other."""


class NonConvergenceError(Error):
    """A protocol run hit its iteration cap before reaching a fixed point.

    The incomplete report is available as the ``report`` attribute.
    """

    def __init__(self, report):
        super().__init__(
            f"{report.protocol} run did not converge within {report.iterations} "
            f"rounds (residual {report.residual:.3g})"
        )
        self.report = report


class ConfigError(Error):
    """Scenario configuration that cannot be parsed.

    ``key`` and ``line`` point at the offending spot when known.
    """

    def __init__(self, msg, key=None, line=None):
        super().__init__(msg)
        self.key = key
        self.line = line


class ValidationError(ConfigError):
    """A parsed configuration that violates one or more invariants."""

    def __init__(self, problems):
        super().__init__("invalid configuration: " + "; ".join(problems))
        self.problems = list(problems)
