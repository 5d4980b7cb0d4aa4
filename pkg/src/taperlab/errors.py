"""Exception hierarchy shared by all taperlab modules."""


class TaperlabError(Exception):
    """Base class for every error raised by taperlab."""


class LoadError(TaperlabError):
    """A sweep, pattern or config file could not be parsed or validated."""


class ParameterError(TaperlabError, ValueError):
    """An argument violates a documented precondition."""


class NumericError(TaperlabError, ArithmeticError):
    """A numerical routine failed to converge or produced non-finite output."""


class CoverageError(TaperlabError):
    """The band-centre bin is not covered by the assembled spectrum.

    Raised separately from :class:`ParameterError` so that the tuner can
    skip the offending design instead of aborting.
    """


class TuningError(TaperlabError):
    """No design of the search grid produced a usable corrected pattern."""
