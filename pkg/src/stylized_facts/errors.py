"""Exception types raised across the analysis battery."""


class StylizedFactsError(ValueError):
    """Base class for all errors raised by this package."""

    code = "error"


class ParseError(StylizedFactsError):
    """Input text could not be turned into a valid price series."""

    code = "parse_error"


class InsufficientDataError(StylizedFactsError):
    """The sample is too short for the requested statistic."""

    code = "insufficient_data"


class DegenerateInputError(StylizedFactsError):
    """The sample has zero variance or otherwise collapses the statistic."""

    code = "degenerate_input"


class InvalidParameterError(StylizedFactsError):
    """A model or generator parameter lies outside its valid domain."""

    code = "invalid_parameter"
