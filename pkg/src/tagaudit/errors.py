"""Exception hierarchy.

Two families so the CLI can map failures to exit codes: `InputError`
(bad files or parameters, exit 1) and `NumericError` (the computation is
impossible or degenerate for otherwise well-formed input, exit 2).
"""


class TagAuditError(Exception):
    """Base class for every library-raised error."""


class InputError(TagAuditError):
    """Caller-supplied data or parameters are invalid."""


class NumericError(TagAuditError):
    """A numeric precondition fails or the computation degenerates."""


# -- aggregate validation ------------------------------------------------

class NegativeCount(InputError):
    pass


class CountsExceedPopulation(InputError):
    pass


class ZeroPopulation(InputError):
    pass


# -- simulation ----------------------------------------------------------

class InvalidSplit(InputError):
    pass


class EmptySample(InputError):
    pass


# -- ranking -------------------------------------------------------------

class NoRecognizedUsers(NumericError):
    """The source tagged nobody Positive or Negative in a campaign."""


class ZeroGroundTruthPositives(NumericError):
    """The ground truth reports no positives, so relative error is undefined."""


class NoUsableCampaigns(NumericError):
    """Every campaign of a source failed to yield a relative error."""


class DegenerateErr(NumericError):
    """Mean relative error >= 1; the rank-based extrapolation blows up."""


# -- inference -----------------------------------------------------------

class TooFewCampaigns(NumericError):
    """At least 3 campaigns are required for a unique estimate."""


class UnequalPopulations(NumericError):
    """Campaign sizes differ but per-population normalization is off."""


class NonConvergence(NumericError):
    """The solver hit its iteration cap before reaching tolerance."""


class Infeasible(NumericError):
    pass


class InsufficientDof(NumericError):
    """Confidence intervals need 2k-6 >= 1, i.e. at least 4 campaigns."""


# -- planning / forecasting ----------------------------------------------

class ZeroReach(InputError):
    pass


class CountExceedsReach(InputError):
    pass


class InvalidParameters(InputError):
    pass


class ZeroFreePrecision(InputError):
    pass


class UnknownTag(InputError):
    """A user carries a category the precision table does not cover."""


# -- file ingestion ------------------------------------------------------

class ParseError(InputError):
    """A record could not be parsed; carries the position of the offence."""

    def __init__(self, line, field, message):
        self.line = line
        self.field = field
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}field {field!r}: {message}")


class ValidationError(InputError):
    """A parsed record failed domain validation; wraps the domain error."""

    def __init__(self, line, cause):
        self.line = line
        self.cause = cause
        super().__init__(f"line {line}: {cause}")
