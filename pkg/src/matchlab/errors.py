"""Exception types shared across the package."""


class MatchlabError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MatchlabError):
    """Invalid data rejected at construction time."""


class UnknownOutcomeError(MatchlabError):
    """Rank lookup for an outcome that does not appear in the order."""


class DimensionMismatchError(MatchlabError):
    """A matching and a profile disagree about the market dimensions."""


class SizeGuardError(MatchlabError):
    """Refusal to run an enumeration whose size guard is exceeded."""


class BudgetExceededError(MatchlabError):
    """A search or certification would exceed its evaluation budget."""

    def __init__(self, message: str, count: int):
        super().__init__(f"{message} (required {count})")
        self.count = count


class PreconditionError(MatchlabError):
    """A documented precondition of the operation does not hold."""


class NotResponsiveError(MatchlabError):
    """A college preference violates responsiveness where it is required."""


class UnknownSuiteError(MatchlabError):
    """Requested verification suite id does not exist."""


class FormatError(MatchlabError):
    """Malformed input file; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
