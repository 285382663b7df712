"""Exception hierarchy shared by every module of the package."""


class LdalgError(Exception):
    """Base class for all errors raised by ldalg."""


class DomainError(LdalgError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceError(LdalgError):
    """A memory or tuple-count budget would be exceeded."""


class FormatError(LdalgError, ValueError):
    """A text file or term string is malformed."""


class RewriteError(LdalgError, ValueError):
    """A position is not a redex of the requested direction."""


class FuelError(LdalgError):
    """A step budget ran out while building a derivation."""

    def __init__(self, stage, budget):
        super().__init__(f"step budget of {budget} exhausted in stage {stage!r}")
        self.stage = stage
        self.budget = budget
