"""Exception types shared across the toolkit.

Several operations have a genuine third outcome besides True/False: the
answer exists but cannot be certified from the finite data at hand.  Those
outcomes are raised, never folded into a boolean.
"""


class CantorkitError(Exception):
    """Base class for all toolkit errors."""


class ResourceLimitError(CantorkitError):
    """A requested computation would exceed an explicit size budget."""


class SearchExhaustedError(CantorkitError):
    """A bounded search over user-supplied data ran out of material."""


class MaterializationError(CantorkitError):
    """A query needs more levels / ranks / prefix than were materialized."""


class UndecidedError(CantorkitError):
    """The question is not decidable from the given finite certificates."""


class CertificateUnavailable(CantorkitError):
    """A limit-stage map did not stabilize; no eventual-constancy certificate."""


class LiftError(CantorkitError):
    """Base class for selector lifting failures."""

    code = "lift-failed"


class NoBaseSelector(LiftError):
    """The relaxed map admits no product selector at all."""

    code = "no-base-selector"


class SeparationSurrogateFailure(LiftError):
    """The point search standing in for the separation step came up empty."""

    code = "separation-surrogate"
