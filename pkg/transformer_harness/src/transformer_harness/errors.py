class HarnessError(Exception):
    """Base class for harness errors."""


class UsageError(HarnessError):
    """Caller violated a precondition (empty dataset, bad config value)."""
