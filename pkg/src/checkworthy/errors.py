"""Exception hierarchy shared by all pipeline stages."""


class CheckworthyError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CheckworthyError):
    """A data file row could not be parsed (carries the 1-based line number)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class LabelError(CheckworthyError):
    """A label string is not one of the accepted class labels."""


class IntegrityError(CheckworthyError):
    """Dataset-level consistency violation (duplicate ids, id collisions)."""


class UsageError(CheckworthyError):
    """The caller violated an operation's precondition."""


class DataError(CheckworthyError):
    """Numeric data is unusable (non-finite feature values)."""


class AlignmentError(CheckworthyError):
    """Gold rows and prediction rows do not line up one-to-one.

    Carries the offending ids split by kind so callers can report them.
    """

    def __init__(self, missing=(), extra=(), duplicates=()):
        self.missing = tuple(missing)
        self.extra = tuple(extra)
        self.duplicates = tuple(duplicates)
        parts = []
        if self.missing:
            parts.append(f"missing predictions for {len(self.missing)} gold ids: "
                         f"{_preview(self.missing)}")
        if self.extra:
            parts.append(f"{len(self.extra)} predictions without gold rows: "
                         f"{_preview(self.extra)}")
        if self.duplicates:
            parts.append(f"{len(self.duplicates)} duplicated prediction ids: "
                         f"{_preview(self.duplicates)}")
        super().__init__("; ".join(parts) or "predictions do not align with gold rows")


def _preview(ids, limit: int = 5) -> str:
    shown = ", ".join(str(i) for i in ids[:limit])
    return shown + (", ..." if len(ids) > limit else "")
