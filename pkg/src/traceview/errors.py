"""Exception hierarchy shared by every engine module."""


class TraceViewError(Exception):
    """Base class for all engine errors."""


class ValidationError(TraceViewError):
    """Input violates a structural, typing or schema constraint.

    The CLI maps this family to exit code 2.
    """


class UnknownPreferenceError(ValidationError):
    """A preference id does not exist in the active schema."""

    def __init__(self, pref_id: str):
        super().__init__(f"unknown preference: {pref_id!r}")
        self.pref_id = pref_id


class StorageError(TraceViewError):
    """File-level failure: missing, unreadable or unwritable artifact.

    The CLI maps this family (and bare OSError) to exit code 1.
    """


class MissingDatasetError(StorageError):
    """A dataset source referenced by a snapshot cannot be loaded."""

    def __init__(self, source: str, detail: str = ""):
        msg = f"missing dataset: {source}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.source = source


class PlaybackError(StorageError):
    """A scenario step could not be positioned; the cursor did not move."""

    def __init__(self, step: int, ref: str, reason: str):
        super().__init__(f"step {step} ({ref}): {reason}")
        self.step = step
        self.ref = ref
        self.reason = reason
