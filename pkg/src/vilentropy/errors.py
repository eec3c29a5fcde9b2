"""Exception types shared across modules."""


class InputError(ValueError):
    """Arguments violate an operation's preconditions."""


class ResourceError(RuntimeError):
    """A configured work or memory budget would be exceeded."""


class PrecisionError(RuntimeError):
    """A Monte-Carlo estimate has too few hits to be meaningful."""


class BracketError(RuntimeError):
    """A scanned maximum sits on the edge of its search bracket."""
