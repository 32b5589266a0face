"""Exception hierarchy for markovhull."""


class MarkovHullError(Exception):
    """Base class for all errors raised by this package."""


class EnumerationTooLarge(MarkovHullError):
    def __init__(self, count: int, cap: int) -> None:
        super().__init__(
            f"path enumeration would visit {count} raw paths, above the cap of {cap} "
            "(raise it with MARKOVHULL_ENUM_CAP or the cap argument)"
        )
        self.count = count
        self.cap = cap


class GluingError(MarkovHullError):
    """Two partial paths or measures cannot be glued at the requested pin."""


class ShiftUnsupported(MarkovHullError):
    pass


class SpaceMismatch(MarkovHullError):
    pass


class ModeMismatch(MarkovHullError):
    pass


class PullbackDomainError(MarkovHullError):
    pass


class EmptyMeasureError(MarkovHullError):
    pass


class PinError(MarkovHullError):
    """A measure is not concentrated on the required (time, state) pin."""


class InvarianceError(MarkovHullError):
    pass


class GroupTableError(MarkovHullError):
    pass


class ContractError(MarkovHullError):
    """A caller-supplied map or argument violates an operation's precondition."""


class FormatError(MarkovHullError):
    """A serialized space, measure or group file is malformed."""
