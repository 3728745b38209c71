"""Exception hierarchy shared by every module."""


class CatalyticLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigInvalid(CatalyticLabError):
    pass


class LengthMismatch(CatalyticLabError, ValueError):
    pass


class TooLarge(CatalyticLabError):
    """An exhaustive computation was requested above its size threshold."""


class NotDecodable(CatalyticLabError):
    pass


class MachineError(CatalyticLabError):
    pass


class WorkSpaceExceeded(MachineError):
    pass


class UndefinedTransition(MachineError):
    pass


class AlreadyHalted(MachineError):
    pass


class BudgetExceeded(MachineError):
    def __init__(self, msg, steps=None):
        super().__init__(msg)
        self.steps = steps


class HypothesisViolated(CatalyticLabError):
    """The restoration hypothesis of the disjointness check does not hold."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness
