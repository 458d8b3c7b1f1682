from core.exceptions import MarvelError, NumericalFailure


class EmptyClass(MarvelError):
    """A task has no training recordings of one class."""


class InternalInvariantBroken(MarvelError):
    """A batch reached the loss without items for a task it must cover."""


class NonFiniteLoss(NumericalFailure):
    pass
