from core.exceptions import MarvelError


class EmptyPool(MarvelError):
    """A (task, class) pool of the training side has no recordings."""
