from core.exceptions import MarvelError


class UndefinedMetric(MarvelError):
    """AUROC/ROC asked for on scores of a single class."""
