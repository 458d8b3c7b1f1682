from acoustics.exceptions import MissingRepresentation
from core.exceptions import ConfigError, MarvelError

__all__ = ['InsufficientData', 'MissingRepresentation', 'UndefinedCorrelation', 'UntrainedModel']


class UndefinedCorrelation(MarvelError):
    """Pearson correlation with a constant input."""


class InsufficientData(MarvelError):
    pass


class UntrainedModel(ConfigError):
    """Checkpoint does not match the feature schema or model the analysis expects."""
