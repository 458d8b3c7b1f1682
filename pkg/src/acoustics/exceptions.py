from core.exceptions import MarvelError, MissingPrerequisite


class InputTooShort(MarvelError):
    """Waveform shorter than one analysis window."""


class InvalidSignal(MarvelError):
    """Waveform contains NaN/inf samples or a non-positive sample rate."""


class InsufficientBins(MarvelError):
    """Fewer mel bins than requested cepstral coefficients."""


class DuplicateKey(MarvelError):
    pass


class ParseError(MarvelError):
    pass


class MissingRepresentation(MissingPrerequisite):
    """No cached representation for a recording."""
