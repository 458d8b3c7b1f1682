class MarvelError(Exception):
    """Base error of the toolkit. `exit_code` is what the CLI exits with."""
    exit_code = 1

    def __init__(self, message='', **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self):
        if not self.context:
            return self.message
        details = ', '.join(f'{key}={value!r}' for key, value in sorted(self.context.items()))
        return f'{self.message} ({details})'


class ConfigError(MarvelError):
    exit_code = 2


class FingerprintMismatch(ConfigError):
    """An artifact was produced under a different configuration."""


class MissingPrerequisite(MarvelError):
    exit_code = 3


class NumericalFailure(MarvelError):
    exit_code = 4


class AcceptanceFailure(MarvelError):
    exit_code = 5
