from typing import ClassVar, Optional


class MapsedError(Exception):
    """Root of every error raised on purpose by mapsed."""

    description: ClassVar[Optional[str]] = None

    def __init__(self, message: Optional[str] = None) -> None:
        self.message = message or self.description or self.__class__.__name__
        super().__init__(self.message)

    def __str__(self) -> str:
        return self.message


class ConfigurationError(MapsedError):
    description = 'Invalid configuration'
