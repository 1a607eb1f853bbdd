from typing import Iterable, Optional

from mapsed.types.exceptions import ConfigurationError


class UnknownConfigKeyError(ConfigurationError):
    def __init__(self, keys: Iterable[str], valid: Optional[Iterable[str]] = None) -> None:
        self.keys = sorted(keys)
        message = f'Unknown configuration keys: {", ".join(self.keys)}'
        if valid is not None:
            message += f' (valid keys: {", ".join(sorted(valid))})'
        super().__init__(message)


class InvalidGeneratorError(ConfigurationError):
    def __init__(self, name: str, valid: Iterable[str]) -> None:
        self.name = name
        self.valid = sorted(valid)
        super().__init__(
            f'Unknown synthetic generator {name!r}, expected one of: {", ".join(self.valid)}'
        )
