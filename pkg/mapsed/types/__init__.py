from .base import Base, HashableBase
from .exceptions import ConfigurationError, MapsedError

__all__ = ('Base', 'HashableBase', 'MapsedError', 'ConfigurationError')
