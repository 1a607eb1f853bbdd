from typing import Optional

from mapsed.types.exceptions import MapsedError


class AdapterNotReadyError(MapsedError):
    description = 'The VAE adapter has to be pretrained before it can be used'


class CheckpointFormatError(MapsedError):
    description = 'Checkpoint file is malformed'


class DivergenceError(MapsedError):
    description = 'Loss is no longer finite'

    def __init__(self, message: Optional[str] = None, checkpoint: Optional[str] = None) -> None:
        self.checkpoint = checkpoint
        if checkpoint is not None:
            message = f'{message or self.description}; last good checkpoint: {checkpoint}'
        elif message is not None:
            message = f'{message}; no checkpoint was written yet'
        super().__init__(message)
