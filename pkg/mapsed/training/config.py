from typing import Optional

from pydantic import confloat, conint
from typing_extensions import Literal

from mapsed.types.base import Base


class TrainConfig(Base):
    learning_rate: confloat(gt=0) = 1e-3  # type: ignore[valid-type]
    epochs: conint(ge=1) = 50  # type: ignore[valid-type]
    batch_size: conint(ge=1) = 4  # type: ignore[valid-type]
    seed: int = 0
    optimizer: Literal['sgd', 'momentum', 'adam'] = 'adam'
    augment: bool = True
    adapter: Literal['identity', 'vae'] = 'identity'

    patience: Optional[conint(ge=1)] = None  # type: ignore[valid-type]
    """Stop after this many epochs without a better validation loss"""

    max_steps: Optional[conint(ge=0)] = None  # type: ignore[valid-type]
    """Upper bound on optimizer steps; 0 keeps the initial parameters"""

    fixed_contrast_samples: bool = False
    """Draw each sequence's positive permutation and negatives once, before training"""
