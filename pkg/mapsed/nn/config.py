import math
from typing import Optional

from pydantic import confloat, conint
from typing_extensions import Literal

from mapsed.types.base import Base

MIN_BOTTLENECK_WIDTH = 4


class ModelConfig(Base):
    encoder_layers: conint(ge=1) = 2  # type: ignore[valid-type]
    bottleneck_width: Optional[conint(ge=1)] = None  # type: ignore[valid-type]
    """Channels of the middle 3x3 layer; derived from the output width when unset"""

    bottleneck_activation: Literal['relu', 'none'] = 'relu'

    def mid_width(self, out_channels: int) -> int:
        if self.bottleneck_width is not None:
            return self.bottleneck_width
        return max(math.ceil(out_channels / 2), MIN_BOTTLENECK_WIDTH)


class VAEConfig(Base):
    latent_channels: Optional[conint(ge=1)] = None  # type: ignore[valid-type]
    """Defaults to the number of categories"""

    hidden_channels: conint(ge=1) = 8  # type: ignore[valid-type]
    epochs: conint(ge=1) = 100  # type: ignore[valid-type]
    batch_size: conint(ge=1) = 16  # type: ignore[valid-type]
    learning_rate: confloat(gt=0) = 1e-2  # type: ignore[valid-type]
    kl_weight: confloat(ge=0) = 1.0  # type: ignore[valid-type]
