from typing import Optional

from pydantic import confloat, conint
from typing_extensions import Literal

from mapsed.types.base import Base


class EvalConfig(Base):
    prediction_mode: Literal['clamp', 'round', 'raw'] = 'clamp'
    """``clamp`` floors forecasts at zero, ``round`` also rounds them to whole counts"""

    split: Literal['train', 'val', 'test'] = 'test'
    baseline: Optional[Literal['history', 'lr']] = None
    probe: Optional[Literal['rotation', 'semantics', 'dynamics']] = None

    turns: conint(ge=0, le=3) = 2  # type: ignore[valid-type]
    """Counter-clockwise quarter turns applied by the rotation probe"""

    probe_category: conint(ge=0) = 0  # type: ignore[valid-type]
    probe_sequence: conint(ge=0) = 0  # type: ignore[valid-type]
    probe_offset: conint(ge=0) = 0  # type: ignore[valid-type]
    ridge: confloat(ge=0) = 1e-6  # type: ignore[valid-type]
