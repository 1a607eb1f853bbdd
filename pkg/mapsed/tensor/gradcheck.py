from __future__ import annotations

from typing import Callable, Dict, List, Sequence

import numpy as np

from mapsed.tensor.tape import TapeValue, Tensor, backward

DEFAULT_STEP = 1e-5
_FLOOR = 1e-10

ScalarFn = Callable[..., TapeValue]


def analytic_gradients(fn: ScalarFn, arrays: Sequence[Tensor]) -> List[Tensor]:
    leaves = [TapeValue(np.array(a, dtype=np.float64), requires_grad=True) for a in arrays]
    root = fn(*leaves)
    backward(root)
    return [
        leaf.grad if leaf.grad is not None else np.zeros_like(leaf.value) for leaf in leaves
    ]


def numerical_gradients(
    fn: ScalarFn, arrays: Sequence[Tensor], step: float = DEFAULT_STEP
) -> List[Tensor]:
    """Central differences, one entry at a time."""
    base = [np.array(a, dtype=np.float64) for a in arrays]
    results: List[Tensor] = []
    for target in range(len(base)):
        grad = np.zeros_like(base[target])
        flat = base[target].reshape(-1)
        for index in range(flat.size):
            original = flat[index]
            flat[index] = original + step
            upper = fn(*[TapeValue(a) for a in base]).item()
            flat[index] = original - step
            lower = fn(*[TapeValue(a) for a in base]).item()
            flat[index] = original
            grad.reshape(-1)[index] = (upper - lower) / (2.0 * step)
        results.append(grad)
    return results


def relative_error(analytic: Tensor, numeric: Tensor) -> float:
    scale = max(float(np.linalg.norm(analytic)), float(np.linalg.norm(numeric)), _FLOOR)
    return float(np.linalg.norm(analytic - numeric)) / scale


def gradcheck(
    fn: ScalarFn, arrays: Sequence[Tensor], step: float = DEFAULT_STEP
) -> Dict[int, float]:
    """Relative error of the reverse-mode gradient per input position."""
    analytic = analytic_gradients(fn, arrays)
    numeric = numerical_gradients(fn, arrays, step=step)
    return {
        index: relative_error(a, n) for index, (a, n) in enumerate(zip(analytic, numeric))
    }


def joint_gradcheck(fn: ScalarFn, arrays: Sequence[Tensor], step: float = DEFAULT_STEP) -> float:
    """Relative error of the reverse-mode gradient over every input taken together."""
    analytic = analytic_gradients(fn, arrays)
    numeric = numerical_gradients(fn, arrays, step=step)
    return relative_error(
        np.concatenate([grad.reshape(-1) for grad in analytic]),
        np.concatenate([grad.reshape(-1) for grad in numeric]),
    )
