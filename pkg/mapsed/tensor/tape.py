"""
Reverse-mode differentiation on dense float64 arrays.

Every differentiable operation returns a :class:`TapeValue` whose provenance
(parents + backward function) is recorded only when at least one parent requires a
gradient. :func:`backward` walks the recorded graph once in reverse topological order.
"""
from __future__ import annotations

from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from mapsed.tensor.exceptions import ContractViolationError

Tensor = npt.NDArray[np.float64]
BackwardFn = Callable[[Tensor], Sequence[Optional[Tensor]]]
ArrayLike = Union['TapeValue', Tensor, float, int, Sequence[Any]]


def as_tensor(value: Any) -> Tensor:
    return np.asarray(value, dtype=np.float64)


class TapeValue:
    __slots__ = ('value', 'grad', 'requires_grad', 'name', '_parents', '_backward_fn')

    def __init__(
        self, value: Any, requires_grad: bool = False, name: Optional[str] = None
    ) -> None:
        self.value: Tensor = as_tensor(value)
        self.grad: Optional[Tensor] = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents: Tuple[TapeValue, ...] = ()
        self._backward_fn: Optional[BackwardFn] = None

    @classmethod
    def from_op(
        cls, value: Tensor, parents: Sequence[TapeValue], backward_fn: BackwardFn
    ) -> TapeValue:
        out = cls(value)
        if any(parent.requires_grad for parent in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward_fn = backward_fn
        return out

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.value.shape)

    @property
    def ndim(self) -> int:
        return int(self.value.ndim)

    @property
    def is_leaf(self) -> bool:
        return self._backward_fn is None

    @property
    def parents(self) -> Tuple[TapeValue, ...]:
        return self._parents

    def item(self) -> float:
        return float(self.value)

    def detach(self) -> TapeValue:
        return TapeValue(self.value)

    def __add__(self, other: ArrayLike) -> TapeValue:
        from mapsed.tensor import ops

        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other: ArrayLike) -> TapeValue:
        from mapsed.tensor import ops

        return ops.sub(self, other)

    def __rsub__(self, other: ArrayLike) -> TapeValue:
        from mapsed.tensor import ops

        return ops.sub(other, self)

    def __mul__(self, other: ArrayLike) -> TapeValue:
        from mapsed.tensor import ops

        return ops.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> TapeValue:
        from mapsed.tensor import ops

        return ops.neg(self)

    def __repr__(self) -> str:
        flag = ', requires_grad=True' if self.requires_grad else ''
        return f'TapeValue(shape={self.shape}{flag})'


def lift(value: ArrayLike) -> TapeValue:
    if isinstance(value, TapeValue):
        return value
    return TapeValue(value)


def topological_order(root: TapeValue) -> List[TapeValue]:
    """Parents come before children; every reachable node appears once."""
    order: List[TapeValue] = []
    visited = set()
    stack: List[Tuple[TapeValue, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(root: TapeValue) -> None:
    """
    Populates ``.grad`` of every node reachable from a scalar ``root``.

    Gradients are written fresh on each call; nodes reached through several paths get
    the sum of all contributions.
    """
    if root.value.shape != ():
        raise ContractViolationError(
            f'backward() needs a scalar root, got shape {root.shape}'
        )

    order = topological_order(root)
    grads: Dict[int, Tensor] = {id(root): np.ones((), dtype=np.float64)}
    for node in reversed(order):
        if node is not root and not node.requires_grad:
            continue
        grad = grads.pop(id(node), None)
        if grad is None:
            grad = np.zeros_like(node.value)
        node.grad = grad
        if node._backward_fn is None:
            continue
        parent_grads = node._backward_fn(grad)
        for parent, parent_grad in zip(node._parents, parent_grads):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + parent_grad
            else:
                grads[key] = parent_grad
