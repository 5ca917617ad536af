"""Named parameter storage and the momentum SGD optimizer."""

from __future__ import annotations

from typing import Iterator, Tuple

import numpy as np

from .errors import GradientError
from .tensor import Node, Tensor


class ParamStore:
    """Named parameters with trainable flags, iterated in registration order."""

    def __init__(self):
        self._nodes: dict[str, Node] = {}
        self._trainable: dict[str, bool] = {}

    def register(self, name: str, node: Node, trainable: bool = True) -> Node:
        if name in self._nodes:
            raise ValueError(f"parameter {name!r} already registered")
        node.requires_grad = trainable
        self._nodes[name] = node
        self._trainable[name] = trainable
        return node

    def __contains__(self, name: str) -> bool:
        return name in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def names(self) -> list[str]:
        return list(self._nodes)

    def get(self, name: str) -> Node:
        return self._nodes[name]

    def is_trainable(self, name: str) -> bool:
        return self._trainable[name]

    def set_trainable(self, name: str, flag: bool) -> None:
        self._trainable[name] = flag
        self._nodes[name].requires_grad = flag

    def items(self) -> Iterator[Tuple[str, Node]]:
        return iter(self._nodes.items())

    def zero_grads(self) -> None:
        for node in self._nodes.values():
            node.grad = None

    def state(self) -> list[tuple[str, np.ndarray, bool]]:
        """(name, values, trainable) triples in registration order."""
        return [(n, node.value.array, self._trainable[n]) for n, node in self._nodes.items()]

    def load_state(self, records) -> None:
        """Restore values and trainable flags from `state()`-shaped records."""
        names = self.names()
        got = [r[0] for r in records]
        if names != got:
            raise ValueError(f"parameter names mismatch: expected {names[:3]}..., got {got[:3]}...")
        for name, values, trainable in records:
            node = self._nodes[name]
            if tuple(values.shape) != node.value.shape:
                raise ValueError(f"parameter {name!r}: shape {values.shape} != {node.value.shape}")
            node.value = Tensor(np.asarray(values, dtype=node.dtype))
            self.set_trainable(name, bool(trainable))


class SGD:
    """Momentum SGD. Frozen parameters are never touched, bitwise."""

    def __init__(self, params: ParamStore, lr: float = 0.01, momentum: float = 0.9):
        if lr <= 0:
            raise ValueError(f"lr must be positive, got {lr}")
        self.params = params
        self.lr = lr
        self.momentum = momentum
        self._velocity: dict[str, np.ndarray] = {}

    def step(self) -> None:
        """Apply one update from the accumulated gradients, then zero them."""
        for name, node in self.params.items():
            if not self.params.is_trainable(name):
                node.grad = None
                continue
            if node.grad is None:
                raise GradientError(f"trainable parameter {name!r} has no gradient; run backward() first")
            g = node.grad.array
            buf = self._velocity.get(name)
            buf = g.copy() if buf is None else self.momentum * buf + g
            self._velocity[name] = buf
            node.value = Tensor._wrap(node.value.array - self.lr * buf)
            node.grad = None


class Adam:
    """Adam with the standard bias-corrected moment estimates.

    Same freeze contract as SGD: non-trainable parameters stay bitwise
    unchanged and their stale gradients are discarded.
    """

    def __init__(self, params: ParamStore, lr: float = 0.003, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0:
            raise ValueError(f"lr must be positive, got {lr}")
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}
        self._t = 0

    def step(self) -> None:
        self._t += 1
        b1, b2 = self.beta1, self.beta2
        for name, node in self.params.items():
            if not self.params.is_trainable(name):
                node.grad = None
                continue
            if node.grad is None:
                raise GradientError(f"trainable parameter {name!r} has no gradient; run backward() first")
            g = node.grad.array
            m = self._m.get(name, 0.0) * b1 + (1 - b1) * g
            v = self._v.get(name, 0.0) * b2 + (1 - b2) * g * g
            self._m[name], self._v[name] = m, v
            mhat = m / (1 - b1 ** self._t)
            vhat = v / (1 - b2 ** self._t)
            step = self.lr * mhat / (np.sqrt(vhat) + self.eps)
            node.value = Tensor._wrap(node.value.array - step.astype(node.dtype, copy=False))
            node.grad = None


def make_optimizer(kind: str, params: ParamStore, lr: float, momentum: float = 0.9):
    if kind == "sgd":
        return SGD(params, lr=lr, momentum=momentum)
    if kind == "adam":
        return Adam(params, lr=lr)
    raise ValueError(f"unknown optimizer {kind!r}")
