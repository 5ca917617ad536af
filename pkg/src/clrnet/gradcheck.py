"""Central finite-difference gradient verification.

Run in float64; the relative-error measure is
|analytic - numeric| / max(1e-8, |analytic| + |numeric|), maxed over
components.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .params import ParamStore
from .tensor import Node, Tensor, backward

FLOOR = 1e-8


def _rel_err(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(FLOOR, np.abs(analytic) + np.abs(numeric))
    return float(np.max(np.abs(analytic - numeric) / denom))


def finite_diff_check(f: Callable[[Node], Node], x, eps: float = 1e-5) -> float:
    """Max relative error of the analytic gradient of f at x.

    f maps a graph node to a scalar node; x is the input array (float64).
    """
    x0 = np.asarray(x, dtype=np.float64)
    leaf = Node(Tensor(x0), requires_grad=True)
    loss = f(leaf)
    backward(loss)
    analytic = leaf.grad.array.reshape(-1).copy()

    flat = x0.reshape(-1)
    numeric = np.empty_like(flat)
    for i in range(flat.size):
        bumped = flat.copy()
        bumped[i] = flat[i] + eps
        fp = f(Node(Tensor(bumped.reshape(x0.shape)))).value.item()
        bumped[i] = flat[i] - eps
        fm = f(Node(Tensor(bumped.reshape(x0.shape)))).value.item()
        numeric[i] = (fp - fm) / (2.0 * eps)
    return _rel_err(analytic, numeric)


def model_grad_check(loss_fn: Callable[[], Node], params: ParamStore, eps: float = 1e-5) -> float:
    """Max relative error over every trainable parameter of a model.

    loss_fn rebuilds the full forward + loss graph from the current
    parameter values. The model must be built in float64.
    """
    loss = loss_fn()
    backward(loss)
    analytic = {
        name: node.grad.array.copy()
        for name, node in params.items()
        if params.is_trainable(name) and node.grad is not None
    }
    params.zero_grads()

    worst = 0.0
    for name, node in params.items():
        if name not in analytic:
            continue
        base = node.value.array.copy()
        flat = base.reshape(-1)
        numeric = np.empty_like(flat)
        for i in range(flat.size):
            bumped = flat.copy()
            bumped[i] = flat[i] + eps
            node.value = Tensor(bumped.reshape(base.shape))
            fp = loss_fn().value.item()
            bumped[i] = flat[i] - eps
            node.value = Tensor(bumped.reshape(base.shape))
            fm = loss_fn().value.item()
            numeric[i] = (fp - fm) / (2.0 * eps)
        node.value = Tensor(base)
        worst = max(worst, _rel_err(analytic[name].reshape(-1), numeric))
    return worst
