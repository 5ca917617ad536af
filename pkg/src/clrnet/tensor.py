"""Dense tensors and reverse-mode automatic differentiation.

Arrays are row-major numpy arrays, channels last (N, H, W, C).
Convolutions are stride-1 cross-correlations; downsampling is done by
pooling. float32 is the training precision, float64 the verification
precision used by the gradient-check tooling.
"""

from __future__ import annotations

import contextlib
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import GradientError, ShapeError

Array = np.ndarray

_FLOAT_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))


class Tensor:
    """Immutable dense N-dimensional array of real numbers."""

    __slots__ = ("array",)

    def __init__(self, array, dtype=None):
        arr = np.array(array, dtype=dtype)
        if arr.dtype not in _FLOAT_DTYPES:
            arr = arr.astype(np.float32)
        arr.setflags(write=False)
        self.array = arr

    @classmethod
    def _wrap(cls, arr: Array) -> "Tensor":
        # Internal: adopt a freshly computed array without copying.
        t = object.__new__(cls)
        if not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        t.array = arr
        return t

    @property
    def shape(self) -> tuple:
        return self.array.shape

    @property
    def dtype(self):
        return self.array.dtype

    @property
    def size(self) -> int:
        return self.array.size

    @property
    def data(self) -> Array:
        """Flat row-major view of the values."""
        return self.array.reshape(-1)

    def item(self) -> float:
        return float(self.array.reshape(-1)[0])

    def numpy(self) -> Array:
        """Read-only view of the underlying array."""
        return self.array

    @classmethod
    def zeros(cls, shape, dtype=np.float32) -> "Tensor":
        return cls._wrap(np.zeros(shape, dtype=dtype))

    @classmethod
    def full(cls, shape, value, dtype=np.float32) -> "Tensor":
        return cls._wrap(np.full(shape, value, dtype=dtype))

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype.name})"


class Node:
    """A value in the computation graph with an optional backward rule."""

    __slots__ = ("value", "parents", "grad", "requires_grad", "_backward")

    def __init__(self, value: Tensor, parents=(), backward=None, requires_grad=False):
        self.value = value
        self.parents = tuple(parents)
        self._backward = backward
        self.requires_grad = requires_grad
        self.grad: Optional[Tensor] = None

    @property
    def shape(self) -> tuple:
        return self.value.shape

    @property
    def dtype(self):
        return self.value.dtype

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __repr__(self) -> str:
        return f"Node(shape={self.shape}, requires_grad={self.requires_grad})"


_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph construction inside the block (inference mode)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def constant(array, dtype=None) -> Node:
    return Node(Tensor(array, dtype=dtype))


def parameter(array, dtype=None) -> Node:
    return Node(Tensor(array, dtype=dtype), requires_grad=True)


def _make(out: Array, parents: Sequence[Node], backward: Callable) -> Node:
    if _grad_enabled and any(p.requires_grad for p in parents):
        return Node(Tensor._wrap(out), parents, backward, requires_grad=True)
    return Node(Tensor._wrap(out))


def _as_node(x) -> Node:
    if isinstance(x, Node):
        return x
    return constant(x)


def _broadcast_ok(sa: tuple, sb: tuple) -> bool:
    # Shapes must match exactly, except scalar operands and a rank-1 bias
    # broadcast over the trailing channel axis.
    if sa == sb or sa == () or sb == ():
        return True
    if len(sb) == 1 and len(sa) >= 1 and sa[-1] == sb[0]:
        return True
    if len(sa) == 1 and len(sb) >= 1 and sb[-1] == sa[0]:
        return True
    return False


def _unbroadcast(g: Array, shape: tuple) -> Array:
    if g.shape == shape:
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


def _check_elementwise(a: Node, b: Node, op: str) -> None:
    if not _broadcast_ok(a.shape, b.shape):
        raise ShapeError(f"{op}: incompatible shapes {a.shape} and {b.shape}")


# ---------------------------------------------------------------------------
# elementwise ops


def add(a, b) -> Node:
    a, b = _as_node(a), _as_node(b)
    _check_elementwise(a, b, "add")
    av, bv = a.value.array, b.value.array
    out = av + bv

    def backward(g):
        return _unbroadcast(g, av.shape), _unbroadcast(g, bv.shape)

    return _make(out, (a, b), backward)


def sub(a, b) -> Node:
    a, b = _as_node(a), _as_node(b)
    _check_elementwise(a, b, "sub")
    av, bv = a.value.array, b.value.array
    out = av - bv

    def backward(g):
        return _unbroadcast(g, av.shape), _unbroadcast(-g, bv.shape)

    return _make(out, (a, b), backward)


def mul(a, b) -> Node:
    """Hadamard (elementwise) product."""
    a, b = _as_node(a), _as_node(b)
    _check_elementwise(a, b, "hadamard")
    av, bv = a.value.array, b.value.array
    out = av * bv

    def backward(g):
        return _unbroadcast(g * bv, av.shape), _unbroadcast(g * av, bv.shape)

    return _make(out, (a, b), backward)


def neg(a: Node) -> Node:
    out = -a.value.array

    def backward(g):
        return (-g,)

    return _make(out, (a,), backward)


def sigmoid(a: Node) -> Node:
    x = a.value.array
    # Stable in both tails.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)

    def backward(g):
        return (g * out * (1.0 - out),)

    return _make(out, (a,), backward)


def tanh(a: Node) -> Node:
    out = np.tanh(a.value.array)

    def backward(g):
        return (g * (1.0 - out * out),)

    return _make(out, (a,), backward)


def relu(a: Node) -> Node:
    x = a.value.array
    out = np.maximum(x, 0.0)

    def backward(g):
        return (g * (x > 0),)

    return _make(out, (a,), backward)


# ---------------------------------------------------------------------------
# shape ops


def reshape(a: Node, shape) -> Node:
    shape = tuple(shape)
    out = a.value.array.reshape(shape)
    src = a.shape

    def backward(g):
        return (g.reshape(src),)

    return _make(out, (a,), backward)


def narrow(a: Node, axis: int, start: int, size: int) -> Node:
    """Slice `size` entries from `start` along `axis`."""
    n = a.shape[axis]
    if start < 0 or size <= 0 or start + size > n:
        raise ShapeError(f"narrow: [{start}, {start + size}) out of range for axis {axis} of length {n}")
    index = [slice(None)] * len(a.shape)
    index[axis] = slice(start, start + size)
    index = tuple(index)
    out = a.value.array[index]

    def backward(g):
        full = np.zeros(a.shape, dtype=g.dtype)
        full[index] = g
        return (full,)

    return _make(out, (a,), backward)


def concat(nodes: Sequence[Node], axis: int) -> Node:
    nodes = [_as_node(n) for n in nodes]
    if not nodes:
        raise ShapeError("concat: need at least one operand")
    out = np.concatenate([n.value.array for n in nodes], axis=axis)
    sizes = [n.shape[axis] for n in nodes]

    def backward(g):
        splits = np.cumsum(sizes[:-1])
        return tuple(np.ascontiguousarray(p) for p in np.split(g, splits, axis=axis))

    return _make(out, tuple(nodes), backward)


def stack(nodes: Sequence[Node], axis: int) -> Node:
    nodes = [_as_node(n) for n in nodes]
    if not nodes:
        raise ShapeError("stack: need at least one operand")
    out = np.stack([n.value.array for n in nodes], axis=axis)

    def backward(g):
        return tuple(np.ascontiguousarray(np.take(g, i, axis=axis)) for i in range(len(nodes)))

    return _make(out, tuple(nodes), backward)


# ---------------------------------------------------------------------------
# reductions and linear algebra


def sum_all(a: Node) -> Node:
    out = np.asarray(a.value.array.sum(), dtype=a.dtype)

    def backward(g):
        return (np.broadcast_to(g, a.shape).astype(a.dtype, copy=True),)

    return _make(out, (a,), backward)


def mean_over(a: Node, axes) -> Node:
    axes = tuple(axes)
    out = a.value.array.mean(axis=axes)
    count = 1
    for ax in axes:
        count *= a.shape[ax]

    def backward(g):
        expanded = np.expand_dims(g, axes)
        return ((np.broadcast_to(expanded, a.shape) / count).astype(g.dtype, copy=False).copy(),)

    return _make(out, (a,), backward)


def global_average_pool(a: Node) -> Node:
    """Mean over every axis except batch (first) and channels (last)."""
    if len(a.shape) < 3:
        raise ShapeError(f"global_average_pool: rank >= 3 required, got {a.shape}")
    return mean_over(a, tuple(range(1, len(a.shape) - 1)))


def matmul(a: Node, b: Node) -> Node:
    av, bv = a.value.array, b.value.array
    if av.ndim != 2 or bv.ndim != 2 or av.shape[1] != bv.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {av.shape} and {bv.shape}")
    out = av @ bv

    def backward(g):
        return g @ bv.T, av.T @ g

    return _make(out, (a, b), backward)


def dense(x: Node, weight: Node, bias: Node) -> Node:
    """Affine map: x @ weight + bias."""
    return add(matmul(x, weight), bias)


def softmax(a: Node, axis: int = -1) -> Node:
    x = a.value.array
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        dot = (g * out).sum(axis=axis, keepdims=True)
        return ((g - dot) * out,)

    return _make(out, (a,), backward)


# ---------------------------------------------------------------------------
# convolution and pooling


def conv2d(x: Node, kernel: Node, bias: Optional[Node] = None, padding: str = "same") -> Node:
    """Stride-1 cross-correlation over channels-last images.

    x: [N, H, W, Cin], kernel: [kH, kW, Cin, Cout], bias: [Cout] or None.
    padding "same" keeps spatial dims (odd kernels only); "valid" shrinks
    them to H - kH + 1 by W - kW + 1.
    """
    xv, kv = x.value.array, kernel.value.array
    if xv.ndim != 4 or kv.ndim != 4:
        raise ShapeError(f"conv2d: need 4-d input and kernel, got {xv.shape} and {kv.shape}")
    kh, kw, cin, cout = kv.shape
    if xv.shape[3] != cin:
        raise ShapeError(f"conv2d: input channels {xv.shape} do not match kernel {kv.shape}")
    if padding == "same":
        if kh % 2 == 0 or kw % 2 == 0:
            raise ShapeError(f"conv2d: same padding needs odd kernel dims, got {kv.shape}")
        ph, pw = kh // 2, kw // 2
    elif padding == "valid":
        ph = pw = 0
    else:
        raise ShapeError(f"conv2d: unknown padding {padding!r}")
    n, h, w, _ = xv.shape
    hp, wp = h + 2 * ph, w + 2 * pw
    if kh > hp or kw > wp:
        raise ShapeError(f"conv2d: kernel {kv.shape} larger than padded input {(n, hp, wp, cin)}")
    ho, wo = hp - kh + 1, wp - kw + 1

    if bias is not None and bias.shape != (cout,):
        raise ShapeError(f"conv2d: bias shape {bias.shape} does not match out channels {cout}")

    if kh == 1 and kw == 1 and ph == 0 and pw == 0:
        # 1x1 fast path: plain channel mixing.
        xmat = xv.reshape(-1, cin)
        kmat = kv.reshape(cin, cout)
        out = xmat @ kmat
        if bias is not None:
            out = out + bias.value.array
        out = out.reshape(n, h, w, cout)

        def backward(g):
            gmat = g.reshape(-1, cout)
            gx = (gmat @ kmat.T).reshape(xv.shape)
            gk = (xmat.T @ gmat).reshape(kv.shape)
            if bias is None:
                return gx, gk
            return gx, gk, g.sum(axis=(0, 1, 2))

        parents = (x, kernel) if bias is None else (x, kernel, bias)
        return _make(out, parents, backward)

    xp = np.pad(xv, ((0, 0), (ph, ph), (pw, pw), (0, 0))) if (ph or pw) else xv
    windows = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(1, 2))
    # windows: [N, Ho, Wo, Cin, kH, kW] -> patches [N*Ho*Wo, kH*kW*Cin]
    patches = windows.transpose(0, 1, 2, 4, 5, 3).reshape(n * ho * wo, kh * kw * cin)
    kmat = kv.reshape(kh * kw * cin, cout)
    out = patches @ kmat
    if bias is not None:
        out = out + bias.value.array
    out = out.reshape(n, ho, wo, cout)

    def backward(g):
        gmat = g.reshape(n * ho * wo, cout)
        gk = (patches.T @ gmat).reshape(kv.shape)
        dpatch = (gmat @ kmat.T).reshape(n, ho, wo, kh, kw, cin)
        gxp = np.zeros((n, hp, wp, cin), dtype=g.dtype)
        for i in range(kh):
            for j in range(kw):
                gxp[:, i:i + ho, j:j + wo, :] += dpatch[:, :, :, i, j, :]
        gx = gxp[:, ph:ph + h, pw:pw + w, :] if (ph or pw) else gxp
        if bias is None:
            return np.ascontiguousarray(gx), gk
        return np.ascontiguousarray(gx), gk, g.sum(axis=(0, 1, 2))

    parents = (x, kernel) if bias is None else (x, kernel, bias)
    return _make(out, parents, backward)


def avg_pool2(x: Node) -> Node:
    """2x2 average pooling with stride 2 over [N, H, W, C]."""
    xv = x.value.array
    if xv.ndim != 4:
        raise ShapeError(f"avg_pool2: need 4-d input, got {xv.shape}")
    n, h, w, c = xv.shape
    if h % 2 or w % 2:
        raise ShapeError(f"avg_pool2: spatial dims must be even, got {xv.shape}")
    out = xv.reshape(n, h // 2, 2, w // 2, 2, c).mean(axis=(2, 4))

    def backward(g):
        g4 = np.repeat(np.repeat(g, 2, axis=1), 2, axis=2) / 4.0
        return (g4.astype(g.dtype, copy=False),)

    return _make(out, (x,), backward)


# ---------------------------------------------------------------------------
# loss


def binary_cross_entropy(pred: Node, labels, eps: float = 1e-7) -> Node:
    """Mean BCE of predicted fake-probabilities against {0,1} labels.

    Predictions are clamped to [eps, 1-eps] before the logs; the gradient
    is zero in the clamped region.
    """
    y = np.asarray(labels, dtype=pred.dtype)
    if y.shape != pred.shape:
        raise ShapeError(f"binary_cross_entropy: labels {y.shape} vs predictions {pred.shape}")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("binary_cross_entropy: labels must be 0 or 1")
    p = pred.value.array
    pc = np.clip(p, eps, 1.0 - eps)
    losses = -(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc))
    out = np.asarray(losses.mean(), dtype=pred.dtype)
    size = max(p.size, 1)

    def backward(g):
        interior = (p > eps) & (p < 1.0 - eps)
        dp = (pc - y) / (pc * (1.0 - pc)) * interior / size
        return (g * dp,)

    return _make(out, (pred,), backward)


# ---------------------------------------------------------------------------
# backward pass


def _topo_order(root: Node) -> list:
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    return order


def backward(loss: Node) -> None:
    """Populate grads of every requires_grad node reachable from `loss`.

    Gradients sum over fan-out. The loss must be a scalar.
    """
    if loss.value.size != 1:
        raise ShapeError(f"backward expects a scalar loss, got shape {loss.value.shape}")
    if not loss.requires_grad:
        raise GradientError("loss does not depend on any differentiable input")
    order = _topo_order(loss)
    loss.grad = Tensor._wrap(np.ones(loss.value.shape, dtype=loss.dtype))
    for node in reversed(order):
        if node._backward is None:
            continue
        grads = node._backward(node.grad.array)
        for parent, g in zip(node.parents, grads):
            if g is None or not parent.requires_grad:
                continue
            if parent.grad is None:
                parent.grad = Tensor._wrap(np.asarray(g, dtype=parent.dtype))
            else:
                parent.grad = Tensor._wrap(parent.grad.array + g)
