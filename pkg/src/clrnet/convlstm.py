"""Convolutional LSTM cell: gated convolutional recurrence over feature maps.

Per timestep, with * a same-padded stride-1 convolution and . the
Hadamard product:

    i = sigmoid(x*Wxi + h*Whi + bi)
    f = sigmoid(x*Wxf + h*Whf + bf)
    c' = f . c + i . tanh(x*Wxc + h*Whc + bc)
    o = sigmoid(x*Wxo + h*Who + bo)
    h' = o . tanh(c')

The optional peephole variant adds per-channel cell feedback to the
gates (wci.c and wcf.c before the gate sigmoids, wco.c' for the output
gate). The default is the peephole-free variant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .params import ParamStore
from .tensor import Node, Tensor, add, concat, conv2d, mul, narrow, reshape, sigmoid, stack, tanh

GATES = ("i", "f", "c", "o")


@dataclass
class CellState:
    """Hidden/cell state pair; both [N, H, W, F]."""

    h: Node
    c: Node


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int, dtype) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class ConvLSTMCell:
    """One recurrent layer over spatial maps.

    Eight convolution kernels (input-to-state and state-to-state, one per
    gate) share an odd kernel size. The forget-gate bias starts at 1.0,
    all other biases at 0.
    """

    def __init__(
        self,
        in_channels: int,
        filters: int,
        kernel_size: int = 3,
        *,
        store: ParamStore,
        prefix: str,
        rng: np.random.Generator,
        dtype=np.float32,
        peephole: bool = False,
    ):
        if kernel_size % 2 == 0 or kernel_size < 1:
            raise ShapeError(f"kernel size must be odd and positive, got {kernel_size}")
        self.in_channels = in_channels
        self.filters = filters
        self.kernel_size = kernel_size
        self.prefix = prefix
        self.peephole = peephole
        self.dtype = np.dtype(dtype)

        k, cin, f = kernel_size, in_channels, filters
        self._wx, self._wh, self._b, self._wc = [], [], [], []
        for gate in GATES:
            wx = glorot_uniform(rng, (k, k, cin, f), k * k * cin, k * k * f, self.dtype)
            self._wx.append(store.register(f"{prefix}.x.W{gate}", Node(Tensor(wx), requires_grad=True)))
        for gate in GATES:
            wh = glorot_uniform(rng, (k, k, f, f), k * k * f, k * k * f, self.dtype)
            self._wh.append(store.register(f"{prefix}.h.W{gate}", Node(Tensor(wh), requires_grad=True)))
        for gate in GATES:
            init = 1.0 if gate == "f" else 0.0
            b = np.full((f,), init, dtype=self.dtype)
            self._b.append(store.register(f"{prefix}.x.b{gate}", Node(Tensor(b), requires_grad=True)))
        if peephole:
            for gate in ("i", "f", "o"):
                wc = glorot_uniform(rng, (f,), f, f, self.dtype)
                self._wc.append(store.register(f"{prefix}.h.wc{gate}", Node(Tensor(wc), requires_grad=True)))

    def init_state(self, batch: int, height: int, width: int) -> CellState:
        if min(batch, height, width) < 1:
            raise ShapeError(f"init_state: dims must be positive, got {(batch, height, width)}")
        shape = (batch, height, width, self.filters)
        return CellState(Node(Tensor.zeros(shape, self.dtype)), Node(Tensor.zeros(shape, self.dtype)))

    def _gate_stacks(self) -> tuple[Node, Node, Node]:
        # Concatenate the per-gate kernels once; conv output is split back
        # into the four gates along channels.
        wx = concat(self._wx, axis=3)
        wh = concat(self._wh, axis=3)
        b = concat(self._b, axis=0)
        return wx, wh, b

    def forward(self, x_t: Node, state: CellState, _stacks=None) -> tuple[Node, CellState]:
        """One step; returns (h', CellState(h', c'))."""
        if x_t.shape[1:3] != state.h.shape[1:3] or x_t.shape[0] != state.h.shape[0]:
            raise ShapeError(f"cell forward: input {x_t.shape} does not match state {state.h.shape}")
        if x_t.shape[3] != self.in_channels:
            raise ShapeError(f"cell forward: expected {self.in_channels} input channels, got {x_t.shape}")
        wx, wh, b = _stacks if _stacks is not None else self._gate_stacks()
        f = self.filters
        z = add(conv2d(x_t, wx, b, padding="same"), conv2d(state.h, wh, padding="same"))
        zi = narrow(z, 3, 0, f)
        zf = narrow(z, 3, f, f)
        zc = narrow(z, 3, 2 * f, f)
        zo = narrow(z, 3, 3 * f, f)
        if self.peephole:
            zi = add(zi, mul(state.c, self._wc[0]))
            zf = add(zf, mul(state.c, self._wc[1]))
        gi = sigmoid(zi)
        gf = sigmoid(zf)
        c_next = add(mul(gf, state.c), mul(gi, tanh(zc)))
        if self.peephole:
            zo = add(zo, mul(c_next, self._wc[2]))
        go = sigmoid(zo)
        h_next = mul(go, tanh(c_next))
        return h_next, CellState(h_next, c_next)

    def forward_sequence(self, x_seq: Node) -> Node:
        """Run the cell over [N, T, H, W, Cin]; returns stacked hidden maps [N, T, H, W, F].

        The state starts at zero and threads through time, so gradients
        flow through every step.
        """
        if len(x_seq.shape) != 5:
            raise ShapeError(f"forward_sequence: need [N,T,H,W,C], got {x_seq.shape}")
        n, t, h, w, c = x_seq.shape
        if t < 1:
            raise ShapeError("forward_sequence: need at least one timestep")
        state = self.init_state(n, h, w)
        stacks = self._gate_stacks()
        outputs = []
        for step in range(t):
            frame = reshape(narrow(x_seq, 1, step, 1), (n, h, w, c))
            h_t, state = self.forward(frame, state, _stacks=stacks)
            outputs.append(h_t)
        return stack(outputs, axis=1)
