"""CLRNet: stacked residual ConvLSTM blocks with a pooled classifier head.

Each block runs one or more ConvLSTM layers over the clip and adds a
skip path (identity, or a 1x1 projection when channel counts differ):

    block(x) = relu(convlstm_stack(x) + skip(x))

Blocks may halve the spatial dims with 2x2 average pooling. The head
global-average-pools the last block's maps over space and time and
applies a single dense layer to two-way softmax probabilities, which
keeps the class score linear in the pooled feature maps so class
activation maps are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convlstm import ConvLSTMCell
from .errors import ConfigError, ShapeError
from .params import ParamStore
from .tensor import (
    Node,
    Tensor,
    add,
    avg_pool2,
    conv2d,
    dense,
    global_average_pool,
    narrow,
    no_grad,
    relu,
    reshape,
    softmax,
    binary_cross_entropy,
)
from .convlstm import glorot_uniform


@dataclass(frozen=True)
class BlockSpec:
    filters: int
    convlstm_layers: int = 1
    pool_after: bool = False


@dataclass(frozen=True)
class CLRNetConfig:
    """Architecture description; validated on model build.

    head_units must equal the last block's filter count: the head is a
    single dense layer on globally pooled maps (the CAM contract).
    """

    input_shape: tuple  # (T, H, W, C)
    blocks: tuple = (BlockSpec(8, 2, True), BlockSpec(16, 2, True))
    head_units: int = 16
    kernel_size: int = 3
    peephole: bool = False
    seed: int = 0
    dtype: str = "float32"

    def validate(self) -> None:
        t, h, w, c = self.input_shape
        if t < 2:
            raise ConfigError(f"input needs at least 2 frames for temporal information, got T={t}")
        if not self.blocks:
            raise ConfigError("at least one block is required")
        pools = sum(1 for b in self.blocks if b.pool_after)
        factor = 2 ** pools
        if h % factor or w % factor:
            raise ConfigError(f"spatial dims {h}x{w} not divisible by 2^{pools} (one halving per pool)")
        for b in self.blocks:
            if b.convlstm_layers < 1 or b.filters < 1:
                raise ConfigError(f"bad block spec {b}")
        if self.head_units != self.blocks[-1].filters:
            raise ConfigError(
                f"head_units ({self.head_units}) must equal the last block's filters "
                f"({self.blocks[-1].filters}); the head is a single dense layer over pooled maps"
            )

    def canonical(self) -> str:
        """Stable one-line description, used for checkpoint digests."""
        t, h, w, c = self.input_shape
        blocks = ",".join(
            f"{b.filters}x{b.convlstm_layers}{'p' if b.pool_after else ''}" for b in self.blocks
        )
        return (
            f"kind=clrnet;input={t}x{h}x{w}x{c};blocks={blocks};head={self.head_units};"
            f"k={self.kernel_size};peephole={int(self.peephole)};seed={self.seed};dtype={self.dtype}"
        )


@dataclass(frozen=True)
class FreezeMask:
    frozen_groups: frozenset


PAPER_INPUT_SHAPE = (5, 240, 240, 3)  # full-resolution preset; desk runs use 32x32


def desk_config(
    input_shape=(5, 32, 32, 3), blocks=None, head_units=None, seed: int = 0, dtype: str = "float32"
) -> CLRNetConfig:
    blocks = tuple(blocks) if blocks is not None else (BlockSpec(8, 2, True), BlockSpec(16, 2, True))
    if head_units is None:
        head_units = blocks[-1].filters
    return CLRNetConfig(input_shape=tuple(input_shape), blocks=blocks, head_units=head_units, seed=seed, dtype=dtype)


class CLRNetModel:
    """Built network: cells, projections, head, and the parameter store."""

    kind = "clrnet"

    def __init__(self, config: CLRNetConfig):
        config.validate()
        self.config = config
        self.dtype = np.dtype(config.dtype)
        self.params = ParamStore()
        self.layer_order: list[str] = []
        rng = np.random.default_rng(np.random.SeedSequence(config.seed))

        t, h, w, c = config.input_shape
        self.blocks: list[list[ConvLSTMCell]] = []
        self.projections: dict[int, tuple[Node, Node]] = {}
        in_ch = c
        for bi, spec in enumerate(config.blocks):
            cells = []
            layer_in = in_ch
            for li in range(spec.convlstm_layers):
                prefix = f"block{bi}.layer{li}"
                cells.append(
                    ConvLSTMCell(
                        layer_in,
                        spec.filters,
                        config.kernel_size,
                        store=self.params,
                        prefix=prefix,
                        rng=rng,
                        dtype=self.dtype,
                        peephole=config.peephole,
                    )
                )
                self.layer_order.extend([f"{prefix}.x", f"{prefix}.h"])
                layer_in = spec.filters
            self.blocks.append(cells)
            if in_ch != spec.filters:
                k = glorot_uniform(rng, (1, 1, in_ch, spec.filters), in_ch, spec.filters, self.dtype)
                kernel = self.params.register(f"block{bi}.skip.W", Node(Tensor(k), requires_grad=True))
                bias = self.params.register(
                    f"block{bi}.skip.b", Node(Tensor(np.zeros(spec.filters, dtype=self.dtype)), requires_grad=True)
                )
                self.projections[bi] = (kernel, bias)
                self.layer_order.append(f"block{bi}.skip")
            in_ch = spec.filters

        f_last = config.blocks[-1].filters
        wh = glorot_uniform(rng, (f_last, 2), f_last, 2, self.dtype)
        self.head_w = self.params.register("head.W", Node(Tensor(wh), requires_grad=True))
        self.head_b = self.params.register(
            "head.b", Node(Tensor(np.zeros(2, dtype=self.dtype)), requires_grad=True)
        )
        self.layer_order.append("head")

    # ------------------------------------------------------------------
    # forward

    def _check_batch(self, batch: np.ndarray) -> np.ndarray:
        t, h, w, c = self.config.input_shape
        batch = np.asarray(batch, dtype=self.dtype)
        if batch.ndim != 5 or batch.shape[1:] != (t, h, w, c):
            raise ShapeError(f"batch shape {batch.shape} does not match input {(-1, t, h, w, c)}")
        return batch

    def forward(self, batch: np.ndarray, return_features: bool = False):
        """Clip batch [N,T,H,W,C] to two-way probabilities [N,2]."""
        batch = self._check_batch(batch)
        seq = Node(Tensor(batch))
        for bi, cells in enumerate(self.blocks):
            inp = seq
            h = inp
            for cell in cells:
                h = cell.forward_sequence(h)
            skip = inp
            if bi in self.projections:
                kernel, bias = self.projections[bi]
                skip = _per_frame(inp, lambda x: conv2d(x, kernel, bias, padding="same"))
            seq = relu(add(h, skip))
            if self.config.blocks[bi].pool_after:
                seq = _per_frame(seq, avg_pool2)
        features = seq
        pooled = global_average_pool(features)  # [N, F]
        probs = softmax(dense(pooled, self.head_w, self.head_b), axis=-1)
        if return_features:
            return probs, features
        return probs

    def clip_loss(self, batch: np.ndarray, labels: np.ndarray) -> Node:
        """Mean BCE of P(fake) against clip labels (1 = fake)."""
        probs = self.forward(batch)
        n = probs.shape[0]
        p_fake = reshape(narrow(probs, 1, 1, 1), (n,))
        return binary_cross_entropy(p_fake, np.asarray(labels))

    def predict_proba(self, batch: np.ndarray) -> np.ndarray:
        """P(fake) per clip, without building gradient state."""
        with no_grad():
            probs = self.forward(batch)
        return probs.value.array[:, 1].copy()

    # ------------------------------------------------------------------
    # freezing

    def freeze_first_half(self) -> FreezeMask:
        """Mark the first floor(n/2) parameter groups non-trainable.

        Groups are counted in forward order; the head is last and stays
        trainable. Idempotent.
        """
        k = len(self.layer_order) // 2
        frozen = self.layer_order[:k]
        for group in frozen:
            for name in self._group_params(group):
                self.params.set_trainable(name, False)
        return FreezeMask(frozenset(frozen))

    def _group_params(self, group: str) -> list[str]:
        if group == "head":
            return ["head.W", "head.b"]
        return [n for n in self.params.names() if n.startswith(group + ".")]

    def group_of(self, param_name: str) -> str:
        if param_name.startswith("head."):
            return "head"
        return param_name.rsplit(".", 1)[0]

    # ------------------------------------------------------------------
    # class activation maps

    def class_activation_map(self, clip: np.ndarray, class_idx: int) -> np.ndarray:
        """Per-frame evidence heatmap for one class, shape (T, H, W) in [0, 1].

        The map is the head-weighted sum of the last block's pooled
        feature maps, upsampled (nearest) to the input resolution and
        min-max normalized over the whole clip. An all-constant map
        normalizes to zeros.
        """
        if class_idx not in (0, 1):
            raise ValueError(f"class_idx must be 0 or 1, got {class_idx}")
        clip = np.asarray(clip, dtype=self.dtype)
        if clip.ndim == 4:
            clip = clip[None]
        if clip.shape[0] != 1:
            raise ShapeError(f"class_activation_map expects a single clip, got batch {clip.shape}")
        with no_grad():
            _, features = self.forward(clip, return_features=True)
        maps = features.value.array[0]  # [T, H', W', F]
        weights = self.head_w.value.array[:, class_idx]  # [F]
        cam = maps @ weights  # [T, H', W']

        t, h, w, _ = self.config.input_shape
        factor = h // cam.shape[1]
        if factor > 1:
            cam = np.repeat(np.repeat(cam, factor, axis=1), factor, axis=2)
        lo, hi = float(cam.min()), float(cam.max())
        if hi - lo < 1e-12:
            return np.zeros((t, h, w), dtype=np.float64)
        return ((cam - lo) / (hi - lo)).astype(np.float64)


def _per_frame(seq: Node, fn) -> Node:
    """Apply a [N,H,W,C] -> [N,H',W',C'] op to every frame of [N,T,H,W,C]."""
    n, t, h, w, c = seq.shape
    flat = reshape(seq, (n * t, h, w, c))
    out = fn(flat)
    _, ho, wo, co = out.shape
    return reshape(out, (n, t, ho, wo, co))


def build(config: CLRNetConfig) -> CLRNetModel:
    """Construct a model with deterministic, seed-driven initialization."""
    return CLRNetModel(config)


def export_pgm(heatmap: np.ndarray, path) -> None:
    """Write one frame of a CAM heatmap as a plain (P2) PGM file."""
    hm = np.asarray(heatmap)
    if hm.ndim != 2:
        raise ShapeError(f"export_pgm expects a 2-d map, got {hm.shape}")
    levels = np.clip(np.rint(hm * 255.0), 0, 255).astype(int)
    lines = ["P2", f"{hm.shape[1]} {hm.shape[0]}", "255"]
    for row in levels:
        lines.append(" ".join(str(v) for v in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
