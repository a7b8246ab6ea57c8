"""Single-branch feature extractor: three conv/BN/crelu stages + pooling.

The (H, W) input matrix enters as one channel of a 2D image. Kernels are
1 x k by default so the W axis (fast time or range bins) is the learned
axis; after the conv stack the H axis (the X*Y flattened channels) is
collapsed by a mean, and average pooling along W yields the (C_f, L)
feature map whose L positions become attention tokens downstream.
"""

from dataclasses import dataclass

import numpy as np

from ..ctensor import ComplexTensor, ShapeError, ops
from .layers import ComplexBatchNormLayer, ComplexConvLayer, init_batchnorm, init_conv

__all__ = [
    "ConvSpec",
    "BranchConfig",
    "BranchWeights",
    "FeatureMap",
    "default_branch_config",
    "init_branch",
    "branch_forward",
    "extract_features",
    "branch_parameters",
    "rebuild_branch",
]


@dataclass(frozen=True)
class ConvSpec:
    out_channels: int
    kernel: tuple  # (kh, kw)
    stride: tuple  # (sh, sw)


@dataclass(frozen=True)
class BranchConfig:
    input_hw: tuple
    convs: tuple  # exactly three ConvSpec
    pool_window: int

    def __post_init__(self):
        if len(self.convs) != 3:
            raise ValueError(f"branch must have exactly 3 conv layers, got {len(self.convs)}")
        if self.pool_window < 1:
            raise ValueError(f"pool_window must be >= 1, got {self.pool_window}")
        self.stage_shapes()  # raises if any stage collapses

    def stage_shapes(self):
        """(C, H, W) after each conv stage, then the final (C_f, L)."""
        h, w = self.input_hw
        if h < 1 or w < 1:
            raise ShapeError(f"input extents must be positive, got {self.input_hw}")
        c = 1
        shapes = []
        for i, spec in enumerate(self.convs, start=1):
            kh, kw = spec.kernel
            sh, sw = spec.stride
            h2 = (h - kh) // sh + 1
            w2 = (w - kw) // sw + 1
            if kh > h or kw > w or h2 < 1 or w2 < 1:
                raise ShapeError(
                    f"conv{i}: kernel {spec.kernel} / stride {spec.stride} "
                    f"does not fit input ({c}, {h}, {w})"
                )
            c, h, w = spec.out_channels, h2, w2
            shapes.append((c, h, w))
        length = w // self.pool_window
        if length < 1:
            raise ShapeError(f"pool window {self.pool_window} exceeds feature length {w}")
        shapes.append((c, length))
        return shapes

    def feature_shape(self):
        """(C_f, L) of the extracted feature map."""
        return self.stage_shapes()[-1]


def default_branch_config(input_hw=(400, 100)):
    return BranchConfig(
        input_hw=tuple(input_hw),
        convs=(
            ConvSpec(16, (1, 7), (1, 2)),
            ConvSpec(32, (1, 5), (1, 2)),
            ConvSpec(64, (1, 3), (1, 1)),
        ),
        pool_window=2,
    )


@dataclass(frozen=True)
class BranchWeights:
    convs: tuple  # ComplexConvLayer x3
    bns: tuple  # ComplexBatchNormLayer x3


@dataclass(frozen=True)
class FeatureMap:
    """Complex features (C_f channels, L positions) from one branch."""

    data: ComplexTensor

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ShapeError(f"feature map must be rank 2, got {self.data.shape}")

    @property
    def shape(self):
        return self.data.shape


def init_branch(config, rng):
    convs = []
    bns = []
    in_c = 1
    for spec in config.convs:
        convs.append(init_conv(rng, spec.out_channels, in_c, spec.kernel, spec.stride))
        bns.append(init_batchnorm(spec.out_channels))
        in_c = spec.out_channels
    return BranchWeights(convs=tuple(convs), bns=tuple(bns))


def branch_forward(x, config, weights, mode):
    """Batched branch: (B, 1, H, W) -> (B, C_f, L)."""
    if x.ndim != 4 or x.shape[1] != 1 or x.shape[2:] != tuple(config.input_hw):
        raise ShapeError(
            f"input: expected (B, 1, {config.input_hw[0]}, {config.input_hw[1]}), got {x.shape}"
        )
    h = x
    for i, (conv, bn) in enumerate(zip(weights.convs, weights.bns), start=1):
        try:
            h = conv.apply(h)
        except ShapeError as e:
            raise ShapeError(f"conv{i}: {e}") from e
        try:
            h = bn.apply(h, mode)
        except ShapeError as e:
            raise ShapeError(f"bn{i}: {e}") from e
        h = ops.crelu(h)
    h = ops.mean_axis(h, 2)  # collapse the spatial H axis
    return ops.cavgpool_last(h, config.pool_window)


def extract_features(signal, config, weights, mode="eval"):
    """Single sample (H, W) -> FeatureMap (C_f, L)."""
    if signal.ndim != 2 or signal.shape != tuple(config.input_hw):
        raise ShapeError(
            f"input: expected {tuple(config.input_hw)}, got {getattr(signal, 'shape', None)}"
        )
    batched = ops.reshape(signal, (1, 1) + tuple(config.input_hw))
    return FeatureMap(ops.index0(branch_forward(batched, config, weights, mode), 0))


def branch_parameters(prefix, weights):
    """Ordered (name, tensor) pairs of the trainable branch parameters."""
    pairs = []
    for i, (conv, bn) in enumerate(zip(weights.convs, weights.bns)):
        pairs.append((f"{prefix}.conv{i}.kernels", conv.kernels))
        pairs.append((f"{prefix}.conv{i}.bias", conv.bias))
        pairs.append((f"{prefix}.bn{i}.gamma", bn.gamma))
        pairs.append((f"{prefix}.bn{i}.beta", bn.beta))
    return pairs


def branch_state(prefix, weights):
    """Ordered (name, tensor) pairs of the non-trainable running statistics."""
    pairs = []
    for i, bn in enumerate(weights.bns):
        pairs.append((f"{prefix}.bn{i}.running_mean", bn.running_mean))
        pairs.append((f"{prefix}.bn{i}.running_var", bn.running_var))
    return pairs


def rebuild_branch(prefix, weights, mapping):
    """New BranchWeights with parameters (and any state) taken from mapping."""
    convs = []
    bns = []
    for i, (conv, bn) in enumerate(zip(weights.convs, weights.bns)):
        convs.append(
            ComplexConvLayer(
                kernels=mapping.get(f"{prefix}.conv{i}.kernels", conv.kernels),
                bias=mapping.get(f"{prefix}.conv{i}.bias", conv.bias),
                stride=conv.stride,
            )
        )
        bns.append(
            ComplexBatchNormLayer(
                gamma=mapping.get(f"{prefix}.bn{i}.gamma", bn.gamma),
                beta=mapping.get(f"{prefix}.bn{i}.beta", bn.beta),
                running_mean=mapping.get(f"{prefix}.bn{i}.running_mean", bn.running_mean),
                running_var=mapping.get(f"{prefix}.bn{i}.running_var", bn.running_var),
                eps=bn.eps,
                momentum=bn.momentum,
            )
        )
    return BranchWeights(convs=tuple(convs), bns=tuple(bns))
