"""The dual-branch fusion classifier: two complex CNN branches, bidirectional
cross-attention over their realified features, and one fully connected head."""

from dataclasses import dataclass

import numpy as np

from ..ctensor import ComplexTensor, ShapeError, ops
from ..cnn.branch import (
    branch_forward,
    branch_parameters,
    branch_state,
    extract_features,
    init_branch,
    rebuild_branch,
)
from ..cnn.layers import real_uniform
from .attention import AttentionBlock, bidirectional_fuse, init_attention

__all__ = ["FuseNetModel", "init_fusenet", "classify", "fusenet_forward", "fusenet_logits_batch"]


@dataclass(frozen=True)
class FuseNetModel:
    config: object  # BranchConfig shared by both branches
    branch_iq: object  # BranchWeights
    branch_fft: object  # BranchWeights
    attn: AttentionBlock
    head_w: ComplexTensor  # (fused_dim, n_classes)
    head_b: ComplexTensor  # (n_classes,)

    def __post_init__(self):
        want = self.attn.fused_dim
        if self.head_w.ndim != 2 or self.head_w.shape[0] != want:
            raise ShapeError(f"head weights {self.head_w.shape} do not accept {want} fused dims")
        if self.head_b.shape != (self.head_w.shape[1],):
            raise ShapeError(
                f"head bias {self.head_b.shape} does not match {self.head_w.shape[1]} classes"
            )

    @property
    def n_classes(self):
        return self.head_w.shape[1]

    def parameters(self):
        pairs = branch_parameters("iq", self.branch_iq)
        pairs += branch_parameters("fft", self.branch_fft)
        pairs += [(f"attn.{n}", t) for n, t in self.attn.parameters()]
        pairs += [("head.w", self.head_w), ("head.b", self.head_b)]
        return pairs

    def state(self):
        return branch_state("iq", self.branch_iq) + branch_state("fft", self.branch_fft)

    def with_tensors(self, mapping):
        return FuseNetModel(
            config=self.config,
            branch_iq=rebuild_branch("iq", self.branch_iq, mapping),
            branch_fft=rebuild_branch("fft", self.branch_fft, mapping),
            attn=self.attn.with_tensors(mapping, prefix="attn."),
            head_w=mapping.get("head.w", self.head_w),
            head_b=mapping.get("head.b", self.head_b),
        )


def init_fusenet(config, n_classes, rng, embed_dim=256, heads=16, out_dim=None):
    c_f, _ = config.feature_shape()
    attn = init_attention(2 * c_f, embed_dim, heads, rng, out_dim=out_dim)
    return FuseNetModel(
        config=config,
        branch_iq=init_branch(config, rng),
        branch_fft=init_branch(config, rng),
        attn=attn,
        head_w=real_uniform(rng, (attn.fused_dim, n_classes), attn.fused_dim),
        head_b=ComplexTensor(np.zeros(n_classes), np.zeros(n_classes)),
    )


def classify(fused, head_w, head_b):
    """Mean-pool fused tokens (L, F), then one affine map to (C,) logits."""
    if fused.ndim != 2 or fused.shape[1] != head_w.shape[0]:
        raise ShapeError(f"fused tokens {fused.shape} do not match head {head_w.shape}")
    pooled = ops.reshape(ops.mean_axis(fused, 0), (1, head_w.shape[0]))
    return ops.index0(ops.add_row(ops.matmul(pooled, head_w), head_b), 0)


def _sample_logits(feat_iq, feat_fft, model):
    tokens_iq = ops.tokens_from_complex(feat_iq)
    tokens_fft = ops.tokens_from_complex(feat_fft)
    fused = bidirectional_fuse(tokens_iq, tokens_fft, model.attn)
    return classify(fused, model.head_w, model.head_b)


def fusenet_forward(signal_iq, signal_fft, model):
    """Single sample: both (H, W) representations -> (C,) real logits."""
    f_iq = extract_features(signal_iq, model.config, model.branch_iq, mode="eval")
    f_fft = extract_features(signal_fft, model.config, model.branch_fft, mode="eval")
    return _sample_logits(f_iq.data, f_fft.data, model)


def fusenet_logits_batch(x_iq, x_fft, model, mode):
    """Batched branches, per-sample attention: returns a list of (C,) logits."""
    if x_iq.shape != x_fft.shape:
        raise ShapeError(f"representation batches differ: {x_iq.shape} vs {x_fft.shape}")
    feats_iq = branch_forward(x_iq, model.config, model.branch_iq, mode)
    feats_fft = branch_forward(x_fft, model.config, model.branch_fft, mode)
    out = []
    for b in range(x_iq.shape[0]):
        out.append(_sample_logits(ops.index0(feats_iq, b), ops.index0(feats_fft, b), model))
    return out
