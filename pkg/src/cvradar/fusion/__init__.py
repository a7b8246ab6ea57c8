"""Feature realification, cross-attention fusion, classification head, loss."""

from .attention import (
    AttentionBlock,
    RealFeature,
    attention_weights,
    bidirectional_fuse,
    complex_to_real,
    init_attention,
    scaled_dot_attention,
)
from .loss import cross_entropy, cross_entropy_from_logits, one_hot, softmax_np
from .model import (
    FuseNetModel,
    classify,
    fusenet_forward,
    fusenet_logits_batch,
    init_fusenet,
)

__all__ = [
    "AttentionBlock",
    "RealFeature",
    "attention_weights",
    "bidirectional_fuse",
    "complex_to_real",
    "init_attention",
    "scaled_dot_attention",
    "cross_entropy",
    "cross_entropy_from_logits",
    "one_hot",
    "softmax_np",
    "FuseNetModel",
    "classify",
    "fusenet_forward",
    "fusenet_logits_batch",
    "init_fusenet",
]
