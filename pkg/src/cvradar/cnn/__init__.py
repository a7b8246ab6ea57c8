"""Complex-valued convolutional layers and the single-branch models."""

from .layers import (
    ComplexBatchNormLayer,
    ComplexConvLayer,
    complex_uniform,
    init_batchnorm,
    init_conv,
    real_uniform,
)
from .branch import (
    BranchConfig,
    BranchWeights,
    ConvSpec,
    FeatureMap,
    branch_forward,
    branch_parameters,
    branch_state,
    default_branch_config,
    extract_features,
    init_branch,
    rebuild_branch,
)
from .baseline import BaselineModel, baseline_forward, baseline_logits, init_baseline

__all__ = [
    "ComplexBatchNormLayer",
    "ComplexConvLayer",
    "complex_uniform",
    "init_batchnorm",
    "init_conv",
    "real_uniform",
    "BranchConfig",
    "BranchWeights",
    "ConvSpec",
    "FeatureMap",
    "branch_forward",
    "branch_parameters",
    "branch_state",
    "default_branch_config",
    "extract_features",
    "init_branch",
    "rebuild_branch",
    "BaselineModel",
    "baseline_forward",
    "baseline_logits",
    "init_baseline",
]
