"""Training configuration: typed dataclass plus the JSON document the CLI reads."""

import json
import os
from dataclasses import dataclass, field, replace

from ..cnn import BranchConfig, ConvSpec, default_branch_config

__all__ = [
    "ConfigError",
    "TrainConfig",
    "branch_to_dict",
    "branch_from_dict",
    "config_to_dict",
    "config_from_dict",
    "load_train_config",
    "write_train_config",
]


class ConfigError(ValueError):
    """Raised when a training configuration document is invalid."""


@dataclass(frozen=True)
class TrainConfig:
    manifest: str
    learning_rate: float = 0.001
    batch_size: int = 16
    epochs: int = 15
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    branch: BranchConfig = field(default_factory=default_branch_config)
    embed_dim: int = 256
    heads: int = 16
    out_dim: int = None

    def __post_init__(self):
        if not self.manifest:
            raise ConfigError("manifest path must be non-empty")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        # train-mode batch norm needs at least 2 samples to form a variance
        if self.batch_size < 2:
            raise ConfigError(f"batch_size must be >= 2, got {self.batch_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        for name in ("beta1", "beta2"):
            b = getattr(self, name)
            if not 0.0 < b < 1.0:
                raise ConfigError(f"{name} must be in (0, 1), got {b}")
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if self.embed_dim < 1 or self.heads < 1:
            raise ConfigError(
                f"embed_dim and heads must be positive, got {self.embed_dim}, {self.heads}"
            )
        if self.embed_dim % self.heads != 0:
            raise ConfigError(f"embed_dim {self.embed_dim} not divisible by heads {self.heads}")
        if self.out_dim is not None and self.out_dim < 1:
            raise ConfigError(f"out_dim must be positive when given, got {self.out_dim}")

    def with_manifest(self, path):
        return replace(self, manifest=path)


def branch_to_dict(branch):
    return {
        "input_hw": list(branch.input_hw),
        "convs": [
            {"out_channels": c.out_channels, "kernel": list(c.kernel), "stride": list(c.stride)}
            for c in branch.convs
        ],
        "pool_window": branch.pool_window,
    }


def branch_from_dict(doc):
    try:
        convs = tuple(
            ConvSpec(
                out_channels=int(c["out_channels"]),
                kernel=tuple(int(v) for v in c["kernel"]),
                stride=tuple(int(v) for v in c["stride"]),
            )
            for c in doc["convs"]
        )
        return BranchConfig(
            input_hw=tuple(int(v) for v in doc["input_hw"]),
            convs=convs,
            pool_window=int(doc["pool_window"]),
        )
    except (KeyError, TypeError) as e:
        raise ConfigError(f"bad branch config: {e}") from e


def config_to_dict(config):
    doc = {
        "manifest": config.manifest,
        "learning_rate": config.learning_rate,
        "batch_size": config.batch_size,
        "epochs": config.epochs,
        "seed": config.seed,
        "beta1": config.beta1,
        "beta2": config.beta2,
        "eps": config.eps,
        "branch": branch_to_dict(config.branch),
        "embed_dim": config.embed_dim,
        "heads": config.heads,
    }
    if config.out_dim is not None:
        doc["out_dim"] = config.out_dim
    return doc


def config_from_dict(doc, base_dir=None):
    if not isinstance(doc, dict):
        raise ConfigError("training config must be a JSON object")
    manifest = doc.get("manifest")
    if not isinstance(manifest, str) or not manifest:
        raise ConfigError("config field 'manifest' must be a non-empty path string")
    if base_dir and not os.path.isabs(manifest):
        manifest = os.path.join(base_dir, manifest)
    branch = branch_from_dict(doc["branch"]) if "branch" in doc else default_branch_config()
    known = {
        "manifest", "learning_rate", "batch_size", "epochs", "seed",
        "beta1", "beta2", "eps", "branch", "embed_dim", "heads", "out_dim",
    }
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
    try:
        return TrainConfig(
            manifest=manifest,
            learning_rate=float(doc.get("learning_rate", 0.001)),
            batch_size=int(doc.get("batch_size", 16)),
            epochs=int(doc.get("epochs", 15)),
            seed=int(doc.get("seed", 0)),
            beta1=float(doc.get("beta1", 0.9)),
            beta2=float(doc.get("beta2", 0.999)),
            eps=float(doc.get("eps", 1e-8)),
            branch=branch,
            embed_dim=int(doc.get("embed_dim", 256)),
            heads=int(doc.get("heads", 16)),
            out_dim=None if doc.get("out_dim") is None else int(doc["out_dim"]),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"bad training config: {e}") from e


def load_train_config(path):
    """Parse a JSON training config; relative manifest paths resolve against it."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON: {e}") from e
    try:
        return config_from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))
    except ConfigError as e:
        raise ConfigError(f"{path}: {e}") from e


def write_train_config(path, config):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
