"""Single-file weight checkpoints.

Layout: magic "CVW1", a little-endian u32 header length, a JSON header
(format version, model kind, class count, branch and attention dimensions,
the ordered tensor-name manifest, and free-form metadata), then one record
per tensor in manifest order: u32 rank, u32 extents, and the real plane
followed by the imaginary plane as little-endian 32-bit floats in row-major
order. Loading restores float64 working precision from those 32-bit values,
so save -> load -> save reproduces the file byte for byte.
"""

import json
import struct

import numpy as np

from ..ctensor import ComplexTensor
from ..cnn import init_baseline
from ..fusion import init_fusenet
from .config import branch_from_dict, branch_to_dict

__all__ = ["CheckpointError", "save_checkpoint", "load_checkpoint"]

_MAGIC = b"CVW1"
_VERSION = 1


class CheckpointError(ValueError):
    """Raised on malformed checkpoint files; the message names the path."""


def _all_tensors(model):
    return list(model.parameters()) + list(model.state())


def save_checkpoint(path, model, kind, meta=None):
    if kind not in ("baseline", "fusenet"):
        raise ValueError(f"kind must be 'baseline' or 'fusenet', got {kind!r}")
    tensors = _all_tensors(model)
    header = {
        "version": _VERSION,
        "kind": kind,
        "n_classes": model.n_classes,
        "branch": branch_to_dict(model.config),
        "tensors": [name for name, _ in tensors],
        "meta": meta or {},
    }
    if kind == "fusenet":
        header["embed_dim"] = model.attn.embed_dim
        header["heads"] = model.attn.heads
        header["out_dim"] = None if model.attn.out_proj is None else model.attn.out_proj.shape[1]
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for _, t in tensors:
            fh.write(struct.pack("<I", t.ndim))
            fh.write(struct.pack(f"<{t.ndim}I", *t.shape) if t.ndim else b"")
            fh.write(t.re.astype("<f4").tobytes())
            fh.write(t.im.astype("<f4").tobytes())


def _skeleton(header, path):
    branch = branch_from_dict(header["branch"])
    rng = np.random.default_rng(0)  # placeholder values; every tensor is overwritten
    if header["kind"] == "baseline":
        return init_baseline(branch, header["n_classes"], rng)
    if header["kind"] == "fusenet":
        return init_fusenet(
            branch,
            header["n_classes"],
            rng,
            embed_dim=header["embed_dim"],
            heads=header["heads"],
            out_dim=header.get("out_dim"),
        )
    raise CheckpointError(f"{path}: unknown model kind {header['kind']!r}")


def load_checkpoint(path):
    """Returns (model, kind, meta) rebuilt from a checkpoint file."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 8 or blob[:4] != _MAGIC:
        raise CheckpointError(f"{path}: missing checkpoint magic")
    (header_len,) = struct.unpack("<I", blob[4:8])
    if len(blob) < 8 + header_len:
        raise CheckpointError(f"{path}: truncated header")
    try:
        header = json.loads(blob[8 : 8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: bad header: {e}") from e
    if header.get("version") != _VERSION:
        raise CheckpointError(f"{path}: unsupported version {header.get('version')!r}")
    model = _skeleton(header, path)
    expected = [name for name, _ in _all_tensors(model)]
    if header.get("tensors") != expected:
        raise CheckpointError(
            f"{path}: tensor manifest does not match a {header['kind']} model "
            f"of the declared dimensions"
        )
    shapes = {name: t.shape for name, t in _all_tensors(model)}
    offset = 8 + header_len
    mapping = {}
    for name in expected:
        if offset + 4 > len(blob):
            raise CheckpointError(f"{path}: truncated at tensor {name!r}")
        (rank,) = struct.unpack("<I", blob[offset : offset + 4])
        offset += 4
        extents = struct.unpack(f"<{rank}I", blob[offset : offset + 4 * rank]) if rank else ()
        offset += 4 * rank
        if extents != shapes[name]:
            raise CheckpointError(
                f"{path}: tensor {name!r} has shape {extents}, expected {shapes[name]}"
            )
        count = int(np.prod(extents, dtype=np.int64)) if rank else 1
        need = 8 * count
        if offset + need > len(blob):
            raise CheckpointError(f"{path}: truncated payload for tensor {name!r}")
        planes = np.frombuffer(blob, dtype="<f4", count=2 * count, offset=offset)
        offset += need
        re = planes[:count].astype(np.float64).reshape(extents)
        im = planes[count:].astype(np.float64).reshape(extents)
        mapping[name] = ComplexTensor(re, im)
    if offset != len(blob):
        raise CheckpointError(f"{path}: {len(blob) - offset} trailing bytes")
    return model.with_tensors(mapping), header["kind"], header.get("meta", {})
