"""Radar cube containers, channel flattening, and the RFC1 binary format."""

import struct
from dataclasses import dataclass

import numpy as np

from ..ctensor import ComplexTensor, ShapeError

__all__ = [
    "RadarConfig",
    "RadarCube",
    "SpectrumCube",
    "MATERIAL_CONFIG",
    "OCCLUDED_CONFIG",
    "flatten_channels",
    "unflatten_channels",
    "write_rfc1",
    "read_rfc1",
    "CubeFormatError",
]

_MAGIC = b"RFC1"
_SPEED_OF_LIGHT = 299_792_458.0


class CubeFormatError(ValueError):
    """Raised for malformed RFC1 files."""


@dataclass(frozen=True)
class RadarConfig:
    """Sensor parameters; eirp is carried as metadata only."""

    center_frequency: float
    bandwidth: float
    eirp: float
    n_tx: int
    n_rx: int
    fast_time_samples: int

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.fast_time_samples < 2:
            raise ValueError(
                f"fast_time_samples must be >= 2, got {self.fast_time_samples}"
            )
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError(f"antenna counts must be >= 1, got {self.n_tx}x{self.n_rx}")

    @property
    def shape(self):
        return (self.n_tx, self.n_rx, self.fast_time_samples)

    @property
    def unambiguous_range(self):
        # beat-frequency bin k = 2*B*R/c must stay below fast_time_samples
        return self.fast_time_samples * _SPEED_OF_LIGHT / (2.0 * self.bandwidth)

    def with_shape(self, shape):
        x, y, n = shape
        return RadarConfig(self.center_frequency, self.bandwidth, self.eirp, x, y, n)


MATERIAL_CONFIG = RadarConfig(65.5e9, 5.0e9, -5.0, 20, 20, 100)
OCCLUDED_CONFIG = RadarConfig(64.0e9, 4.0e9, -5.0, 20, 20, 100)


class RadarCube:
    """Raw IQ samples over (tx index, rx index, fast time)."""

    __slots__ = ("data", "config")

    def __init__(self, data, config=None):
        if not isinstance(data, ComplexTensor):
            data = ComplexTensor(np.asarray(data).real, np.asarray(data).imag)
        if data.ndim != 3:
            raise ShapeError(f"cube data must be 3-dimensional, got shape {data.shape}")
        if not data.is_finite():
            raise ValueError("cube data contains non-finite values")
        if config is not None and data.shape != config.shape:
            raise ShapeError(
                f"cube shape {data.shape} does not match config shape {config.shape}"
            )
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "config", config)

    def __setattr__(self, name, value):
        raise AttributeError("RadarCube is immutable")

    @property
    def shape(self):
        return self.data.shape


class SpectrumCube:
    """3D transform of a RadarCube: (azimuth, elevation, range) bins."""

    __slots__ = ("data",)

    def __init__(self, data):
        if not isinstance(data, ComplexTensor) or data.ndim != 3:
            raise ShapeError("spectrum data must be a 3-dimensional ComplexTensor")
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("SpectrumCube is immutable")

    @property
    def shape(self):
        return self.data.shape


def flatten_channels(t):
    """(X, Y, N) -> (X*Y, N); row r = x*Y + y holds channel (x, y)."""
    if not isinstance(t, ComplexTensor) or t.ndim != 3:
        shape = getattr(t, "shape", None)
        raise ShapeError(f"flatten_channels expects a 3-dimensional tensor, got {shape}")
    x, y, n = t.shape
    return ComplexTensor(t.re.reshape(x * y, n), t.im.reshape(x * y, n))


def unflatten_channels(t, spatial):
    """Inverse of flatten_channels given the original (X, Y) extents."""
    x, y = spatial
    if not isinstance(t, ComplexTensor) or t.ndim != 2:
        shape = getattr(t, "shape", None)
        raise ShapeError(f"unflatten_channels expects a 2-dimensional tensor, got {shape}")
    if t.shape[0] != x * y:
        raise ShapeError(f"row count {t.shape[0]} does not equal {x}*{y}")
    n = t.shape[1]
    return ComplexTensor(t.re.reshape(x, y, n), t.im.reshape(x, y, n))


def write_rfc1(path, t):
    """Write a 3-dimensional ComplexTensor as an RFC1 cube file."""
    if not isinstance(t, ComplexTensor) or t.ndim != 3:
        shape = getattr(t, "shape", None)
        raise ShapeError(f"RFC1 payload must be a 3-dimensional tensor, got {shape}")
    x, y, n = t.shape
    interleaved = np.empty((t.size, 2), dtype="<f4")
    interleaved[:, 0] = t.re.reshape(-1)
    interleaved[:, 1] = t.im.reshape(-1)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", x, y, n))
        fh.write(interleaved.tobytes())


def read_rfc1(path):
    """Read an RFC1 cube file back into a ComplexTensor (float64 planes)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 16 or blob[:4] != _MAGIC:
        raise CubeFormatError(f"{path}: missing RFC1 magic")
    x, y, n = struct.unpack("<III", blob[4:16])
    if x < 1 or y < 1 or n < 1:
        raise CubeFormatError(f"{path}: zero extent in header ({x}, {y}, {n})")
    expected = 16 + 8 * x * y * n
    if len(blob) != expected:
        raise CubeFormatError(
            f"{path}: payload is {len(blob) - 16} bytes, expected {expected - 16}"
        )
    pairs = np.frombuffer(blob, dtype="<f4", offset=16).reshape(-1, 2)
    re = pairs[:, 0].astype(np.float64).reshape(x, y, n)
    im = pairs[:, 1].astype(np.float64).reshape(x, y, n)
    return ComplexTensor(re, im)
