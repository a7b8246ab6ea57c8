"""Synthetic FMCW scene generator: point reflectors plus complex Gaussian noise.

Phase model per reflector at (range R, azimuth az, elevation el) with
reflectivity alpha, for antenna indices (x, y) and fast-time sample n:

    s(x,y,n) += alpha * exp(+j*2*pi*(nu_az*x + nu_el*y + nu_rng*n))

    nu_az  = sin(az)/2          half-wavelength element spacing
    nu_el  = sin(el)/2
    nu_rng = 2*B*R / (c*N)      de-chirped beat frequency in cycles/sample

so the transform of a single on-grid reflector peaks at bins
(l, m, k) = (X*nu_az mod X, Y*nu_el mod Y, N*nu_rng mod N).
"""

import json
from dataclasses import dataclass

import numpy as np

from ..ctensor import ComplexTensor
from .cube import RadarConfig, RadarCube, _SPEED_OF_LIGHT
from .dataset import DatasetError

__all__ = [
    "SyntheticScene",
    "synth_fmcw_cube",
    "predicted_bins",
    "range_bin_width",
    "class_scene",
    "parse_scene_file",
]


@dataclass(frozen=True)
class SyntheticScene:
    """reflectors: tuple of (range_m, azimuth_rad, elevation_rad, reflectivity)."""

    reflectors: tuple
    noise_level: float
    seed: int

    def __post_init__(self):
        if self.noise_level < 0:
            raise ValueError(f"noise_level must be >= 0, got {self.noise_level}")


def range_bin_width(config):
    """Meters of range per fast-time frequency bin."""
    return _SPEED_OF_LIGHT / (2.0 * config.bandwidth)


def predicted_bins(reflector, config):
    """(azimuth, elevation, range) bin indices where one reflector peaks."""
    r, az, el, _ = reflector
    x, y, n = config.shape
    l = int(round(x * 0.5 * np.sin(az))) % x
    m = int(round(y * 0.5 * np.sin(el))) % y
    k = int(round(2.0 * config.bandwidth * r / _SPEED_OF_LIGHT)) % n
    return (l, m, k)


def synth_fmcw_cube(scene, config):
    """Deterministic cube for a scene; fully determined by scene.seed."""
    x, y, n = config.shape
    xi = np.arange(x, dtype=np.float64)[:, None, None]
    yi = np.arange(y, dtype=np.float64)[None, :, None]
    ni = np.arange(n, dtype=np.float64)[None, None, :]
    acc = np.zeros((x, y, n), dtype=np.complex128)
    for idx, (r, az, el, alpha) in enumerate(scene.reflectors):
        if not 0.0 < r < config.unambiguous_range:
            raise ValueError(
                f"reflector {idx}: range {r} m outside (0, {config.unambiguous_range:.3f}) m"
            )
        nu_az = 0.5 * np.sin(az)
        nu_el = 0.5 * np.sin(el)
        nu_rng = 2.0 * config.bandwidth * r / (_SPEED_OF_LIGHT * n)
        acc += complex(alpha) * np.exp(
            2j * np.pi * (nu_az * xi + nu_el * yi + nu_rng * ni)
        )
    if scene.noise_level > 0.0:
        rng = np.random.default_rng(scene.seed)
        if scene.reflectors:
            scale = float(np.sqrt(np.mean(np.abs(acc) ** 2)))
        else:
            scale = 1.0
        sigma = scene.noise_level * scale / np.sqrt(2.0)
        acc = acc + sigma * (
            rng.standard_normal((x, y, n)) + 1j * rng.standard_normal((x, y, n))
        )
    return RadarCube(ComplexTensor(acc.real, acc.imag), config)


def class_scene(class_index, distance_m, sample_seed, config, noise_level=0.05, n_reflectors=3):
    """Scene whose reflector geometry is a fixed signature of the class.

    Angles and relative range offsets depend only on class_index; absolute
    distance, per-sample reflectivity jitter, and noise vary per sample. Used
    by the overfit and distance-shift benchmarks.
    """
    sig = np.random.default_rng(905_311 + class_index)
    bin_m = range_bin_width(config)
    angles = sig.uniform(-0.6, 0.6, size=(n_reflectors, 2))
    offsets = sig.uniform(0.0, 3.0, size=n_reflectors) * bin_m
    per_sample = np.random.default_rng(sample_seed)
    reflectors = []
    for i in range(n_reflectors):
        amp = per_sample.uniform(0.8, 1.2)
        phase = per_sample.uniform(0.0, 2.0 * np.pi)
        reflectors.append(
            (
                distance_m + offsets[i],
                angles[i, 0],
                angles[i, 1],
                amp * np.exp(1j * phase),
            )
        )
    return SyntheticScene(tuple(reflectors), noise_level, sample_seed)


def parse_scene_file(path):
    """Parse a scene-set JSON document.

    Layout: {"version": 1, "config": {RadarConfig fields}, "classes": [...],
    "scenes": [{"class": idx, "reflectors": [[r, az, el, re, im], ...],
    "noise_level": x, "seed": n, "distance_tag": str, "split_hint": str}]}.
    Returns (config, classes, entries) where each entry is
    (scene, class_index, distance_tag, split_hint).
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or doc.get("version") != 1:
        raise DatasetError(f"{path}: unsupported scene file version")
    cfg = doc.get("config")
    if not isinstance(cfg, dict):
        raise DatasetError(f"{path}: missing 'config' object")
    try:
        config = RadarConfig(
            center_frequency=float(cfg["center_frequency"]),
            bandwidth=float(cfg["bandwidth"]),
            eirp=float(cfg.get("eirp", 0.0)),
            n_tx=int(cfg["n_tx"]),
            n_rx=int(cfg["n_rx"]),
            fast_time_samples=int(cfg["fast_time_samples"]),
        )
    except KeyError as missing:
        raise DatasetError(f"{path}: config missing field {missing}") from None
    classes = doc.get("classes")
    if not isinstance(classes, list) or not classes:
        raise DatasetError(f"{path}: 'classes' must be a non-empty array")
    entries = []
    for i, raw in enumerate(doc.get("scenes", [])):
        where = f"{path}: scenes[{i}]"
        if not isinstance(raw, dict):
            raise DatasetError(f"{where}: must be an object")
        class_index = raw.get("class")
        if not isinstance(class_index, int) or not 0 <= class_index < len(classes):
            raise DatasetError(f"{where}: bad class index {class_index!r}")
        reflectors = []
        for j, refl in enumerate(raw.get("reflectors", [])):
            if not (isinstance(refl, list) and len(refl) == 5):
                raise DatasetError(f"{where}: reflectors[{j}] must be [r, az, el, re, im]")
            r, az, el, re_a, im_a = (float(v) for v in refl)
            reflectors.append((r, az, el, complex(re_a, im_a)))
        scene = SyntheticScene(
            tuple(reflectors),
            float(raw.get("noise_level", 0.0)),
            int(raw.get("seed", 0)),
        )
        entries.append(
            (
                scene,
                class_index,
                str(raw.get("distance_tag", "")),
                str(raw.get("split_hint", "auto")),
            )
        )
    return config, tuple(classes), tuple(entries)
