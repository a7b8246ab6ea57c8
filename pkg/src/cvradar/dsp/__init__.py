"""Signal pre-processing, cube file I/O, dataset handling, and scene synthesis."""

from .fft import dft3d_direct, fft3d, fft3d_array, fft_last_axis
from .cube import (
    CubeFormatError,
    MATERIAL_CONFIG,
    OCCLUDED_CONFIG,
    RadarConfig,
    RadarCube,
    SpectrumCube,
    flatten_channels,
    read_rfc1,
    unflatten_channels,
    write_rfc1,
)
from .dataset import (
    Dataset,
    DatasetError,
    DatasetManifest,
    LoadedSample,
    ManifestEntry,
    Split,
    load_dataset,
    load_manifest,
    split_dataset,
    write_manifest,
)
from .scenes import (
    SyntheticScene,
    class_scene,
    parse_scene_file,
    predicted_bins,
    range_bin_width,
    synth_fmcw_cube,
)

__all__ = [
    "dft3d_direct",
    "fft3d",
    "fft3d_array",
    "fft_last_axis",
    "CubeFormatError",
    "MATERIAL_CONFIG",
    "OCCLUDED_CONFIG",
    "RadarConfig",
    "RadarCube",
    "SpectrumCube",
    "flatten_channels",
    "read_rfc1",
    "unflatten_channels",
    "write_rfc1",
    "Dataset",
    "DatasetError",
    "DatasetManifest",
    "LoadedSample",
    "ManifestEntry",
    "Split",
    "load_dataset",
    "load_manifest",
    "split_dataset",
    "write_manifest",
    "SyntheticScene",
    "class_scene",
    "parse_scene_file",
    "predicted_bins",
    "range_bin_width",
    "synth_fmcw_cube",
]
