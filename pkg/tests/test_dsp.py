"""Transform oracle, cube I/O, dataset split, and scene generator tests."""

import json

import numpy as np
import pytest

from cvradar.ctensor import ComplexTensor, ShapeError
from cvradar.dsp import (
    CubeFormatError,
    DatasetError,
    ManifestEntry,
    RadarConfig,
    RadarCube,
    SpectrumCube,
    SyntheticScene,
    class_scene,
    dft3d_direct,
    fft3d,
    fft3d_array,
    flatten_channels,
    load_dataset,
    load_manifest,
    predicted_bins,
    range_bin_width,
    read_rfc1,
    split_dataset,
    synth_fmcw_cube,
    unflatten_channels,
    write_manifest,
    write_rfc1,
)


def loop_dft3d(values):
    """Literal triple-sum evaluation of the transform; the oracle's oracle."""
    X, Y, N = values.shape
    out = np.zeros((X, Y, N), dtype=np.complex128)
    for l in range(X):
        for m in range(Y):
            for k in range(N):
                acc = 0j
                for x in range(X):
                    for y in range(Y):
                        for n in range(N):
                            acc += values[x, y, n] * np.exp(
                                -2j * np.pi * (l * x / X + m * y / Y + k * n / N)
                            )
                out[l, m, k] = acc
    return out


class TestTransformOracle:
    def test_oracle_matches_literal_loops(self):
        rng = np.random.default_rng(0)
        values = rng.standard_normal((2, 3, 2)) + 1j * rng.standard_normal((2, 3, 2))
        assert np.max(np.abs(dft3d_direct(values) - loop_dft3d(values))) <= 1e-12

    def test_dc_cube(self):
        spectrum = fft3d_array(np.ones((2, 2, 4), dtype=np.complex128))
        assert spectrum[0, 0, 0] == pytest.approx(16 + 0j, abs=1e-12)
        spectrum[0, 0, 0] = 0
        assert np.max(np.abs(spectrum)) <= 1e-12

    def test_pure_tone(self):
        n = np.arange(4)
        values = np.exp(2j * np.pi * n / 4).reshape(1, 1, 4)
        spectrum = fft3d_array(values)
        assert abs(spectrum[0, 0, 1]) == pytest.approx(4.0, abs=1e-12)
        spectrum[0, 0, 1] = 0
        assert np.max(np.abs(spectrum)) <= 1e-12

    @pytest.mark.parametrize("shape", [(4, 4, 8), (5, 3, 7), (6, 10, 9), (1, 1, 1)])
    def test_fft_matches_oracle(self, shape):
        rng = np.random.default_rng(hash(shape) % 2**32)
        values = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        assert np.max(np.abs(fft3d_array(values) - dft3d_direct(values))) <= 1e-6

    def test_full_size_cube(self):
        rng = np.random.default_rng(42)
        values = rng.standard_normal((20, 20, 100)) + 1j * rng.standard_normal((20, 20, 100))
        assert np.max(np.abs(fft3d_array(values) - dft3d_direct(values))) <= 1e-6

    def test_parseval(self):
        rng = np.random.default_rng(1)
        values = rng.standard_normal((5, 4, 12)) + 1j * rng.standard_normal((5, 4, 12))
        spectrum = fft3d_array(values)
        lhs = np.sum(np.abs(spectrum) ** 2)
        rhs = values.size * np.sum(np.abs(values) ** 2)
        assert abs(lhs - rhs) / rhs <= 1e-9

    def test_linear(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((3, 4, 5)) + 1j * rng.standard_normal((3, 4, 5))
        b = rng.standard_normal((3, 4, 5)) + 1j * rng.standard_normal((3, 4, 5))
        alpha, beta = 1.3 - 0.2j, -0.7 + 2.1j
        lhs = fft3d_array(alpha * a + beta * b)
        rhs = alpha * fft3d_array(a) + beta * fft3d_array(b)
        assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)) <= 1e-9

    def test_cube_wrapper(self):
        rng = np.random.default_rng(3)
        values = rng.standard_normal((4, 4, 8)) + 1j * rng.standard_normal((4, 4, 8))
        cube = RadarCube(ComplexTensor(values.real, values.imag))
        out = fft3d(cube)
        assert isinstance(out, SpectrumCube)
        assert out.shape == (4, 4, 8)
        assert np.max(np.abs(out.data.to_complex() - dft3d_direct(values))) <= 1e-6

    def test_non_finite_rejected(self):
        bad = np.ones((2, 2, 2))
        bad[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            RadarCube(ComplexTensor(bad, np.zeros_like(bad)))


class TestFlatten:
    def test_shape(self):
        t = ComplexTensor(np.zeros((20, 20, 100)), np.zeros((20, 20, 100)))
        assert flatten_channels(t).shape == (400, 100)

    def test_row_order(self):
        x, y, n = 3, 4, 5
        re = np.empty((x, y, n))
        for xi in range(x):
            for yi in range(y):
                re[xi, yi, :] = xi * y + yi
        flat = flatten_channels(ComplexTensor(re, np.zeros_like(re)))
        for r in range(x * y):
            assert np.array_equal(flat.re[r], np.full(n, r))

    def test_round_trip(self):
        rng = np.random.default_rng(4)
        t = ComplexTensor(rng.standard_normal((3, 5, 7)), rng.standard_normal((3, 5, 7)))
        back = unflatten_channels(flatten_channels(t), (3, 5))
        assert np.array_equal(back.re, t.re) and np.array_equal(back.im, t.im)

    def test_rank_errors(self):
        with pytest.raises(ShapeError):
            flatten_channels(ComplexTensor(np.zeros((2, 2))))
        with pytest.raises(ShapeError):
            unflatten_channels(ComplexTensor(np.zeros((4, 3))), (2, 3))


class TestRfc1:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        for i in range(10):
            shape = tuple(rng.integers(1, 6, size=3))
            values = rng.standard_normal(shape).astype(np.float32).astype(np.float64)
            t = ComplexTensor(values, (values * 2).astype(np.float32).astype(np.float64))
            p = tmp_path / f"cube{i}.rfc1"
            write_rfc1(p, t)
            back = read_rfc1(p)
            assert np.array_equal(back.re, t.re) and np.array_equal(back.im, t.im)
            p2 = tmp_path / f"cube{i}b.rfc1"
            write_rfc1(p2, back)
            assert p.read_bytes() == p2.read_bytes()

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.rfc1"
        p.write_bytes(b"NOPE" + b"\x00" * 12)
        with pytest.raises(CubeFormatError):
            read_rfc1(p)

    def test_truncated_payload(self, tmp_path):
        p = tmp_path / "short.rfc1"
        t = ComplexTensor(np.ones((2, 2, 2)), np.zeros((2, 2, 2)))
        write_rfc1(p, t)
        p.write_bytes(p.read_bytes()[:-4])
        with pytest.raises(CubeFormatError):
            read_rfc1(p)

    def test_zero_extent_header(self, tmp_path):
        import struct

        p = tmp_path / "zero.rfc1"
        p.write_bytes(b"RFC1" + struct.pack("<III", 2, 0, 2))
        with pytest.raises(CubeFormatError):
            read_rfc1(p)


def _write_sample(tmp_path, name, shape, seed):
    rng = np.random.default_rng(seed)
    t = ComplexTensor(
        rng.standard_normal(shape).astype(np.float32).astype(np.float64),
        rng.standard_normal(shape).astype(np.float32).astype(np.float64),
    )
    write_rfc1(tmp_path / name, t)
    return name


def _make_manifest(tmp_path, entries, classes=("a", "b"), shape=None):
    path = tmp_path / "manifest.json"
    write_manifest(path, classes, entries, shape=shape)
    return path


class TestDataset:
    def test_load_order_preserved(self, tmp_path):
        entries = []
        for i in range(3):
            name = _write_sample(tmp_path, f"s{i}.rfc1", (2, 2, 4), seed=i)
            entries.append(ManifestEntry(name, i % 2, "d1", "auto"))
        ds = load_dataset(_make_manifest(tmp_path, entries))
        assert len(ds) == 3
        assert [s.label for s in ds.samples] == [0, 1, 0]
        assert [s.path.endswith(f"s{i}.rfc1") for i, s in enumerate(ds.samples)] == [True] * 3

    def test_missing_file_named(self, tmp_path):
        entries = [ManifestEntry("ghost.rfc1", 0, "d1", "auto")]
        with pytest.raises(DatasetError, match="ghost.rfc1"):
            load_dataset(_make_manifest(tmp_path, entries))

    def test_class_index_out_of_range(self, tmp_path):
        name = _write_sample(tmp_path, "s.rfc1", (2, 2, 4), seed=0)
        path = tmp_path / "manifest.json"
        doc = {
            "version": 1,
            "classes": ["a", "b"],
            "samples": [{"path": name, "class": 2, "distance_tag": "", "split_hint": "auto"}],
        }
        path.write_text(json.dumps(doc))
        with pytest.raises(DatasetError, match="class index"):
            load_manifest(path)

    def test_shape_mismatch_named(self, tmp_path):
        n0 = _write_sample(tmp_path, "s0.rfc1", (2, 2, 4), seed=0)
        n1 = _write_sample(tmp_path, "s1.rfc1", (2, 2, 5), seed=1)
        entries = [ManifestEntry(n0, 0, "", "auto"), ManifestEntry(n1, 1, "", "auto")]
        with pytest.raises(DatasetError, match="s1.rfc1"):
            load_dataset(_make_manifest(tmp_path, entries))

    def test_bad_version(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text('{"version": 9, "classes": ["a"], "samples": []}')
        with pytest.raises(DatasetError, match="version"):
            load_manifest(path)

    def _dataset(self, tmp_path, per_class=(50, 50), unseen=0):
        entries = []
        idx = 0
        for label, count in enumerate(per_class):
            for _ in range(count):
                name = _write_sample(tmp_path, f"s{idx}.rfc1", (2, 2, 4), seed=idx)
                entries.append(ManifestEntry(name, label, "near", "auto"))
                idx += 1
        for _ in range(unseen):
            name = _write_sample(tmp_path, f"s{idx}.rfc1", (2, 2, 4), seed=idx)
            entries.append(ManifestEntry(name, idx % len(per_class), "far", "unseen"))
            idx += 1
        return load_dataset(_make_manifest(tmp_path, entries))

    def test_split_80_20(self, tmp_path):
        ds = self._dataset(tmp_path)
        split = split_dataset(ds, 0.8, seed=0)
        assert len(split.train) == 80 and len(split.test) == 20
        for label in (0, 1):
            assert sum(1 for s in split.train if s.label == label) == 40

    def test_split_deterministic(self, tmp_path):
        ds = self._dataset(tmp_path, per_class=(7, 9))
        a = split_dataset(ds, 0.8, seed=3)
        b = split_dataset(ds, 0.8, seed=3)
        assert [s.path for s in a.train] == [s.path for s in b.train]
        assert [s.path for s in a.test] == [s.path for s in b.test]

    def test_split_partition(self, tmp_path):
        ds = self._dataset(tmp_path, per_class=(7, 9), unseen=4)
        split = split_dataset(ds, 0.75, seed=1)
        train_paths = {s.path for s in split.train}
        test_paths = {s.path for s in split.test}
        unseen_paths = {s.path for s in split.unseen}
        assert not train_paths & test_paths
        assert not train_paths & unseen_paths
        assert len(split.unseen) == 4
        eligible = {s.path for s in ds.samples if not s.unseen}
        assert train_paths | test_paths == eligible

    def test_split_small_class_rejected(self, tmp_path):
        ds = self._dataset(tmp_path, per_class=(1, 5))
        with pytest.raises(DatasetError, match="class 0"):
            split_dataset(ds, 0.8, seed=0)

    def test_split_bad_ratio(self, tmp_path):
        ds = self._dataset(tmp_path, per_class=(3, 3))
        with pytest.raises(ValueError):
            split_dataset(ds, 1.0, seed=0)


class TestScenes:
    CONFIG = RadarConfig(65.5e9, 5.0e9, -5.0, 8, 8, 32)

    def test_empty_scene_zero_noise(self):
        cube = synth_fmcw_cube(SyntheticScene((), 0.0, seed=0), self.CONFIG)
        assert np.array_equal(cube.data.re, np.zeros((8, 8, 32)))
        assert np.array_equal(cube.data.im, np.zeros((8, 8, 32)))

    def test_deterministic(self):
        scene = class_scene(0, 0.3, sample_seed=5, config=self.CONFIG, noise_level=0.1)
        a = synth_fmcw_cube(scene, self.CONFIG)
        b = synth_fmcw_cube(scene, self.CONFIG)
        assert np.array_equal(a.data.re, b.data.re)
        assert np.array_equal(a.data.im, b.data.im)

    def test_peak_at_predicted_bins(self):
        bin_m = range_bin_width(self.CONFIG)
        reflector = (10 * bin_m, np.arcsin(0.5), np.arcsin(0.25), 1.0 + 0j)
        scene = SyntheticScene((reflector,), 0.0, seed=0)
        spectrum = fft3d_array(synth_fmcw_cube(scene, self.CONFIG).data.to_complex())
        peak = np.unravel_index(np.argmax(np.abs(spectrum)), spectrum.shape)
        assert peak == predicted_bins(reflector, self.CONFIG)
        assert peak == (2, 1, 10)

    def test_negative_angle_wraps(self):
        bin_m = range_bin_width(self.CONFIG)
        reflector = (5 * bin_m, -np.arcsin(0.5), 0.0, 1.0 + 0j)
        scene = SyntheticScene((reflector,), 0.0, seed=0)
        spectrum = fft3d_array(synth_fmcw_cube(scene, self.CONFIG).data.to_complex())
        peak = np.unravel_index(np.argmax(np.abs(spectrum)), spectrum.shape)
        assert peak == predicted_bins(reflector, self.CONFIG) == (6, 0, 5)

    def test_range_limit(self):
        scene = SyntheticScene(((self.CONFIG.unambiguous_range * 1.5, 0.0, 0.0, 1.0),), 0.0, 0)
        with pytest.raises(ValueError, match="range"):
            synth_fmcw_cube(scene, self.CONFIG)

    def test_class_signature_fixed(self):
        a = class_scene(1, 0.3, sample_seed=1, config=self.CONFIG)
        b = class_scene(1, 0.3, sample_seed=2, config=self.CONFIG)
        for ra, rb in zip(a.reflectors, b.reflectors):
            assert ra[0] == rb[0] and ra[1] == rb[1] and ra[2] == rb[2]
            assert ra[3] != rb[3]
