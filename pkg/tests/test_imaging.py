import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submig import (
    ImageMap,
    ImagingGridSpec,
    Inhomogeneity,
    SceneConfig,
    add_noise,
    assemble_msr,
    build_E_matrix,
    decompose,
    extract_peaks,
    image_grid,
    imaging_value,
    make_directions,
    read_image,
    select_rank,
    write_image,
    write_peaks,
)
from submig import test_vector as steering_vector

@pytest.fixture(scope="module")
def fig2_rank9(fig2, dirs16):
    scene, freq = fig2
    factors = decompose(assemble_msr(scene, freq, dirs16))
    return select_rank(factors, fixed=9)


@pytest.fixture(scope="module")
def single_target_rank3(fig2):
    # 32 directions keep the angular-aliasing lobes of a coarse array out of
    # the map, so the clean point-spread structure is what gets tested
    _, freq = fig2
    dirs = make_directions(32)
    scene = SceneConfig(
        inhomogeneities=(
            Inhomogeneity(location=(0.4, 0.0), radius=0.05, permittivity=5, permeability=5),
        )
    )
    factors = select_rank(decompose(assemble_msr(scene, freq, dirs)), fixed=3)
    return scene, freq, factors, dirs


class TestTestVector:
    def test_origin_gives_uniform_vector(self, dirs16):
        w = steering_vector((0.0, 0.0), 10.0, dirs16)
        np.testing.assert_array_equal(w, np.full(16, 0.25, dtype=complex))

    @given(
        st.floats(min_value=-2, max_value=2),
        st.floats(min_value=-2, max_value=2),
        st.floats(min_value=0.5, max_value=40),
    )
    @settings(max_examples=50, deadline=None)
    def test_unit_norm(self, x, y, eta):
        dirs = make_directions(16)
        assert np.linalg.norm(steering_vector((x, y), eta, dirs)) == pytest.approx(1.0, abs=1e-12)

    def test_aligns_with_steering_column_at_matched_frequency(self, fig2, dirs16):
        scene, freq = fig2
        z = scene.inhomogeneities[0].location
        w = steering_vector(z, freq.omega, dirs16)
        e1 = build_E_matrix(z, freq.omega, dirs16)[:, 0]
        assert abs(np.vdot(w, e1)) == pytest.approx(1.0, abs=1e-12)

    def test_nonpositive_eta_rejected(self, dirs16):
        with pytest.raises(ValueError, match="eta"):
            steering_vector((0.0, 0.0), 0.0, dirs16)


class TestImagingValue:
    def test_near_one_at_target_with_matched_frequency(self, fig2, dirs16, fig2_rank9):
        scene, freq = fig2
        value = imaging_value(scene.inhomogeneities[0].location, freq.omega, fig2_rank9, dirs16)
        assert value >= 0.9

    def test_rank_zero_gives_zero(self, fig2, dirs16, fig2_rank9):
        _, freq = fig2
        factors = dataclasses.replace(fig2_rank9, rank=0)
        assert imaging_value((0.3, -0.2), freq.omega, factors, dirs16) == 0.0

    def test_unset_rank_rejected(self, fig2, dirs16, fig2_rank9):
        _, freq = fig2
        factors = dataclasses.replace(fig2_rank9, rank=None)
        with pytest.raises(ValueError, match="rank"):
            imaging_value((0.0, 0.0), freq.omega, factors, dirs16)

    def test_peak_relocates_under_frequency_mismatch(self, single_target_rank3):
        scene, freq, factors, dirs = single_target_rank3
        eta = 10.0
        grid = ImagingGridSpec(x_min=-1, x_max=1, y_min=-1, y_max=1, nx=128, ny=128)
        image = image_grid(grid, eta, factors, dirs)
        i, j = np.unravel_index(np.argmax(image.values), image.values.shape)
        peak = np.array([grid.x_nodes()[i], grid.y_nodes()[j]])
        predicted = (freq.omega / eta) * scene.inhomogeneities[0].location
        np.testing.assert_allclose(predicted, [0.6283185307179586, 0.0], atol=1e-12)
        assert np.linalg.norm(peak - predicted) <= grid.cell_diagonal()

    def test_bounded_by_rank(self, fig2, dirs16, fig2_rank9):
        scene, freq = fig2
        noisy = add_noise(assemble_msr(scene, freq, make_directions(16)), 10.0, seed=3)
        factors = select_rank(decompose(noisy), fixed=16)
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(-1, 1, 2)
            value = imaging_value(x, 15.0, factors, dirs16)
            assert 0.0 <= value <= 16.0

    def test_phase_gauge_invariance(self, fig2, dirs16, fig2_rank9):
        """Scaling a stored pair by (e^{i phi}, e^{-i phi}) is a gauge move."""
        _, freq = fig2
        x = (0.25, -0.4)
        reference = imaging_value(x, freq.omega, fig2_rank9, dirs16)
        left = fig2_rank9.left_vectors.copy()
        right = fig2_rank9.right_vectors.copy()
        phases = np.exp(1j * np.linspace(0.3, 5.9, 9))
        left[:, :9] *= phases
        right[:, :9] *= phases.conj()
        altered = dataclasses.replace(fig2_rank9, left_vectors=left, right_vectors=right)
        assert imaging_value(x, freq.omega, altered, dirs16) == pytest.approx(
            reference, abs=1e-12
        )


class TestImageGrid:
    def test_two_by_two_matches_pointwise_calls_bitwise(self, fig2, dirs16, fig2_rank9):
        _, freq = fig2
        grid = ImagingGridSpec(x_min=-0.5, x_max=0.5, y_min=-0.25, y_max=0.75, nx=2, ny=2)
        image = image_grid(grid, freq.omega, fig2_rank9, dirs16)
        for i, x in enumerate(grid.x_nodes()):
            for j, y in enumerate(grid.y_nodes()):
                assert image.values[i, j] == imaging_value((x, y), freq.omega, fig2_rank9, dirs16)

    def test_doubling_resolution_preserves_shared_nodes(self, fig2, dirs16, fig2_rank9):
        _, freq = fig2
        coarse = ImagingGridSpec(x_min=-1, x_max=1, y_min=-1, y_max=1, nx=5, ny=5)
        fine = ImagingGridSpec(x_min=-1, x_max=1, y_min=-1, y_max=1, nx=9, ny=9)
        a = image_grid(coarse, freq.omega, fig2_rank9, dirs16)
        b = image_grid(fine, freq.omega, fig2_rank9, dirs16)
        assert np.array_equal(a.values, b.values[::2, ::2])

    def test_three_maxima_near_targets_at_near_matched_frequency(self, fig2, dirs16, fig2_rank9):
        scene, _ = fig2
        grid = ImagingGridSpec(x_min=-1, x_max=1, y_min=-1, y_max=1, nx=128, ny=128)
        image = image_grid(grid, 15.0, fig2_rank9, dirs16)
        peaks = extract_peaks(image, threshold_frac=0.5, min_separation=0.2)
        assert len(peaks) >= 3
        top3 = peaks[:3]
        matched = set()
        for p in top3:
            dists = [np.hypot(p.x - z[0], p.y - z[1]) for z in scene.locations()]
            m = int(np.argmin(dists))
            assert dists[m] <= 2 * grid.cell_diagonal()
            matched.add(m)
        assert matched == {0, 1, 2}

    def test_source_tag_and_eta(self, fig2, dirs16, fig2_rank9):
        grid = ImagingGridSpec(x_min=-1, x_max=1, y_min=-1, y_max=1, nx=4, ny=4)
        image = image_grid(grid, 15.0, fig2_rank9, dirs16)
        assert image.source == "numeric"
        assert image.eta == 15.0


class TestExtractPeaks:
    def test_single_target_yields_single_peak(self, single_target_rank3):
        scene, freq, factors, dirs = single_target_rank3
        grid = ImagingGridSpec(x_min=-1, x_max=1, y_min=-1, y_max=1, nx=128, ny=128)
        image = image_grid(grid, freq.omega, factors, dirs)
        peaks = extract_peaks(image, threshold_frac=0.5, min_separation=0.2)
        assert len(peaks) == 1
        z = scene.inhomogeneities[0].location
        assert math.hypot(peaks[0].x - z[0], peaks[0].y - z[1]) <= grid.cell_diagonal()

    def test_tight_threshold_keeps_only_global_maximum(self, single_target_rank3):
        _, freq, factors, dirs = single_target_rank3
        grid = ImagingGridSpec(x_min=-1, x_max=1, y_min=-1, y_max=1, nx=64, ny=64)
        image = image_grid(grid, freq.omega, factors, dirs)
        peaks = extract_peaks(image, threshold_frac=0.999, min_separation=0.01)
        assert len(peaks) == 1

    def test_zero_image_yields_no_peaks(self):
        grid = ImagingGridSpec(x_min=0, x_max=1, y_min=0, y_max=1, nx=8, ny=8)
        image = ImageMap(grid=grid, values=np.zeros((8, 8)), eta=1.0, source="numeric")
        assert extract_peaks(image, 0.5, 0.1) == []

    def test_separation_filter_prefers_higher_peak(self):
        grid = ImagingGridSpec(x_min=0, x_max=1, y_min=0, y_max=1, nx=11, ny=11)
        values = np.zeros((11, 11))
        values[5, 5] = 1.0
        values[6, 6] = 0.9  # 0.14 away, inside the 0.2 separation radius
        values[9, 9] = 0.8
        image = ImageMap(grid=grid, values=values, eta=1.0, source="numeric")
        peaks = extract_peaks(image, threshold_frac=0.5, min_separation=0.2)
        assert [(p.x, p.y) for p in peaks] == [(0.5, 0.5), (0.9, 0.9)]
        assert peaks[0].value == 1.0

    def test_descending_value_order(self, fig2, dirs16, fig2_rank9):
        grid = ImagingGridSpec(x_min=-1, x_max=1, y_min=-1, y_max=1, nx=96, ny=96)
        image = image_grid(grid, 15.0, fig2_rank9, dirs16)
        peaks = extract_peaks(image, threshold_frac=0.3, min_separation=0.05)
        values = [p.value for p in peaks]
        assert values == sorted(values, reverse=True)

    @pytest.mark.parametrize("frac", [0.0, 1.0, -0.2, 1.5])
    def test_threshold_range_enforced(self, frac):
        grid = ImagingGridSpec(x_min=0, x_max=1, y_min=0, y_max=1, nx=4, ny=4)
        image = ImageMap(grid=grid, values=np.ones((4, 4)), eta=1.0, source="numeric")
        with pytest.raises(ValueError, match="threshold"):
            extract_peaks(image, frac, 0.1)


class TestGridSpecAndImageMap:
    def test_nodes_include_bounds(self):
        grid = ImagingGridSpec(x_min=-1.5, x_max=1.5, y_min=-2, y_max=2, nx=7, ny=5)
        assert grid.x_nodes()[0] == -1.5 and grid.x_nodes()[-1] == 1.5
        assert grid.y_nodes()[0] == -2 and grid.y_nodes()[-1] == 2

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ValueError, match="bounds"):
            ImagingGridSpec(x_min=1, x_max=-1, y_min=0, y_max=1, nx=4, ny=4)

    def test_too_few_nodes_rejected(self):
        with pytest.raises(ValueError, match="nodes"):
            ImagingGridSpec(x_min=0, x_max=1, y_min=0, y_max=1, nx=1, ny=4)

    def test_negative_values_rejected(self):
        grid = ImagingGridSpec(x_min=0, x_max=1, y_min=0, y_max=1, nx=2, ny=2)
        with pytest.raises(ValueError, match="nonnegative"):
            ImageMap(grid=grid, values=np.array([[0.0, 1.0], [-0.1, 0.0]]), eta=1.0, source="numeric")

    def test_shape_mismatch_rejected(self):
        grid = ImagingGridSpec(x_min=0, x_max=1, y_min=0, y_max=1, nx=2, ny=2)
        with pytest.raises(ValueError, match="shape"):
            ImageMap(grid=grid, values=np.zeros((3, 2)), eta=1.0, source="numeric")

    def test_unknown_source_rejected(self):
        grid = ImagingGridSpec(x_min=0, x_max=1, y_min=0, y_max=1, nx=2, ny=2)
        with pytest.raises(ValueError, match="source"):
            ImageMap(grid=grid, values=np.zeros((2, 2)), eta=1.0, source="guess")


class TestImageFileFormat:
    def test_round_trip_is_bit_exact(self, fig2, dirs16, fig2_rank9, tmp_path):
        grid = ImagingGridSpec(x_min=-1, x_max=1, y_min=-0.5, y_max=0.5, nx=9, ny=7)
        image = image_grid(grid, 15.0, fig2_rank9, dirs16)
        path = tmp_path / "map.img"
        write_image(image, path)
        back = read_image(path)
        assert back.grid == image.grid
        assert back.eta == image.eta
        assert back.source == image.source
        assert np.array_equal(back.values, image.values)

    def test_header_layout(self, tmp_path):
        grid = ImagingGridSpec(x_min=0, x_max=1, y_min=0, y_max=2, nx=2, ny=3)
        image = ImageMap(grid=grid, values=np.arange(6, dtype=float).reshape(2, 3), eta=7.5,
                         source="analytic")
        path = tmp_path / "map.img"
        write_image(image, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "# image nx=2 ny=3 eta=7.5 source=analytic"
        assert lines[1] == "# bounds 0 1 0 2"
        assert len(lines) == 2 + 3  # ny data rows
        # row j holds values at y_j: values[:, j]
        assert lines[2].split() == ["0", "3"]

    def test_rejects_malformed_header(self, tmp_path):
        path = tmp_path / "bad.img"
        path.write_text("# image nx=2 ny=2 source=numeric\n# bounds 0 1 0 1\n0 0\n0 0\n")
        with pytest.raises(ValueError, match="header"):
            read_image(path)

    def test_rejects_row_mismatch(self, tmp_path):
        path = tmp_path / "bad.img"
        path.write_text("# image nx=2 ny=3 eta=1 source=numeric\n# bounds 0 1 0 1\n0 0\n0 0\n")
        with pytest.raises(ValueError, match="rows"):
            read_image(path)


class TestPeaksFile:
    def test_layout_descending(self, tmp_path):
        from submig import Peak

        peaks = [Peak(0.5, -0.25, 1.0), Peak(-0.125, 0.75, 0.5)]
        path = tmp_path / "peaks.txt"
        write_peaks(peaks, path)
        assert path.read_text() == "0.5 -0.25 1\n-0.125 0.75 0.5\n"

    def test_empty_list_gives_empty_file(self, tmp_path):
        path = tmp_path / "peaks.txt"
        write_peaks([], path)
        assert path.read_text() == ""
