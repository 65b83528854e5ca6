import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from _oracles import brute_horizon, naive_bilinear, naive_normals
from lunarsim import (
    DemGrid,
    GridFormatError,
    GridStructureError,
    Raster,
    compute_horizon_map,
    derive_displacement_map,
    derive_normal_map,
    load_dem,
    load_raster,
    sample_bilinear,
    save_dem,
    save_raster,
)
from lunarsim.terrain import read_pgm, write_pgm


def _write(path, text):
    path.write_text(text)
    return path


# --- grid types ---------------------------------------------------------------

def test_dem_rejects_degenerate_shapes():
    with pytest.raises(ValueError):
        DemGrid(np.zeros((1, 5)))
    with pytest.raises(ValueError):
        DemGrid(np.zeros((3, 3)), cell_size=0.0)
    with pytest.raises(ValueError):
        DemGrid(np.array([[0.0, np.inf], [0.0, 0.0]]))


def test_cell_center_convention():
    dem = DemGrid(np.zeros((4, 5)), 2.0, origin_x=100.0, origin_y=-10.0)
    assert dem.cell_center(3, 1) == (102.0, -4.0)
    assert dem.bounds == (100.0, -10.0, 108.0, -4.0)


def test_values_are_read_only_copies():
    z = np.zeros((3, 3))
    dem = DemGrid(z)
    z[0, 0] = 5.0
    assert dem.values[0, 0] == 0.0
    with pytest.raises(ValueError):
        dem.values[0, 0] = 1.0


# --- ASCII grid ---------------------------------------------------------------

def test_ascii_all_zero_grid(tmp_path):
    p = _write(tmp_path / "z.asc",
               "ncols 3\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 10\n"
               "0 0 0\n0 0 0\n0 0 0\n")
    dem = load_dem(p)
    assert (dem.rows, dem.cols, dem.cell_size) == (3, 3, 10.0)
    assert np.all(dem.values == 0.0)
    # corner origin shifts to the first cell center
    assert (dem.origin_x, dem.origin_y) == (5.0, 5.0)


def test_ascii_first_line_is_north(tmp_path):
    p = _write(tmp_path / "g.asc",
               "NCOLS 2\nNROWS 2\nXLLCENTER 0\nYLLCENTER 0\nCELLSIZE 1\n1 2\n3 4\n")
    dem = load_dem(p)
    np.testing.assert_array_equal(dem.values, [[3, 4], [1, 2]])


def test_ascii_nodata_becomes_nan(tmp_path):
    p = _write(tmp_path / "n.asc",
               "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
               "NODATA_value -9999\n1 -9999\n3 4\n")
    dem = load_dem(p)
    assert dem.nodata == -9999.0
    assert np.isnan(dem.values[1, 1])
    assert dem.zmax == 4.0


def test_ascii_missing_row_is_structural(tmp_path):
    p = _write(tmp_path / "short.asc",
               "ncols 3\nnrows 4\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
               "0 0 0\n0 0 0\n0 0 0\n")
    with pytest.raises(GridStructureError, match="4x3"):
        load_dem(p)


@pytest.mark.parametrize("header, lineno", [
    ("ncols 3\nnrows x\nxllcorner 0\nyllcorner 0\ncellsize 1\n", 2),
    ("ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\nbogus 1\n", 5),
    ("ncols 3\nncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n", 2),
    ("ncols 2.5\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n", 1),
    ("ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize -1\n", 5),
])
def test_ascii_header_errors_name_the_line(tmp_path, header, lineno):
    p = _write(tmp_path / "bad.asc", header + "0 0 0\n")
    with pytest.raises(GridFormatError) as err:
        load_dem(p)
    assert err.value.line == lineno
    assert f"bad.asc:{lineno}:" in str(err.value)


def test_ascii_bad_body_token(tmp_path):
    p = _write(tmp_path / "b.asc",
               "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 x\n")
    with pytest.raises(GridFormatError) as err:
        load_dem(p)
    assert err.value.line == 7


def test_ascii_needs_origin(tmp_path):
    p = _write(tmp_path / "o.asc", "ncols 2\nnrows 2\ncellsize 1\n1 2\n3 4\n")
    with pytest.raises(GridFormatError, match="xllcorner"):
        load_dem(p)


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        load_dem(tmp_path / "nope.asc")


# --- round trips --------------------------------------------------------------

def test_ascii_round_trip_random(tmp_path, rng):
    dem = DemGrid(rng.normal(0, 300, (16, 16)), 7.5, origin_x=1234.5, origin_y=-77.25)
    save_dem(dem, tmp_path / "r.asc")
    back = load_dem(tmp_path / "r.asc")
    assert back == dem
    assert back.values.tobytes() == dem.values.tobytes()


def test_ascii_round_trip_keeps_nodata(tmp_path, rng):
    z = rng.normal(0, 1, (6, 7))
    z[2, 3] = np.nan
    dem = DemGrid(z, 1.0, nodata=-32768.0)
    save_dem(dem, tmp_path / "n.asc")
    back = load_dem(tmp_path / "n.asc")
    assert back == dem
    assert back.nodata == -32768.0


def test_binary_round_trip(tmp_path, rng):
    # the binary body is float32, so only float32-representable values survive exactly
    z = rng.normal(0, 300, (16, 16)).astype(np.float32).astype(np.float64)
    z[0, 0] = np.nan
    dem = DemGrid(z, 2.5)
    save_dem(dem, tmp_path / "r.ldem")
    assert (tmp_path / "r.ldem").stat().st_size == 24 + 4 * 16 * 16
    assert load_dem(tmp_path / "r.ldem") == dem


def test_binary_lossy_write_warns(tmp_path, caplog):
    dem = DemGrid(np.full((2, 2), 0.1), 1.0)
    save_dem(dem, tmp_path / "w.ldem")
    assert "not exact" in caplog.text


def test_binary_truncated_body(tmp_path):
    dem = DemGrid(np.zeros((4, 4)))
    save_dem(dem, tmp_path / "t.ldem")
    data = (tmp_path / "t.ldem").read_bytes()
    (tmp_path / "t.ldem").write_bytes(data[:-4])
    with pytest.raises(GridStructureError):
        load_dem(tmp_path / "t.ldem")


@pytest.mark.skipif(os.geteuid() == 0, reason="root can write anywhere")
def test_unwritable_directory(tmp_path):
    d = tmp_path / "ro"
    d.mkdir()
    d.chmod(0o500)
    with pytest.raises(OSError):
        save_dem(DemGrid(np.zeros((2, 2))), d / "x.asc")


def test_save_into_missing_directory(tmp_path):
    with pytest.raises(OSError):
        save_dem(DemGrid(np.zeros((2, 2))), tmp_path / "missing" / "x.asc")


# --- rasters and PGM ----------------------------------------------------------

def test_pgm_round_trip(tmp_path, rng):
    img = rng.integers(0, 256, (5, 7), dtype=np.uint8)
    write_pgm(tmp_path / "a.pgm", img)
    back, maxval = read_pgm(tmp_path / "a.pgm")
    assert maxval == 255
    np.testing.assert_array_equal(back, img)


def test_plain_16bit_pgm_with_comment(tmp_path):
    _write(tmp_path / "p.pgm", "P2\n# albedo\n2 2\n65535\n0 65535\n32768 65535\n")
    img, maxval = read_pgm(tmp_path / "p.pgm")
    assert maxval == 65535
    assert img[1, 0] == 32768


def test_pgm_albedo_is_normalized_and_flipped(tmp_path):
    write_pgm(tmp_path / "a.pgm", np.array([[255, 0], [0, 0]], dtype=np.uint8))
    dem = DemGrid(np.zeros((2, 2)), 3.0, 10.0, 20.0)
    alb = load_raster(tmp_path / "a.pgm", like=dem)
    # top image row is the northern row
    np.testing.assert_array_equal(alb.values, [[0, 0], [1, 0]])
    assert alb.same_georeference(dem)


def test_albedo_shape_mismatch(tmp_path):
    write_pgm(tmp_path / "a.pgm", np.zeros((3, 2), dtype=np.uint8))
    with pytest.raises(GridStructureError):
        load_raster(tmp_path / "a.pgm", like=DemGrid(np.zeros((2, 2))))


def test_pgm_is_not_a_dem(tmp_path):
    write_pgm(tmp_path / "a.pgm", np.zeros((3, 3), dtype=np.uint8))
    with pytest.raises(GridFormatError):
        load_dem(tmp_path / "a.pgm")


def test_raster_binary_round_trip(tmp_path):
    r = Raster(np.arange(6, dtype=float).reshape(2, 3), 4.0)
    save_raster(r, tmp_path / "r.ldem")
    assert load_raster(tmp_path / "r.ldem") == r


# --- bilinear sampling --------------------------------------------------------

def test_bilinear_exact_at_cell_centers(rng):
    dem = DemGrid(rng.normal(size=(6, 5)), 2.0, 10.0, 20.0)
    for i in range(6):
        for j in range(5):
            x, y = dem.cell_center(i, j)
            assert sample_bilinear(dem, x, y) == dem.values[i, j]


def test_bilinear_midpoint():
    dem = DemGrid(np.array([[2.0, 4.0], [2.0, 4.0]]))
    assert sample_bilinear(dem, 0.5, 0.0) == 3.0


def test_bilinear_matches_naive_oracle(rng):
    z = rng.normal(size=(9, 11))
    dem = DemGrid(z, 1.5, -3.0, 4.0)
    for _ in range(500):
        x = rng.uniform(-3.0, -3.0 + 10 * 1.5)
        y = rng.uniform(4.0, 4.0 + 8 * 1.5)
        expect = naive_bilinear(z.tolist(), x, y, 1.5, -3.0, 4.0)
        assert abs(sample_bilinear(dem, x, y) - expect) <= 1e-12


def test_bilinear_out_of_bounds():
    dem = DemGrid(np.zeros((3, 3)))
    with pytest.raises(IndexError):
        sample_bilinear(dem, 2.5, 1.0)
    with pytest.raises(IndexError):
        sample_bilinear(dem, 1.0, -0.01)


@given(arrays(np.float64, (4, 4), elements=st.floats(-1e3, 1e3)),
       st.floats(0, 3), st.floats(0, 3))
def test_bilinear_bounded_by_support(z, x, y):
    dem = DemGrid(z)
    v = sample_bilinear(dem, x, y)
    j, i = min(int(x), 2), min(int(y), 2)
    support = z[i:i + 2, j:j + 2]
    assert support.min() - 1e-9 <= v <= support.max() + 1e-9


# --- normal map ---------------------------------------------------------------

def test_flat_normals():
    n = derive_normal_map(DemGrid(np.full((5, 5), 3.0)))
    np.testing.assert_array_equal(n.vectors, np.broadcast_to([0, 0, 1.0], (5, 5, 3)))


def test_plane_normals():
    xx = np.tile(np.arange(6, dtype=float), (4, 1))
    n = derive_normal_map(DemGrid(xx, 1.0))
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(n.vectors, np.broadcast_to([-s, 0, s], (4, 6, 3)), atol=1e-15)


def test_normals_match_oracle(rng):
    z = rng.normal(0, 3, (8, 8))
    n = derive_normal_map(DemGrid(z, 0.7))
    np.testing.assert_allclose(n.vectors, naive_normals(z.tolist(), 0.7), rtol=0, atol=1e-9)


@given(arrays(np.float64, (5, 6), elements=st.floats(-500, 500)),
       st.floats(0.01, 100))
def test_normals_unit_and_upward(z, cs):
    v = derive_normal_map(DemGrid(z, cs)).vectors
    norm = np.linalg.norm(v, axis=-1)
    assert np.all(np.abs(norm - 1) <= 1e-6)
    assert np.all(v[..., 2] > 0)


def test_normals_propagate_nodata():
    z = np.zeros((5, 5))
    z[2, 2] = np.nan
    v = derive_normal_map(DemGrid(z)).vectors
    assert np.isnan(v[2, 1]).all() and np.isnan(v[1, 2]).all()
    assert not np.isnan(v[0, 0]).any()


# --- displacement -------------------------------------------------------------

def test_displacement_examples(rng):
    flat = DemGrid(np.full((3, 3), 100.0))
    assert np.all(derive_displacement_map(flat, 100.0).values == 0)
    d = derive_displacement_map(DemGrid(np.array([[0.0, 5.0, 10.0]] * 2)), 5.0)
    np.testing.assert_array_equal(d.values[0], [-5, 0, 5])
    z = rng.normal(50, 20, (10, 10))
    d = derive_displacement_map(DemGrid(z), z.mean())
    assert abs(d.values.mean()) <= 1e-9


# --- horizon map --------------------------------------------------------------

@pytest.mark.parametrize("n_az", [4, 16, 64])
def test_flat_horizon_is_zero(n_az):
    h = compute_horizon_map(DemGrid(np.full((12, 10), 7.0)), n_az)
    assert h.angles.shape == (n_az, 12, 10)
    assert np.all(h.angles == 0)


def test_spike_horizon_is_45_degrees():
    z = np.zeros((32, 32))
    z[26, 16] = 10.0  # 10 m north of cell (16, 16)
    h = compute_horizon_map(DemGrid(z), 64)
    got = h.angles[h.sector(0.0), 16, 16]
    oracle = brute_horizon(z, 1.0, 16, 16, 0.0, 1 / 20)
    assert abs(got - 45.0) <= 1.0
    assert abs(got - oracle) <= 1.0


def test_highest_cell_sees_no_horizon(rng):
    z = rng.normal(0, 5, (16, 16))
    i, j = np.unravel_index(np.argmax(z), z.shape)
    h = compute_horizon_map(DemGrid(z), 32)
    assert np.all(h.angles[:, i, j] == 0)


def test_horizon_matches_brute_force_at_same_step(rng):
    z = rng.normal(0, 2, (12, 12))
    h = compute_horizon_map(DemGrid(z), 16)
    for k in range(16):
        az = 360.0 * k / 16
        for (i, j) in [(0, 0), (5, 7), (11, 3), (6, 6)]:
            assert abs(h.angles[k, i, j] - brute_horizon(z, 1.0, i, j, az, 0.5)) <= 1e-9


def test_horizon_angles_in_range(rng):
    z = rng.normal(0, 50, (16, 16))
    a = compute_horizon_map(DemGrid(z), 16).angles
    assert np.all((a >= 0) & (a < 90))


def test_horizon_independent_of_workers(rng):
    dem = DemGrid(rng.normal(0, 5, (20, 17)))
    a = compute_horizon_map(dem, 16, workers=1)
    b = compute_horizon_map(dem, 16, workers=3)
    assert a == b


def test_horizon_sector_lookup():
    h = compute_horizon_map(DemGrid(np.zeros((4, 4))), 8)
    assert h.sector(0.0) == 0
    assert h.sector(22.4) == 0
    assert h.sector(22.6) == 1
    assert h.sector(-10.0) == 0
    assert h.sector(350.0) == 0
    assert h.sector(315.0) == 7


@given(arrays(np.float64, (7, 7), elements=st.floats(-20, 20)),
       st.integers(0, 6), st.integers(0, 6), st.floats(0.1, 50))
def test_raising_a_cell_never_lowers_other_horizons(z, i, j, bump):
    dem = DemGrid(z)
    before = compute_horizon_map(dem, 8).angles
    z2 = z.copy()
    z2[i, j] += bump
    after = compute_horizon_map(DemGrid(z2), 8).angles
    mask = np.ones(z.shape, bool)
    mask[i, j] = False
    assert np.all(after[:, mask] >= before[:, mask] - 1e-12)


def test_horizon_rejects_too_few_sectors():
    with pytest.raises(ValueError):
        compute_horizon_map(DemGrid(np.zeros((3, 3))), 3)
