import numpy as np
import pytest

from rmmimo.geometry import dual_pol_ula, place_cell_ula, place_ula


def test_two_elements_on_aperture_edges():
    np.testing.assert_allclose(place_ula(2, 0.4).positions[:, 1], [-0.2, 0.2])


def test_nine_elements_half_wavelength():
    y = place_ula(9, 0.4).positions[:, 1]
    np.testing.assert_allclose(np.diff(y), 0.05, rtol=1e-12)
    assert y.mean() == pytest.approx(0.0, abs=1e-15)


def test_cell_centred_placement():
    y = place_cell_ula(4, 0.4).positions[:, 1]
    np.testing.assert_allclose(y, [-0.15, -0.05, 0.05, 0.15], atol=1e-15)
    assert place_cell_ula(1, 0.4).positions[0, 1] == 0.0
    # cells of a coarse array split into whole cells of a finer one
    fine = place_cell_ula(8, 0.4).positions[:, 1]
    np.testing.assert_allclose(fine.reshape(4, 2).mean(axis=1), y, atol=1e-15)


def test_dual_pol_pairs():
    g = dual_pol_ula(16, 0.1, 8)
    assert g.n_elements == 32 and g.n_rf == 8 and g.block_size == 4
    np.testing.assert_array_equal(g.positions[:16], g.positions[16:])
    np.testing.assert_allclose(g.slants[:16], np.pi / 4)
    np.testing.assert_allclose(g.slants[16:], -np.pi / 4)
    np.testing.assert_array_equal(g.subarray_map, np.repeat(np.arange(8), 4))


def test_invalid_geometry():
    with pytest.raises(ValueError):
        place_ula(0, 0.4)
    with pytest.raises(ValueError):
        place_ula(4, -1.0)
    with pytest.raises(ValueError):
        dual_pol_ula(4, 0.1, 3)
