import numpy as np
import pytest

from locred.base import ConfigError
from locred.fem import build_mesh


def test_200_squares_node_count():
    mesh = build_mesh(200)
    assert mesh.n_nodes == 80401
    assert mesh.n_triangles == 4 * 200 * 200


def test_small_mesh_counts(mesh4):
    assert mesh4.n_nodes == 25 + 16
    assert mesh4.n_triangles == 64
    assert np.count_nonzero(mesh4.is_boundary) == 16
    assert mesh4.n_free == 41 - 16
    assert mesh4.h == 0.25


def test_triangles_are_counter_clockwise_and_equal(mesh4):
    areas = mesh4.signed_areas()
    np.testing.assert_allclose(areas, 1.0 / (4 * 16))
    assert areas.sum() == pytest.approx(1.0)


def test_center_and_vertex_numbering(mesh4):
    np.testing.assert_allclose(mesh4.nodes[mesh4.vertex(1, 2)], [0.25, 0.5])
    np.testing.assert_allclose(mesh4.nodes[mesh4.center(3, 0)], [0.875, 0.125])
    # every triangle of square s uses that square's center
    s = 2 * 4 + 1
    assert set(mesh4.triangles[4 * s:4 * s + 4, 2]) == {mesh4.center(1, 2)}
    np.testing.assert_array_equal(mesh4.square_of_triangle[4 * s], [1, 2])


def test_centers_are_free(mesh4):
    centers = np.arange(25, 41)
    assert np.all(mesh4.free_index[centers] >= 0)


def test_to_full_and_interpolate(mesh4):
    u = mesh4.interpolate(lambda x, y: x * (1 - x) * y * (1 - y))
    full = mesh4.to_full(u)
    assert np.all(full[mesh4.is_boundary] == 0)
    assert full[mesh4.vertex(2, 2)] == pytest.approx(1.0 / 16)


@pytest.mark.parametrize("n", [0, -3, 2.5])
def test_invalid_resolution(n):
    with pytest.raises(ConfigError):
        build_mesh(n)
