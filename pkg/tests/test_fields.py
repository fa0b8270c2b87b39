import numpy as np
import pytest

from locred.base import ConfigError
from locred.fem import build_mesh, discretize
from locred.runner.config import DEFAULT_F, DEFAULT_KAPPA
from locred.runner.field_generators import FieldSpec, Rect, generate_f, generate_kappa, paint


@pytest.fixture(scope="module")
def mesh50():
    return build_mesh(50)


def test_empty_spec_is_background(mesh4):
    kappa = generate_kappa(FieldSpec(background=2.5), mesh4)
    np.testing.assert_array_equal(kappa.values, 2.5)


def test_full_domain_rectangle(mesh4):
    spec = FieldSpec(background=1.0, rects=[Rect(x0=0, y0=0, x1=1, y1=1, value=7.0)])
    np.testing.assert_array_equal(generate_kappa(spec, mesh4).values, 7.0)


def test_rectangle_indices():
    values = paint(FieldSpec(background=0.0, rects=[Rect(x0=0, y0=0, x1=0.5, y1=0.25, value=1.0)]), 4)
    grid = values.reshape(4, 4)  # [iy, ix]
    np.testing.assert_array_equal(grid[0], [1, 1, 0, 0])
    assert grid[1:].sum() == 0


def test_later_rectangles_win():
    spec = FieldSpec(background=0.0, rects=[Rect(x0=0, y0=0, x1=1, y1=1, value=1.0),
                                            Rect(x0=0, y0=0, x1=0.5, y1=0.5, value=2.0)])
    assert sorted(set(paint(spec, 2))) == [1.0, 2.0]


def test_default_fields(mesh50):
    kappa = generate_kappa(DEFAULT_KAPPA, mesh50)
    assert kappa.contrast == 1e5
    assert kappa.kappa_min == 1.0
    f = generate_f(DEFAULT_F, mesh50)
    assert np.abs(f.values).max() == 1e5
    # two blocks of 5 x 5 squares
    assert np.count_nonzero(f.values == 1e5) == 25
    assert np.count_nonzero(f.values == -1e5) == 25
    assert np.count_nonzero(kappa.values == 1e5) == 3 * 2 * 44


def test_off_grid_rectangle_rejected(mesh4):
    spec = FieldSpec(background=1.0, rects=[Rect(x0=0.1, y0=0, x1=0.5, y1=0.5, value=2.0)])
    with pytest.raises(ConfigError):
        generate_kappa(spec, mesh4)
    with pytest.raises(ConfigError):
        generate_f(spec, mesh4)


def test_rectangle_bounds_validated():
    with pytest.raises(ValueError):
        Rect(x0=0.5, y0=0, x1=0.25, y1=1, value=1.0)
    with pytest.raises(ValueError):
        Rect(x0=0, y0=0, x1=1.5, y1=1, value=1.0)
    with pytest.raises(ConfigError):
        Rect.parse("0 0 1")
    with pytest.raises(ConfigError):
        Rect.parse("0 0 1 1 hot")


def test_parse_round_trip():
    rect = Rect.parse("0.06 0.24 0.94 0.28 1e5")
    assert rect == Rect(x0=0.06, y0=0.24, x1=0.94, y1=0.28, value=100000.0)
    assert Rect.parse(rect.to_text()) == rect


def test_sign_flipped_source_negates_solution(mesh4):
    kappa = generate_kappa(FieldSpec(background=1.0, rects=[Rect(x0=0, y0=0.5, x1=1, y1=0.75, value=50.0)]), mesh4)
    spec = FieldSpec(background=0.0, rects=[Rect(x0=0.25, y0=0.25, x1=0.5, y1=0.5, value=3.0)])
    flipped = FieldSpec(background=0.0, rects=[Rect(x0=0.25, y0=0.25, x1=0.5, y1=0.5, value=-3.0)])
    u = discretize(mesh4, kappa, generate_f(spec, mesh4)).u
    np.testing.assert_allclose(discretize(mesh4, kappa, generate_f(flipped, mesh4)).u, -u, rtol=1e-12)
