import numpy as np
import pytest

from topofield import (
    BoundaryMode,
    DimensionMismatchError,
    Grid2D,
    ScalarField,
    integrate,
    laplacian,
)


def test_grid_spacing_covers_unit_square():
    g = Grid2D(11, 21)
    assert g.hx == pytest.approx(0.1)
    assert g.hy == pytest.approx(0.05)
    assert g.x()[0] == 0.0 and g.x()[-1] == 1.0
    assert g.y()[0] == 0.0 and g.y()[-1] == 1.0


def test_grid_too_small_rejected():
    with pytest.raises(ValueError):
        Grid2D(2, 5)


def test_field_shape_checked():
    with pytest.raises(DimensionMismatchError):
        ScalarField(Grid2D(5, 5), np.zeros((4, 5)))


def test_laplacian_constant_neumann_is_zero():
    u = ScalarField.constant(Grid2D(7, 9), 3.25)
    lap = laplacian(u, BoundaryMode.NEUMANN)
    assert np.allclose(lap.values, 0.0, atol=1e-12)


def test_laplacian_linear_field_interior_zero():
    g = Grid2D(9, 9)
    X, _ = g.meshgrid()
    lap = laplacian(ScalarField(g, X), BoundaryMode.NEUMANN)
    assert np.allclose(lap.values[1:-1, 1:-1], 0.0, atol=1e-9)


def test_laplacian_delta_stencil_dirichlet():
    g = Grid2D(5, 5)
    vals = np.zeros(g.shape)
    vals[2, 2] = 1.0
    lap = laplacian(ScalarField(g, vals), BoundaryMode.DIRICHLET0)
    assert lap.values[2, 2] == pytest.approx(-2.0 * (1.0 / g.hx**2 + 1.0 / g.hy**2))
    for iy, ix in [(1, 2), (3, 2)]:
        assert lap.values[iy, ix] == pytest.approx(1.0 / g.hy**2)
    for iy, ix in [(2, 1), (2, 3)]:
        assert lap.values[iy, ix] == pytest.approx(1.0 / g.hx**2)


@pytest.mark.parametrize("bc", list(BoundaryMode))
def test_laplacian_linearity(bc):
    rng = np.random.default_rng(7)
    g = Grid2D(8, 6)
    u = ScalarField(g, rng.random(g.shape))
    v = ScalarField(g, rng.random(g.shape))
    a, b = 1.7, -0.45
    combo = laplacian(ScalarField(g, a * u.values + b * v.values), bc)
    split = a * laplacian(u, bc).values + b * laplacian(v, bc).values
    assert np.allclose(combo.values, split, atol=1e-10)


def test_neumann_laplacian_integrates_to_zero():
    rng = np.random.default_rng(3)
    for _ in range(5):
        g = Grid2D(13, 9)
        u = ScalarField(g, rng.random(g.shape))
        assert abs(integrate(laplacian(u, BoundaryMode.NEUMANN))) < 1e-10


def test_integrate_constants():
    g = Grid2D(17, 23)
    assert integrate(ScalarField.constant(g, 1.0)) == pytest.approx(1.0, abs=1e-14)
    assert integrate(ScalarField.constant(g, 0.0)) == 0.0


def test_integrate_linear_exact():
    g = Grid2D(101, 101)
    X, _ = g.meshgrid()
    assert integrate(ScalarField(g, X)) == pytest.approx(0.5, abs=1e-12)


def test_integrate_monotone():
    rng = np.random.default_rng(11)
    g = Grid2D(9, 9)
    f = rng.random(g.shape)
    h = f + rng.random(g.shape)  # h >= f pointwise
    assert integrate(ScalarField(g, f)) <= integrate(ScalarField(g, h))
