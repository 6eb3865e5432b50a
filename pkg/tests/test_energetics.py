import math

import numpy as np
import pytest

from topofield import (
    C0,
    BoundaryMode,
    FidelityData,
    Grid2D,
    MMParams,
    ScalarField,
    clamp01,
    double_well,
    double_well_prime,
    fidelity_energy,
    fidelity_gradient,
    g_primitive,
    mm_energy,
    mm_energy_matched,
    mm_gradient,
)
from topofield.energetics import matched_weights
from topofield.grid import DimensionMismatchError


def test_double_well_values():
    assert double_well(0.0) == 0.0
    assert double_well(1.0) == 0.0
    assert double_well(0.5) == pytest.approx(1.0 / 16.0)
    assert double_well_prime(0.5) == 0.0
    assert double_well_prime(0.25) == pytest.approx(0.1875)


def test_c0_matches_quadrature():
    # independent oracle: trapezoid quadrature of sqrt(2 W) at 1e6 panels
    s = np.linspace(0.0, 1.0, 1_000_001)
    quad = np.trapezoid(np.sqrt(2.0 * double_well(s)), s)
    assert abs(C0 - quad) < 1e-10
    assert C0 == pytest.approx(math.sqrt(2.0) / 6.0)


def test_g_primitive_values():
    assert g_primitive(0.0) == 0.0
    assert g_primitive(1.0) == pytest.approx(C0, abs=1e-12)
    assert g_primitive(0.5) == pytest.approx(math.sqrt(2.0) / 12.0)
    z = np.linspace(0.0, 1.0, 500)
    assert np.all(np.diff(g_primitive(z)) > 0.0)
    with pytest.raises(ValueError):
        g_primitive(1.2)


def test_mm_energy_constants():
    g = Grid2D(21, 21)
    p = MMParams(epsilon=5e-3, bc=BoundaryMode.NEUMANN)
    assert mm_energy(ScalarField.constant(g, 0.0), p) == 0.0
    expected = 6.0 / (math.sqrt(2.0) * 16.0 * p.epsilon)
    assert mm_energy(ScalarField.constant(g, 0.5), p) == pytest.approx(expected)


def optimal_profile(t):
    # solves q' = sqrt(2 W(q)): logistic transition between the wells
    return 1.0 / (1.0 + np.exp(-math.sqrt(2.0) * t))


def test_mm_energy_of_optimal_interface_profile():
    eps = 5e-3
    g = Grid2D(512, 8)
    X, _ = g.meshgrid()
    u = ScalarField(g, optimal_profile((X - 0.5) / eps))
    p = MMParams(epsilon=eps, bc=BoundaryMode.NEUMANN)
    energy = mm_energy(u, p)
    assert 0.95 <= energy <= 1.05
    # cross-check against 1-D quadrature of the profile energy density
    x = np.linspace(0.0, 1.0, 20001)
    q = optimal_profile((x - 0.5) / eps)
    dens = 0.5 * eps * np.gradient(q, x) ** 2 + double_well(q) / eps
    oneD = np.trapezoid(dens, x) / C0
    assert energy == pytest.approx(oneD, rel=0.02)


@pytest.mark.parametrize("bc", list(BoundaryMode))
def test_mm_gradient_matches_finite_differences(bc):
    rng = np.random.default_rng(42)
    g = Grid2D(16, 16)
    p = MMParams(epsilon=0.05, bc=bc)
    w = matched_weights(g, bc)
    h = 1e-6
    for _ in range(20):
        u = rng.random(g.shape)
        v = rng.standard_normal(g.shape)
        grad = mm_gradient(ScalarField(g, u), p).values
        analytic = np.sum(w * grad * v)
        e_plus = mm_energy_matched(ScalarField(g, u + h * v), p)
        e_minus = mm_energy_matched(ScalarField(g, u - h * v), p)
        numeric = (e_plus - e_minus) / (2.0 * h)
        assert abs(analytic - numeric) / max(abs(numeric), 1e-12) < 1e-5


@pytest.mark.parametrize("bc", list(BoundaryMode))
def test_clamping_decreases_energy(bc):
    rng = np.random.default_rng(9)
    g = Grid2D(12, 12)
    p = MMParams(epsilon=0.02, bc=bc)
    for _ in range(10):
        u = ScalarField(g, rng.uniform(-0.5, 1.5, g.shape))
        assert mm_energy(clamp01(u), p) <= mm_energy(u, p) + 1e-12
        assert mm_energy_matched(clamp01(u), p) <= mm_energy_matched(u, p) + 1e-12


def test_mm_energy_nonnegative_and_zero_only_at_wells():
    g = Grid2D(10, 10)
    p = MMParams(epsilon=0.01, bc=BoundaryMode.NEUMANN)
    assert mm_energy(ScalarField.constant(g, 0.0), p) == 0.0
    assert mm_energy(ScalarField.constant(g, 1.0), p) == 0.0
    rng = np.random.default_rng(1)
    for _ in range(10):
        u = ScalarField(g, rng.random(g.shape))
        if not (np.all(u.values == 0.0) or np.all(u.values == 1.0)):
            assert mm_energy(u, p) > 0.0


def test_fidelity_examples():
    g = Grid2D(31, 31)
    target = ScalarField.constant(g, 0.0)
    phi = ScalarField.constant(g, 1.0)
    fid = FidelityData(g=target, phi=phi, delta=140.0)
    u = ScalarField.constant(g, 1.0)
    assert fidelity_energy(u, fid) == pytest.approx(70.0)
    assert fidelity_energy(target, fid) == 0.0
    assert np.all(fidelity_gradient(target, fid).values == 0.0)
    zero_phi = FidelityData(g=target, phi=ScalarField.constant(g, 0.0), delta=140.0)
    assert fidelity_energy(u, zero_phi) == 0.0


def test_fidelity_grid_mismatch():
    fid = FidelityData(
        g=ScalarField.constant(Grid2D(5, 5), 0.0),
        phi=ScalarField.constant(Grid2D(5, 5), 1.0),
        delta=1.0,
    )
    with pytest.raises(DimensionMismatchError):
        fidelity_energy(ScalarField.constant(Grid2D(6, 6), 0.0), fid)
