import math

import numpy as np
import pytest

from topofield import (
    BinaryMask,
    Grid2D,
    SharpReference,
    UnsupportedCardinalityError,
    connected_perimeter_reference,
    mst_length,
    perimeter_of_mask,
    sharp_reference,
    steiner_length,
)


def disk_mask(g, cx, cy, r):
    X, Y = g.meshgrid()
    return BinaryMask(g, np.hypot(X - cx, Y - cy) <= r)


# ---------------------------------------------------------------- perimeter


def test_perimeter_empty_mask():
    g = Grid2D(20, 20)
    assert perimeter_of_mask(BinaryMask(g, np.zeros(g.shape, dtype=bool))) == 0.0


def test_perimeter_full_mask_near_four():
    g = Grid2D(200, 200)
    p = perimeter_of_mask(BinaryMask(g, np.ones(g.shape, dtype=bool)))
    assert abs(p - 4.0) <= 4.0 * 2.0 * max(g.hx, g.hy)


def test_perimeter_disk_within_three_percent():
    g = Grid2D(152, 152)
    r = 0.2
    p = perimeter_of_mask(disk_mask(g, 0.5, 0.5, r))
    assert abs(p - 2.0 * math.pi * r) / (2.0 * math.pi * r) < 0.03


def test_perimeter_translation_invariance():
    g = Grid2D(64, 64)
    bits = np.zeros(g.shape, dtype=bool)
    bits[10:30, 12:40] = True
    p1 = perimeter_of_mask(BinaryMask(g, bits))
    p2 = perimeter_of_mask(BinaryMask(g, np.roll(np.roll(bits, 7, axis=0), 5, axis=1)))
    assert abs(p1 - p2) < 1e-12


def test_perimeter_rectangle_value():
    g = Grid2D(101, 101)
    bits = np.zeros(g.shape, dtype=bool)
    bits[20:61, 30:71] = True  # 40 x 40 cells of side 0.01
    p = perimeter_of_mask(BinaryMask(g, bits))
    # marching squares cuts the corners of a blocky mask by a bounded amount
    assert p == pytest.approx(4 * 0.40, abs=4 * math.hypot(g.hx, g.hy))


# ------------------------------------------------------------------ steiner


def test_steiner_degenerate_cases():
    assert steiner_length([(0.3, 0.4)]).length == 0.0
    assert steiner_length([]).length == 0.0


def test_steiner_two_points():
    res = steiner_length([(0.0, 0.0), (3.0, 4.0)])
    assert res.length == pytest.approx(5.0, abs=1e-15)
    assert len(res.edges) == 1


def test_steiner_equilateral_triangle():
    pts = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0)]
    assert steiner_length(pts).length == pytest.approx(math.sqrt(3.0), abs=1e-9)


def test_steiner_wide_angle_triangle():
    # angle at the origin is 180 degrees: tree is the two incident edges
    pts = [(0.0, 0.0), (-1.0, 0.0), (2.0, 0.0)]
    assert steiner_length(pts).length == pytest.approx(3.0, abs=1e-12)


def test_steiner_unit_square():
    pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    assert steiner_length(pts).length == pytest.approx(1.0 + math.sqrt(3.0), abs=1e-6)


def test_steiner_five_points_rejected_unless_fallback():
    pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)]
    with pytest.raises(UnsupportedCardinalityError):
        steiner_length(pts)
    res = steiner_length(pts, allow_mst_fallback=True)
    assert res.upper_bound
    assert res.length == pytest.approx(4.0)


@pytest.mark.parametrize("n", [3, 4])
def test_steiner_ratio_bounds_random(n):
    rng = np.random.default_rng(17)
    for _ in range(300):
        pts = rng.random((n, 2))
        st = steiner_length(pts).length
        mst = mst_length(pts)
        assert st <= mst + 1e-9
        assert st >= mst * math.sqrt(3.0) / 2.0 - 1e-9


def test_four_point_steiner_beats_mst_on_square():
    pts = np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    assert steiner_length(pts).length < mst_length(pts) - 0.2


# --------------------------------------------------------- mask references


def test_connected_mask_reference_is_perimeter():
    g = Grid2D(100, 100)
    m = disk_mask(g, 0.5, 0.5, 0.25)
    ref = sharp_reference(m)
    assert ref.component_count == 1
    assert ref.steiner == 0.0
    assert ref.value == perimeter_of_mask(m)


def test_two_disk_reference_value():
    # disks of radius 0.1 centered 0.4 apart: perimeter 0.4*pi, gap 0.2
    g = Grid2D(304, 304)
    X, Y = g.meshgrid()
    bits = (np.hypot(X - 0.3, Y - 0.5) <= 0.1) | (np.hypot(X - 0.7, Y - 0.5) <= 0.1)
    ref = sharp_reference(BinaryMask(g, bits))
    exact = 0.4 * math.pi + 2.0 * 0.2
    assert ref.component_count == 2
    assert abs(ref.value - exact) / exact < 0.03
    assert connected_perimeter_reference(BinaryMask(g, bits)) == ref.value


def test_three_blob_reference_upper_bound_flagged():
    g = Grid2D(120, 120)
    X, Y = g.meshgrid()
    bits = (
        (np.hypot(X - 0.2, Y - 0.2) <= 0.08)
        | (np.hypot(X - 0.8, Y - 0.2) <= 0.08)
        | (np.hypot(X - 0.5, Y - 0.8) <= 0.08)
    )
    ref = sharp_reference(BinaryMask(g, bits))
    assert ref.component_count == 3
    assert ref.upper_bound
    # the connector cannot be shorter than the Steiner tree of the centers
    # minus the three radii, nor longer than the spanning tree of the sets
    centers = [(0.2, 0.2), (0.8, 0.2), (0.5, 0.8)]
    lower = steiner_length(centers).length - 3 * 0.08
    assert lower - 1e-9 <= ref.steiner


def test_annulus_simply_connected_reference():
    g = Grid2D(240, 240)
    X, Y = g.meshgrid()
    r = np.hypot(X - 0.5, Y - 0.5)
    m = BinaryMask(g, (r >= 0.15) & (r <= 0.35))
    ref = sharp_reference(m, simply_connected=True)
    assert ref.component_count == 1
    assert ref.steiner == 0.0
    exact_perim = 2.0 * math.pi * (0.15 + 0.35)
    assert abs(ref.perimeter - exact_perim) / exact_perim < 0.03
    # hole to exterior: shortest connector crosses the ring, width 0.2
    assert ref.steiner_complement == pytest.approx(0.2, abs=0.02)
    assert ref.value_simply_connected == pytest.approx(
        ref.value + 2.0 * ref.steiner_complement
    )


def test_solid_disk_simply_connected_no_extra_term():
    g = Grid2D(120, 120)
    ref = sharp_reference(disk_mask(g, 0.5, 0.5, 0.3), simply_connected=True)
    assert ref.steiner_complement == 0.0
    assert ref.value_simply_connected == ref.value


def test_five_component_mask_rejected():
    g = Grid2D(60, 60)
    bits = np.zeros(g.shape, dtype=bool)
    for k in range(5):
        bits[5 + 10 * k : 8 + 10 * k, 5:8] = True
    with pytest.raises(UnsupportedCardinalityError):
        sharp_reference(BinaryMask(g, bits))


def test_sharp_reference_dataclass_fields():
    g = Grid2D(80, 80)
    ref = sharp_reference(disk_mask(g, 0.5, 0.5, 0.2))
    assert isinstance(ref, SharpReference)
    assert ref.value == pytest.approx(ref.perimeter + 2.0 * ref.steiner)
