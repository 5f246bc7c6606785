import numpy as np
import pytest

from rydpump.lattice import (LatticeSpec, blockade_radius, build_positions,
                             calibrate_cp, pair_distance, pair_shift,
                             pair_shift_table)

XI1 = 3.0 ** (1.0 / 6.0)


def plane_positions(n, a0, xi):
    """Independent oracle: place sites by explicit trigonometry."""
    theta = np.arccos(xi / 2.0)
    a1 = xi * a0
    pos = []
    for i in range(n):
        k, odd = divmod(i, 2)
        if odd:
            pos.append((k * a1 + a0 * np.cos(theta), a0 * np.sin(theta)))
        else:
            pos.append((k * a1, 0.0))
    return np.asarray(pos)


def test_nearest_distance_is_a0():
    spec = LatticeSpec(n_sites=2, a0=1.0, xi=XI1)
    assert pair_distance(spec, 0, 1) == pytest.approx(1.0, rel=1e-12)


def test_next_nearest_distance_matches_figure_value():
    spec = LatticeSpec(n_sites=3, a0=1.0, xi=XI1)
    assert pair_distance(spec, 0, 2) == pytest.approx(XI1, rel=1e-12)
    assert pair_distance(spec, 0, 2) == pytest.approx(1.2009, abs=1e-4)


def test_third_neighbour_geometry_and_shift_ratio():
    spec = LatticeSpec(n_sites=4, a0=1.0, xi=XI1)
    expected = np.sqrt(1.0 + 2.0 * XI1**2)
    assert pair_distance(spec, 0, 3) == pytest.approx(expected, rel=1e-12)
    cal = calibrate_cp(spec, w_d=1.0)
    ratio = pair_shift(cal, 0, 3) / pair_shift(cal, 0, 1)
    assert ratio == pytest.approx((1.0 + 2.0 * XI1**2) ** -3, rel=1e-12)
    assert ratio == pytest.approx(1.7e-2, abs=2e-3)


@pytest.mark.parametrize("n", [2, 5, 16, 64])
@pytest.mark.parametrize("xi", [0.36, 0.9, 1.1996, XI1, 1.7])
def test_distance_invariants(n, xi):
    spec = LatticeSpec(n_sites=n, a0=0.7, xi=xi)
    pos = build_positions(spec)
    assert np.allclose(pos, plane_positions(n, 0.7, xi), atol=1e-12)
    for i in range(n - 1):
        d = np.linalg.norm(pos[i] - pos[i + 1])
        assert d == pytest.approx(0.7, rel=1e-12)
    for i in range(n - 2):
        d = np.linalg.norm(pos[i] - pos[i + 2])
        assert d == pytest.approx(0.7 * xi, rel=1e-12)


def test_pair_shift_symmetric_and_decreasing():
    spec = calibrate_cp(LatticeSpec(n_sites=8, a0=0.3, xi=XI1), w_d=2.0)
    table = pair_shift_table(spec).shifts
    assert np.allclose(table, table.T)
    assert np.all(np.diag(table) == 0.0)
    # strictly decreasing in |i-j| for xi > 1
    for i in range(8):
        dists = sorted(set(abs(i - j) for j in range(8) if j != i))
        vals = [max(table[i, j] for j in range(8) if abs(i - j) == d) for d in dists]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[0] == max(table[i])


def test_next_nearest_shift_is_one_third_at_resonant_ratio():
    spec = calibrate_cp(LatticeSpec(n_sites=4, a0=0.26, xi=XI1), w_d=1.0)
    ratio = pair_shift(spec, 0, 2) / pair_shift(spec, 0, 1)
    assert ratio == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_shift_power_law_magnitude():
    spec = calibrate_cp(LatticeSpec(n_sites=2, a0=0.26, xi=XI1), w_d=1.0)
    assert pair_shift(spec, 0, 1) == pytest.approx((1.0 / 0.26) ** 6, rel=1e-12)
    assert pair_shift(spec, 0, 1) == pytest.approx(3.24e3, rel=2e-2)


def test_blockade_radius_cases():
    assert blockade_radius(1.0, 1.0, 6) == pytest.approx(1.0)
    assert blockade_radius(64.0, 1.0, 6) == pytest.approx(2.0, rel=1e-12)
    # 56 THz um^6 over sqrt(2)*10 GHz in matching units -> about 4 um
    d_b = blockade_radius(56e12, np.sqrt(2.0) * 10e9, 6)
    assert d_b == pytest.approx(4.0, abs=0.05)


def test_calibrated_spec_has_unit_blockade_radius():
    spec = calibrate_cp(LatticeSpec(n_sites=2, a0=0.5, xi=1.2), w_d=3.7)
    assert blockade_radius(spec.cp, 3.7, spec.p) == pytest.approx(1.0, rel=1e-12)


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        LatticeSpec(n_sites=1, a0=1.0, xi=1.2)
    with pytest.raises(ValueError):
        LatticeSpec(n_sites=4, a0=1.0, xi=2.0)
    with pytest.raises(ValueError):
        LatticeSpec(n_sites=4, a0=1.0, xi=2.5)
    with pytest.raises(ValueError):
        LatticeSpec(n_sites=4, a0=-1.0, xi=1.2)
    with pytest.raises(ValueError):
        blockade_radius(-1.0, 1.0, 6)


def test_pair_shift_errors():
    spec = calibrate_cp(LatticeSpec(n_sites=4, a0=1.0, xi=1.2), w_d=1.0)
    with pytest.raises(ValueError):
        pair_shift(spec, 2, 2)
    with pytest.raises(IndexError):
        pair_shift(spec, 0, 4)
    bare = LatticeSpec(n_sites=4, a0=1.0, xi=1.2)
    with pytest.raises(ValueError):
        pair_shift(bare, 0, 1)
