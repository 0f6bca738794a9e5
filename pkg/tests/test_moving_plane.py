"""Discrete moving-plane machinery: fields, reflections, sweeps."""

import math
from collections import defaultdict

import numpy as np
import pytest

from hartree_singular import (
    CartesianField,
    DomainError,
    PowerLawTerm,
    default_lambda_grid,
    reflect,
    sample_field,
    sweep_lambda0,
    w_plus_sup,
)

DECAY = PowerLawTerm(1.0, 0.5)
ORIGIN = (0.0, 0.0, 0.0)


def small_field(num=17, centers=(ORIGIN,), **kw):
    return sample_field(DECAY, centers, dim=3, extent=2.0, num=num, **kw)


# ---------------------------------------------------------------------------
# Field construction


def test_sample_field_shape_and_axis():
    f = small_field()
    assert f.shape == (17, 17, 17)
    assert f.h == pytest.approx(0.25)
    assert f.axis[0] == -2.0 and f.axis[-1] == 2.0
    assert f.dim == 3


def test_equal_shells_get_bitwise_equal_values():
    # grid nodes are dyadic, so |x|^2 is computed exactly; all nodes on the
    # same integer shell must carry the identical double
    f = small_field()
    shells = defaultdict(set)
    scale = f.h * f.h
    for idx in np.ndindex(f.shape):
        if f.mask[idx]:
            continue
        x = np.array([f.axis[i] for i in idx])
        key = int(round(float(x @ x) / scale))
        shells[key].add(float(f.values[idx]))
    assert len(shells) > 50
    assert all(len(vals) == 1 for vals in shells.values())


def test_two_center_field_is_even_in_every_axis():
    f = sample_field(DECAY, [(0.0, 0.5, 0.0), (0.0, -0.5, 0.0)], num=17)
    for ax in range(3):
        assert np.array_equal(f.values, np.flip(f.values, axis=ax), equal_nan=True)
        assert np.array_equal(f.mask, np.flip(f.mask, axis=ax))


def test_masking_marks_exclusion_balls():
    f = small_field()
    # default exclusion radius is one cell: the center plus 6 face neighbors
    assert int(f.mask.sum()) == 7
    assert np.all(np.isnan(f.values[f.mask]))
    assert np.all(np.isfinite(f.values[~f.mask]))
    wider = small_field(exclusion_radius=0.4)  # reaches the 12 edge diagonals
    assert int(wider.mask.sum()) == 19


def test_empty_center_list_gives_zero_field():
    f = sample_field(DECAY, [], num=9)
    assert not f.mask.any()
    assert np.all(f.values == 0.0)
    assert f.unmasked_max() == 0.0


def test_center_validation():
    with pytest.raises(DomainError):
        sample_field(DECAY, [(0.5, 0.0, 0.0)], num=9)
    # the same center is accepted when the hyperplane check is waived
    f = sample_field(DECAY, [(0.5, 0.0, 0.0)], num=9, check_centers=False)
    assert f.mask.any()
    with pytest.raises(DomainError):
        sample_field(DECAY, [(0.0, 0.0)], dim=3, num=9)  # wrong length
    with pytest.raises(DomainError):
        sample_field(DECAY, [ORIGIN], num=2)
    with pytest.raises(DomainError):
        sample_field(DECAY, [ORIGIN], dim=4, num=9)


def test_cartesian_field_validation():
    with pytest.raises(DomainError):
        CartesianField(3, 0.25, 2.0, np.zeros((5, 5, 5)))  # wrong shape
    with pytest.raises(DomainError):
        CartesianField(3, 0.3, 1.0, np.zeros((8, 8, 8)))  # non-commensurate
    bad = np.zeros((9, 9, 9))
    bad[0, 0, 0] = math.nan
    with pytest.raises(DomainError):
        CartesianField(3, 0.5, 2.0, bad)  # NaN outside any mask
    with pytest.raises(DomainError):
        CartesianField(3, 0.5, 2.0, np.zeros((9, 9, 9)),
                       gamma_set=[((0.5, 0.0, 0.0), 0.5)])  # point off x1 = 0
    with pytest.raises(DomainError):
        CartesianField(3, 0.5, 2.0, np.zeros((9, 9, 9)),
                       mask=np.zeros((5, 5, 5), dtype=bool))


def test_flipped_is_exact_and_transports_gamma():
    f = sample_field(DECAY, [(0.0, 0.5, 0.0)], num=17)
    g = f.flipped()
    # flipping in x1 is a symmetry of this field
    assert np.array_equal(f.values, g.values, equal_nan=True)
    shifted = sample_field(DECAY, [(0.5, 0.0, 0.0)], num=17, check_centers=False)
    h = shifted.flipped()
    assert h.gamma_set[0][0][0] == -0.5
    assert np.array_equal(h.values, np.flip(shifted.values, axis=0), equal_nan=True)


# ---------------------------------------------------------------------------
# Reflection


def test_reflect_about_zero_is_parity():
    f = small_field()
    r = reflect(f, 0.0)
    assert np.array_equal(r.values, f.values, equal_nan=True)


def test_reflect_is_an_involution_where_defined():
    f = small_field()
    r2 = reflect(reflect(f, -0.5), -0.5)
    live = ~r2.mask
    assert live.any()
    assert np.array_equal(r2.values[live], f.values[live])
    # nodes reflected out of the box are masked
    assert r2.mask.sum() >= f.mask.sum()


def test_reflect_transports_gamma_and_mask():
    f = small_field()
    r = reflect(f, -0.5)
    point, rad = r.gamma_set[0]
    assert point[0] == pytest.approx(-1.0)
    assert rad == f.gamma_set[0][1]
    i = int(round((-1.0 + 2.0) / f.h))
    c = 8  # index of 0.0
    assert r.mask[i, c, c]


def test_reflect_commensurability_required():
    f = small_field()
    with pytest.raises(DomainError):
        reflect(f, -0.07)
    with pytest.raises(DomainError):
        reflect(f, -0.1)  # not a multiple of h/2 = 0.125
    reflect(f, -0.125)  # half-cell planes are fine


# ---------------------------------------------------------------------------
# w_plus_sup


def test_w_plus_vanishes_exactly_for_even_decreasing_field():
    f = small_field()
    for lam in default_lambda_grid(f):
        assert w_plus_sup(f, lam) == 0.0, lam


def test_w_plus_zero_for_constant_field():
    f = sample_field(lambda r: np.ones_like(np.asarray(r, dtype=float)),
                     [ORIGIN], num=9)
    assert w_plus_sup(f, -0.5) == 0.0


def test_w_plus_matches_brute_force_on_shifted_field():
    f = sample_field(DECAY, [(-0.5, 0.0, 0.0)], num=17, check_centers=False)
    m = f.shape[0]
    for lam in (-1.0, -0.75, -0.5, -0.25):
        m_half = int(round(2.0 * lam / f.h))
        best = 0.0
        for i in range(m):
            j = m_half + (m - 1) - i
            if not 0 <= j < m:
                continue
            if not f.axis[i] < lam:
                continue
            for a in range(m):
                for b in range(m):
                    if f.mask[i, a, b] or f.mask[j, a, b]:
                        continue
                    w = f.values[i, a, b] - f.values[j, a, b]
                    if w > best:
                        best = w
        assert w_plus_sup(f, lam, tol=0.0) == best, lam


def test_w_plus_detects_asymmetry_past_the_balance_plane():
    f = sample_field(DECAY, [(-0.5, 0.0, 0.0)], num=17, check_centers=False)
    assert w_plus_sup(f, -0.5) == 0.0  # plane through the center balances
    assert w_plus_sup(f, -0.75) == 0.0  # left of the center still balances
    assert w_plus_sup(f, -0.25) > 0.0  # right of the center does not


def test_w_plus_tolerance_snaps_noise():
    # a field constant in x1 up to a 1e-15-scale tilt has w positive but far
    # below the default tolerance (1e-12 of the field max): it must snap to
    # exactly zero, while tol=0 sees the raw positive part
    f = small_field()
    x1 = f.axis.reshape(-1, 1, 1)
    tilted = CartesianField(3, f.h, f.extent,
                            np.broadcast_to(1.0 - 1e-15 * x1, f.shape).copy())
    assert w_plus_sup(tilted, -0.5) == 0.0
    assert w_plus_sup(tilted, -0.5, tol=0.0) > 0.0


# ---------------------------------------------------------------------------
# Sweep


def test_default_lambda_grid_properties():
    f = small_field(num=33)
    grid = default_lambda_grid(f)
    assert np.all(grid < 0.0)
    assert np.all(np.diff(grid) > 0.0)
    half = f.h / 2.0
    assert np.max(np.abs(grid / half - np.round(grid / half))) < 1e-9
    assert grid[-1] == pytest.approx(-f.h)
    assert grid[0] >= -f.extent


def test_sweep_centered_field_passes_every_plane():
    f = small_field(num=33)
    report = sweep_lambda0(f)
    assert np.all(report.sup_w_plus == 0.0)
    assert np.all(report.reverse_sup_w_plus == 0.0)
    assert report.lambda0_estimate == pytest.approx(report.lambdas[-1])
    assert report.reverse_lambda0_estimate == pytest.approx(report.lambdas[-1])
    assert report.monotonicity_min > 0.0
    assert report.dim_in_scope is True
    assert report.tol == pytest.approx(1e-12 * f.unmasked_max())


def test_sweep_recovers_shifted_balance_plane():
    delta = 0.5
    f = sample_field(DECAY, [(-delta, 0.0, 0.0)], num=33, check_centers=False)
    report = sweep_lambda0(f)
    assert report.lambda0_estimate == pytest.approx(-delta, abs=2.0 * f.h)
    # past the balance plane the sweep must fail
    past = report.lambdas > -delta + 1e-12
    assert np.all(report.sup_w_plus[past] > report.tol)
    # from the other side every sampled (negative) plane balances
    assert report.reverse_lambda0_estimate == pytest.approx(report.lambdas[-1])


def test_sweep_threads_match_serial():
    f = small_field(num=17)
    serial = sweep_lambda0(f, threads=1)
    threaded = sweep_lambda0(f, threads=4)
    assert np.array_equal(serial.sup_w_plus, threaded.sup_w_plus)
    assert np.array_equal(serial.reverse_sup_w_plus, threaded.reverse_sup_w_plus)
    assert serial.lambda0_estimate == threaded.lambda0_estimate


def test_sweep_two_dimensional_smoke_flagged_out_of_scope():
    f = sample_field(DECAY, [(0.0, 0.0)], dim=2, num=33)
    report = sweep_lambda0(f)
    assert report.dim_in_scope is False
    assert np.all(report.sup_w_plus == 0.0)
    assert report.lambda0_estimate == pytest.approx(-f.h)


def test_sweep_validation_errors():
    f = small_field()
    with pytest.raises(DomainError):
        sweep_lambda0(f, lambda_grid=[])
    with pytest.raises(DomainError):
        sweep_lambda0(f, lambda_grid=[-0.5, -0.75])  # not increasing
    with pytest.raises(DomainError):
        sweep_lambda0(f, lambda_grid=[-0.5, 0.25])  # positive plane
    with pytest.raises(DomainError):
        sweep_lambda0(f, lambda_grid=[-0.07])  # not commensurate


def test_sweep_empty_monotonicity_region_is_inf():
    # a 3-node axis has no pair of nodes with x1 < -h
    f = CartesianField(2, 2.0, 2.0, np.ones((3, 3)))
    report = sweep_lambda0(f)
    assert math.isinf(report.monotonicity_min)
    assert report.lambda0_estimate == pytest.approx(-1.0)
