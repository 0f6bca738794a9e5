"""Discrete moving-plane machinery on uniform Cartesian grids.

A field u sampled on [-L, L]^N is compared with its reflection across the
hyperplane {x1 = lambda}: w_lambda = u - u_lambda on the half-space
{x1 < lambda}. Reflection planes are restricted to multiples of h/2 so
reflected nodes land exactly on nodes and the comparison is free of
interpolation error; the sweep estimates the critical plane lambda0 as the
largest sampled lambda below which the positive part of w_lambda vanishes.

Singular sets are finite point sets on {x1 = 0} (finite sets have zero
2-capacity in dimension >= 3); each point carries an exclusion ball whose
nodes are masked out of every supremum and difference.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_HYPERPLANE_TOL = 1e-12
_COMMENSURATE_TOL = 1e-9


class CartesianField:
    """Scalar field on a uniform grid over [-L, L]^N with masked singular points.

    Axis 0 is the reflection direction x1. `gamma_set` is a list of
    (point, exclusion_radius) pairs; nodes inside any exclusion ball are
    masked and skipped by every comparison. The node set is closed under
    every coordinate sign flip by construction of the uniform symmetric grid.
    """

    def __init__(self, dim, h, extent, values, gamma_set=(), mask=None, check_gamma=True):
        n = int(dim)
        if n not in (2, 3):
            raise DomainError(f"field dimension must be 2 or 3, got {dim}")
        h = float(h)
        extent = float(extent)
        if not (h > 0.0 and extent > 0.0):
            raise DomainError("spacing and extent must be positive")
        steps = 2.0 * extent / h
        if abs(steps - round(steps)) > _COMMENSURATE_TOL:
            raise DomainError(f"extent {extent} is not a whole number of cells of size {h}")
        m = int(round(steps)) + 1
        values = np.asarray(values, dtype=float)
        if values.shape != (m,) * n:
            raise DomainError(f"values shape {values.shape} does not match grid shape {(m,) * n}")
        self.dim = n
        self.h = h
        self.extent = extent
        self.shape = (m,) * n
        self.axis = -extent + h * np.arange(m)
        self.gamma_set = [(np.asarray(p, dtype=float), float(rad)) for p, rad in gamma_set]
        if check_gamma:
            for p, _ in self.gamma_set:
                if p.shape != (n,):
                    raise DomainError(f"singular point {p} has wrong dimension")
                if abs(p[0]) > _HYPERPLANE_TOL:
                    raise DomainError(
                        f"singular point {p} must lie on the hyperplane x1 = 0"
                    )
        if mask is None:
            mask = np.zeros(self.shape, dtype=bool)
            if self.gamma_set:
                grids = np.meshgrid(*([self.axis] * n), indexing="ij")
                for p, rad in self.gamma_set:
                    d2 = sum((g - c) ** 2 for g, c in zip(grids, p))
                    mask |= d2 <= rad * rad
        else:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != self.shape:
                raise DomainError("mask shape does not match grid shape")
        self.mask = mask
        if not np.all(np.isfinite(values[~mask])):
            raise DomainError("field values must be finite outside the exclusion balls")
        self.values = values

    def unmasked_max(self):
        live = self.values[~self.mask]
        return float(np.max(np.abs(live))) if live.size else 0.0

    def flipped(self):
        """The field x1 -> -x1, an exact index reversal."""
        return CartesianField(
            self.dim, self.h, self.extent,
            np.flip(self.values, axis=0),
            gamma_set=[(p * np.array([-1.0] + [1.0] * (self.dim - 1)), rad)
                       for p, rad in self.gamma_set],
            mask=np.flip(self.mask, axis=0),
            check_gamma=False,
        )


def sample_field(profile, centers, dim=3, extent=2.0, num=65, exclusion_radius=None,
                 check_centers=True):
    """Build u(x) = sum over centers c of profile(|x - c|) on a uniform grid.

    profile is a RadialProfile or any callable of r >= 0. Centers must lie on
    {x1 = 0}; check_centers=False skips that requirement so negative tests can
    construct deliberately off-axis fields. Each center gets an exclusion ball
    of radius exclusion_radius (default: one grid cell), inside which nodes
    are masked and the stored value is NaN.
    """
    n = int(dim)
    if n not in (2, 3):
        raise DomainError(f"field dimension must be 2 or 3, got {dim}")
    num = int(num)
    if num < 3:
        raise DomainError("need at least 3 nodes per axis")
    extent = float(extent)
    h = 2.0 * extent / (num - 1)
    excl = h if exclusion_radius is None else float(exclusion_radius)
    centers = [np.asarray(c, dtype=float) for c in centers]
    for c in centers:
        if c.shape != (n,):
            raise DomainError(f"center {c} has wrong dimension")
        if check_centers and abs(c[0]) > _HYPERPLANE_TOL:
            raise DomainError(f"center {c} must lie on the hyperplane x1 = 0")
    axis = -extent + h * np.arange(num)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    values = np.zeros((num,) * n)
    mask = np.zeros((num,) * n, dtype=bool)
    for c in centers:
        d2 = sum((g - ck) ** 2 for g, ck in zip(grids, c))
        mask |= d2 <= excl * excl
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            term = np.asarray(profile(np.sqrt(d2)), dtype=float)
        term[~np.isfinite(term)] = np.nan
        values = values + term
    values[mask] = np.nan
    return CartesianField(
        n, h, extent, values,
        gamma_set=[(c, excl) for c in centers],
        mask=mask,
        check_gamma=False,
    )


def _plane_index_shift(field, lam):
    """lam as an integer count of h/2 half-cells; rejects non-commensurate planes."""
    lam = float(lam)
    halves = 2.0 * lam / field.h
    if abs(halves - round(halves)) > _COMMENSURATE_TOL:
        raise DomainError(
            f"plane lambda={lam} is not a multiple of h/2={field.h / 2}; "
            "reflected nodes would fall off the grid"
        )
    return int(round(halves))


def reflect(field, lam):
    """u_lambda(x) = u(2*lambda - x1, x2, ...) as an exact index permutation.

    Nodes whose reflection leaves the box, and reflections of masked nodes,
    are masked in the result. lambda must be a multiple of h/2.
    """
    m_half = _plane_index_shift(field, lam)
    m = field.shape[0]
    i = np.arange(m)
    j = m_half + (m - 1) - i
    valid = (j >= 0) & (j < m)
    jc = np.clip(j, 0, m - 1)
    values = field.values[jc]
    mask = field.mask[jc] | ~valid.reshape((-1,) + (1,) * (field.dim - 1))
    values = values.copy()
    values[mask] = np.nan
    lam = float(lam)
    gamma = [(np.concatenate([[2.0 * lam - p[0]], p[1:]]), rad) for p, rad in field.gamma_set]
    return CartesianField(field.dim, field.h, field.extent, values,
                          gamma_set=gamma, mask=mask, check_gamma=False)


def w_plus_sup(field, lam, tol=None):
    """sup over {x1 < lambda} of max(u - u_lambda, 0), masked nodes skipped.

    Values within tol of zero count as zero; tol defaults to 1e-12 times the
    largest unmasked field magnitude.
    """
    if tol is None:
        tol = 1e-12 * field.unmasked_max()
    refl = reflect(field, lam)
    sel = field.axis < float(lam)
    if not sel.any():
        return 0.0
    u = field.values[sel]
    ur = refl.values[sel]
    live = ~(field.mask[sel] | refl.mask[sel])
    if not live.any():
        return 0.0
    w = u[live] - ur[live]
    w[w <= tol] = 0.0
    sup = float(np.max(w, initial=0.0))
    return sup


@dataclass
class MovingPlaneReport:
    """Per-plane suprema, the critical-plane estimate, and monotonicity data.

    lambda0_estimate is the largest sampled lambda such that sup w_t^+ stays
    at zero for every sampled t <= lambda; None when even the first plane
    fails. The reverse fields repeat the sweep on the x1-flipped field (the
    sweep run from the opposite side). monotonicity_min is the minimum
    forward x1-difference over nodes with x1 < -h. dim_in_scope is False for
    2-d smoke-test fields, which the symmetry statements do not cover.
    """

    lambdas: np.ndarray
    sup_w_plus: np.ndarray
    lambda0_estimate: float | None
    monotonicity_min: float
    reverse_sup_w_plus: np.ndarray
    reverse_lambda0_estimate: float | None
    tol: float
    dim_in_scope: bool


def default_lambda_grid(field):
    """Planes {-L, -L+0.1, ...} up to -h, snapped to multiples of h/2."""
    half = field.h / 2.0
    raw = np.arange(-field.extent, 0.0, 0.1)
    raw = np.append(raw, -field.h)
    snapped = np.round(raw / half) * half
    snapped = np.unique(snapped[snapped < 0.0])
    return snapped


def sweep_lambda0(field, lambda_grid=None, tol=None, threads=1):
    """Sweep the reflection plane and estimate the critical lambda0.

    Runs the sweep in both directions (the reverse direction acts on the
    x1-flipped field) and reports both estimates. Requires a strictly
    increasing grid of negative, h/2-commensurate planes.
    """
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(field)
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    if lambda_grid.size == 0:
        raise DomainError("no admissible reflection planes in the grid")
    if not np.all(np.diff(lambda_grid) > 0.0) or not np.all(lambda_grid < 0.0):
        raise DomainError("lambda grid must be strictly increasing and negative")
    for lam in lambda_grid:
        _plane_index_shift(field, lam)
    if tol is None:
        tol = 1e-12 * field.unmasked_max()

    flipped = field.flipped()

    def one(args):
        fld, lam = args
        return w_plus_sup(fld, lam, tol=tol)

    tasks = [(field, lam) for lam in lambda_grid] + [(flipped, lam) for lam in lambda_grid]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            sups = list(pool.map(one, tasks))
    else:
        sups = [one(t) for t in tasks]
    sup_fwd = np.array(sups[: lambda_grid.size])
    sup_rev = np.array(sups[lambda_grid.size:])

    return MovingPlaneReport(
        lambdas=lambda_grid,
        sup_w_plus=sup_fwd,
        lambda0_estimate=_largest_passing(lambda_grid, sup_fwd, tol),
        monotonicity_min=_monotonicity_min(field),
        reverse_sup_w_plus=sup_rev,
        reverse_lambda0_estimate=_largest_passing(lambda_grid, sup_rev, tol),
        tol=float(tol),
        dim_in_scope=field.dim >= 3,
    )


def _largest_passing(lambdas, sups, tol):
    best = None
    for lam, sup in zip(lambdas, sups):
        if sup <= tol:
            best = float(lam)
        else:
            break
    return best


def _monotonicity_min(field):
    """Minimum forward x1-difference over unmasked node pairs with x1 < -h."""
    sel = field.axis < -field.h
    idx = np.nonzero(sel)[0]
    idx = idx[idx + 1 < field.shape[0]]
    if idx.size == 0:
        return math.inf
    d = field.values[idx + 1] - field.values[idx]
    live = ~(field.mask[idx + 1] | field.mask[idx])
    if not live.any():
        return math.inf
    return float(np.min(d[live]))
