"""Riesz potentials, Newton potentials, and Laplacians of radial functions.

Profiles are sampled on log-spaced grids and carry analytic power-law tail
descriptors; mass outside the sampled window is integrated in closed form
against the tails. The angular reduction of the convolution kernel
|x-y|^(-mu) against radial data is

    K(r, rho) = int over S^(N-1) of |r e1 - rho w|^(-mu) dsigma(w)

so that int f(|y|) |x-y|^(-mu) dy = int_0^inf f(rho) rho^(N-1) K(r, rho) drho.
K has an integrable singularity across rho = r (a genuine pole of the
spherical average when mu >= N-1), which is absorbed by the exponential
substitution rho = r(1 +- e^(-t)) so the split-point panels stay analytic.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import roots_jacobi, roots_legendre

from .errors import ConvergenceError, DomainError
from .power_law import PowerLawTerm, riesz_power
from .special_fn import riesz_gamma, sphere_area

TAIL_CONTINUITY = 0.05  # tail descriptor must match the boundary sample to 5%

# kernel arguments with min/max ratio below this go through the well-separated
# fast path; above it the near-diagonal reduction takes over
_SEP_RATIO = 0.8


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets shared by every integral in this module."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_panels: int = 2000
    angular_nodes: int = 64

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_panels < 16:
            raise DomainError(f"max_panels must be at least 16, got {self.max_panels}")
        if self.angular_nodes < 4:
            raise DomainError(f"angular_nodes must be at least 4, got {self.angular_nodes}")


DEFAULT_CONFIG = QuadratureConfig()


def log_grid(r_min=1e-3, r_max=1e3, num=400):
    """Log-spaced radii, the default sampling for power-law profiles."""
    if not (0.0 < r_min < r_max) or num < 2:
        raise DomainError(f"need 0 < r_min < r_max and num >= 2, got {r_min}, {r_max}, {num}")
    return np.geomspace(r_min, r_max, int(num))


class RadialProfile:
    """A radial function sampled on a strictly increasing positive grid.

    tail_inner / tail_outer are PowerLawTerm descriptors valid below radii[0]
    and above radii[-1]; each must agree with its boundary sample within 5%
    relative. Off-grid queries inside the window use monotone cubic (PCHIP)
    interpolation in log-log coordinates, falling back to log-linear abscissae
    with raw values when the data is not strictly positive. Queries beyond the
    window require the corresponding tail.
    """

    def __init__(self, radii, values, tail_inner=None, tail_outer=None, point_errors=None):
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.ndim != 1 or radii.shape != values.shape:
            raise DomainError("radii and values must be 1-d arrays of equal length")
        if radii.size < 2:
            raise DomainError("a profile needs at least two samples")
        if not (radii[0] > 0.0 and np.all(np.diff(radii) > 0.0)):
            raise DomainError("radii must be strictly increasing and positive")
        if not np.all(np.isfinite(values)):
            raise DomainError("profile values must be finite")
        if tail_inner is not None:
            _check_tail_continuity(tail_inner, radii[0], values[0], "inner")
        if tail_outer is not None:
            _check_tail_continuity(tail_outer, radii[-1], values[-1], "outer")
        self.radii = radii
        self.values = values
        self.tail_inner = tail_inner
        self.tail_outer = tail_outer
        self.point_errors = None if point_errors is None else np.asarray(point_errors, dtype=float)
        self._positive = bool(np.all(values > 0.0))
        self._interp = None

    @classmethod
    def from_power(cls, term, radii):
        """Sample coefficient*r^-exponent exactly, tails attached on both sides."""
        radii = np.asarray(radii, dtype=float)
        return cls(radii, term(radii), tail_inner=term, tail_outer=term)

    def _interpolator(self):
        if self._interp is None:
            x = np.log(self.radii)
            if self._positive:
                base = PchipInterpolator(x, np.log(self.values), extrapolate=False)
                self._interp = lambda lr: np.exp(base(lr))
            else:
                self._interp = PchipInterpolator(x, self.values, extrapolate=False)
        return self._interp

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = np.empty_like(r)
        below = r < self.radii[0]
        above = r > self.radii[-1]
        inside = ~(below | above)
        if below.any():
            if self.tail_inner is None:
                raise DomainError(
                    f"query at r={r[below].min()} below the sampled window and no inner tail"
                )
            out[below] = self.tail_inner(r[below])
        if above.any():
            if self.tail_outer is None:
                raise DomainError(
                    f"query at r={r[above].max()} above the sampled window and no outer tail"
                )
            out[above] = self.tail_outer(r[above])
        if inside.any():
            out[inside] = self._interpolator()(np.log(r[inside]))
        return float(out[0]) if scalar else out

    def power(self, e):
        """Pointwise power, tails transformed exactly: (c r^-a)^e = c^e r^-(a e)."""
        e = float(e)
        if e != int(e) and not self._positive:
            raise DomainError("fractional power of a profile with non-positive values")
        return RadialProfile(
            self.radii, self.values ** e,
            None if self.tail_inner is None else self.tail_inner.powered(e),
            None if self.tail_outer is None else self.tail_outer.powered(e),
        )

    def scale(self, c):
        c = float(c)
        return RadialProfile(
            self.radii, self.values * c,
            None if self.tail_inner is None else self.tail_inner.scaled(c),
            None if self.tail_outer is None else self.tail_outer.scaled(c),
        )

    def multiply(self, other):
        """Pointwise product; profiles must share the same grid."""
        if not np.array_equal(self.radii, other.radii):
            raise DomainError("profiles must share the same grid to multiply")
        ti = _combine(self.tail_inner, other.tail_inner, lambda a, b: a.times(b))
        to = _combine(self.tail_outer, other.tail_outer, lambda a, b: a.times(b))
        return RadialProfile(self.radii, self.values * other.values, ti, to)

    def mix(self, other, w_self, w_other):
        """Weighted sum w_self*self + w_other*other on a shared grid.

        Tails of equal exponent combine linearly; otherwise the slower-decaying
        (dominant) exponent is kept with its coefficient refitted to the mixed
        boundary sample, so the descriptor stays continuous.
        """
        if not np.array_equal(self.radii, other.radii):
            raise DomainError("profiles must share the same grid to mix")
        values = w_self * self.values + w_other * other.values
        ti = _mix_tails(self.tail_inner, other.tail_inner, w_self, w_other,
                        self.radii[0], values[0], inner=True)
        to = _mix_tails(self.tail_outer, other.tail_outer, w_self, w_other,
                        self.radii[-1], values[-1], inner=False)
        return RadialProfile(self.radii, values, ti, to)


def _check_tail_continuity(term, r_edge, v_edge, which):
    tv = term(r_edge)
    scale = max(abs(v_edge), abs(tv), 1e-300)
    if abs(tv - v_edge) > TAIL_CONTINUITY * scale:
        raise DomainError(
            f"{which} tail descriptor discontinuous at r={r_edge}: "
            f"tail gives {tv}, sample is {v_edge}"
        )


def _combine(t1, t2, op):
    if t1 is None or t2 is None:
        return None
    return op(t1, t2)


def _mix_tails(t1, t2, w1, w2, r_edge, v_edge, inner):
    if t1 is None or t2 is None:
        return None
    if abs(t1.exponent - t2.exponent) <= 1e-12 * max(1.0, abs(t1.exponent)):
        return PowerLawTerm(w1 * t1.coefficient + w2 * t2.coefficient, t1.exponent)
    # keep the exponent that dominates in the tail's own limit
    if inner:
        a = max(t1.exponent, t2.exponent)
    else:
        a = min(t1.exponent, t2.exponent)
    return PowerLawTerm(v_edge * r_edge ** a, a)


# ---------------------------------------------------------------------------
# Gauss rule caches

_gl_cache = {}
_jac_cache = {}


def _gauss_legendre(n):
    if n not in _gl_cache:
        x, w = roots_legendre(n)
        _gl_cache[n] = (x, w)
    return _gl_cache[n]


def _jacobi_unit(n, g):
    """Nodes X and weights W with sum W_i h(X_i) ~ int_0^1 x^g h(x) dx."""
    key = (n, round(float(g), 12))
    if key not in _jac_cache:
        x, w = roots_jacobi(n, 0.0, float(g))
        _jac_cache[key] = ((1.0 + x) / 2.0, w * 2.0 ** (-(float(g) + 1.0)))
    return _jac_cache[key]


def _jacobi_sym(n, b):
    """Rule for int_-1^1 (1-u^2)^b q(u) du."""
    key = ("sym", n, round(float(b), 12))
    if key not in _jac_cache:
        _jac_cache[key] = roots_jacobi(n, float(b), float(b))
    return _jac_cache[key]


# ---------------------------------------------------------------------------
# Angular kernel


def angular_kernel(r, rho, dim, mu, nodes=64):
    """Spherical average K(r, rho) of |r e1 - rho w|^(-mu) over w in S^(N-1).

    Symmetric in (r, rho) and homogeneous of degree -mu. For N = 3 closed
    forms are used; general N reduces to a Gauss-Jacobi rule in the polar
    angle with graded panels near the diagonal. On the diagonal the average
    is finite for mu < N-1 (a Beta-function closed form) and diverges for
    mu in [N-1, N), where a signaled infinity is returned; that infinity is
    only ever consumed inside integrals, where the substitution absorbs it.
    """
    n = _int_dim(dim)
    mu = float(mu)
    if not 0.0 < mu < n:
        raise DomainError(f"angular kernel requires 0 < mu < N={n}, got {mu}")
    r = float(r)
    rho = float(rho)
    if r < 0.0 or rho < 0.0:
        raise DomainError("radii must be nonnegative")
    if r == 0.0 and rho == 0.0:
        raise DomainError("kernel undefined with both radii zero")
    if min(r, rho) == 0.0:
        return sphere_area(n) * max(r, rho) ** (-mu)
    if r == rho:
        return _kernel_diagonal(r, n, mu)
    lo, hi = min(r, rho), max(r, rho)
    if lo / hi <= _SEP_RATIO:
        return float(_kernel_sep(hi, np.array([lo]), n, mu, nodes)[0])
    delta = hi - lo
    return float(_kernel_near(hi, np.array([delta]), -1, n, mu, nodes)[0])


def _kernel_diagonal(r, n, mu):
    if mu >= n - 1.0:
        return math.inf
    bfun = math.gamma((n - 1.0 - mu) / 2.0) * math.gamma((n - 1.0) / 2.0) / math.gamma(n - 1.0 - mu / 2.0)
    return sphere_area(n - 1) * r ** (-mu) * 2.0 ** (n - 2.0 - mu) * bfun


def _kernel_sep(r, rho, n, mu, nodes):
    """K(r, rho) for arrays rho with min/max ratio <= _SEP_RATIO."""
    rho = np.asarray(rho, dtype=float)
    if n == 3:
        return _k3(r, rho, np.abs(r - rho), mu)
    b = (n - 3.0) / 2.0
    u, w = _jacobi_sym(nodes, b)
    q = (r * r + rho[:, None] ** 2 - 2.0 * r * rho[:, None] * u[None, :]) ** (-mu / 2.0)
    return sphere_area(n - 1) * (q @ w)


def _kernel_near(r, delta, side, n, mu, nodes):
    """K(r, rho) with rho = r + side*delta, delta passed exactly.

    Near the diagonal rho collapses onto r in floating point, so the kernel
    is computed from the separation delta itself; only the smooth factors use
    the (possibly rounded) rho.
    """
    delta = np.asarray(delta, dtype=float)
    rho = r + side * delta
    if n == 3:
        return _k3(r, rho, delta, mu)
    out = np.empty_like(delta)
    for i in range(delta.size):
        out[i] = _k_general_delta(r, float(delta[i]), float(rho[i]), n, mu, nodes)
    return out


def _k3(r, rho, delta, mu):
    """Closed forms in R^3; delta = |r - rho| supplied exactly."""
    if mu == 2.0:
        return 2.0 * math.pi * np.log((r + rho) / delta) / (r * rho)
    return 2.0 * math.pi * ((r + rho) ** (2.0 - mu) - delta ** (2.0 - mu)) / ((2.0 - mu) * r * rho)


def _k_general_delta(r, delta, rho, n, mu, nodes):
    # With u = cos(theta) and w = 1 - u, the quadratic factors as
    # 2 r rho (eps + w), eps = delta^2/(2 r rho), and
    # K = |S^(N-2)| (2 r rho)^(-mu/2) * int_0^2 w^b (2-w)^b (eps+w)^(-mu/2) dw
    b = (n - 3.0) / 2.0
    eps = delta * delta / (2.0 * r * rho)
    X, W = _jacobi_unit(min(nodes, 48), b)
    # piece [1, 2] via v = 2 - w: integrand v^b (2-v)^b (eps + 2 - v)^(-mu/2)
    j2 = float(W @ ((2.0 - X) ** b * (eps + 2.0 - X) ** (-mu / 2.0)))
    # piece [0, 1]
    if eps >= 1.0:
        j1 = float(W @ ((2.0 - X) ** b * (eps + X) ** (-mu / 2.0)))
    else:
        # [0, eps]: scaled Jacobi rule; the factor (eps + w) varies by at most 2x
        xe = eps * X
        j1 = eps ** (b + 1.0) * float(W @ ((2.0 - xe) ** b * (eps + xe) ** (-mu / 2.0)))
        # dyadic panels [eps 2^k, eps 2^(k+1)] out to 1 absorb the algebraic layer
        xg, wg = _gauss_legendre(24)
        a = eps
        while a < 1.0:
            c = min(2.0 * a, 1.0)
            mid, half = 0.5 * (a + c), 0.5 * (c - a)
            wn = mid + half * xg
            j1 += half * float(wg @ (wn ** b * (2.0 - wn) ** b * (eps + wn) ** (-mu / 2.0)))
            a = c
    return sphere_area(n - 1) * (2.0 * r * rho) ** (-mu / 2.0) * (j1 + j2)


# ---------------------------------------------------------------------------
# Adaptive Gauss quadrature (vectorized global bisection)

_GL_ORDER = 12


def _adaptive_gl(fun, a, b, rel_tol, abs_tol, max_panels, presplit=1, breaks=None):
    """Globally adaptive Gauss-Legendre quadrature of a vectorized integrand.

    Uses paired 12/24-point rules per panel; panels whose rule difference
    exceeds their length-proportional share of the tolerance are bisected.
    breaks, when given, adds explicit initial panel edges (clipped to (a, b));
    aligning them with the sample nodes of an interpolated integrand keeps
    narrow features from slipping between quadrature nodes undetected.
    Returns (value, error_bound, panels_used, converged).
    """
    if not b > a:
        return 0.0, 0.0, 0, True
    x1, w1 = _gauss_legendre(_GL_ORDER)
    x2, w2 = _gauss_legendre(2 * _GL_ORDER)
    edges = np.linspace(a, b, max(1, int(presplit)) + 1)
    if breaks is not None and len(breaks):
        inner = np.asarray(breaks, dtype=float)
        inner = inner[(inner > a) & (inner < b)]
        edges = np.unique(np.concatenate([edges, inner]))
    segs = np.column_stack([edges[:-1], edges[1:]])
    total_len = b - a
    acc_val = 0.0
    acc_err = 0.0
    panels = 0
    while segs.size:
        mid = 0.5 * (segs[:, 0] + segs[:, 1])
        half = 0.5 * (segs[:, 1] - segs[:, 0])
        f1 = fun((mid[:, None] + half[:, None] * x1[None, :]).ravel()).reshape(-1, _GL_ORDER)
        f2 = fun((mid[:, None] + half[:, None] * x2[None, :]).ravel()).reshape(-1, 2 * _GL_ORDER)
        coarse = (f1 @ w1) * half
        fine = (f2 @ w2) * half
        err = np.abs(fine - coarse)
        panels += segs.shape[0]
        scale = abs(acc_val + fine.sum())
        tol = np.maximum(abs_tol, rel_tol * scale) * (2.0 * half / total_len)
        done = err <= tol
        acc_val += fine[done].sum()
        acc_err += err[done].sum()
        rest = segs[~done]
        if rest.size == 0:
            return acc_val, acc_err, panels, True
        if panels >= max_panels:
            return acc_val + fine[~done].sum(), acc_err + err[~done].sum(), panels, False
        mids = 0.5 * (rest[:, 0] + rest[:, 1])
        segs = np.vstack([
            np.column_stack([rest[:, 0], mids]),
            np.column_stack([mids, rest[:, 1]]),
        ])
    return acc_val, acc_err, panels, True


# ---------------------------------------------------------------------------
# Riesz potential of a radial profile


def riesz_radial(f, alpha, dim, cfg=None, at=None):
    """(I_alpha f)(r) = (1/gamma(alpha)) int f(rho) rho^(N-1) K(r, rho; N-alpha) drho.

    Parameters
    ----------
    f : RadialProfile
        Input profile. Tails, when attached, are integrated analytically and
        must satisfy inner exponent < N and outer exponent > alpha; a missing
        tail means hard truncation with the truncation estimate folded into
        the per-point error report.
    alpha : float
        Order of the potential, 0 < alpha < N.
    dim : int
        Ambient dimension N >= 3.
    cfg : QuadratureConfig, optional
    at : array_like, optional
        Strictly increasing positive radii to evaluate at (at least two);
        defaults to f.radii.

    Returns
    -------
    RadialProfile with point_errors set to the per-point relative error
    estimate (quadrature plus truncation).
    """
    n = _int_dim(dim)
    cfg = cfg or DEFAULT_CONFIG
    alpha = float(alpha)
    if not 0.0 < alpha < n:
        raise DomainError(f"riesz_radial requires 0 < alpha < N={n}, got {alpha}")
    mu = n - alpha
    if at is None:
        at = f.radii
    else:
        at = np.asarray(at, dtype=float)
        if at.ndim != 1 or at.size < 2 or not (at[0] > 0.0 and np.all(np.diff(at) > 0.0)):
            raise DomainError("evaluation radii must be >= 2 strictly increasing positive values")
    if f.tail_inner is not None and not f.tail_inner.exponent < n:
        raise DomainError(
            f"inner tail exponent {f.tail_inner.exponent} >= N={n}: integral diverges at the origin"
        )
    if f.tail_outer is not None and not f.tail_outer.exponent > alpha:
        raise DomainError(
            f"outer tail exponent {f.tail_outer.exponent} <= alpha={alpha}: "
            "integral diverges at infinity"
        )
    if f.tail_inner is None and at[0] < f.radii[0]:
        raise DomainError("evaluation below the sampled window requires an inner tail")
    if f.tail_outer is None and at[-1] > f.radii[-1]:
        raise DomainError("evaluation above the sampled window requires an outer tail")

    gam = riesz_gamma(alpha, n)
    values = np.empty(at.size)
    errors = np.empty(at.size)
    worst = (0.0, None)
    failed = False
    for i, r in enumerate(at):
        raw, abs_err, trunc, ok = _potential_at(f, float(r), n, mu, alpha, cfg)
        values[i] = raw / gam
        errors[i] = (abs_err + trunc) / max(abs(raw), 1e-300)
        if not ok:
            failed = True
            if abs_err / max(abs(raw), 1e-300) >= worst[0]:
                worst = (abs_err / max(abs(raw), 1e-300), float(r))
    if failed:
        raise ConvergenceError(
            f"quadrature exceeded {cfg.max_panels} panels (worst radius {worst[1]})",
            worst_radius=worst[1],
        )
    tail_in = _map_tail(f.tail_inner, alpha, n, at[0], values[0], first=True)
    tail_out = _map_tail(f.tail_outer, alpha, n, at[-1], values[-1], first=False)
    ti = _fit_or(tail_in, at[:2], values[:2])
    to = _fit_or(tail_out, at[-2:], values[-2:])
    return RadialProfile(at, values, ti, to, point_errors=errors)


def _map_tail(term, alpha, n, r_edge, v_edge, first):
    """Closed-form image of a tail under I_alpha, when the window allows it."""
    if term is None:
        return None
    a = term.exponent
    if not alpha < a < n:
        return None
    mapped = riesz_power(alpha, a, n).scaled(term.coefficient)
    tv = mapped(r_edge)
    if abs(tv - v_edge) > TAIL_CONTINUITY * max(abs(v_edge), abs(tv), 1e-300):
        return None
    return mapped


def _fit_or(mapped, r2, v2):
    """Use the mapped tail if it survived, else fit a power law through the edge pair."""
    if mapped is not None:
        return mapped
    if v2[0] == 0.0 or v2[1] == 0.0 or v2[0] * v2[1] < 0.0:
        return None
    a = -math.log(abs(v2[1] / v2[0])) / math.log(r2[1] / r2[0])
    if not math.isfinite(a):
        return None
    return PowerLawTerm(v2[-1] * r2[-1] ** a, a)


def _potential_at(f, r, n, mu, alpha, cfg):
    """Raw integral int f rho^(N-1) K dr (no 1/gamma) at one radius."""
    r0, r1 = float(f.radii[0]), float(f.radii[-1])
    nodes = cfg.angular_nodes
    budget = cfg.max_panels
    total = 0.0
    err = 0.0
    trunc = 0.0
    ok = True

    def f_rho_pow(rho):
        return f(rho) * rho ** (n - 1.0)

    # analytic inner piece [0, b_lo]
    if f.tail_inner is not None:
        b_lo = min(r0, 0.5 * r)
        v, e = _tail_inner_piece(f.tail_inner, r, b_lo, n, mu, nodes)
        total += v
        err += e
        lo = b_lo
    else:
        lo = r0
        trunc += _trunc_inner_estimate(f, r, n, mu, nodes)

    # analytic outer piece [b_hi, inf)
    if f.tail_outer is not None:
        b_hi = max(r1, 2.0 * r)
        v, e = _tail_outer_piece(f.tail_outer, r, b_hi, n, mu, alpha, nodes)
        total += v
        err += e
        hi = b_hi
    else:
        hi = r1
        trunc += _trunc_outer_estimate(f, r, n, mu, alpha)

    quarter = max(budget // 4, 4)

    # the interpolant is one cubic between consecutive sample nodes, so panel
    # edges aligned with the nodes guarantee no sampled feature is skipped
    def node_breaks(a_rho, b_rho, transform):
        sel = f.radii[(f.radii > a_rho) & (f.radii < b_rho)]
        return transform(sel) if sel.size else None

    # smooth far region below the diagonal, integrated in x = log(rho)
    if lo < 0.5 * r:
        xa, xb = math.log(lo), math.log(0.5 * r)

        def g_lo(x):
            rho = np.exp(x)
            return f(rho) * rho ** float(n) * _kernel_sep(r, rho, n, mu, nodes)

        v, e, used, good = _adaptive_gl(
            g_lo, xa, xb, cfg.rel_tol, cfg.abs_tol, quarter,
            presplit=max(1, int((xb - xa) / 1.2)),
            breaks=node_breaks(lo, 0.5 * r, np.log),
        )
        total += v
        err += e
        ok = ok and good

    # near-diagonal pieces via rho = r(1 -+ e^(-t)); delta = r e^(-t) is exact
    t_cap = max(40.0, 46.0 / alpha)
    start = max(lo, 0.5 * r)
    if start < r:
        t0 = math.log(r / (r - start))

        def g_left(t):
            d = r * np.exp(-t)
            rho = r - d
            return f_rho_pow(rho) * _kernel_near(r, d, -1, n, mu, nodes) * d

        v, e, used, good = _adaptive_gl(
            g_left, t0, t_cap, cfg.rel_tol, cfg.abs_tol, quarter,
            presplit=max(2, int((t_cap - t0) / 6.0)),
            breaks=node_breaks(start, r, lambda rho: np.log(r / (r - rho))),
        )
        total += v
        err += e
        ok = ok and good

    end = min(hi, 2.0 * r)
    if end > r:
        t0 = math.log(r / (end - r))

        def g_right(t):
            d = r * np.exp(-t)
            rho = r + d
            return f_rho_pow(rho) * _kernel_near(r, d, +1, n, mu, nodes) * d

        v, e, used, good = _adaptive_gl(
            g_right, t0, t_cap, cfg.rel_tol, cfg.abs_tol, quarter,
            presplit=max(2, int((t_cap - t0) / 6.0)),
            breaks=node_breaks(r, end, lambda rho: np.log(r / (rho - r))),
        )
        total += v
        err += e
        ok = ok and good

    # smooth far region above the diagonal
    if hi > 2.0 * r:
        xa, xb = math.log(2.0 * r), math.log(hi)

        def g_hi(x):
            rho = np.exp(x)
            return f(rho) * rho ** float(n) * _kernel_sep(r, rho, n, mu, nodes)

        v, e, used, good = _adaptive_gl(
            g_hi, xa, xb, cfg.rel_tol, cfg.abs_tol, quarter,
            presplit=max(1, int((xb - xa) / 1.2)),
            breaks=node_breaks(2.0 * r, hi, np.log),
        )
        total += v
        err += e
        ok = ok and good

    return total, err, trunc, ok


def _tail_inner_piece(term, r, b, n, mu, nodes):
    """int_0^b c rho^(N-1-a) K(r, rho) drho with the endpoint power in the weight."""
    g = n - 1.0 - term.exponent  # > -1 by the tail precondition
    m = min(nodes, 32)
    v = _jacobi_tail_rule(term, r, b, g, n, mu, m)
    v2 = _jacobi_tail_rule(term, r, b, g, n, mu, max(m // 2, 8))
    return v, abs(v - v2)


def _jacobi_tail_rule(term, r, b, g, n, mu, m):
    X, W = _jacobi_unit(m, g)
    rho = b * X
    kv = _kernel_sep(r, rho, n, mu, m * 2)
    return term.coefficient * b ** (g + 1.0) * float(W @ kv)


def _tail_outer_piece(term, r, b, n, mu, alpha, nodes):
    """int_b^inf via x = b/rho; homogeneity turns K into K(r x / b, 1)."""
    g = term.exponent - alpha - 1.0  # > -1 by the tail precondition
    m = min(nodes, 32)
    v = _outer_rule(term, r, b, g, n, mu, alpha, m)
    v2 = _outer_rule(term, r, b, g, n, mu, alpha, max(m // 2, 8))
    return v, abs(v - v2)


def _outer_rule(term, r, b, g, n, mu, alpha, m):
    X, W = _jacobi_unit(m, g)
    kv = _kernel_sep(1.0, r * X / b, n, mu, m * 2)
    return term.coefficient * b ** (alpha - term.exponent) * float(W @ kv)


def _edge_slope(radii, values, first):
    i, j = (0, 1) if first else (-2, -1)
    if values[i] == 0.0 or values[j] == 0.0 or values[i] * values[j] < 0.0:
        return None
    return -math.log(abs(values[j] / values[i])) / math.log(radii[j] / radii[i])


def _trunc_inner_estimate(f, r, n, mu, nodes):
    """Order-of-magnitude bound for the discarded mass below the grid."""
    if f.values[0] == 0.0:
        return 0.0  # data decays into the edge; nothing measurable is cut
    r0 = float(f.radii[0])
    a_est = _edge_slope(f.radii, f.values, first=True)
    if a_est is None:
        a_est = 0.0
    if a_est >= n:
        return math.inf
    mass = abs(f.values[0]) * r0 ** float(n) / (n - a_est)
    k_ref = float(_kernel_sep(max(r, r0), np.array([0.5 * min(r, r0)]), n, mu, nodes)[0])
    return mass * k_ref


def _trunc_outer_estimate(f, r, n, mu, alpha):
    if f.values[-1] == 0.0:
        return 0.0  # data decays into the edge; nothing measurable is cut
    r1 = float(f.radii[-1])
    a_est = _edge_slope(f.radii, f.values, first=False)
    if a_est is None or a_est <= alpha:
        return math.inf
    return abs(f.values[-1]) * sphere_area(n) * r1 ** (n - mu) / (a_est - alpha)


# ---------------------------------------------------------------------------
# Radial inverse Laplacian (Newton potential, alpha = 2 specialization)


def inverse_laplacian_radial(g, dim, cfg=None):
    """Solve -Lap u = g radially:

        u(r) = (1/(N-2)) [ r^(2-N) int_0^r g rho^(N-1) drho + int_r^inf g rho drho ].

    Requires inner tail exponent < N and outer tail exponent > 2 when tails
    are attached; a missing tail truncates and its estimate is reported in
    point_errors. Returns u on g's grid.
    """
    n = _int_dim(dim)
    cfg = cfg or DEFAULT_CONFIG
    if g.tail_inner is not None and not g.tail_inner.exponent < n:
        raise DomainError(
            f"inner tail exponent {g.tail_inner.exponent} >= N={n}: mass integral diverges"
        )
    if g.tail_outer is not None and not g.tail_outer.exponent > 2.0:
        raise DomainError(
            f"outer tail exponent {g.tail_outer.exponent} <= 2: outer moment diverges"
        )
    radii = g.radii
    x8, w8 = _gauss_legendre(8)
    x4, w4 = _gauss_legendre(4)
    mid = 0.5 * (radii[1:] + radii[:-1])
    half = 0.5 * (radii[1:] - radii[:-1])

    def interval_integrals(xs, ws, power):
        nodes = mid[:, None] + half[:, None] * xs[None, :]
        vals = g(nodes.ravel()).reshape(nodes.shape) * nodes ** power
        return (vals @ ws) * half

    mass8 = interval_integrals(x8, w8, n - 1.0)
    mass4 = interval_integrals(x4, w4, n - 1.0)
    line8 = interval_integrals(x8, w8, 1.0)
    line4 = interval_integrals(x4, w4, 1.0)

    trunc_in = 0.0
    if g.tail_inner is not None:
        c, a = g.tail_inner.coefficient, g.tail_inner.exponent
        inner0 = c * radii[0] ** (n - a) / (n - a)
    else:
        inner0 = 0.0
        a_est = _edge_slope(radii, g.values, first=True)
        if a_est is None:
            a_est = 0.0
        trunc_in = math.inf if a_est >= n else abs(g.values[0]) * radii[0] ** float(n) / (n - a_est)

    trunc_out = 0.0
    if g.tail_outer is not None:
        c, a = g.tail_outer.coefficient, g.tail_outer.exponent
        outer_inf = c * radii[-1] ** (2.0 - a) / (a - 2.0)
    else:
        outer_inf = 0.0
        a_est = _edge_slope(radii, g.values, first=False)
        if g.values[-1] == 0.0:
            trunc_out = 0.0
        elif a_est is None or a_est <= 2.0:
            trunc_out = math.inf
        else:
            trunc_out = abs(g.values[-1]) * radii[-1] ** 2.0 / (a_est - 2.0)

    mass_cum = inner0 + np.concatenate([[0.0], np.cumsum(mass8)])
    outer_cum = outer_inf + np.concatenate([np.cumsum(line8[::-1])[::-1], [0.0]])
    u = (mass_cum * radii ** (2.0 - n) + outer_cum) / (n - 2.0)

    e_mass = np.abs(mass8 - mass4)
    e_line = np.abs(line8 - line4)
    err_abs = (
        np.concatenate([[0.0], np.cumsum(e_mass)]) * radii ** (2.0 - n)
        + np.concatenate([np.cumsum(e_line[::-1])[::-1], [0.0]])
    ) / (n - 2.0)
    errors = (err_abs + trunc_in * radii ** (2.0 - n) / (n - 2.0) + trunc_out / (n - 2.0))
    errors = errors / np.maximum(np.abs(u), 1e-300)

    ti = _map_inverse_tail(g.tail_inner, n, radii[0], u[0])
    to = _map_inverse_tail(g.tail_outer, n, radii[-1], u[-1])
    ti = _fit_or(ti, radii[:2], u[:2])
    to = _fit_or(to, radii[-2:], u[-2:])
    return RadialProfile(radii, u, ti, to, point_errors=errors)


def _map_inverse_tail(term, n, r_edge, v_edge):
    if term is None:
        return None
    a = term.exponent
    if not 2.0 < a < n:
        return None
    mapped = PowerLawTerm(term.coefficient / ((a - 2.0) * (n - a)), a - 2.0)
    tv = mapped(r_edge)
    if abs(tv - v_edge) > TAIL_CONTINUITY * max(abs(v_edge), abs(tv), 1e-300):
        return None
    return mapped


# ---------------------------------------------------------------------------
# Finite-difference Laplacian on the log grid


def laplacian_radial_fd(f, at, dim):
    """-Lap f at a grid radius by centered differences in x = log r.

    -Lap f = -(f_xx + (N-2) f_x)/r^2 on a log-uniform grid. Uses stride-1 and
    stride-2 centered differences with Richardson extrapolation; returns
    (value, error_estimate). The radius must coincide with a grid node (the
    stencil is centered there) and the node needs two neighbors on each side.
    """
    n = _int_dim(dim)
    x = np.log(f.radii)
    if f.radii.size < 5:
        raise DomainError("finite differences need at least 5 samples")
    hs = np.diff(x)
    h = hs.mean()
    if np.max(np.abs(hs - h)) > 1e-9 * h:
        raise DomainError("finite differences require a log-uniform grid")
    at = float(at)
    if not at > 0.0:
        raise DomainError("radius must be positive")
    i = int(np.argmin(np.abs(x - math.log(at))))
    if abs(x[i] - math.log(at)) > 1e-8:
        raise DomainError(
            f"radius {at} does not coincide with a grid node "
            f"(nearest is {f.radii[i]}); the stencil needs a centered node"
        )
    if i < 2 or i > f.radii.size - 3:
        raise DomainError(
            f"radius {at} snaps to index {i}, too close to the grid edge for stride-2 stencils"
        )
    v = f.values
    d1h = (v[i + 1] - v[i - 1]) / (2.0 * h)
    d1hh = (v[i + 2] - v[i - 2]) / (4.0 * h)
    d1 = (4.0 * d1h - d1hh) / 3.0
    e1 = abs(d1h - d1hh) / 3.0
    d2h = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h)
    d2hh = (v[i + 2] - 2.0 * v[i] + v[i - 2]) / (4.0 * h * h)
    d2 = (4.0 * d2h - d2hh) / 3.0
    e2 = abs(d2h - d2hh) / 3.0
    r = float(f.radii[i])
    value = -(d2 + (n - 2.0) * d1) / (r * r)
    error = (e2 + abs(n - 2.0) * e1) / (r * r) + 8.0 * np.finfo(float).eps * abs(v[i]) / (h * h * r * r)
    return value, error


def _int_dim(dim):
    n = int(dim)
    if n != dim or n < 3:
        raise DomainError(f"dimension must be an integer >= 3, got {dim}")
    return n
