"""Rotationally symmetric barrier profiles of constant mean curvature.

The graph ``f(x) = p(|x|)`` over an n-dimensional annulus has constant mean
curvature ``-h`` exactly when the generating curve satisfies the reduced
first-order equation

    t^(n-1) p'(t) / sqrt(1 + p'(t)^2) = c - h t^n,

with an integration constant ``c``.  Choosing ``c > 0`` selects the nodoid
branch (for ``h > 0``) or the catenoid (``h = 0``).  Solving for the slope,

    p'(t) = (c - h t^n) / sqrt(t^(2n-2) - (c - h t^n)^2),

which is defined where the radicand is positive, i.e. strictly between the
two positive zeros ``a < b`` of the radicand (``b = +inf`` for ``h = 0``).
The height is the integral of the slope anchored at ``p(r) = 0``:

    p(t) = integral_r^t (c - h s^n) / sqrt(s^(2n-2) - (c - h s^n)^2) ds.

For ``h > 0`` the profile rises from ``r`` to an apex ``t0 = (c/h)^(1/n)``
and falls beyond it, remaining positive at least up to ``2 t0 - r``.  The
apex height ``C1 = p(t0)`` and inner slope ``C2 = |p'(r)|`` are the
comparison constants that bound solutions of the zero-boundary-value
prescribed mean curvature problem over domains fitted into the annulus.

All functions are pure and deterministic; identical inputs give
bit-identical outputs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import (
    NoAdmissibleConstantError,
    OutOfDomainError,
    ParameterError,
    QuadratureError,
)
from .ioutil import dump_json, write_csv

# Inputs this close (relatively) to a strict inequality are rejected:
# grazing cases carry no numerical meaning.
REL_STRICTNESS = 1e-12
# Fraction of the slope interval excluded right at the outer zero b.
B_GUARD_FRACTION = 1e-12
# Within this fraction of (b - a) of an endpoint the square-root
# singularity is removed by the substitution s = a + u^2 (or b - u^2).
_SING_WINDOW = 0.1
# Quadrature targets; the documented guarantee is 1e-9 absolute.
_QUAD_EPS = 1e-12
_HEIGHT_ABS_TOL = 1e-9


def _check_dim(dim):
    if not isinstance(dim, (int, np.integer)) or dim < 2:
        raise ParameterError(f"graph dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def _g1(dim, h, c, t):
    """Lower radicand factor: h t^n + t^(n-1) - c, zero at a."""
    return h * t**dim + t ** (dim - 1) - c


def _g1p(dim, h, c, t):
    return dim * h * t ** (dim - 1) + (dim - 1) * t ** (dim - 2)


def _g2(dim, h, c, t):
    """Upper radicand factor with sign flipped: h t^n - t^(n-1) - c, zero at b."""
    return h * t**dim - t ** (dim - 1) - c


def _g2p(dim, h, c, t):
    return dim * h * t ** (dim - 1) - (dim - 1) * t ** (dim - 2)


def _radicand(dim, h, c, t):
    # t^(2n-2) - (c - h t^n)^2 factored as g1 * (-g2); the factored form
    # stays accurate next to the zeros a and b.
    return _g1(dim, h, c, t) * (-_g2(dim, h, c, t))


def _bracketed_root(fn, dfn, lo, hi, scale):
    """Root of an increasing-through-zero function on [lo, hi].

    Bisection down to 1e-14 * scale followed by three clamped Newton
    polishing steps; the bracket makes bisection safe, Newton makes the
    final digits cheap.
    """
    flo, fhi = fn(lo), fn(hi)
    if flo > 0.0 or fhi < 0.0:
        raise ParameterError("root bracket does not straddle a sign change")
    width_tol = 1e-14 * max(1.0, abs(scale))
    for _ in range(300):
        if hi - lo <= width_tol:
            break
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if fmid <= 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    fx = fn(x)
    for _ in range(3):
        d = dfn(x)
        if d == 0.0 or not math.isfinite(d):
            break
        step = fx / d
        x_new = x - step
        if not (lo <= x_new <= hi):
            x_new = 0.5 * (lo + hi)
        fx_new = fn(x_new)
        if abs(fx_new) > abs(fx):
            break
        x, fx = x_new, fx_new
    return x


def profile_zeros(dim, h, c):
    """Both positive zeros (a, b) of the slope radicand.

    ``a`` solves h a^n + a^(n-1) = c and ``b`` solves h b^n - b^(n-1) = c;
    for the catenoid (h = 0) there is only ``a = c^(1/(n-1))`` and ``b``
    is returned as ``+inf``.
    """
    dim = _check_dim(dim)
    if not (math.isfinite(c) and c > 0.0):
        raise ParameterError(
            f"the integration constant must be positive (nodoid branch), got c={c!r}"
        )
    if h < 0.0 or not math.isfinite(h):
        raise ParameterError(f"curvature magnitude h must be >= 0, got {h!r}")
    if h == 0.0:
        return c ** (1.0 / (dim - 1)), math.inf

    hi_a = c ** (1.0 / (dim - 1))  # g1(hi_a) = h * hi_a^n > 0
    a = _bracketed_root(
        lambda t: _g1(dim, h, c, t),
        lambda t: _g1p(dim, h, c, t),
        0.0,
        hi_a,
        hi_a,
    )

    t0 = (c / h) ** (1.0 / dim)  # g2(t0) = -t0^(n-1) < 0
    hi_b = 2.0 * max(t0, 1.0)
    for _ in range(400):
        if _g2(dim, h, c, hi_b) > 0.0:
            break
        hi_b *= 2.0
    b = _bracketed_root(
        lambda t: _g2(dim, h, c, t),
        lambda t: _g2p(dim, h, c, t),
        t0,
        hi_b,
        hi_b,
    )
    return a, b


def apex(dim, h, c):
    """Radius where the profile slope vanishes, (c/h)^(1/n).

    The catenoid has no apex: for h = 0 the sentinel +inf is returned
    (its profile keeps rising over the whole domain).
    """
    dim = _check_dim(dim)
    if not (math.isfinite(c) and c > 0.0):
        raise ParameterError(f"the integration constant must be positive, got c={c!r}")
    if h == 0.0:
        return math.inf
    if h < 0.0 or not math.isfinite(h):
        raise ParameterError(f"curvature magnitude h must be >= 0, got {h!r}")
    return (c / h) ** (1.0 / dim)


def _slope_raw(t, dim, h, c):
    t = np.asarray(t, dtype=float)
    num = c - h * t**dim
    rad = _g1(dim, h, c, t) * (-_g2(dim, h, c, t))
    return num / np.sqrt(rad)


def slope(t, dim, h, c):
    """Profile slope p'(t); positive below the apex, negative above it.

    Accepts scalars or arrays.  Raises :class:`OutOfDomainError` when any
    point lies outside the open interval (a, b) where the radicand is
    positive.
    """
    a, b = profile_zeros(dim, h, c)
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= a) or np.any(arr >= b):
        raise OutOfDomainError(f"slope is defined on the open interval ({a}, {b})")
    out = _slope_raw(arr, dim, h, c)
    return float(out) if np.isscalar(t) or arr.ndim == 0 else out


def _quad(fn, lo, hi):
    if hi <= lo:
        return 0.0, 0.0
    width = hi - lo
    if width <= 4.0 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi)):
        # roundoff-width segment: QUADPACK would only thrash on it
        mid_val = fn(0.5 * (lo + hi))
        return mid_val * width, abs(mid_val) * width
    with warnings.catch_warnings():
        # accuracy is judged from the returned error estimate instead
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(fn, lo, hi, epsabs=_QUAD_EPS,
                                  epsrel=_QUAD_EPS, limit=300)
    return val, err


def _segment_near_a(dim, h, c, a, lo, hi):
    # substitute s = a + u^2: ds = 2u du removes the (s - a)^(-1/2) blowup
    g1p_a = _g1p(dim, h, c, a)

    def psi(u):
        s = a + u * u
        if u > 0.0:
            q1 = _g1(dim, h, c, s) / (u * u)
        else:
            q1 = g1p_a
        m2 = -_g2(dim, h, c, s)
        if q1 <= 0.0 or m2 <= 0.0:
            return 0.0  # inside the floating-point noise floor of a
        return 2.0 * (c - h * s**dim) / math.sqrt(q1 * m2)

    return _quad(psi, math.sqrt(max(lo - a, 0.0)), math.sqrt(hi - a))


def _segment_near_b(dim, h, c, b, lo, hi):
    # substitute s = b - u^2 against the (b - s)^(-1/2) blowup
    g2p_b = _g2p(dim, h, c, b)

    def psi(u):
        s = b - u * u
        if u > 0.0:
            q2 = -_g2(dim, h, c, s) / (u * u)
        else:
            q2 = g2p_b
        g1v = _g1(dim, h, c, s)
        if q2 <= 0.0 or g1v <= 0.0:
            return 0.0
        return 2.0 * (c - h * s**dim) / math.sqrt(g1v * q2)

    return _quad(psi, math.sqrt(max(b - hi, 0.0)), math.sqrt(b - lo))


def profile_height_integral(dim, h, c, t_lo, t_hi):
    """Integral of the slope between two radii inside [a, b].

    Handles the inverse-square-root endpoint singularities by substitution
    on subintervals within 10% of an endpoint; elsewhere plain adaptive
    quadrature is used.  The estimated absolute error is kept below 1e-9.
    """
    if t_hi < t_lo:
        raise ParameterError("integration bounds must be ordered")
    if t_hi == t_lo:
        return 0.0
    a, b = profile_zeros(dim, h, c)
    if t_lo < a - 1e-12 * max(1.0, a) or (math.isfinite(b) and t_hi > b):
        raise OutOfDomainError(f"integration range must lie inside [{a}, {b}]")

    if math.isfinite(b):
        width = b - a
        cut_a = a + _SING_WINDOW * width
        cut_b = b - _SING_WINDOW * width
    else:
        cut_a = a * (1.0 + _SING_WINDOW)
        cut_b = math.inf

    total, err_total = 0.0, 0.0
    s0 = max(t_lo, a)
    if s0 < cut_a:
        s1 = min(t_hi, cut_a)
        val, err = _segment_near_a(dim, h, c, a, s0, s1)
        total += val
        err_total += err
        s0 = s1
    mid_hi = min(t_hi, cut_b)
    while s0 < mid_hi:
        # long catenoid tails (b = inf) are integrated in geometric chunks
        s1 = mid_hi if math.isfinite(b) else min(mid_hi, 4.0 * max(s0, 1.0))
        val, err = _quad(lambda s: _slope_raw(float(s), dim, h, c), s0, s1)
        total += val
        err_total += err
        s0 = s1
    if s0 < t_hi:
        val, err = _segment_near_b(dim, h, c, b, s0, t_hi)
        total += val
        err_total += err

    if err_total > _HEIGHT_ABS_TOL:
        raise QuadratureError(
            f"profile quadrature error estimate {err_total:.3e} exceeds {_HEIGHT_ABS_TOL}"
        )
    return total


@dataclass(frozen=True)
class NodoidProfile:
    """Parameters of one barrier profile.

    dim        ambient graph dimension n >= 2
    h          constant mean curvature magnitude, >= 0
    r          inner anchor radius, p(r) = 0
    c          integration constant of the reduced equation
    a, b       endpoints of the maximal slope domain (b = +inf for h = 0)
    t0         apex radius, p'(t0) = 0 (+inf for h = 0)
    r_usable   largest radius with guaranteed positivity, 2 t0 - r for h > 0
    """

    dim: int
    h: float
    r: float
    c: float
    a: float
    b: float
    t0: float
    r_usable: float

    def domain_limit(self):
        """Largest radius accepted by :meth:`height`."""
        if self.h == 0.0:
            return math.inf
        guard = B_GUARD_FRACTION * (self.b - self.a)
        return min(self.r_usable, self.b - guard)

    def slope(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(arr <= self.a) or np.any(arr >= self.b):
            raise OutOfDomainError(
                f"slope is defined on the open interval ({self.a}, {self.b})"
            )
        out = _slope_raw(arr, self.dim, self.h, self.c)
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def height(self, t, force_quadrature=False):
        """Profile height p(t) with p(r) = 0.

        For the planar catenoid the closed form c*(arcosh(t/c) - arcosh(r/c))
        is used unless ``force_quadrature`` asks for the integral path.
        """
        t = float(t)
        limit = self.domain_limit()
        tol = 1e-12 * max(1.0, self.r)
        if t < self.r - tol or t > limit * (1.0 + 1e-12):
            raise OutOfDomainError(
                f"height is defined for {self.r} <= t <= {limit}, got {t}"
            )
        t = min(max(t, self.r), limit)
        if t == self.r:
            return 0.0
        if self.h == 0.0 and self.dim == 2 and not force_quadrature:
            return self.c * (math.acosh(t / self.c) - math.acosh(self.r / self.c))
        return profile_height_integral(self.dim, self.h, self.c, self.r, t)

    def heights(self, ts, force_quadrature=False):
        """Cumulative heights over an increasing radius grid."""
        ts = np.asarray(ts, dtype=float)
        if ts.ndim != 1 or ts.size == 0 or np.any(np.diff(ts) < 0.0):
            raise ParameterError("radius grid must be one-dimensional and increasing")
        if self.h == 0.0 and self.dim == 2 and not force_quadrature:
            return np.array([self.height(t) for t in ts])
        limit = self.domain_limit()
        if ts[0] < self.r - 1e-12 * max(1.0, self.r) or ts[-1] > limit * (1.0 + 1e-12):
            raise OutOfDomainError("radius grid leaves the profile domain")
        ts = np.clip(ts, self.r, limit)
        out = np.empty_like(ts)
        acc = profile_height_integral(self.dim, self.h, self.c, self.r, ts[0])
        out[0] = acc
        for i in range(1, ts.size):
            acc += profile_height_integral(
                self.dim, self.h, self.c, ts[i - 1], ts[i]
            )
            out[i] = acc
        return out


def admissible_interval(dim, h, r):
    """Open interval of integration constants keeping a < r < t0."""
    dim = _check_dim(dim)
    if r <= 0.0:
        raise ParameterError(f"inner radius must be positive, got {r!r}")
    if h <= 0.0:
        raise ParameterError("the admissible interval is defined for h > 0")
    lo = h * r**dim
    return lo, lo + r ** (dim - 1)


def make_profile(dim, h, r, c):
    """Construct a validated profile from its raw parameters."""
    dim = _check_dim(dim)
    if r <= 0.0 or not math.isfinite(r):
        raise ParameterError(f"inner radius must be positive, got {r!r}")
    if h < 0.0 or not math.isfinite(h):
        raise ParameterError(f"curvature magnitude h must be >= 0, got {h!r}")
    if h == 0.0:
        limit = r ** (dim - 1)
        if not (0.0 < c < limit * (1.0 - REL_STRICTNESS)):
            raise ParameterError(
                f"catenoid constant must satisfy 0 < c < r^(n-1) = {limit}, got {c!r}"
            )
        a, b = profile_zeros(dim, h, c)
        return NodoidProfile(dim, h, r, c, a, b, math.inf, math.inf)
    lo, hi = admissible_interval(dim, h, r)
    gap = hi - lo
    if not (lo + REL_STRICTNESS * gap < c < hi - REL_STRICTNESS * gap):
        raise ParameterError(
            f"integration constant must lie strictly inside ({lo}, {hi}), got {c!r}"
        )
    a, b = profile_zeros(dim, h, c)
    t0 = apex(dim, h, c)
    if not (a < r < t0 < b):
        raise ParameterError(
            f"inconsistent profile ordering a={a}, r={r}, t0={t0}, b={b}")
    return NodoidProfile(dim, h, r, c, a, b, t0, 2.0 * t0 - r)


def usable_radius(dim, h, r, c):
    """Largest radius with guaranteed profile positivity, 2 (c/h)^(1/n) - r.

    The closed admissible interval is accepted here: the formula extends
    continuously to the endpoints, where it returns the limiting values
    (r at the lower end, the supremum at the upper end).
    """
    dim = _check_dim(dim)
    if h <= 0.0:
        raise ParameterError("usable_radius is defined for h > 0")
    lo, hi = admissible_interval(dim, h, r)
    if not (lo <= c <= hi):
        raise ParameterError(
            f"integration constant must lie inside [{lo}, {hi}], got {c!r}"
        )
    return 2.0 * (c / h) ** (1.0 / dim) - r


def annulus_height_bound(dim, r, R):
    """Supremum of curvature magnitudes admitting a barrier over [r, R].

    Equals 2 (2r)^(n-1) / ((R + r)^n - (2r)^n); a profile reaching R exists
    exactly for h strictly below this value.
    """
    dim = _check_dim(dim)
    if r <= 0.0 or R <= r:
        raise ParameterError("need 0 < r < R")
    return 2.0 * (2.0 * r) ** (dim - 1) / ((R + r) ** dim - (2.0 * r) ** dim)


def select_c(dim, h, r, R):
    """Pick an integration constant whose usable radius covers R.

    Any constant with usable radius >= R would do; the midpoint between
    the bisection solution of ``usable_radius(c) = R`` and the supremum of
    the admissible interval is returned, keeping a positive margin against
    both the positivity constraint and the degenerate upper limit.
    """
    dim = _check_dim(dim)
    if r <= 0.0 or R <= r:
        raise ParameterError("need 0 < r < R")
    if h < 0.0 or not math.isfinite(h):
        raise ParameterError(f"curvature magnitude h must be >= 0, got {h!r}")
    if h == 0.0:
        return 0.5 * r ** (dim - 1)
    bound = annulus_height_bound(dim, r, R)
    if h >= bound * (1.0 - REL_STRICTNESS):
        raise NoAdmissibleConstantError(
            f"h={h} is not strictly below the admissible bound {bound} "
            f"for r={r}, R={R}"
        )
    lo, hi = admissible_interval(dim, h, r)

    def gap(c):
        return 2.0 * (c / h) ** (1.0 / dim) - r - R

    c_lo, c_hi = lo, hi
    # gap(lo) = r - R < 0 and gap(hi) > 0 thanks to the bound check
    for _ in range(200):
        if c_hi - c_lo <= 1e-15 * hi:
            break
        mid = 0.5 * (c_lo + c_hi)
        if gap(mid) <= 0.0:
            c_lo = mid
        else:
            c_hi = mid
    c = 0.5 * (0.5 * (c_lo + c_hi) + hi)
    return c


def profile_for_annulus(dim, h, r, R):
    """Barrier profile covering the annulus radii [r, R]."""
    return make_profile(dim, h, r, select_c(dim, h, r, R))


def barrier_constants(profile, outer=None):
    """Comparison constants (C1, C2) of a profile.

    C1 is the maximal profile height (the apex height for h > 0, the
    height at ``outer`` for the monotone catenoid) and C2 the inner slope
    magnitude |p'(r)|.  Solutions with zero boundary data over a domain
    fitted into the annulus satisfy sup|f| <= C1 and boundary gradients
    <= C2.
    """
    if profile.h > 0.0:
        if outer is not None and outer > profile.r_usable * (1.0 + 1e-12):
            raise ParameterError(
                f"outer radius {outer} exceeds the usable radius {profile.r_usable}"
            )
        c1 = profile.height(profile.t0)
    else:
        if outer is None:
            raise ParameterError(
                "the catenoid profile is increasing; pass the outer radius "
                "at which the height bound is needed"
            )
        c1 = profile.height(float(outer))
    c2 = abs(profile.slope(profile.r))
    return c1, c2


def profile_table(profile, t_end, num=201):
    """(t, p, p') samples from r to t_end, inclusive."""
    if num < 2:
        raise ParameterError("need at least two sample points")
    t_end = float(t_end)
    limit = profile.domain_limit()
    if t_end > limit * (1.0 + 1e-12) or t_end <= profile.r:
        raise OutOfDomainError(
            f"table end must lie in ({profile.r}, {limit}], got {t_end}"
        )
    ts = np.linspace(profile.r, min(t_end, limit), num)
    ps = profile.heights(ts)
    slopes = profile.slope(ts)
    return np.column_stack([ts, ps, slopes])


def write_profile_csv(profile, path, t_end, num=201):
    table = profile_table(profile, t_end, num=num)
    write_csv(path, ["t", "p", "p_prime"], table)


def profile_params(profile, outer=None):
    """Parameter block with the comparison constants attached."""
    c1, c2 = barrier_constants(profile, outer=outer)
    return {
        "dim": profile.dim,
        "h": profile.h,
        "r": profile.r,
        "c": profile.c,
        "a": profile.a,
        "b": profile.b,
        "t0": profile.t0,
        "R_usable": profile.r_usable,
        "C1": c1,
        "C2": c2,
    }


def write_params_json(profile, path, outer=None):
    dump_json(profile_params(profile, outer=outer), path)
