"""
Warping profiles for rotationally symmetric ambient cylinders.

Every geometric quantity in this package is driven by a single positive,
strictly increasing radial function theta(r) on a working domain
[r0, r_max]: the ambient metric is dr^2 + theta(r)^2 * (round metric on
the n-sphere).  A :class:`WarpingProfile` packages theta together with its
first three radial derivatives and the flat-parametrization antiderivative
of 1/theta.

Supported families
------------------
- ``euclidean``            theta = r (flat space in polar coordinates)
- ``hyperbolic``           theta = sinh(sqrt(k) r) / sqrt(k), curvature -k
- ``ds_schwarzschild``     theta' = sqrt(1 + kappa theta^2 - m theta^(1-n))
- ``reissner_nordstrom``   theta' = sqrt(1 - m theta^(1-n) + q^2 theta^(2-2n))
- ``oscillator``           theta'' = (a/2)(1 + sin(omega r)) theta
- ``tabulated``            CSV table ``r,theta,theta1,theta2,theta3``

Closed-form families are evaluated exactly.  The sqrt-radicand families are
parametrized internally by theta: we integrate dr/dtheta = 1/theta'(theta)
on a dense log-spaced theta grid and store cubic interpolation tables for
r <-> theta with exact ODE slopes; derivatives come from the closed-form
radicand, never from stacked numerical differentiation.  The start value
theta(r0) sits a configurable margin above the largest root of the radicand
(the horizon) so that theta' stays bounded away from zero.

All profiles are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator
from scipy.optimize import brentq

from .errors import ProfileError

FAMILIES = (
    "euclidean",
    "hyperbolic",
    "ds_schwarzschild",
    "reissner_nordstrom",
    "oscillator",
    "tabulated",
)

_IMPLICIT = ("ds_schwarzschild", "reissner_nordstrom")

#: relative slack allowed when checking radial arguments against the domain
_DOMAIN_SLACK = 1e-9


@dataclass(frozen=True)
class ProfileSpec:
    """Parameters selecting and configuring a warping-profile family.

    ``r0``/``r_max`` bound the radial working domain.  For ``tabulated``
    profiles they may be ``None``, meaning "use the table's own ends".
    ``theta0`` overrides the start value theta(r0) of the implicit families
    (default: ``horizon_margin`` times the largest radicand root, or 1.0
    when the radicand has no positive root).
    """

    family: str
    r0: float | None = None
    r_max: float | None = None
    # hyperbolic
    k: float = 1.0
    # ds_schwarzschild / reissner_nordstrom
    kappa: float = 0.0
    m: float = 0.0
    q: float = 0.0
    n: int = 2
    # oscillator
    a: float = 1.0
    omega: float = 1.0
    delta0: float = 0.5
    # implicit families
    theta0: float | None = None
    horizon_margin: float = 1.05
    # tabulated
    path: str | None = None

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ProfileError(f"unknown profile family {self.family!r}")
        if self.family != "tabulated":
            if self.r0 is None or self.r_max is None:
                raise ProfileError("r0 and r_max are required")
        if self.r0 is not None and self.r_max is not None and not self.r0 < self.r_max:
            raise ProfileError(f"need r0 < r_max, got [{self.r0}, {self.r_max}]")
        if self.family in ("euclidean", "hyperbolic") and (self.r0 is None or self.r0 <= 0):
            raise ProfileError(f"{self.family} profile needs r0 > 0 so that theta > 0")
        if self.family == "hyperbolic" and not self.k > 0:
            raise ProfileError("hyperbolic curvature scale k must be > 0")
        if self.family == "ds_schwarzschild" and (self.kappa < 0 or self.m < 0):
            raise ProfileError("ds_schwarzschild needs kappa >= 0 and m >= 0")
        if self.family == "reissner_nordstrom" and not self.m > 0:
            raise ProfileError("reissner_nordstrom needs m > 0")
        if self.family in _IMPLICIT and self.n < 2:
            raise ProfileError("implicit families need dimension n >= 2")
        if self.family == "oscillator" and (self.a < 0 or self.omega <= 0 or self.delta0 <= 0):
            raise ProfileError("oscillator needs a >= 0, omega > 0, delta0 > 0")
        if self.family == "tabulated" and not self.path:
            raise ProfileError("tabulated profile needs a path")
        if self.theta0 is not None and self.theta0 <= 0:
            raise ProfileError("theta0 must be positive")
        if self.horizon_margin <= 1.0:
            raise ProfileError("horizon_margin must exceed 1")


@dataclass
class WarpingProfile:
    """Evaluable warping function theta with derivatives up to third order.

    ``eval(r)`` returns ``(theta, theta1, theta2, theta3)``; ``phi(r)`` is
    the antiderivative of 1/theta vanishing at ``r0``.  Both accept scalars
    or arrays.  Instances are immutable; construction goes through
    :func:`build_profile`.
    """

    spec: ProfileSpec
    r0: float
    r_max: float
    theta_range: tuple[float, float]
    _eval_fn: Callable = field(repr=False)
    _phi_fn: Callable = field(repr=False)
    _inverse_seed: Callable | None = field(repr=False, default=None)
    # cancellation-free pinching deviation, set for families with a closed form
    _theta_bar_fn: Callable | None = field(repr=False, default=None)

    @property
    def domain(self) -> tuple[float, float]:
        return (self.r0, self.r_max)

    def _check_domain(self, r: np.ndarray) -> None:
        slack = _DOMAIN_SLACK * (1.0 + abs(self.r_max))
        rmin = float(np.min(r))
        rmax = float(np.max(r))
        if rmin < self.r0 - slack or rmax > self.r_max + slack:
            raise ProfileError(
                f"radial argument outside domain [{self.r0:.6g}, {self.r_max:.6g}]: "
                f"range [{rmin:.6g}, {rmax:.6g}]"
            )

    def eval(self, r):
        """Return (theta, theta', theta'', theta''') at r (scalar or array)."""
        arr = np.asarray(r, dtype=float)
        self._check_domain(arr)
        th, th1, th2, th3 = self._eval_fn(arr)
        if arr.ndim == 0:
            return float(th), float(th1), float(th2), float(th3)
        return th, th1, th2, th3

    def theta(self, r):
        return self.eval(r)[0]

    def phi(self, r):
        """Antiderivative of 1/theta from r0 (flat gradient parametrization)."""
        arr = np.asarray(r, dtype=float)
        self._check_domain(arr)
        out = self._phi_fn(arr)
        return float(out) if arr.ndim == 0 else out

    def contains(self, r, margin: float = 0.0) -> bool:
        arr = np.asarray(r, dtype=float)
        return bool(np.all(arr >= self.r0 + margin) and np.all(arr <= self.r_max - margin))


# ---------------------------------------------------------------------------
# family builders


def _build_euclidean(spec: ProfileSpec) -> WarpingProfile:
    r0 = float(spec.r0)

    def ev(r):
        one = np.ones_like(r)
        return r.copy(), one, np.zeros_like(r), np.zeros_like(r)

    return WarpingProfile(
        spec=spec,
        r0=r0,
        r_max=float(spec.r_max),
        theta_range=(r0, float(spec.r_max)),
        _eval_fn=ev,
        _phi_fn=lambda r: np.log(r / r0),
        _inverse_seed=lambda y: y,
        _theta_bar_fn=lambda r: (np.zeros_like(r), np.zeros_like(r)),
    )


def _build_hyperbolic(spec: ProfileSpec) -> WarpingProfile:
    s = math.sqrt(spec.k)
    k = spec.k
    r0 = float(spec.r0)
    phi0 = math.log(math.tanh(s * r0 / 2.0))

    def ev(r):
        th = np.sinh(s * r) / s
        th1 = np.cosh(s * r)
        return th, th1, k * th, k * th1

    def phi(r):
        return np.log(np.tanh(s * r / 2.0)) - phi0

    return WarpingProfile(
        spec=spec,
        r0=r0,
        r_max=float(spec.r_max),
        theta_range=(math.sinh(s * r0) / s, math.sinh(s * spec.r_max) / s),
        _eval_fn=ev,
        _phi_fn=phi,
        _inverse_seed=lambda y: np.arcsinh(s * y) / s,
        _theta_bar_fn=lambda r: (np.zeros_like(r), np.zeros_like(r)),
    )


def _radicand(spec: ProfileSpec):
    """Closed-form radicand F = theta'^2 and its theta-derivatives F', F''."""
    n = spec.n
    if spec.family == "ds_schwarzschild":
        kap, m = spec.kappa, spec.m

        def F(th):
            return 1.0 + kap * th**2 - m * th ** (1 - n)

        def F1(th):
            return 2.0 * kap * th + m * (n - 1) * th ** (-n)

        def F2(th):
            return 2.0 * kap - m * n * (n - 1) * th ** (-n - 1)

    else:  # reissner_nordstrom
        m, q = spec.m, spec.q

        def F(th):
            return 1.0 - m * th ** (1 - n) + q**2 * th ** (2 - 2 * n)

        def F1(th):
            return m * (n - 1) * th ** (-n) - 2.0 * q**2 * (n - 1) * th ** (1 - 2 * n)

        def F2(th):
            return -m * n * (n - 1) * th ** (-1 - n) + 2.0 * q**2 * (n - 1) * (2 * n - 1) * th ** (-2 * n)

    return F, F1, F2


def _largest_radicand_root(F, scale: float) -> float | None:
    """Largest positive root of the radicand (the horizon), or None."""
    grid = np.geomspace(scale * 1e-9, scale * 1e9, 4001)
    with np.errstate(over="ignore"):
        vals = F(grid)
    vals = np.where(np.isfinite(vals), vals, np.inf)
    crossings = np.nonzero((vals[:-1] <= 0.0) & (vals[1:] > 0.0))[0]
    if crossings.size == 0:
        if np.all(vals > 0.0):
            return None
        raise ProfileError("radicand has no positive region in the scanned range")
    i = crossings[-1]
    if vals[i] == 0.0:
        return float(grid[i])
    return float(brentq(F, grid[i], grid[i + 1], xtol=1e-14 * scale, rtol=1e-15))


def _cumulative_gauss(x: np.ndarray, g, order: int = 8) -> np.ndarray:
    """Cumulative integral of g over the node intervals of x (Gauss-Legendre)."""
    xg, wg = np.polynomial.legendre.leggauss(order)
    lo, hi = x[:-1], x[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * xg[None, :]
    seg = (g(pts) * wg[None, :]).sum(axis=1) * half
    return np.concatenate([[0.0], np.cumsum(seg)])


def _build_implicit(spec: ProfileSpec, table_size: int = 4096) -> WarpingProfile:
    F, F1, F2 = _radicand(spec)
    scale = max(1.0, spec.m, abs(spec.q), spec.kappa)
    horizon = _largest_radicand_root(F, scale)

    if spec.theta0 is not None:
        theta0 = float(spec.theta0)
        if horizon is not None and theta0 <= horizon:
            raise ProfileError(
                f"theta0={theta0:.6g} is at or below the horizon theta={horizon:.6g}"
            )
        if F(theta0) <= 0.0:
            raise ProfileError(f"radicand negative at theta0={theta0:.6g}")
    else:
        theta0 = spec.horizon_margin * horizon if horizon is not None else 1.0

    r0 = float(spec.r0)
    r_max = float(spec.r_max)

    def inv_speed(th):
        return 1.0 / np.sqrt(F(th))

    # stretch the theta range until the radial arc length covers r_max
    span = 0.0
    lo, hi = theta0, 2.0 * theta0
    for _ in range(400):
        seg = _cumulative_gauss(np.geomspace(lo, hi, 17), inv_speed)[-1]
        span += seg
        if r0 + span >= r_max:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ProfileError("could not cover the requested radial range")
    theta_end = hi

    th_nodes = np.geomspace(theta0, theta_end, table_size + 1)
    r_nodes = r0 + _cumulative_gauss(th_nodes, inv_speed)
    phi_nodes = _cumulative_gauss(th_nodes, lambda t: 1.0 / (t * np.sqrt(F(t))))
    speed = np.sqrt(F(th_nodes))

    th_of_r = CubicHermiteSpline(r_nodes, th_nodes, speed)
    r_of_th = CubicHermiteSpline(th_nodes, r_nodes, 1.0 / speed)
    phi_of_r = CubicHermiteSpline(r_nodes, phi_nodes, 1.0 / th_nodes)

    def ev(r):
        th = th_of_r(r)
        rad = F(th)
        th1 = np.sqrt(rad)
        return th, th1, 0.5 * F1(th), 0.5 * F2(th) * th1

    # the kappa-terms of the pinching deviation cancel exactly; evaluate the
    # remainder directly instead of through 1 - theta'^2
    n = spec.n
    m, q = spec.m, spec.q

    def tb_closed(r):
        th = th_of_r(r)
        th1 = np.sqrt(F(th))
        tb = 0.5 * m * (n + 1) * th ** (-1 - n)
        tb1 = -0.5 * m * (n + 1) ** 2 * th ** (-2 - n) * th1
        if spec.family == "reissner_nordstrom":
            tb = tb - n * q**2 * th ** (-2 * n)
            tb1 = tb1 + 2.0 * n**2 * q**2 * th ** (-2 * n - 1) * th1
        return tb, tb1

    return WarpingProfile(
        spec=spec,
        r0=r0,
        r_max=r_max,
        theta_range=(theta0, float(th_of_r(r_max))),
        _eval_fn=ev,
        _phi_fn=phi_of_r,
        _inverse_seed=r_of_th,
        _theta_bar_fn=tb_closed,
    )


def _build_oscillator(spec: ProfileSpec, steps: int = 8192) -> WarpingProfile:
    a, om = spec.a, spec.omega
    r0, r_max = float(spec.r0), float(spec.r_max)

    def forcing(r):
        return 0.5 * a * (1.0 + np.sin(om * r))

    # classic RK4 on (theta, theta', phi); theta'' comes from the ODE itself
    r_nodes = np.linspace(r0, r_max, steps + 1)
    h = (r_max - r0) / steps
    th = np.empty(steps + 1)
    th1 = np.empty(steps + 1)
    ph = np.empty(steps + 1)
    y = np.array([1.0, spec.delta0, 0.0])
    th[0], th1[0], ph[0] = y

    def rhs(r, y):
        return np.array([y[1], forcing(r) * y[0], 1.0 / y[0]])

    for i in range(steps):
        r = r_nodes[i]
        k1 = rhs(r, y)
        k2 = rhs(r + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(r + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(r + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        th[i + 1], th1[i + 1], ph[i + 1] = y

    th_spline = CubicHermiteSpline(r_nodes, th, th1)
    th1_spline = CubicHermiteSpline(r_nodes, th1, forcing(r_nodes) * th)
    phi_spline = CubicHermiteSpline(r_nodes, ph, 1.0 / th)

    def ev(r):
        t = th_spline(r)
        t1 = th1_spline(r)
        t2 = forcing(r) * t
        t3 = 0.5 * a * om * np.cos(om * r) * t + forcing(r) * t1
        return t, t1, t2, t3

    return WarpingProfile(
        spec=spec,
        r0=r0,
        r_max=r_max,
        theta_range=(float(th[0]), float(th[-1])),
        _eval_fn=ev,
        _phi_fn=phi_spline,
        _inverse_seed=PchipInterpolator(th, r_nodes),
    )


def read_profile_table(path: str) -> dict[str, np.ndarray]:
    """Read a tabulated profile CSV with header r,theta,theta1,theta2,theta3."""
    cols = ("r", "theta", "theta1", "theta2", "theta3")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != list(cols):
            raise ProfileError(
                f"tabulated profile needs header {','.join(cols)}, got {reader.fieldnames}"
            )
        for row in reader:
            try:
                rows.append([float(row[c]) for c in cols])
            except (TypeError, ValueError) as exc:
                raise ProfileError(f"bad numeric value in {path}: {row}") from exc
    if len(rows) < 4:
        raise ProfileError("tabulated profile needs at least 4 rows")
    data = np.asarray(rows, dtype=float)
    return {c: data[:, i] for i, c in enumerate(cols)}


def _build_tabulated(spec: ProfileSpec) -> WarpingProfile:
    tab = read_profile_table(spec.path)
    r = tab["r"]
    if np.any(np.diff(r) <= 0.0):
        raise ProfileError("non-monotone tabulated input: r column must be strictly increasing")
    if np.any(tab["theta"] <= 0.0):
        raise ProfileError("tabulated theta must be positive")
    if np.any(np.diff(tab["theta"]) <= 0.0):
        raise ProfileError("non-monotone tabulated input: theta must be strictly increasing")

    r0 = float(r[0]) if spec.r0 is None else float(spec.r0)
    r_max = float(r[-1]) if spec.r_max is None else float(spec.r_max)
    if not r0 < r_max:
        raise ProfileError(f"need r0 < r_max, got [{r0}, {r_max}]")
    slack = _DOMAIN_SLACK * (1.0 + abs(r_max))
    if r0 < r[0] - slack or r_max > r[-1] + slack:
        raise ProfileError(
            f"requested domain [{r0:.6g}, {r_max:.6g}] exceeds table range "
            f"[{r[0]:.6g}, {r[-1]:.6g}]"
        )

    th_spline = CubicHermiteSpline(r, tab["theta"], tab["theta1"])
    th1_spline = CubicHermiteSpline(r, tab["theta1"], tab["theta2"])
    th2_spline = CubicHermiteSpline(r, tab["theta2"], tab["theta3"])
    th3_spline = PchipInterpolator(r, tab["theta3"])
    phi_nodes = _cumulative_gauss(r, lambda x: 1.0 / th_spline(x))
    phi_nodes -= np.interp(r0, r, phi_nodes)
    phi_spline = CubicHermiteSpline(r, phi_nodes, 1.0 / tab["theta"])

    def ev(x):
        return th_spline(x), th1_spline(x), th2_spline(x), th3_spline(x)

    return WarpingProfile(
        spec=spec,
        r0=r0,
        r_max=r_max,
        theta_range=(float(th_spline(r0)), float(th_spline(r_max))),
        _eval_fn=ev,
        _phi_fn=phi_spline,
        _inverse_seed=PchipInterpolator(tab["theta"], r),
    )


def _validate_profile(profile: WarpingProfile, samples: int = 512) -> None:
    """Reject profiles that leave the admissible class (theta, theta' > 0, theta'' >= 0)."""
    r = np.linspace(profile.r0, profile.r_max, samples)
    th, th1, th2, _ = profile.eval(r)
    if np.any(th <= 0.0):
        bad = r[np.argmax(th <= 0.0)]
        raise ProfileError(f"theta <= 0 at r={bad:.6g}")
    interior = th1[1:]
    if np.any(interior <= 0.0):
        bad = r[1:][np.argmax(interior <= 0.0)]
        raise ProfileError(f"theta' <= 0 at r={bad:.6g} (profile outside admissible class)")
    tol = 1e-12 * max(1.0, float(np.max(np.abs(th2))))
    if np.any(th2 < -tol):
        bad = r[np.argmax(th2 < -tol)]
        raise ProfileError(f"theta'' < 0 at r={bad:.6g} (radial curvature changes sign)")


_BUILDERS = {
    "euclidean": _build_euclidean,
    "hyperbolic": _build_hyperbolic,
    "ds_schwarzschild": _build_implicit,
    "reissner_nordstrom": _build_implicit,
    "oscillator": _build_oscillator,
    "tabulated": _build_tabulated,
}


def build_profile(spec: ProfileSpec) -> WarpingProfile:
    """Construct and validate a warping profile.

    Parameters
    ----------
    spec : ProfileSpec
        Family selector plus parameters; see :class:`ProfileSpec`.

    Returns
    -------
    WarpingProfile
        Immutable profile with smooth ``eval``/``phi`` on [r0, r_max].

    Raises
    ------
    ProfileError
        On invalid parameters, an empty domain (horizon at or above the
        requested start), a negative radicand, non-monotone tables, or a
        profile that violates positivity of theta/theta' or theta'' >= 0.
    """
    spec.validate()
    profile = _BUILDERS[spec.family](spec)
    _validate_profile(profile)
    return profile


# ---------------------------------------------------------------------------
# pointwise operations


def invert_theta(profile: WarpingProfile, value: float, rtol: float = 1e-12) -> float:
    """Radial coordinate r with theta(r) = value (bracketed safeguarded Newton)."""
    lo, hi = profile.theta_range
    slack = 1e-9 * max(abs(lo), abs(hi))
    if value < lo - slack or value > hi + slack:
        raise ProfileError(
            f"theta value {value:.9g} outside range [{lo:.9g}, {hi:.9g}]"
        )
    a, b = profile.r0, profile.r_max
    if profile._inverse_seed is not None:
        x = float(np.clip(profile._inverse_seed(value), a, b))
    else:
        x = 0.5 * (a + b)
    target = max(abs(value), 1e-300)
    for _ in range(100):
        th, th1, _, _ = profile.eval(x)
        err = th - value
        if abs(err) <= rtol * target:
            return x
        if err > 0.0:
            b = x
        else:
            a = x
        step = err / th1 if th1 > 0.0 else 0.0
        x_new = x - step
        if not (a < x_new < b):
            x_new = 0.5 * (a + b)
        if abs(x_new - x) < 1e-16 * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def theta_bar(profile: WarpingProfile, r):
    """Curvature-pinching deviation theta''/theta + (1 - theta'^2)/theta^2
    and its radial derivative.  Identically zero for spaces of constant
    curvature (euclidean, hyperbolic).

    Families with a closed form evaluate it directly: the deviation is the
    small difference that controls the asymptotic rates, and the generic
    expression loses it to cancellation once theta'^2 overwhelms 1.
    """
    if profile._theta_bar_fn is not None:
        arr = np.asarray(r, dtype=float)
        profile._check_domain(arr)
        tb, tb1 = profile._theta_bar_fn(arr)
        if arr.ndim == 0:
            return float(tb), float(tb1)
        return tb, tb1
    th, th1, th2, th3 = profile.eval(r)
    tb = th2 / th + (1.0 - th1**2) / th**2
    tb1 = th3 / th - 3.0 * th1 * th2 / th**2 - 2.0 * th1 * (1.0 - th1**2) / th**3
    return tb, tb1


# ---------------------------------------------------------------------------
# assumption checker

DEFAULT_LAMBDA_GRID = (2.25, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0, 8.0)


@dataclass
class AssumptionReport:
    """Sampled verdicts on the admissibility hypotheses of a profile.

    ``a_pass``            theta'' >= 0 and theta' > 0 on the sample grid.
    ``const_b1``          sup theta''*theta / theta'^2.
    ``const_b2``          sup |theta'''/theta'| * theta/theta''; +inf where
                          theta'' vanishes while theta''' does not.
    ``b2_indeterminate``  True when theta'' vanishes somewhere on the grid,
                          in which case the defining ratio divides by zero
                          and const_b2 is reported under the convention
                          0/0 -> 0 (flagged rather than decided).
    ``lambda_best``       largest pinching rate lambda > 2 in the grid whose
                          weighted suprema stay finite and below the cap, or
                          None.
    """

    a_pass: bool
    a_first_violation_r: float | None
    const_b1: float
    const_b2: float
    b2_indeterminate: bool
    sup_theta_bar: float
    sup_slope: float
    lambda_best: float | None
    lambda_rows: list[dict]
    cap: float
    sample_grid: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "assumption_a": {
                "pass": self.a_pass,
                "first_violation_r": self.a_first_violation_r,
            },
            "const_b1": self.const_b1,
            "const_b2": self.const_b2,
            "b2_indeterminate": self.b2_indeterminate,
            "sup_theta_bar": self.sup_theta_bar,
            "sup_slope": self.sup_slope,
            "assumption_c": {
                "lambda_best": self.lambda_best,
                "cap": self.cap,
                "rows": self.lambda_rows,
            },
            "samples": {
                "count": int(self.sample_grid.size),
                "r_first": float(self.sample_grid[0]),
                "r_last": float(self.sample_grid[-1]),
            },
        }


def default_sample_grid(profile: WarpingProfile, count: int = 2048) -> np.ndarray:
    """Log-spaced radial samples accumulating near the domain start."""
    span = profile.r_max - profile.r0
    return profile.r0 + np.geomspace(span * 1e-6, span, count)


def check_assumptions(
    profile: WarpingProfile,
    r_samples: np.ndarray | None = None,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    cap: float = 1e4,
) -> AssumptionReport:
    """Evaluate the admissibility inequalities on a sample grid.

    Violations are data, not errors: the report carries suprema of the
    defining ratios and a pass/fail verdict per hypothesis.  The pinching
    verdict is the largest lambda in ``lambda_grid`` for which
    sup theta'/theta, sup |tb| theta^lambda / theta'^2 and
    sup |tb'| theta^(1+lambda) / theta'^3 all stay below ``cap``.
    """
    if r_samples is None:
        r_samples = default_sample_grid(profile)
    r = np.asarray(r_samples, dtype=float)
    th, th1, th2, th3 = profile.eval(r)

    violations = (th2 < -1e-12 * max(1.0, float(np.max(np.abs(th2))))) | (th1 <= 0.0)
    a_pass = not bool(np.any(violations))
    first_r = None if a_pass else float(r[np.argmax(violations)])

    with np.errstate(divide="ignore", invalid="ignore"):
        const_b1 = float(np.max(th2 * th / th1**2))

    th2_tol = 1e-12 * max(1.0, float(np.max(np.abs(th2))))
    th3_tol = 1e-12 * max(1.0, float(np.max(np.abs(th3))))
    degenerate = np.abs(th2) <= th2_tol
    b2_indeterminate = bool(np.any(degenerate))
    ratio = np.zeros_like(th)
    ok = ~degenerate
    ratio[ok] = np.abs(th3[ok] / th1[ok]) * th[ok] / th2[ok]
    ratio[degenerate & (np.abs(th3) > th3_tol)] = np.inf
    const_b2 = float(np.max(ratio))

    tb, tb1 = theta_bar(profile, r)
    sup_theta_bar = float(np.max(np.abs(tb)))
    sup_slope = float(np.max(th1 / th))

    rows = []
    lambda_best = None
    with np.errstate(over="ignore"):
        for lam in lambda_grid:
            s2 = float(np.max(np.abs(tb) * th**lam / th1**2))
            s3 = float(np.max(np.abs(tb1) * th ** (1.0 + lam) / th1**3))
            passed = (
                lam > 2.0
                and np.isfinite(s2)
                and np.isfinite(s3)
                and s2 <= cap
                and s3 <= cap
                and sup_slope <= cap
            )
            rows.append(
                {"lambda": float(lam), "sup_tb": s2, "sup_tb1": s3, "pass": bool(passed)}
            )
            if passed and (lambda_best is None or lam > lambda_best):
                lambda_best = float(lam)

    return AssumptionReport(
        a_pass=a_pass,
        a_first_violation_r=first_r,
        const_b1=const_b1,
        const_b2=const_b2,
        b2_indeterminate=b2_indeterminate,
        sup_theta_bar=sup_theta_bar,
        sup_slope=sup_slope,
        lambda_best=lambda_best,
        lambda_rows=rows,
        cap=cap,
        sample_grid=r,
    )
