"""
Ambient curvature, coordinate-slice geometry and exact round solutions.

All operations here are pure functions over an immutable
:class:`~imcf.profiles.WarpingProfile`.  The round (constant-graph)
solutions `barrier(t, r0)` evolve the slice {r = r0} exactly and sandwich
every graph solution of the flow; they double as the reference oracle for
the time integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainExit, ProfileError
from .profiles import WarpingProfile, invert_theta, theta_bar


@dataclass(frozen=True)
class AmbientCurvature:
    """Sectional and Ricci eigenvalues of the warped metric split into the
    radial direction and the directions tangent to the spherical slices."""

    k_rad: float
    k_tan: float
    ricci_rad: float
    ricci_tan: float


def ambient_curvature(profile: WarpingProfile, r, n: int) -> AmbientCurvature:
    """Curvature eigenvalues at radius r for slice dimension n.

    k_rad = -theta''/theta (non-positive on admissible profiles),
    k_tan = (1 - theta'^2)/theta^2, and k_tan - k_rad equals the pinching
    deviation returned by :func:`~imcf.profiles.theta_bar`.
    """
    th, th1, th2, _ = profile.eval(r)
    k_rad = -th2 / th
    k_tan = (1.0 - th1**2) / th**2
    tb = th2 / th + k_tan
    return AmbientCurvature(
        k_rad=k_rad,
        k_tan=k_tan,
        ricci_rad=n * k_rad,
        ricci_tan=n * k_rad + (n - 1) * tb,
    )


def slice_geometry(profile: WarpingProfile, r, n: int):
    """Principal curvature and mean curvature of the coordinate slice {r=const}.

    Slices are totally umbilic: every principal curvature equals
    theta'/theta, so the mean curvature is n*theta'/theta.
    """
    th, th1, _, _ = profile.eval(r)
    kbar = th1 / th
    return kbar, n * kbar


def barrier_exit_time(profile: WarpingProfile, r0: float, n: int) -> float:
    """Flow time at which the round solution started at r0 reaches r_max."""
    th_lo = profile.theta(r0)
    th_hi = profile.theta_range[1]
    return n * math.log(th_hi / th_lo)


def barrier(profile: WarpingProfile, r0: float, t: float, n: int) -> float:
    """Radius of the round solution at time t started from the slice {r=r0}.

    Solves d/dt Theta = theta/(n theta') with Theta(0)=r0, i.e.
    Theta(t) = theta^{-1}(theta(r0) e^{t/n}).  Raises :class:`DomainExit`
    (carrying the exit time) once the round solution leaves the profile
    domain.
    """
    target = profile.theta(r0) * math.exp(t / n)
    hi = profile.theta_range[1]
    if target > hi * (1.0 + 1e-12):
        t_exit = barrier_exit_time(profile, r0, n)
        raise DomainExit(t_exit, f"round solution leaves the domain at t={t_exit:.6g}")
    return invert_theta(profile, min(target, hi))


def barrier_ratio_bound(
    profile: WarpingProfile, c1: float, c2: float, t: float, n: int, samples: int = 257
):
    """Ratio theta'(Theta_2)/theta'(Theta_1) of two round solutions and a
    certified upper bound for it.

    Theta_i is the round solution with theta-value c_i e^{t/n}.  The bound
    exponentiates the mean-value estimate for log theta', replacing the
    unknown intermediate point by the supremum of theta''*theta/theta'^2
    over the enclosed radial interval:

        ratio <= exp((c2 - c1)/c1 * sup B),   B = theta''*theta/theta'^2.

    The ratio is always >= 1 because theta' is non-decreasing.
    """
    th_start = profile.theta_range[0]
    if not (th_start < c1 < c2):
        raise ProfileError(f"need theta(r0) < c1 < c2, got {th_start:.6g}, {c1}, {c2}")
    scale = math.exp(t / n)
    r1 = invert_theta(profile, c1 * scale) if c1 * scale <= profile.theta_range[1] else None
    if r1 is None or c2 * scale > profile.theta_range[1] * (1.0 + 1e-12):
        t_exit = n * math.log(profile.theta_range[1] / c2)
        raise DomainExit(t_exit, f"round solutions leave the domain at t={t_exit:.6g}")
    r2 = invert_theta(profile, min(c2 * scale, profile.theta_range[1]))

    th1_lo = profile.eval(r1)[1]
    th1_hi = profile.eval(r2)[1]
    ratio = th1_hi / th1_lo

    rs = np.linspace(r1, r2, samples)
    th, th1, th2, _ = profile.eval(rs)
    sup_b = float(np.max(th2 * th / th1**2))
    bound = math.exp((c2 - c1) / c1 * sup_b)
    return ratio, bound


def rescaling_integrability(
    profile: WarpingProfile, n: int, t_max: float
) -> tuple[float, str]:
    """Integral of t -> theta'^{-2} along the round solution from the domain
    start, with a divergence verdict.

    The integrand is evaluated on [0, t_max] by adaptive quadrature.  The
    verdict is "diverging" when the partial integrals over the last three
    dyadic windows [t_max/16, t_max/8], ..., [t_max/2, t_max] fail to
    contract geometrically (every consecutive ratio > 0.5), else
    "converging".  A diverging integral is the regime in which the weighted
    graph gradient is driven all the way to zero.
    """
    if t_max < 0.0:
        raise ValueError("t_max must be non-negative")
    r_start = profile.r0
    t_exit = barrier_exit_time(profile, r_start, n)
    if t_max > t_exit:
        raise DomainExit(t_exit, f"round solution exits the domain at t={t_exit:.6g} < t_max")
    if t_max == 0.0:
        return 0.0, "converging"

    def integrand(t):
        r = barrier(profile, r_start, t, n)
        return 1.0 / profile.eval(r)[1] ** 2

    total, _ = quad(integrand, 0.0, t_max, limit=200)
    edges = [t_max / 16.0, t_max / 8.0, t_max / 4.0, t_max / 2.0, t_max]
    windows = [quad(integrand, a, b, limit=200)[0] for a, b in zip(edges[:-1], edges[1:])]
    ratios = [w2 / w1 if w1 > 0.0 else math.inf for w1, w2 in zip(windows[:-1], windows[1:])]
    diverging = all(rho > 0.5 for rho in ratios)
    return float(total), "diverging" if diverging else "converging"
