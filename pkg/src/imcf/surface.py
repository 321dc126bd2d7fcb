"""
Axisymmetric graphs over the n-sphere and their pointwise geometry.

A hypersurface is stored as a graph radius u(chi) over the polar angle
chi in [0, pi] on a uniform grid including both poles.  Axisymmetry makes
every admissible experiment one-dimensional: round slices, Legendre-mode
perturbations and off-center geodesic spheres all depend on chi only.

Derivatives use fourth-order central differences with even ghost
extension across the poles (u(-chi) = u(chi)), which enforces the pole
regularity u'(0) = u'(pi) = 0 exactly.  The angular principal curvature
contains cot(chi) * phi'; at the poles that removable singularity is
replaced by its limit phi''.

Two independent evaluation paths for the shape operator are provided:

``shape_operator``      differentiates the stored u values and obtains the
                        flat-parametrization derivatives phi', phi'' by the
                        chain rule;
``shape_operator_alt``  differentiates the composed samples phi(u_j)
                        directly, rebuilds the covariant Hessian of u,
                        converts it to the induced-metric Hessian and
                        raises the index with the induced metric.

The two agree to fourth order in the grid spacing; their disagreement is
a grid-convergence oracle used by the verification suite.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import eval_legendre

from .errors import ProfileError
from .profiles import WarpingProfile


class SphereGrid:
    """Uniform polar-angle grid chi_j = j*pi/N, j = 0..N, poles included.

    ``n`` is the hypersurface dimension (>= 2); the grid resolves the polar
    angle only, the remaining (n-1) angles are symmetric.
    """

    def __init__(self, n: int, N: int):
        if n < 2:
            raise ValueError("hypersurface dimension n must be >= 2")
        if N < 16:
            raise ValueError("node count N must be >= 16")
        self.n = int(n)
        self.N = int(N)
        self.chi = np.linspace(0.0, math.pi, self.N + 1)
        self.dchi = math.pi / self.N
        # cot(chi) on interior nodes; poles handled by their limits
        self._cot = np.zeros(self.N + 1)
        self._cot[1:-1] = np.cos(self.chi[1:-1]) / np.sin(self.chi[1:-1])

    def __repr__(self):
        return f"SphereGrid(n={self.n}, N={self.N})"


@dataclass
class GraphState:
    """Graph radius u over the grid at flow time t."""

    t: float
    u: np.ndarray

    def copy(self) -> "GraphState":
        return GraphState(self.t, self.u.copy())


@dataclass
class ShapeData:
    """Per-node geometric package of a graph hypersurface.

    ``grad2`` is the squared flat-parametrization gradient phi'^2, which
    coincides with v^2 - 1 by construction.  ``deficit`` is the distance of
    the principal curvatures from the umbilic slice value theta'/theta.
    """

    du: np.ndarray
    phi1: np.ndarray
    v: np.ndarray
    grad2: np.ndarray
    kappa_rad: np.ndarray
    kappa_tan: np.ndarray
    H: np.ndarray
    deficit: np.ndarray

    @property
    def h_min(self) -> float:
        return float(np.min(self.H))

    @property
    def mean_convex(self) -> bool:
        return self.h_min > 0.0


def _stencil4(values: np.ndarray, h: float):
    """Fourth-order first and second derivatives with even end extension."""
    p = np.concatenate([values[2:0:-1], values, values[-2:-4:-1]])
    d1 = (-p[4:] + 8.0 * p[3:-1] - 8.0 * p[1:-3] + p[:-4]) / (12.0 * h)
    d2 = (-p[4:] + 16.0 * p[3:-1] - 30.0 * p[2:-2] + 16.0 * p[1:-3] - p[:-4]) / (
        12.0 * h * h
    )
    return d1, d2


def derivatives(grid: SphereGrid, state: GraphState):
    """First and second chi-derivatives of the graph function."""
    return _stencil4(state.u, grid.dchi)


def _assemble(grid, profile, u, du, phi1, phi2, v):
    th, th1, _, _ = profile.eval(u)
    v2 = v * v
    kappa_rad = (th1 - phi2 / v2) / (v * th)
    ang = grid._cot * phi1
    ang[0] = phi2[0]
    ang[-1] = phi2[-1]
    kappa_tan = (th1 - ang) / (v * th)
    H = kappa_rad + (grid.n - 1) * kappa_tan
    slice_k = th1 / th
    deficit = np.maximum(np.abs(kappa_rad - slice_k), np.abs(kappa_tan - slice_k))
    return ShapeData(
        du=du,
        phi1=phi1,
        v=v,
        grad2=phi1 * phi1,
        kappa_rad=kappa_rad,
        kappa_tan=kappa_tan,
        H=H,
        deficit=deficit,
    )


def shape_operator(grid: SphereGrid, profile: WarpingProfile, state: GraphState) -> ShapeData:
    """Shape operator of the graph via chain-rule derivatives of u.

    With phi' = u'/theta and phi'' = (u'' - theta' u'^2 / theta)/theta:

        kappa_rad = (theta' - phi''/v^2) / (v theta)
        kappa_tan = (theta' - cot(chi) phi') / (v theta)

    evaluated at u; v^2 = 1 + phi'^2.  A state with min H <= 0 is still
    returned (callers decide how to treat loss of mean convexity).
    """
    u = state.u
    du, d2u = _stencil4(u, grid.dchi)
    th, th1, _, _ = profile.eval(u)
    phi1 = du / th
    phi2 = (d2u - th1 * du * du / th) / th
    v = np.sqrt(1.0 + phi1 * phi1)
    return _assemble(grid, profile, u, du, phi1, phi2, v)


def shape_operator_alt(
    grid: SphereGrid, profile: WarpingProfile, state: GraphState
) -> ShapeData:
    """Shape operator via the covariant Hessian of u and the induced metric.

    Independent path: differentiates the composed samples phi(u_j), rebuilds
    u', u'', forms the round-metric Hessian of u (radial u''; angular
    cot(chi) u', with the pole limit u''), converts it to the
    induced-metric Hessian and applies h = v(-Hess u + slice form), raising
    the index with the induced metric.  Numerically independent of
    :func:`shape_operator` at fourth order in the spacing.
    """
    u = state.u
    phi_samples = profile.phi(u)
    phi1, phi2 = _stencil4(phi_samples, grid.dchi)
    th, th1, _, _ = profile.eval(u)
    du = th * phi1
    d2u = th * (phi2 + th1 * phi1 * phi1)
    grad2 = phi1 * phi1
    v2 = 1.0 + grad2
    v = np.sqrt(v2)

    ang_u = grid._cot * du
    ang_u[0] = d2u[0]
    ang_u[-1] = d2u[-1]

    # induced-metric Hessian of u from the round-metric one
    hess_rad = (d2u - (th1 / th) * (2.0 * du * du - th * th * grad2)) / v2
    hess_ang = (ang_u + th * th1 * grad2) / v2

    slice_form = th * th1
    h_rad = v * (slice_form - hess_rad)
    h_ang = v * (slice_form - hess_ang)

    kappa_rad = h_rad / (th * th * v2)
    kappa_tan = h_ang / (th * th)
    H = kappa_rad + (grid.n - 1) * kappa_tan
    slice_k = th1 / th
    deficit = np.maximum(np.abs(kappa_rad - slice_k), np.abs(kappa_tan - slice_k))
    return ShapeData(
        du=du,
        phi1=phi1,
        v=v,
        grad2=grad2,
        kappa_rad=kappa_rad,
        kappa_tan=kappa_tan,
        H=H,
        deficit=deficit,
    )


def umbilicity_deficit(shape: ShapeData, profile: WarpingProfile, state: GraphState):
    """Supremum of the umbilicity deficit and of its theta'-weighted form."""
    th1 = profile.eval(state.u)[1]
    sup_deficit = float(np.max(shape.deficit))
    sup_weighted = float(np.max(th1 * shape.deficit))
    return sup_deficit, sup_weighted


# ---------------------------------------------------------------------------
# initial data


def round_state(grid: SphereGrid, r0: float) -> GraphState:
    return GraphState(0.0, np.full(grid.N + 1, float(r0)))


def legendre_state(grid: SphereGrid, r0: float, eps: float, l: int) -> GraphState:
    """Round graph of radius r0 perturbed by eps * P_l(cos chi)."""
    return GraphState(0.0, r0 + eps * eval_legendre(int(l), np.cos(grid.chi)))


def off_center_hyperbolic_sphere(
    grid: SphereGrid, k: float, rho: float, d: float
) -> GraphState:
    """Geodesic sphere of radius rho in curvature -k, center offset d.

    Solves the hyperbolic law of cosines per node,

        cosh(s rho) = cosh(s d) cosh(s u) + sinh(s d) sinh(s u) cos(chi),

    s = sqrt(k), by bracketed Newton iteration; on the symmetry axis
    u(0) = rho - d and u(pi) = rho + d.  d = 0 returns the round graph.
    """
    if not (rho > d >= 0.0):
        raise ValueError(f"need rho > d >= 0, got rho={rho}, d={d}")
    if k <= 0.0:
        raise ValueError("curvature scale k must be > 0")
    if d == 0.0:
        return round_state(grid, rho)
    s = math.sqrt(k)
    R, D = s * rho, s * d
    cosx = np.cos(grid.chi)
    target = math.cosh(R)

    lo = np.full(grid.N + 1, max(R - D, 1e-14))
    hi = np.full(grid.N + 1, R + D + 1e-12)
    x = np.full(grid.N + 1, R)
    for _ in range(80):
        g = math.cosh(D) * np.cosh(x) + math.sinh(D) * np.sinh(x) * cosx - target
        if np.all(np.abs(g) <= 1e-14 * target):
            break
        hi = np.where(g > 0.0, np.minimum(hi, x), hi)
        lo = np.where(g <= 0.0, np.maximum(lo, x), lo)
        gp = math.cosh(D) * np.sinh(x) + math.sinh(D) * np.cosh(x) * cosx
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(gp) > 0.0, g / gp, 0.0)
        x_new = x - step
        bad = (x_new <= lo) | (x_new >= hi) | ~np.isfinite(x_new)
        x = np.where(bad, 0.5 * (lo + hi), x_new)
    else:
        raise ProfileError("off-center sphere solve did not converge")
    return GraphState(0.0, x / s)


def off_center_euclidean_sphere(grid: SphereGrid, R: float, d: float) -> GraphState:
    """Euclidean sphere of radius R centered at distance d on the axis."""
    if not (R > d >= 0.0):
        raise ValueError(f"need R > d >= 0, got R={R}, d={d}")
    cosx = np.cos(grid.chi)
    sinx = np.sin(grid.chi)
    u = d * cosx + np.sqrt(R * R - d * d * sinx * sinx)
    return GraphState(0.0, u)


def state_from_csv(grid: SphereGrid, path: str) -> GraphState:
    """Initial data from a CSV with header chi,u, interpolated onto the grid."""
    chis, us = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["chi", "u"]:
            raise ProfileError(f"initial-data CSV needs header chi,u, got {reader.fieldnames}")
        for row in reader:
            chis.append(float(row["chi"]))
            us.append(float(row["u"]))
    chis = np.asarray(chis)
    us = np.asarray(us)
    if chis.size < 4 or np.any(np.diff(chis) <= 0.0):
        raise ProfileError("initial-data CSV needs >= 4 strictly increasing chi values")
    if chis[0] > 1e-9 or chis[-1] < math.pi - 1e-9:
        raise ProfileError("initial-data CSV must cover chi in [0, pi]")
    interp = PchipInterpolator(chis, us)
    return GraphState(0.0, interp(np.clip(grid.chi, chis[0], chis[-1])))


_SELECTOR = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


def make_initial(
    grid: SphereGrid, selector: str, profile: WarpingProfile | None = None
) -> GraphState:
    """Build initial data from a catalog selector string.

    Catalog: ``round(r0)``, ``legendre(r0, eps, l)``, ``offcenter_hyp(rho, d)``
    (requires a hyperbolic profile for the curvature scale) and
    ``from_csv(path)``.
    """
    m = _SELECTOR.match(selector)
    if not m:
        raise ValueError(f"cannot parse initial-data selector {selector!r}")
    name, raw = m.group(1), m.group(2)
    args = [a.strip() for a in raw.split(",")] if raw.strip() else []
    if name == "round":
        (r0,) = map(float, args)
        return round_state(grid, r0)
    if name == "legendre":
        r0, eps, l = float(args[0]), float(args[1]), int(float(args[2]))
        return legendre_state(grid, r0, eps, l)
    if name == "offcenter_hyp":
        rho, d = map(float, args)
        if profile is None or profile.spec.family != "hyperbolic":
            raise ValueError("offcenter_hyp initial data needs a hyperbolic profile")
        return off_center_hyperbolic_sphere(grid, profile.spec.k, rho, d)
    if name == "from_csv":
        (path,) = args
        return state_from_csv(grid, path)
    raise ValueError(f"unknown initial-data selector {name!r}")
