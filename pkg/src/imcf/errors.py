"""Exception types shared across the package."""


class ProfileError(ValueError):
    """Warping profile construction or evaluation failed."""


class MeanConvexityLost(RuntimeError):
    """Mean curvature dropped to (or below) the floor somewhere; the flow
    speed 1/H is no longer defined."""

    def __init__(self, t, h_min, message=None):
        self.t = float(t)
        self.h_min = float(h_min)
        super().__init__(message or f"mean convexity lost at t={t:.6g} (min H = {h_min:.3e})")


class DomainExit(RuntimeError):
    """The surface (or a barrier) left the radial working domain."""

    def __init__(self, t, message=None):
        self.t = float(t)
        super().__init__(message or f"radial domain exit at t={t:.6g}")


class FitUndefined(ValueError):
    """Decay fit cannot be performed on the requested window."""
