"""Two-spin relaxation with cross relaxation (the Solomon equations).

In the low-polarization limit the Z expectations s1, s2 of two coupled spins
obey

    ds1/dt = -rho1 (s1 - s1_eq) - sigma (s2 - s2_eq)
    ds2/dt = -rho2 (s2 - s2_eq) - sigma (s1 - s1_eq)

Saturating spin 2 holds s2 at 0, after which s1 settles at
s1_eq + (sigma / rho1) s2_eq: the Overhauser enhancement.
"""

import dataclasses
import math

import numpy as np

from .error import ParameterError, StepTooLargeError

STABILITY_FACTOR = 0.1  # dt may be at most this over the fastest rate.


@dataclasses.dataclass(frozen=True)
class SolomonParams:
    """Relaxation rates (1/time) and equilibrium expectations of two spins.

    rho1 * rho2 >= sigma^2 keeps the relaxation matrix positive semidefinite,
    so free evolution can't run away from equilibrium.
    """

    rho1: float
    rho2: float
    sigma: float
    s1_eq: float
    s2_eq: float

    def __post_init__(self):
        problems = [
            f"{name} must be finite, got {getattr(self, name)!r}"
            for name in ("rho1", "rho2", "sigma", "s1_eq", "s2_eq")
            if not math.isfinite(getattr(self, name))
        ]
        if problems:
            raise ParameterError("; ".join(problems))
        if not self.rho1 > 0:
            problems.append(f"rho1 must be positive, got {self.rho1!r}")
        if not self.rho2 > 0:
            problems.append(f"rho2 must be positive, got {self.rho2!r}")
        if not problems and not self.rho1 * self.rho2 >= self.sigma**2:
            problems.append(
                f"rho1 * rho2 = {self.rho1 * self.rho2!r} is below sigma^2 = {self.sigma**2!r}"
            )
        for name in ("s1_eq", "s2_eq"):
            if not abs(getattr(self, name)) <= 1:
                problems.append(f"{name} must lie in [-1, 1], got {getattr(self, name)!r}")
        if problems:
            raise ParameterError("; ".join(problems))

    @property
    def max_rate(self):
        return max(self.rho1, self.rho2, abs(self.sigma))

    def relaxation_matrix(self):
        return np.array([[self.rho1, self.sigma], [self.sigma, self.rho2]])


@dataclasses.dataclass(frozen=True, eq=False)
class SpinTrajectory:
    """Sampled solution of the Solomon equations."""

    t: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    saturated: bool

    @property
    def mode(self):
        return "saturated" if self.saturated else "free"

    def columns(self):
        """The samples as a (len, 3) array of t, s1, s2 rows."""
        return np.column_stack((self.t, self.s1, self.s2))


def solomon_rhs(params, s1, s2, saturated=False):
    """Returns (ds1/dt, ds2/dt).

    With saturation, s2 is held at 0 and its derivative reported as 0.
    """
    if saturated:
        s2 = 0.0
    d1 = s1 - params.s1_eq
    d2 = s2 - params.s2_eq
    ds1 = -params.rho1 * d1 - params.sigma * d2
    ds2 = 0.0 if saturated else -params.rho2 * d2 - params.sigma * d1
    return ds1, ds2


def rk4_step(params, s1, s2, h, saturated=False):
    """One classical fourth-order Runge-Kutta step of size h."""
    k1 = solomon_rhs(params, s1, s2, saturated)
    k2 = solomon_rhs(params, s1 + h / 2 * k1[0], s2 + h / 2 * k1[1], saturated)
    k3 = solomon_rhs(params, s1 + h / 2 * k2[0], s2 + h / 2 * k2[1], saturated)
    k4 = solomon_rhs(params, s1 + h * k3[0], s2 + h * k3[1], saturated)
    return (
        s1 + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        s2 + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
    )


def check_step(params, t_end, dt):
    for name, value in (("end time", t_end), ("time step", dt)):
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value!r}")
    if not dt > 0:
        raise ParameterError(f"time step must be positive, got {dt!r}")
    limit = STABILITY_FACTOR / params.max_rate
    if dt > limit:
        raise StepTooLargeError(
            f"time step {dt!r} exceeds the stability limit {limit!r}"
        )
    if not t_end >= dt:
        raise ParameterError(f"end time {t_end!r} is shorter than the step {dt!r}")


def integrate(params, s1_0, s2_0, t_end, dt, saturated=False):
    """Integrates the Solomon equations from (s1_0, s2_0) over [0, t_end].

    Uses fixed steps of size dt; when t_end isn't a multiple of dt the last
    step gets shortened so the grid ends exactly at t_end. In saturated mode
    s2 is 0 throughout.
    """
    check_step(params, t_end, dt)
    if not (math.isfinite(s1_0) and math.isfinite(s2_0)):
        raise ParameterError(f"initial values must be finite, got ({s1_0!r}, {s2_0!r})")

    steps = math.ceil(t_end / dt - 1e-9)
    t = np.empty(steps + 1)
    s1 = np.empty(steps + 1)
    s2 = np.empty(steps + 1)

    y1, y2 = float(s1_0), 0.0 if saturated else float(s2_0)
    t[0], s1[0], s2[0] = 0.0, y1, y2

    for k in range(1, steps + 1):
        h = dt if k < steps else t_end - (steps - 1) * dt
        y1, y2 = rk4_step(params, y1, y2, h, saturated)
        t[k] = t_end if k == steps else k * dt
        s1[k], s2[k] = y1, y2

    return SpinTrajectory(t=t, s1=s1, s2=s2, saturated=saturated)


def exact_solution(params, s1_0, s2_0, t, saturated=False):
    """Closed-form solution at the times t, as an (s1, s2) pair of arrays.

    Free evolution decays along the eigenvectors of the relaxation matrix;
    saturated evolution is a single exponential towards
    steady_state_saturated().
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))

    if saturated:
        target = steady_state_saturated(params)
        s1 = target + (s1_0 - target) * np.exp(-params.rho1 * t)
        return s1, np.zeros_like(t)

    rates, vectors = np.linalg.eigh(params.relaxation_matrix())
    offset = np.array([s1_0 - params.s1_eq, s2_0 - params.s2_eq])
    modes = vectors.T @ offset
    decayed = vectors @ (modes[:, None] * np.exp(-rates[:, None] * t[None, :]))
    return params.s1_eq + decayed[0], params.s2_eq + decayed[1]


def steady_state_saturated(params):
    """Steady state of s1 with spin 2 saturated: s1_eq + (sigma/rho1) s2_eq."""
    return params.s1_eq + params.sigma / params.rho1 * params.s2_eq


def steady_state_free(params):
    """Steady state (s1, s2) without drive: the equilibrium values."""
    return params.s1_eq, params.s2_eq


def enhancement_factor(params):
    """Saturated over undriven steady-state s1, e.g. 1.5 for sigma/rho1 = 0.5
    and equal equilibria."""
    if params.s1_eq == 0:
        raise ParameterError("enhancement is undefined for s1_eq = 0")
    return steady_state_saturated(params) / params.s1_eq
