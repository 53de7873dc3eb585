"""Explicit time steppers and the matched coarse-step operators.

Strong-stability-preserving Runge-Kutta steppers of orders 1..3 wrap any
semi-discrete right-hand side:

    order 1 (forward Euler):  u' = u + dt A(u)
    order 2:                  u1 = u + dt A(u)
                              u' = 1/2 u + 1/2 u1 + 1/2 dt A(u1)
    order 3:                  u1 = u + dt A(u)
                              u2 = 3/4 u + 1/4 u1 + 1/4 dt A(u1)
                              u' = 1/3 u + 2/3 u2 + 2/3 dt A(u2)

The matched family is specific to the scalar model on a periodic mesh. With
the neighbour average E(u)_i = (u_{i+1} + u_{i-1})/2 and the central
difference D(f)_i = (f_{i+1} - f_{i-1})/(2 dx), the fine step is the classic
one-step Lax-Friedrichs scheme

    Phi(u) = E u - dt D f(u),

algebraically equal to forward Euler with the LF interface flux at
dissipation speed dx/dt and first-order reconstruction. A coarse step that
emulates m fine steps is built by expanding the m-fold composition of Phi in
powers of dt and truncating:

    order 0:  E^m u - (m dt) D f(u)
    order 1:  E^m u - dt sum_{j=1..m} E^(j-1) D f(E^(m-j) u)

so the order-1 operator reproduces Phi^m up to O(dt^2) while costing m flux
evaluations instead of m full steps of the coarse-grid hierarchy's parent.
The rediscretised baseline uses the same one-step scheme with the coarse
step size: E u - (m dt) D f(u).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError
from .grid import SpatialGrid
from .models import Burgers, ConservationModel

STEPPER_KINDS = ("fe", "ssprk2", "ssprk3", "matched-lf-fine", "matched-lf-0",
                 "matched-lf-1", "rediscretized-lf")

_RK_ORDERS = {"fe": 1, "ssprk2": 2, "ssprk3": 3}


def step_fe(rhs: Callable, u: np.ndarray, dt: float) -> np.ndarray:
    return u + dt * rhs(u)


def step_ssprk2(rhs: Callable, u: np.ndarray, dt: float) -> np.ndarray:
    u1 = u + dt * rhs(u)
    return 0.5 * u + 0.5 * u1 + 0.5 * dt * rhs(u1)


def step_ssprk3(rhs: Callable, u: np.ndarray, dt: float) -> np.ndarray:
    u1 = u + dt * rhs(u)
    u2 = 0.75 * u + 0.25 * u1 + 0.25 * dt * rhs(u1)
    return u / 3.0 + (2.0 / 3.0) * u2 + (2.0 / 3.0) * dt * rhs(u2)


_RK_STEPS = {1: step_fe, 2: step_ssprk2, 3: step_ssprk3}


class RungeKuttaStepper:
    """SSP Runge-Kutta time stepper around a right-hand-side callable."""

    def __init__(self, rhs: Callable, dt: float, order: int):
        if order not in _RK_STEPS:
            raise ConfigError(f"no Runge-Kutta stepper of order {order}")
        if dt <= 0.0:
            raise ConfigError(f"time step must be positive, got {dt}")
        self.rhs = rhs
        self.dt = dt
        self.order = order
        self._step = _RK_STEPS[order]

    def advance(self, u: np.ndarray) -> np.ndarray:
        return self._step(self.rhs, u, self.dt)


def neighbor_average(u: np.ndarray) -> np.ndarray:
    """E(u)_i = (u_{i+1} + u_{i-1}) / 2 on the periodic last axis."""
    return 0.5 * (np.roll(u, -1, axis=-1) + np.roll(u, 1, axis=-1))


def central_difference(f: np.ndarray, dx: float) -> np.ndarray:
    """D(f)_i = (f_{i+1} - f_{i-1}) / (2 dx) on the periodic last axis."""
    return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)) / (2.0 * dx)


def _require_scalar_model(model: ConservationModel, kind: str) -> None:
    if not isinstance(model, Burgers):
        raise ConfigError(
            f"stepper '{kind}' is defined for the scalar model only, "
            f"got '{model.kind}'")


class MatchedLFFine:
    """One-step Lax-Friedrichs scheme Phi(u) = E u - dt D f(u)."""

    def __init__(self, model: ConservationModel, space_grid: SpatialGrid,
                 dt: float):
        _require_scalar_model(model, "matched-lf-fine")
        self.model = model
        self.dx = space_grid.dx
        self.dt = dt

    def advance(self, u: np.ndarray) -> np.ndarray:
        return neighbor_average(u) \
            - self.dt * central_difference(self.model.flux(u), self.dx)


class MatchedLFCoarse:
    """Truncated expansion of Phi^m, matching the fine scheme to the given
    order in dt; one application stands in for m_effective fine steps."""

    def __init__(self, model: ConservationModel, space_grid: SpatialGrid,
                 dt_fine: float, m_effective: int, order: int):
        _require_scalar_model(model, f"matched-lf-{order}")
        if order not in (0, 1):
            raise ConfigError(f"matched coarse operators exist for orders 0 "
                              f"and 1, got {order}")
        if m_effective < 1:
            raise ConfigError(f"m_effective must be >= 1, got {m_effective}")
        self.model = model
        self.dx = space_grid.dx
        self.dt_fine = dt_fine
        self.m_effective = m_effective
        self.order = order
        self.dt = dt_fine * m_effective

    def advance(self, u: np.ndarray) -> np.ndarray:
        m = self.m_effective
        if self.order == 0:
            averaged = u
            for _ in range(m):
                averaged = neighbor_average(averaged)
            return averaged - self.dt * central_difference(
                self.model.flux(u), self.dx)
        # order 1, Horner form: acc after the loop equals
        # sum_{j=1..m} E^(j-1) D f(E^(m-j) u) and v equals E^(m-1) u
        acc = central_difference(self.model.flux(u), self.dx)
        v = u
        for _ in range(m - 1):
            v = neighbor_average(v)
            acc = neighbor_average(acc) + central_difference(
                self.model.flux(v), self.dx)
        return neighbor_average(v) - self.dt_fine * acc


class RediscretizedLF:
    """The fine one-step scheme rebuilt with the coarse step size."""

    def __init__(self, model: ConservationModel, space_grid: SpatialGrid,
                 dt: float):
        _require_scalar_model(model, "rediscretized-lf")
        self.model = model
        self.dx = space_grid.dx
        self.dt = dt

    def advance(self, u: np.ndarray) -> np.ndarray:
        return neighbor_average(u) \
            - self.dt * central_difference(self.model.flux(u), self.dx)


class ComposedStepper:
    """Exact repeats-fold composition of another one-step operator.

    Useful as a reference coarse operator: composing the fine step m times
    reproduces the fine trajectory on the coarse nodes exactly, at the cost
    of m fine steps per application.
    """

    def __init__(self, inner, repeats: int):
        if repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {repeats}")
        self.inner = inner
        self.repeats = repeats
        self.dt = inner.dt * repeats

    def advance(self, u: np.ndarray) -> np.ndarray:
        for _ in range(self.repeats):
            u = self.inner.advance(u)
        return u


@dataclass(frozen=True)
class StepperSpec:
    """Names a stepper kind; m_effective matters for matched coarse kinds."""

    kind: str
    m_effective: int = 1

    def __post_init__(self):
        if self.kind not in STEPPER_KINDS:
            raise ConfigError(
                f"unknown stepper kind '{self.kind}', "
                f"expected one of {STEPPER_KINDS}")

    @property
    def order(self) -> int:
        """Formal accuracy order in dt (0 for the zeroth-order matched op)."""
        if self.kind in _RK_ORDERS:
            return _RK_ORDERS[self.kind]
        if self.kind == "matched-lf-0":
            return 0
        return 1


def make_stepper(spec: StepperSpec, model: ConservationModel,
                 space_grid: SpatialGrid, dt: float, rhs: Callable = None):
    """Build the stepper named by spec.

    Runge-Kutta kinds need a semi-discrete right-hand side; dt is the step
    the operator takes on its own level. Matched coarse kinds take the fine
    step size and emulate spec.m_effective fine steps per application.
    """
    if spec.kind in _RK_ORDERS:
        if rhs is None:
            raise ConfigError(f"stepper '{spec.kind}' needs a right-hand side")
        return RungeKuttaStepper(rhs, dt, _RK_ORDERS[spec.kind])
    if spec.kind == "matched-lf-fine":
        return MatchedLFFine(model, space_grid, dt)
    if spec.kind == "rediscretized-lf":
        return RediscretizedLF(model, space_grid, dt)
    order = 0 if spec.kind == "matched-lf-0" else 1
    return MatchedLFCoarse(model, space_grid, dt, spec.m_effective, order)
