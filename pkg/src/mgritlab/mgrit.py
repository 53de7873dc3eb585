"""Multigrid-reduction-in-time iteration over a hierarchy of time grids.

Level l holds every m-th node of level l-1; the finest level is l = 0. Each
level carries an iterate u (one state per node), a right-hand side g (zero
on the finest level except node 0, which pins the initial condition), and a
one-step propagator Phi_l. The solved system per level is

    u^0 = g^0,   u^i = Phi_l(u^{i-1}) + g^i   (i >= 1).

Relaxation sweeps run chunkwise: F-relaxation recomputes the nodes strictly
between consecutive coarse nodes from the coarse node on their left;
C-relaxation recomputes each coarse node from its left neighbour. Chunks
never read what another chunk writes, so they advance as one batched
operation, and a parallelism degree only slices that batch across worker
threads; results are bitwise identical for any degree.

Coarsening is a full-approximation-scheme restriction: with i the coarse
node index and mi its fine counterpart,

    g_{l+1}^i = g_l^{mi} + Phi_l(u_l^{mi-1}) - Phi_{l+1}(u_l^{m(i-1)})

and the coarse iterate starts either as the injected fine value u_l^{mi} or
as the improved guess Phi_l(u_l^{mi-1}) + g_l^{mi} (the would-be C-update,
"last-step"). Interpolation injects coarse values onto their fine nodes and
finishes with one F-relaxation.

A V-cycle relaxes, restricts, recurses, and interpolates, solving the
coarsest level sequentially. An F-cycle first descends to the coarsest
level restricting at every step, then from the second-coarsest level up
interpolates and (except on the finest level) runs a V-cycle rooted there;
with two levels it degenerates to the V-cycle.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, PhysicalStateError
from .grid import SpatialGrid, TemporalGrid, Trajectory, rel_l2_spacetime_error

CYCLE_KINDS = ("v", "f")
RELAXATION_KINDS = ("f", "fcf")
GUESS_KINDS = ("injection", "last-step")
DEFAULT_DIVERGENCE_THRESHOLD = 1e10


@dataclass(frozen=True)
class MgritOptions:
    """Iteration controls for one multigrid-in-time solve."""

    n_levels: int
    m: int = 2
    cycle: str = "v"
    relaxation: str = "f"
    guess: str = "last-step"
    max_iters: int = 10
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD
    parallelism: int = 1

    def __post_init__(self):
        if self.n_levels < 2:
            raise ConfigError(f"need at least 2 levels, got {self.n_levels}")
        if self.m < 2:
            raise ConfigError(f"coarsening factor must be >= 2, got {self.m}")
        if self.cycle not in CYCLE_KINDS:
            raise ConfigError(f"unknown cycle '{self.cycle}'")
        if self.relaxation not in RELAXATION_KINDS:
            raise ConfigError(f"unknown relaxation '{self.relaxation}'")
        if self.guess not in GUESS_KINDS:
            raise ConfigError(f"unknown restriction guess '{self.guess}'")
        if self.max_iters < 0:
            raise ConfigError(f"max_iters must be >= 0, got {self.max_iters}")
        if self.divergence_threshold <= 0.0:
            raise ConfigError("divergence threshold must be positive")
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism}")


@dataclass
class MgritLevel:
    index: int
    dt: float
    n_intervals: int
    stepper: object
    u: np.ndarray  # (n_intervals + 1, D, N)
    g: np.ndarray


@dataclass
class ConvergenceRecord:
    """Per-iteration monitoring; row 0 describes the initial iterate.

    errors holds relative space-time errors against the serial reference
    (NaN when no reference was supplied, and from the diverging iteration
    on); residuals holds Euclidean norms of the finest-level residual.
    """

    errors: np.ndarray
    residuals: np.ndarray
    diverged: bool = False
    diverged_at: int | None = None

    @property
    def n_iterations(self) -> int:
        return max(0, len(self.errors) - 1)


def _chunk_slices(n_items: int, parts: int):
    parts = max(1, min(parts, n_items))
    bounds = [n_items * p // parts for p in range(parts + 1)]
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


class MgritHierarchy:
    """Owns the per-level arrays and runs cycles over them."""

    def __init__(self, steppers: Sequence, initial_state: np.ndarray,
                 time_grid: TemporalGrid, space_grid: SpatialGrid,
                 options: MgritOptions):
        n_levels, m = options.n_levels, options.m
        if len(steppers) != n_levels:
            raise ConfigError(
                f"{len(steppers)} steppers supplied for {n_levels} levels")
        if time_grid.n_steps % (m ** (n_levels - 1)) != 0:
            raise ConfigError(
                f"N_t = {time_grid.n_steps} is not divisible by "
                f"m^(levels-1) = {m ** (n_levels - 1)}")
        self.options = options
        self.time_grid = time_grid
        self.space_grid = space_grid
        initial_state = np.asarray(initial_state, float)
        self.levels: list[MgritLevel] = []
        for l in range(n_levels):
            n_int = time_grid.n_steps // (m ** l)
            shape = (n_int + 1,) + initial_state.shape
            if l == 0:
                u = np.broadcast_to(initial_state, shape).copy()
                g = np.zeros(shape)
                g[0] = initial_state
            else:
                u = np.zeros(shape)
                g = np.zeros(shape)
            self.levels.append(MgritLevel(index=l, dt=time_grid.dt * m ** l,
                                          n_intervals=n_int,
                                          stepper=steppers[l], u=u, g=g))
        self._executor = None

    # -- parallel plumbing ------------------------------------------------

    def _apply(self, work, n_items: int) -> None:
        """Run work(slice) over n_items, split across worker threads."""
        def guarded(sl):
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                work(sl)

        if self._executor is None or n_items < 2:
            guarded(slice(0, n_items))
            return
        slices = _chunk_slices(n_items, self.options.parallelism)
        # list() re-raises the first worker exception in this thread
        list(self._executor.map(guarded, slices))

    # -- level operations --------------------------------------------------

    def f_relax(self, l: int) -> None:
        """Recompute the nodes between coarse nodes from their left C-point."""
        level, m = self.levels[l], self.options.m
        starts = m * np.arange(level.n_intervals // m)

        def work(sl):
            base = starts[sl]
            state = level.u[base]
            for j in range(1, m):
                state = level.stepper.advance(state) + level.g[base + j]
                level.u[base + j] = state

        self._apply(work, len(starts))

    def c_relax(self, l: int) -> None:
        """Recompute each coarse node from its fine left neighbour."""
        level, m = self.levels[l], self.options.m
        targets = m * np.arange(1, level.n_intervals // m + 1)

        def work(sl):
            t = targets[sl]
            level.u[t] = level.stepper.advance(level.u[t - 1]) + level.g[t]

        self._apply(work, len(targets))

    def relax(self, l: int) -> None:
        self.f_relax(l)
        if self.options.relaxation == "fcf":
            self.c_relax(l)
            self.f_relax(l)

    def restrict(self, l: int) -> None:
        """Fill level l+1's rhs and starting iterate from level l."""
        fine, coarse = self.levels[l], self.levels[l + 1]
        m = self.options.m
        mi = m * np.arange(1, coarse.n_intervals + 1)
        coarse.g[0] = fine.u[0]
        coarse.u[0] = fine.u[0]

        def work(sl):
            idx = mi[sl]
            phi_fine = fine.stepper.advance(fine.u[idx - 1])
            psi_old = coarse.stepper.advance(fine.u[idx - m])
            coarse.g[idx // m] = fine.g[idx] + phi_fine - psi_old
            if self.options.guess == "last-step":
                coarse.u[idx // m] = phi_fine + fine.g[idx]
            else:
                coarse.u[idx // m] = fine.u[idx]

        self._apply(work, len(mi))

    def coarse_solve(self) -> None:
        """Sequential solve of the coarsest level (exact for that level)."""
        level = self.levels[-1]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            state = level.u[0]
            for i in range(1, level.n_intervals + 1):
                state = level.stepper.advance(state) + level.g[i]
                level.u[i] = state

    def interpolate(self, l: int) -> None:
        """Inject level l+1 onto level l's coarse nodes, then F-relax."""
        fine, coarse = self.levels[l], self.levels[l + 1]
        fine.u[::self.options.m] = coarse.u
        self.f_relax(l)

    # -- cycles -------------------------------------------------------------

    def v_cycle(self, l: int = 0) -> None:
        if l == self.options.n_levels - 1:
            self.coarse_solve()
            return
        self.relax(l)
        self.restrict(l)
        self.v_cycle(l + 1)
        self.interpolate(l)

    def f_cycle(self) -> None:
        n_levels = self.options.n_levels
        for l in range(n_levels - 1):
            self.relax(l)
            self.restrict(l)
        self.coarse_solve()
        for l in range(n_levels - 2, -1, -1):
            self.interpolate(l)
            if l > 0:
                self.v_cycle(l)

    def run_cycle(self) -> None:
        if self.options.cycle == "f":
            self.f_cycle()
        else:
            self.v_cycle(0)

    # -- monitoring ----------------------------------------------------------

    def residual_norm(self) -> float:
        """Euclidean norm of the finest-level residual g + Phi(u_prev) - u."""
        level = self.levels[0]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            predicted = level.stepper.advance(level.u[:-1])
            residual = level.g[1:] + predicted - level.u[1:]
            return float(np.linalg.norm(residual))

    def fine_values(self) -> np.ndarray:
        return self.levels[0].u


def mgrit_solve(steppers: Sequence, initial_state: np.ndarray,
                time_grid: TemporalGrid, space_grid: SpatialGrid,
                options: MgritOptions,
                reference: np.ndarray | None = None):
    """Iterate cycles until max_iters, recording convergence per iteration.

    reference, when given, is the serial trajectory array (n_nodes, D, N)
    errors are measured against. Divergence (non-finite iterate, a thrown
    physical-state error, or relative error past the threshold) is recorded,
    not raised: the offending and all later rows hold NaN.

    Returns (trajectory, record); with max_iters = 0 the record is empty and
    the trajectory is the initial iterate.
    """
    hierarchy = MgritHierarchy(steppers, initial_state, time_grid, space_grid,
                               options)
    if options.max_iters == 0:
        record = ConvergenceRecord(errors=np.empty(0), residuals=np.empty(0))
        return Trajectory(time_grid, space_grid, hierarchy.fine_values()), record

    def current_error() -> float:
        if reference is None:
            return np.nan
        with np.errstate(over="ignore", invalid="ignore"):
            return rel_l2_spacetime_error(hierarchy.fine_values(), reference)

    n_rows = options.max_iters + 1
    errors = np.full(n_rows, np.nan)
    residuals = np.full(n_rows, np.nan)
    diverged = False
    diverged_at = None
    errors[0] = current_error()
    residuals[0] = hierarchy.residual_norm()

    executor = None
    try:
        if options.parallelism > 1:
            executor = ThreadPoolExecutor(max_workers=options.parallelism)
            hierarchy._executor = executor
        for it in range(1, n_rows):
            try:
                hierarchy.run_cycle()
            except PhysicalStateError:
                diverged, diverged_at = True, it
                break
            err = current_error()
            resid = hierarchy.residual_norm()
            finite = np.all(np.isfinite(hierarchy.fine_values()))
            if not finite or (np.isfinite(err)
                              and err > options.divergence_threshold):
                diverged, diverged_at = True, it
                break
            if reference is not None and not np.isfinite(err):
                diverged, diverged_at = True, it
                break
            errors[it] = err
            residuals[it] = resid
    finally:
        hierarchy._executor = None
        if executor is not None:
            executor.shutdown(wait=True)

    record = ConvergenceRecord(errors=errors, residuals=residuals,
                               diverged=diverged, diverged_at=diverged_at)
    return Trajectory(time_grid, space_grid, hierarchy.fine_values()), record
