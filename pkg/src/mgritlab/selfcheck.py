"""Fast built-in verification suite behind `mgritlab verify`.

Each check re-derives an expected value from an independent construction
(closed forms, telescoping identities, exact solves) and compares the
package against it. The full oracle suite, including the symbolic table
derivation, lives in the test suite; this module is a quick field check
that needs nothing beyond the package's own dependencies.
"""
from __future__ import annotations

import tempfile
from pathlib import Path

import numpy as np

from .flux import FluxConfig, SemiDiscreteOperator, WenoConfig, lf_flux, roe_flux
from .grid import SpatialGrid, TemporalGrid, rel_l2_spacetime_error
from .harness import emit_csv, parse_config, run_sweep
from .mgrit import MgritOptions, mgrit_solve
from .models import Burgers, ShallowWater, make_model
from .serial import solve_serial
from .stepper import (ComposedStepper, MatchedLFFine, RungeKuttaStepper,
                      step_fe, step_ssprk2, step_ssprk3)
from .weno import build_tables, nonlinear_weights, reconstruct_left


def _check_weno_tables():
    tables = build_tables(2)
    frozen_c = np.array([[2, 5, -1], [-1, 5, 2], [2, -7, 11]]) / 6.0
    frozen_d = np.array([3, 6, 1]) / 10.0
    frozen_b = np.array([
        [[20, -31, 11], [-31, 50, -19], [11, -19, 8]],
        [[8, -13, 5], [-13, 26, -13], [5, -13, 8]],
        [[8, -19, 11], [-19, 50, -31], [11, -31, 20]],
    ]) / 6.0
    ok = (np.array_equal(tables.coeffs, frozen_c)
          and np.array_equal(tables.weights, frozen_d)
          and np.array_equal(tables.smoothness, frozen_b))
    return ok, "k=2 tables equal the frozen rational values"


def _check_weno_exactness():
    # candidate combination must reproduce smooth data at high order
    rng = np.random.default_rng(7)
    worst = 0.0
    for k in (1, 2, 3):
        tables = build_tables(k)
        coeffs = rng.normal(size=k + 1)  # polynomial of degree k
        n = 2 * k + 1
        edges = np.arange(n + 1) - k  # cell i spans [0, 1]
        prim = np.polynomial.polynomial.polyint(coeffs)
        averages = np.diff(np.polynomial.polynomial.polyval(edges, prim))
        exact = np.polynomial.polynomial.polyval(1.0, coeffs)
        got = reconstruct_left(tables, 1e-6, averages[None, :])[0]
        worst = max(worst, abs(got - exact) / max(1.0, abs(exact)))
    return worst < 1e-7, f"degree-k data reconstructed, worst rel err {worst:.2e}"


def _check_weights_convex():
    rng = np.random.default_rng(11)
    for k in (0, 1, 2, 3):
        tables = build_tables(k)
        win = rng.normal(size=(100, 2 * k + 1))
        w = nonlinear_weights(tables, 1e-6, win)
        if np.any(w < 0) or np.max(np.abs(np.sum(w, axis=-1) - 1.0)) > 1e-13:
            return False, f"weights not convex for k={k}"
    return True, "nonlinear weights stay convex"


def _check_amplification():
    lam = -0.731
    rhs = lambda u: lam * u
    worst = 0.0
    for dt in (0.23, 0.057):
        z = lam * dt
        u0 = np.array([[1.0]])
        worst = max(worst, abs(step_fe(rhs, u0, dt)[0, 0] - (1 + z)))
        worst = max(worst, abs(step_ssprk2(rhs, u0, dt)[0, 0]
                               - (1 + z + z * z / 2)))
        worst = max(worst, abs(step_ssprk3(rhs, u0, dt)[0, 0]
                               - (1 + z + z * z / 2 + z ** 3 / 6)))
    return worst < 1e-14, f"linear amplification, worst err {worst:.2e}"


def _random_state(model, rng, n):
    if isinstance(model, Burgers):
        return rng.uniform(-2.0, 2.0, size=(1, n))
    if isinstance(model, ShallowWater):
        h = rng.uniform(0.5, 3.0, size=n)
        return np.stack([h, h * rng.uniform(-1.0, 1.0, size=n)])
    rho = rng.uniform(0.5, 3.0, size=n)
    vel = rng.uniform(-1.0, 1.0, size=n)
    p = rng.uniform(0.5, 3.0, size=n)
    energy = p / (model.gamma - 1.0) + 0.5 * rho * vel * vel
    return np.stack([rho, rho * vel, energy])


def _smooth_state(model, rng, x):
    """Random smooth admissible field; overshoot-safe for reconstruction."""
    def wave(base, amp):
        return base + amp * np.sin(2.0 * np.pi * x + rng.uniform(0, 2 * np.pi))

    if isinstance(model, Burgers):
        return wave(rng.uniform(-0.5, 0.5), 0.8)[None, :]
    if isinstance(model, ShallowWater):
        h = wave(1.5, 0.4)
        return np.stack([h, h * wave(0.0, 0.4)])
    rho = wave(1.5, 0.4)
    vel = wave(0.0, 0.4)
    p = wave(1.5, 0.4)
    energy = p / (model.gamma - 1.0) + 0.5 * rho * vel * vel
    return np.stack([rho, rho * vel, energy])


def _check_conservation():
    rng = np.random.default_rng(23)
    worst = 0.0
    for kind in ("burgers", "shallow-water", "euler"):
        model = make_model(kind)
        grid = SpatialGrid(1.0, 48)
        for flux_kind in ("lf", "roe"):
            op = SemiDiscreteOperator(model, grid, FluxConfig(
                kind=flux_kind, weno=WenoConfig(order=5)))
            state = _smooth_state(model, rng, grid.cell_centers())
            stepped = RungeKuttaStepper(op.rhs, 1e-4, 3).advance(state)
            drift = np.abs(np.sum(stepped, axis=-1) - np.sum(state, axis=-1))
            scale = np.maximum(np.abs(np.sum(state, axis=-1)), 1.0)
            worst = max(worst, float(np.max(drift / scale)))
    return worst < 1e-12, f"cell sums preserved, worst drift {worst:.2e}"


def _check_roe_linearisation():
    rng = np.random.default_rng(5)
    worst = 0.0
    for kind in ("shallow-water", "euler"):
        model = make_model(kind)
        ul = _random_state(model, rng, 200)
        ur = _random_state(model, rng, 200)
        lam, right, left = model.roe_eigen(ul, ur)
        strength = np.einsum("nkd,dn->nk", left, ur - ul)
        assembled = np.einsum("nk,ndk->dn", lam * strength, right)
        jump = model.flux(ur) - model.flux(ul)
        scale = np.maximum(np.max(np.abs(jump)), 1.0)
        worst = max(worst, float(np.max(np.abs(assembled - jump)) / scale))
    return worst < 1e-8, f"flux differences linearised, worst {worst:.2e}"


def _check_roe_upwind():
    model = Burgers()
    shock = roe_flux(model, np.array([[2.0]]), np.array([[0.0]]))[0, 0]
    transonic = roe_flux(model, np.array([[-1.0]]), np.array([[1.0]]))[0, 0]
    ok = abs(shock - 2.0) < 1e-14 and abs(transonic) < 1e-14
    return ok, f"shock flux {shock}, transonic flux {transonic}"


def _check_matched_fine():
    model = Burgers()
    grid = SpatialGrid(1.0, 64)
    dt = 0.3 * grid.dx
    rng = np.random.default_rng(3)
    u = rng.normal(size=(1, grid.n_cells))
    matched = MatchedLFFine(model, grid, dt).advance(u)
    op = SemiDiscreteOperator(model, grid, FluxConfig(
        kind="lf", weno=WenoConfig(order=1)))
    alpha = grid.dx / dt

    def rhs(state):
        left, right = op.interface_states(state)
        f = lf_flux(model, left, right, np.full(state.shape[:-2], alpha))
        return -(f - np.roll(f, 1, axis=-1)) / grid.dx

    euler_step = step_fe(rhs, u, dt)
    err = float(np.max(np.abs(matched - euler_step)))
    return err < 1e-12, f"matched fine vs FE+LF, max err {err:.2e}"


def _check_fixed_point():
    config_text = """
problem = burgers
ic = sin-moving
horizon = 0.2
n_x = 32
n_t = 64
n_levels = 3
stepper = ssprk3
weno_order = 3
flux = lf
max_iters = 1
"""
    config = parse_config(config_text)
    worst = 0.0
    from . import harness
    model = make_model(config.problem)
    sgrid = SpatialGrid(config.length, config.n_x)
    tgrid = TemporalGrid(config.horizon, config.n_t)
    state0 = harness.initial_state(config.ic, sgrid, config.length)
    steppers = harness.build_steppers(config, model, sgrid, tgrid)
    serial = solve_serial(steppers[0], state0, tgrid, sgrid, model)
    for cycle in ("v", "f"):
        for relaxation in ("f", "fcf"):
            for guess in ("injection", "last-step"):
                options = MgritOptions(n_levels=3, cycle=cycle,
                                       relaxation=relaxation, guess=guess,
                                       max_iters=1)
                from .mgrit import MgritHierarchy
                h = MgritHierarchy(steppers, state0, tgrid, sgrid, options)
                h.levels[0].u[:] = serial.trajectory.values
                h.run_cycle()
                err = rel_l2_spacetime_error(h.fine_values(),
                                             serial.trajectory.values)
                worst = max(worst, err)
    return worst < 1e-12, f"exact solutions stay fixed, worst {worst:.2e}"


def _check_two_level_exactness():
    model = Burgers()
    sgrid = SpatialGrid(1.0, 64)
    tgrid = TemporalGrid(0.2, 128)
    from .harness import initial_state
    state0 = initial_state("sin-moving", sgrid, 1.0)
    worst = 0.0
    for m in (2, 4):
        op = SemiDiscreteOperator(model, sgrid, FluxConfig(
            kind="lf", weno=WenoConfig(order=3)))
        fine = RungeKuttaStepper(op.rhs, tgrid.dt, 3)
        serial = solve_serial(fine, state0, tgrid, sgrid, model)
        options = MgritOptions(n_levels=2, m=m, max_iters=1)
        _, record = mgrit_solve([fine, ComposedStepper(fine, m)], state0,
                                tgrid, sgrid, options,
                                reference=serial.trajectory.values)
        worst = max(worst, record.errors[1])
    return worst < 1e-10, f"two-level exact coarse, worst {worst:.2e}"


def _check_determinism():
    config = parse_config("""
problem = burgers
ic = sin-moving
horizon = 0.25
n_x = 32
n_t = 64
n_levels = 3
stepper = ssprk2
weno_order = 3
flux = roe
max_iters = 4
sweep = weno_order
sweep_values = 1, 3
""")
    payloads = []
    with tempfile.TemporaryDirectory() as tmp:
        for parallelism in (1, 4):
            result = run_sweep(config, parallelism=parallelism)
            path = Path(tmp) / f"p{parallelism}.csv"
            emit_csv(result.table, path)
            payloads.append(path.read_bytes())
    return payloads[0] == payloads[1], "parallelism 1 vs 4 CSVs byte-identical"


CHECKS = [
    ("weno-tables", _check_weno_tables),
    ("weno-exactness", _check_weno_exactness),
    ("weno-weights", _check_weights_convex),
    ("stepper-amplification", _check_amplification),
    ("conservation", _check_conservation),
    ("roe-linearisation", _check_roe_linearisation),
    ("roe-upwind", _check_roe_upwind),
    ("matched-fine-equivalence", _check_matched_fine),
    ("mgrit-fixed-point", _check_fixed_point),
    ("mgrit-two-level-exactness", _check_two_level_exactness),
    ("determinism", _check_determinism),
]


def run_verification(out=print) -> bool:
    all_ok = True
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return all_ok
