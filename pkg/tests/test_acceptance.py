"""Acceptance gate: every criterion at its stated tolerance, one test each.

Each passing test prints one PASS line; the final criterion is asserted exactly
as stated and documents its own failure analysis in the assertion message.
"""

import numpy as np
import pytest

from helpers import frac, load_csv

from drbem1d.assembly import assemble_drbem, harmonic_identity_check
from drbem1d.cli import cmd_reproduce
from drbem1d.problems import (
    make_fitzhugh_nagumo,
    make_generalized_fisher,
    make_generalized_fn,
    residual_check,
    transcribed_fisher_wave,
)
from drbem1d.rbf import (
    Grid,
    assemble_interpolation,
    interpolation_coefficients,
    phi,
    psi,
)
from drbem1d.stepping import (
    StepConfig,
    back_substitution_gap,
    build_level_system,
    corrector_solve,
    run,
)
from drbem1d.verification import compute_errors, fd_oracle

TAU = 1e-3


@pytest.fixture(scope="session")
def bench_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("bench")


def _reproduce(name, bench_dir):
    status = cmd_reproduce(name, bench_dir)
    assert status == 0, f"reproduce {name} reported row failures"
    _, rows = load_csv(bench_dir / f"{name}.csv")
    return rows


@pytest.fixture(scope="session")
def table1_rows(bench_dir):
    return _reproduce("table1", bench_dir)


@pytest.fixture(scope="session")
def table2_rows(bench_dir):
    return _reproduce("table2", bench_dir)


@pytest.fixture(scope="session")
def table3_rows(bench_dir):
    return _reproduce("table3", bench_dir)


@pytest.fixture(scope="session")
def fig5_rows(bench_dir):
    return _reproduce("fig5", bench_dir)


@pytest.fixture(scope="session")
def cross_runs():
    """The three examples at h = 1/16, tau = 1e-3, marched to t = 1, plus the
    finite-difference oracle on the same grid and the rebuilt final level."""
    problems = {
        "bistable_kink": make_fitzhugh_nagumo(0.75, a=-10.0, b=10.0, horizon=1.0),
        "oscillating_kink": make_generalized_fn(1.0),
        "logistic_front": make_generalized_fisher(1.0),
    }
    cfg = StepConfig(tau=TAU)
    out = {}
    for name, problem in problems.items():
        grid = Grid.with_spacing(problem.a, problem.b, 1.0 / 16.0)
        ops = assemble_drbem(grid, assemble_interpolation(grid))
        traj = run(problem, grid, cfg, 1.0, snapshots=[1.0 - TAU, 1.0], ops=ops)
        state_prev, state_final = traj.states
        exact = np.asarray(problem.exact(grid.nodes, 1.0), dtype=float)
        oracle = fd_oracle(problem, grid.n, TAU, 1.0)
        out[name] = {
            "problem": problem,
            "grid": grid,
            "ops": ops,
            "cfg": cfg,
            "state_prev": state_prev,
            "state_final": state_final,
            "err_drbem": compute_errors(state_final.u, exact, time=1.0).l_inf,
            "err_fd": compute_errors(oracle, exact, time=1.0).l_inf,
            "mutual": float(np.max(np.abs(state_final.u[1:-1] - oracle[1:-1]))),
            "iters_max": max(traj.level_iterations),
        }
    return out


def test_criterion_1_table3_quantitative_reproduction(table3_rows):
    assert len(table3_rows) == 6
    computed = [float(row["l_inf"]) for row in table3_rows]
    reference = [float(row["l_inf_reference"]) for row in table3_rows]
    for got, ref in zip(computed, reference):
        assert abs(got - ref) / ref <= 0.25, f"L_inf {got} deviates >25% from {ref}"
    ratios = [computed[i] / computed[i + 1] for i in range(5)]
    for ratio in ratios:
        assert 1.8 <= ratio <= 2.2, f"tau-halving ratio {ratio} outside [1.8, 2.2]"
    print(
        "criterion 1 PASS: tau sweep matches reference within "
        f"{max(abs(g - r) / r for g, r in zip(computed, reference)) * 100:.1f}%, "
        f"ratios {[f'{r:.2f}' for r in ratios]}"
    )


def test_criterion_2_table2_quantitative_reproduction(table2_rows):
    assert len(table2_rows) == 6
    computed = [float(row["l_inf"]) for row in table2_rows]
    reference = [float(row["l_inf_reference"]) for row in table2_rows]
    for got, ref in zip(computed, reference):
        assert abs(got - ref) / ref <= 0.25
    for coarse, fine in zip(computed, computed[1:]):
        assert fine < coarse, "L_inf must decrease strictly as h halves"
    plateau = abs(computed[-1] - computed[-2]) / computed[-2]
    assert plateau <= 0.10, f"no plateau: last two rows differ by {plateau * 100:.1f}%"
    print(
        "criterion 2 PASS: h sweep within "
        f"{max(abs(g - r) / r for g, r in zip(computed, reference)) * 100:.1f}% of "
        f"reference, plateau gap {plateau * 100:.1f}%"
    )


def test_criterion_3_table1_trend_reproduction(table1_rows):
    assert len(table1_rows) == 15
    by_tau = {}
    for row in table1_rows:
        by_tau.setdefault(row["tau"], []).append(row)
    assert sorted(by_tau) == ["1/1000", "1/2000", "1/500"]
    for tau_label, rows in by_tau.items():
        values = [float(row["l_inf"]) for row in rows]
        assert [frac(row["h"]) for row in rows] == [1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64]
        for coarse, fine in zip(values, values[1:]):
            assert fine < coarse, f"h-refinement not monotone at tau = {tau_label}"
    for h_label in ("1/16", "1/32", "1/64"):
        column = [
            float(next(r for r in by_tau[t] if r["h"] == h_label)["l_inf"])
            for t in ("1/500", "1/1000", "1/2000")
        ]
        assert column[0] > column[1] > column[2], (
            f"tau-refinement not monotone at h = {h_label}: {column}"
        )
    print("criterion 3 PASS: monotone in h for all three tau, and in tau for h <= 1/16")


def _order_stats(problem, points, coarse_kwargs, fine_kwargs, floor):
    orders = []
    coarse_vals, fine_vals = [], []
    for x, t in points:
        r_coarse = abs(residual_check(problem, problem.exact, x, t, 1e-2, **coarse_kwargs))
        r_fine = abs(residual_check(problem, problem.exact, x, t, 1e-2, **fine_kwargs))
        coarse_vals.append(r_coarse)
        fine_vals.append(r_fine)
        if r_fine > floor:
            orders.append(np.log2(r_coarse / r_fine))
    aggregate = np.log2(max(coarse_vals) / max(fine_vals))
    return np.asarray(orders), float(aggregate)


def test_criterion_4_exact_solution_residual_orders():
    rng = np.random.default_rng(20240817)
    cases = [
        ("bistable_kink", make_fitzhugh_nagumo(0.75, a=-10.0, b=10.0, horizon=1.0), 3.0),
        ("oscillating_kink", make_generalized_fn(1.0), 0.6),
    ]
    for name, problem, half_width in cases:
        points = [
            (rng.uniform(-half_width, half_width), rng.uniform(0.15, 0.85))
            for _ in range(20)
        ]
        x_orders, x_aggregate = _order_stats(
            problem, points,
            dict(x_step=0.16, t_step=1e-5), dict(x_step=0.08, t_step=1e-5),
            floor=1e-13,
        )
        assert len(x_orders) >= 15
        assert np.median(x_orders) >= 3.6, f"{name}: x-order {np.median(x_orders)}"
        assert x_aggregate >= 3.6

        t_orders, t_aggregate = _order_stats(
            problem, points,
            dict(x_step=5e-4, t_step=0.02), dict(x_step=5e-4, t_step=0.01),
            floor=1e-12,
        )
        assert len(t_orders) >= 15
        assert np.median(t_orders) >= 1.8, f"{name}: t-order {np.median(t_orders)}"
        assert t_aggregate >= 1.8
        print(
            f"criterion 4 PASS ({name}): x-order median "
            f"{np.median(x_orders):.2f}, t-order median {np.median(t_orders):.2f}"
        )


def test_criterion_4_front_formula_outcome_recorded():
    # the transcribed front stalls at O(1e-2); the corrected wave number
    # sqrt(2 alpha + 4) passes at stencil order -> corrected form is in the catalog
    fisher = make_generalized_fisher(1.0)
    candidate = transcribed_fisher_wave(1.0)
    stalled_coarse = abs(residual_check(fisher, candidate, 0.3, 0.5, 1e-2))
    stalled_fine = abs(residual_check(fisher, candidate, 0.3, 0.5, 5e-3))
    assert stalled_fine > 1e-3 and stalled_coarse / stalled_fine < 2.0
    ok_coarse = abs(residual_check(fisher, fisher.exact, 0.3, 0.5, 1e-2))
    ok_fine = abs(residual_check(fisher, fisher.exact, 0.3, 0.5, 5e-3))
    assert ok_coarse / ok_fine >= 3.5 and ok_fine < 1e-5
    print(
        "criterion 4 RECORD: transcribed front rejected "
        f"(residual stalls at {stalled_fine:.2e}); corrected wave validated "
        f"(residual {ok_fine:.2e}, order {np.log2(ok_coarse / ok_fine):.2f})"
    )


def test_criterion_5_assembly_property_suite():
    rng = np.random.default_rng(5)
    worst_harmonic = 0.0
    for n in (3, 9, 33):
        grid = Grid.uniform(0.0, 1.0, n)
        ops = assemble_drbem(grid, assemble_interpolation(grid))
        for _ in range(10):
            p, q = rng.uniform(-4.0, 4.0, size=2)
            worst_harmonic = max(worst_harmonic, harmonic_identity_check(ops, grid, p, q))
    assert worst_harmonic <= 1e-12

    radii = np.linspace(0.05, 2.95, 50)
    step = 1e-4
    second = (psi(radii + step) - 2.0 * psi(radii) + psi(radii - step)) / step**2
    psi_defect = float(np.max(np.abs(second - phi(radii)) / phi(radii)))
    assert psi_defect <= 1e-5

    grid = Grid.uniform(-1.0, 1.0, 33)
    interp = assemble_interpolation(grid)
    data = rng.standard_normal(33)
    alpha = interpolation_coefficients(interp, data)
    exactness = float(np.max(np.abs(interp.phi_matrix @ alpha - data)))
    assert exactness <= 1e-10 * float(np.max(np.abs(data)))

    v = rng.standard_normal(33)
    round_trip = float(np.max(np.abs(interp.solve(interp.phi_matrix @ v) - v)))
    assert round_trip <= 1e-10 * float(np.max(np.abs(v)))
    print(
        f"criterion 5 PASS: harmonic {worst_harmonic:.1e}, psi'' defect "
        f"{psi_defect:.1e}, interpolation {exactness:.1e}, round trip {round_trip:.1e}"
    )


def test_criterion_6_oracle_cross_check(cross_runs):
    for name, data in cross_runs.items():
        assert data["err_drbem"] < 1e-2, f"{name}: solver did not converge to the wave"
        assert data["err_fd"] < 1e-2, f"{name}: oracle did not converge to the wave"
        bound = 5.0 * max(data["err_drbem"], data["err_fd"])
        assert data["mutual"] <= bound, (
            f"{name}: solver/oracle distance {data['mutual']:.3e} exceeds {bound:.3e}"
        )
        # reverse triangle inequality ties the three distances together
        assert abs(data["err_drbem"] - data["err_fd"]) <= data["mutual"] + 1e-12
        print(
            f"criterion 6 PASS ({name}): solver {data['err_drbem']:.2e}, "
            f"oracle {data['err_fd']:.2e}, mutual {data['mutual']:.2e}"
        )


def test_criterion_7_corrector_behavior(cross_runs, table1_rows, table2_rows, table3_rows):
    # vanishing nonlinear part: exactly two solves, zero successive difference
    from drbem1d.problems import CoefficientSet, PdeProblem, ReactionTerm

    heat = PdeProblem(
        coeffs=CoefficientSet.constant(0.0, 1.0, 0.0),
        reaction=ReactionTerm(0.0, lambda u: 0.0 * u, lambda u: 0.0 * u),
        a=0.0, b=1.0, horizon=1.0,
        initial=lambda x: x,
        bc_left=lambda t: 0.0,
        bc_right=lambda t: 1.0,
    )
    grid = Grid.uniform(0.0, 1.0, 17)
    traj = run(heat, grid, StepConfig(tau=0.01, epsilon=1e-300), 0.05)
    assert traj.level_iterations == [2] * 5

    for rows in (table1_rows, table2_rows, table3_rows):
        assert all(int(row["iters_max"]) < 100 for row in rows)

    for name, data in cross_runs.items():
        assert data["iters_max"] < 100
        system = build_level_system(
            data["problem"], data["grid"], data["ops"], data["cfg"], 1.0,
            data["state_prev"].u,
        )
        state, _ = corrector_solve(system, data["problem"], data["cfg"],
                                   data["state_prev"].u)
        np.testing.assert_allclose(state.u, data["state_final"].u, atol=1e-13)
        gap = back_substitution_gap(system, data["problem"], state)
        assert gap <= 10.0 * data["cfg"].epsilon, f"{name}: gap {gap:.3e}"
        print(f"criterion 7 PASS ({name}): iters_max {data['iters_max']}, gap {gap:.1e}")


def test_criterion_8_fig5_error_monotone_in_alpha(fig5_rows):
    assert [int(row["alpha"]) for row in fig5_rows] == [1, 2, 3, 4, 5, 6]
    final_errors = [float(row["l_inf"]) for row in fig5_rows]
    nondecreasing = all(a <= b for a, b in zip(final_errors, final_errors[1:]))
    assert nondecreasing, (
        "final-time L_inf is not monotone nondecreasing in alpha: "
        f"{[f'{e:.3e}' for e in final_errors]}. The front speed "
        "(alpha+4)/sqrt(2 alpha+4) exceeds 2.3 for alpha >= 4, so those fronts "
        "leave [-2, 2] before t = 1 and the remaining field is nearly flat; the "
        "error while the front is inside the domain (l_inf_peak column of "
        "fig5.csv) does grow monotonically with alpha."
    )
    print("criterion 8 PASS: final-time errors monotone in alpha")


def test_fig5_peak_error_monotone_in_alpha(fig5_rows):
    # documents the attainable form of the growth-in-alpha claim: the maximum
    # error over the run grows monotonically even though the final-time error
    # does not (fast fronts exit the domain before t = 1)
    peaks = [float(row["l_inf_peak"]) for row in fig5_rows]
    assert all(a <= b for a, b in zip(peaks, peaks[1:])), peaks
    print(
        "fig5 peak-over-run errors monotone in alpha: "
        f"{[f'{p:.2e}' for p in peaks]}"
    )
