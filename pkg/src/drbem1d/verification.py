"""Error metrics, an independent finite-difference oracle, and convergence sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from .exceptions import ConvergenceError, SolverError
from .problems import PdeProblem
from .rbf import Grid, assemble_interpolation
from .assembly import assemble_drbem
from .stepping import MU_FLOOR, StepConfig, level_index, run


@dataclass(frozen=True)
class ErrorReport:
    """Interior-node error norms against a reference solution at one time."""

    l_inf: float
    rms: float
    n_interior: int
    time: float


def compute_errors(numeric, exact_at_nodes, time=math.nan) -> ErrorReport:
    """L-infinity and RMS errors over the interior nodes only.

    The endpoints carry imposed boundary values and are excluded; the RMS
    denominator is the number of compared (interior) nodes.
    """
    numeric = np.asarray(numeric, dtype=float)
    exact = np.asarray(exact_at_nodes, dtype=float)
    if numeric.shape != exact.shape:
        raise ValueError(f"length mismatch: {numeric.shape} vs {exact.shape}")
    if numeric.ndim != 1 or numeric.size < 3:
        raise ValueError("need at least 3 nodes")
    e = exact[1:-1] - numeric[1:-1]
    return ErrorReport(
        l_inf=float(np.max(np.abs(e))),
        rms=float(np.sqrt(np.mean(e * e))),
        n_interior=int(e.size),
        time=float(time),
    )


def fd_oracle(problem: PdeProblem, n_nodes, tau, t_end, epsilon=1e-10, max_iters=100):
    """Backward-Euler / three-point central-difference solution on a uniform grid.

    Completely independent of the boundary-integral pipeline; only the nonlinear
    policy is shared (linear reaction part implicit, remainder lagged under the
    same successive-solve stopping rule), so discrepancies between the two
    solvers isolate the spatial discretization.
    """
    n = int(n_nodes)
    if n < 3:
        raise ValueError("need at least 3 nodes")
    x = np.linspace(problem.a, problem.b, n)
    h = (problem.b - problem.a) / (n - 1)
    n_levels = level_index(float(t_end), float(tau))

    u = np.asarray(problem.initial(x), dtype=float).copy()
    if u.shape != x.shape:
        u = np.array([float(problem.initial(xi)) for xi in x])
    u[0] = float(problem.bc_left(0.0))
    u[-1] = float(problem.bc_right(0.0))

    lam = problem.reaction.linear_slope
    nonlinear = problem.reaction.nonlinear
    m = n - 2
    for k in range(1, n_levels + 1):
        t_n = k * float(tau)
        nu_n = float(problem.coeffs.nu(t_n))
        mu_n = float(problem.coeffs.mu(t_n))
        eta_n = float(problem.coeffs.eta(t_n))
        if abs(mu_n) <= MU_FLOOR:
            raise SolverError(f"diffusion coefficient mu({t_n:g}) = {mu_n:g} is unusably small")

        lower = -nu_n / (2.0 * h) - mu_n / (h * h)
        diag = 1.0 / tau + 2.0 * mu_n / (h * h) - eta_n * lam
        upper = nu_n / (2.0 * h) - mu_n / (h * h)
        banded = np.zeros((3, m))
        banded[0, 1:] = upper
        banded[1, :] = diag
        banded[2, :-1] = lower

        g_left = float(problem.bc_left(t_n))
        g_right = float(problem.bc_right(t_n))
        base = u[1:-1] / tau
        base[0] -= lower * g_left
        base[-1] -= upper * g_right

        u_tilde = u
        u_last = None
        diff = math.inf
        for _ in range(max_iters):
            rhs = base + eta_n * nonlinear(u_tilde[1:-1])
            interior = solve_banded((1, 1), banded, rhs)
            u_new = np.concatenate([[g_left], interior, [g_right]])
            if u_last is not None:
                diff = float(np.max(np.abs(u_new - u_last)))
                if diff <= epsilon:
                    u_last = u_new
                    break
            u_tilde = u_new
            u_last = u_new
        else:
            raise ConvergenceError(
                f"oracle corrector stalled at t = {t_n:g} (difference {diff:.3e})",
                time=t_n,
                last_diff=diff,
            )
        u = u_last
    return u


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    tau: float
    l_inf: float
    rms: float


@dataclass(frozen=True)
class ConvergenceTable:
    """Error rows of a refinement sweep plus observed orders between neighbours."""

    rows: tuple
    observed_orders: tuple


def observed_order(err_prev, err_cur, param_prev, param_cur) -> Optional[float]:
    """log(err ratio) / log(parameter ratio); None when either ratio degenerates."""
    if err_prev <= 0.0 or err_cur <= 0.0 or param_prev == param_cur:
        return None
    return float(math.log(err_prev / err_cur) / math.log(param_prev / param_cur))


def convergence_study(problem: PdeProblem, h_list, tau_list, t_end,
                      epsilon=1e-10, max_iters=100) -> ConvergenceTable:
    """One solver run per (tau, h) pair, with errors against the exact solution.

    Rows are emitted tau-major in the given order; the observed order between
    consecutive rows refers to whichever of h or tau changed (None at group
    boundaries or when both changed).
    """
    if problem.exact is None:
        raise ValueError("convergence study needs a problem with an exact solution")

    ops_cache = {}
    rows = []
    for tau in tau_list:
        cfg = StepConfig(tau=float(tau), epsilon=epsilon, max_corrector_iters=max_iters)
        for h in h_list:
            grid = Grid.with_spacing(problem.a, problem.b, float(h))
            if grid.n not in ops_cache:
                ops_cache[grid.n] = (grid, assemble_drbem(grid, assemble_interpolation(grid)))
            grid, ops = ops_cache[grid.n]
            traj = run(problem, grid, cfg, float(t_end), ops=ops)
            u = traj.states[-1].u
            exact = np.asarray(problem.exact(grid.nodes, float(t_end)), dtype=float)
            report = compute_errors(u, exact, time=float(t_end))
            rows.append(ConvergenceRow(h=grid.h, tau=float(tau), l_inf=report.l_inf,
                                       rms=report.rms))

    orders = [None]
    for prev, cur in zip(rows, rows[1:]):
        if prev.tau == cur.tau and prev.h != cur.h:
            orders.append(observed_order(prev.l_inf, cur.l_inf, prev.h, cur.h))
        elif prev.h == cur.h and prev.tau != cur.tau:
            orders.append(observed_order(prev.l_inf, cur.l_inf, prev.tau, cur.tau))
        else:
            orders.append(None)
    return ConvergenceTable(rows=tuple(rows), observed_orders=tuple(orders))
