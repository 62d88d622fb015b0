"""Critical-point solvers for the fourth-order vortex functional.

Two solutions are produced per problem:

* ``minimize_constrained`` — projected, preconditioned descent over the
  obstacle set {u >= u_lower}, with Barzilai-Borwein step seeding, Armijo
  line search and an optional matrix-free Newton polish once the iterate
  leaves the obstacle;
* ``mountain_pass`` — max-node steepest-descent deformation of a discrete
  path joining the local minimum to a far low-energy endpoint, followed by
  Newton refinement of the crest node.

``comparison_diagnostic`` reconstructs the smoothed comparison chain used
to certify that the minimizer stays strictly above the subsolution, and
``continuation`` tracks the family of minimizers along a decreasing eps
schedule down to the second-order eps = 0 limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from typing import NamedTuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, minres

from .grid import Field, Grid, h2_norm, norms
from .operators import bilaplacian, green_eps, laplacian
from .functional import EnergyBreakdown, Problem, energy, energy_and_gradient, gradient
from .subsolution import SubsolutionResult, build_subsolution

__all__ = [
    "SolveOptions",
    "SolveOutcome",
    "TraceRow",
    "ComparisonReport",
    "ContinuationReport",
    "minimize_constrained",
    "newton_refine",
    "mountain_pass",
    "comparison_diagnostic",
    "continuation",
    "default_grad_tol",
]


def default_grad_tol(lam: float) -> float:
    return 1e-8 * (1.0 + lam * lam)


@dataclass(frozen=True)
class SolveOptions:
    """Iteration limits, tolerances and step control shared by all solvers."""

    max_iters: int = 5000
    grad_tol: float | None = None  # None -> 1e-8 (1 + lam^2)
    step0: float = 1.0
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 60
    precondition: bool = True
    polish: bool = True
    polish_tol: float | None = None  # None -> 1e-3 (1 + lam^2)
    path_nodes: int = 41
    deform_iters: int = 400
    deform_tol: float | None = None  # None -> 1e-3 (1 + lam^2)
    far_offset: float = -40.0
    newton_iters: int = 20
    newton_fd_step: float = 1e-6
    newton_krylov_tol: float = 1e-3
    newton_krylov_maxiter: int = 300
    seed: int = 0

    def __post_init__(self) -> None:
        if self.path_nodes < 11 or self.path_nodes % 2 == 0:
            raise ValueError("path_nodes must be odd and >= 11")
        for name in ("grad_tol", "polish_tol", "deform_tol"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1 or self.deform_iters < 1 or self.newton_iters < 1:
            raise ValueError("iteration limits must be >= 1")
        if self.far_offset >= 0:
            raise ValueError("far_offset must be negative")

    def resolved_grad_tol(self, lam: float) -> float:
        return self.grad_tol if self.grad_tol is not None else default_grad_tol(lam)

    def resolved_polish_tol(self, lam: float) -> float:
        return self.polish_tol if self.polish_tol is not None else 1e-3 * (1.0 + lam * lam)

    def resolved_deform_tol(self, lam: float) -> float:
        return self.deform_tol if self.deform_tol is not None else 1e-3 * (1.0 + lam * lam)


class TraceRow(NamedTuple):
    iter: int
    energy: float
    grad_norm: float
    min_gap: float
    contact_fraction: float


@dataclass(frozen=True)
class SolveOutcome:
    """A converged (or stalled) critical-point candidate with diagnostics."""

    u: Field
    energy: EnergyBreakdown
    grad_norm: float
    iterations: int
    converged: bool
    kind: str  # "local_min" | "mountain_pass"
    min_gap: float | None = None
    contact_fraction: float | None = None
    path_energies: tuple | None = None
    near_degenerate: bool = False
    message: str = ""
    trace: tuple = ()


def _l2(grid: Grid, values: np.ndarray) -> float:
    return float(np.sqrt(np.sum(values * values) * grid.spacing**2))


def _precond(p: Problem, opts: SolveOptions):
    """Spectral multiplier 1/(eps^2 k^4 + k^2 + 1) as an array-to-array map."""
    if not opts.precondition:
        return lambda values: values
    g = p.grid
    mult = 1.0 / (p.eps**2 * g.k4 + g.k2 + 1.0)

    def apply(values: np.ndarray) -> np.ndarray:
        return np.fft.irfft2(np.fft.rfft2(values) * mult, s=values.shape)

    return apply


def _projected_gradient(g_vals: np.ndarray, contact: np.ndarray) -> np.ndarray:
    """Gradient off the contact set; only its negative part on the contact set."""
    return np.where(contact, np.minimum(g_vals, 0.0), g_vals)


def _try_energy(p: Problem, u: Field):
    """Energy breakdown, or None when the exponential range guard trips."""
    try:
        bd = energy(p, u)
    except OverflowError:
        return None
    return bd if np.isfinite(bd.total) else None


def minimize_constrained(
    p: Problem,
    u_lower: Field,
    opts: SolveOptions | None = None,
    u0: Field | None = None,
) -> SolveOutcome:
    """Minimize the functional over {u >= u_lower} by projected descent.

    The iterate starts at u_lower + 0.5 (or a caller-supplied warm start,
    projected), moves along the spectrally preconditioned negative gradient
    with a BB-seeded Armijo line search, and is projected back onto the
    obstacle after every step.  Convergence is declared on the projected
    gradient: the full gradient off the contact set, its negative part on
    it.  Once the contact set empties and the projected gradient is small,
    a Newton polish sharpens the iterate to the final tolerance.
    """
    opts = opts or SolveOptions()
    grid = p.grid
    tol = opts.resolved_grad_tol(p.lam)
    polish_at = max(opts.resolved_polish_tol(p.lam), tol)
    precond = _precond(p, opts)

    lower = u_lower.values
    start = u_lower.values + 0.5 if u0 is None else u0.values
    u = Field(grid, np.maximum(start, lower))

    bd, g = energy_and_gradient(p, u)
    alpha = opts.step0
    prev_u = prev_gt = None
    trace: list[TraceRow] = []
    message = ""
    converged = False
    polish_block = np.inf  # polish re-enabled once pg_norm drops below this
    it = 0

    for it in range(1, opts.max_iters + 1):
        contact = u.values <= lower
        pg = _projected_gradient(g.values, contact)
        pg_norm = _l2(grid, pg)
        min_gap = float((u.values - lower).min())
        trace.append(TraceRow(it - 1, bd.total, pg_norm, min_gap, float(contact.mean())))

        if not np.isfinite(pg_norm):
            message = "gradient norm not finite"
            break
        if pg_norm <= tol:
            converged = True
            break

        if (
            opts.polish
            and pg_norm <= polish_at
            and pg_norm < polish_block
            and not contact.any()
        ):
            refined = newton_refine(p, u, opts, kind="local_min")
            if refined.converged and float((refined.u.values - lower).min()) > 0.0:
                u, bd = refined.u, refined.energy
                g = gradient(p, u)
                contact = u.values <= lower
                pg = _projected_gradient(g.values, contact)
                pg_norm = _l2(grid, pg)
                min_gap = float((u.values - lower).min())
                trace.append(TraceRow(it, bd.total, pg_norm, min_gap, float(contact.mean())))
                converged = pg_norm <= tol
                if converged:
                    break
            # Newton not productive from here: wait for a 10x smaller gradient.
            polish_block = pg_norm / 10.0

        gt = precond(pg)
        if prev_u is not None:
            s = u.values - prev_u
            y = gt - prev_gt
            sy = float(np.sum(s * y))
            if sy > 0:
                alpha = float(np.clip(np.sum(s * s) / sy, 1e-10, 1e3))
        prev_u, prev_gt = u.values.copy(), gt.copy()

        accepted = False
        step = alpha
        for _ in range(opts.max_backtracks):
            trial = Field(grid, np.maximum(u.values - step * gt, lower))
            du = trial.values - u.values
            pred = float(np.sum(g.values * du)) * grid.spacing**2
            trial_bd = _try_energy(p, trial)
            if trial_bd is not None and (
                trial_bd.total <= bd.total + opts.armijo * min(pred, 0.0)
                and trial_bd.total <= bd.total
            ):
                u, bd = trial, trial_bd
                g = gradient(p, u)
                accepted = True
                break
            step *= opts.backtrack
        if not accepted:
            message = "line search failed: energy not decreasing to machine precision"
            break
        alpha = step / opts.backtrack  # allow mild re-expansion next iteration

    else:
        message = f"iteration cap {opts.max_iters} reached"

    contact = u.values <= lower
    pg_norm = _l2(grid, _projected_gradient(g.values, contact))
    min_gap = float((u.values - lower).min())
    trace.append(TraceRow(it, bd.total, pg_norm, min_gap, float(contact.mean())))
    return SolveOutcome(
        u=u,
        energy=bd,
        grad_norm=pg_norm,
        iterations=it,
        converged=bool(converged and pg_norm <= tol),
        kind="local_min",
        min_gap=min_gap,
        contact_fraction=float(contact.mean()),
        message=message,
        trace=tuple(trace),
    )


def _hessian_operator(p: Problem, u: Field, opts: SolveOptions) -> LinearOperator:
    """Matrix-free Hessian action by central finite differences of the gradient."""
    grid = p.grid
    shape = u.values.shape
    n = u.values.size
    base = opts.newton_fd_step * (1.0 + _l2(grid, u.values))

    def matvec(vec: np.ndarray) -> np.ndarray:
        v = vec.reshape(shape)
        vnorm = _l2(grid, v)
        if vnorm == 0.0:
            return np.zeros(n)
        delta = base / vnorm
        gp = gradient(p, Field(grid, u.values + delta * v)).values
        gm = gradient(p, Field(grid, u.values - delta * v)).values
        return ((gp - gm) / (2.0 * delta)).ravel()

    return LinearOperator((n, n), matvec=matvec)


def newton_refine(
    p: Problem,
    u: Field,
    opts: SolveOptions | None = None,
    kind: str = "local_min",
) -> SolveOutcome:
    """Matrix-free Newton-Krylov sharpening of a near-critical field.

    Hessian-vector products come from central finite differences of the
    gradient; each Newton system is solved by preconditioned MINRES (which
    tolerates the indefinite Hessian at a saddle) to a loose relative
    tolerance.  Steps are accepted on gradient-norm decrease; if no step
    helps, the input comes back with converged=False.
    """
    opts = opts or SolveOptions()
    grid = p.grid
    tol = opts.resolved_grad_tol(p.lam)
    n = u.values.size
    mult = 1.0 / (p.eps**2 * grid.k4 + grid.k2 + 1.0)

    def prec(vec: np.ndarray) -> np.ndarray:
        v = vec.reshape(u.values.shape)
        return np.fft.irfft2(np.fft.rfft2(v) * mult, s=v.shape).ravel()

    pre_op = LinearOperator((n, n), matvec=prec)

    g = gradient(p, u)
    gn = _l2(grid, g.values)
    best_u, best_gn = u, gn
    steps = 0
    for steps in range(1, opts.newton_iters + 1):
        # Aim two decades below the certificate tolerance so downstream
        # pointwise diagnostics see slack, not a residual at the threshold.
        if gn <= 0.01 * tol:
            break
        hess = _hessian_operator(p, best_u, opts)
        rhs = -g.values.ravel()
        sol, _ = minres(
            hess,
            rhs,
            rtol=opts.newton_krylov_tol,
            maxiter=opts.newton_krylov_maxiter,
            M=pre_op,
        )
        direction = sol.reshape(u.values.shape)
        if not np.isfinite(direction).all():
            break
        improved = False
        # Near-singular Hessian modes can blow up the Krylov step; start the
        # line search from a bounded multiple instead of burning halvings.
        dn = _l2(grid, direction)
        step = min(1.0, 100.0 / dn) if dn > 0 else 0.0
        for _ in range(30):
            trial = Field(grid, best_u.values + step * direction)
            try:
                tg = gradient(p, trial)
            except OverflowError:
                step *= 0.5
                continue
            tgn = _l2(grid, tg.values)
            if np.isfinite(tgn) and tgn < best_gn:
                best_u, best_gn, g, gn = trial, tgn, tg, tgn
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    else:
        steps = opts.newton_iters

    converged = best_gn <= tol
    bd = energy(p, best_u)
    return SolveOutcome(
        u=best_u,
        energy=bd,
        grad_norm=best_gn,
        iterations=steps,
        converged=bool(converged),
        kind=kind,
        message="" if converged else "newton refinement did not reach tolerance",
    )


def _respread(grid: Grid, nodes: list[np.ndarray], energies: list[float]) -> list[np.ndarray]:
    """Re-space path nodes uniformly in blended energy-arclength."""
    m = len(nodes)
    seg_len = np.array([_l2(grid, nodes[i + 1] - nodes[i]) for i in range(m - 1)])
    seg_en = np.array([abs(energies[i + 1] - energies[i]) for i in range(m - 1)])
    total_len = seg_len.sum()
    total_en = seg_en.sum()
    if total_len == 0.0:
        return nodes
    frac_len = seg_len / total_len
    frac_en = seg_en / total_en if total_en > 0 else np.zeros_like(seg_len)
    inc = np.sqrt(frac_len**2 + frac_en**2)
    tau = np.concatenate([[0.0], np.cumsum(inc)])
    tau /= tau[-1]
    targets = np.linspace(0.0, 1.0, m)
    out = [nodes[0]]
    for t in targets[1:-1]:
        j = int(np.searchsorted(tau, t, side="right") - 1)
        j = min(max(j, 0), m - 2)
        span = tau[j + 1] - tau[j]
        w = 0.0 if span == 0 else (t - tau[j]) / span
        out.append((1.0 - w) * nodes[j] + w * nodes[j + 1])
    out.append(nodes[-1])
    return out


_GOLDEN = 0.5 * (3.0 - np.sqrt(5.0))


def _line_max(fn, a: float, b: float, iters: int = 28) -> tuple[float, float]:
    """Golden-section maximum of fn on [a, b]; returns (argmax, max)."""
    x1 = a + _GOLDEN * (b - a)
    x2 = b - _GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = b - _GOLDEN * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = a + _GOLDEN * (b - a)
            f1 = fn(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def mountain_pass(p: Problem, u_min: Field, opts: SolveOptions | None = None) -> SolveOutcome:
    """Second critical point via max-node path deformation plus Newton.

    A discrete path joins the local minimum to a far constant-shifted
    endpoint whose energy lies at least 1 below the minimum (the offset is
    doubled until that holds; the landscape decays like the linear term, so
    the required shift can be large).  Nodes are seeded clustered around the
    1-d energy maximum along the constant segment.  Each sweep relocates the
    highest node to the energy maximum of its local path piece (so the crest
    cannot tunnel below the barrier between nodes), then takes a
    preconditioned descent step projected transversally to the path tangent.
    Once the crest gradient is small the crest is handed to Newton.
    """
    opts = opts or SolveOptions()
    grid = p.grid
    tol = opts.resolved_grad_tol(p.lam)
    handoff = max(opts.resolved_deform_tol(p.lam), tol)
    precond = _precond(p, opts)

    e_min = energy(p, u_min).total
    offset = opts.far_offset
    while True:
        far = Field(grid, u_min.values + offset)
        bd_far = _try_energy(p, far)
        if bd_far is not None and bd_far.total < e_min - 1.0:
            break
        offset *= 2.0
        if offset < -1e7:
            raise RuntimeError("could not find a far endpoint below the minimum")

    def seg_energy(t: float) -> float:
        bd = _try_energy(p, Field(grid, u_min.values + t * offset))
        return bd.total if bd is not None else -np.inf

    # 1-d scan of the constant segment: locate the barrier, refine its crest,
    # then seed half the nodes inside the barrier window.
    m = opts.path_nodes
    dense_t = np.linspace(0.0, 1.0, 8 * m)
    dense_e = np.array([seg_energy(t) for t in dense_t])
    i_hi = 1 + int(np.argmax(dense_e[1:-1]))
    t_lo, t_up = dense_t[max(i_hi - 1, 0)], dense_t[min(i_hi + 1, dense_t.size - 1)]
    t_star, _ = _line_max(seg_energy, t_lo, t_up)
    width = max(t_up - t_lo, 2.0 / (8 * m))
    m_in = m // 2
    inner_t = t_star + width * np.linspace(-1.0, 1.0, m_in)
    outer_t = np.linspace(0.0, 1.0, m - m_in)
    all_t = np.clip(np.sort(np.concatenate([outer_t, inner_t])), 0.0, 1.0)
    all_t[0], all_t[-1] = 0.0, 1.0
    nodes = [u_min.values + t * offset for t in all_t]
    energies = [seg_energy(t) for t in all_t]
    energies[0], energies[-1] = e_min, bd_far.total

    def node_energy(vals: np.ndarray) -> float:
        bd = _try_energy(p, Field(grid, vals))
        return bd.total if bd is not None else -np.inf

    def crest_relocate(i: int) -> None:
        """Move node i to the energy max of the polyline piece (i-1, i, i+1)."""
        left, mid, right = nodes[i - 1], nodes[i], nodes[i + 1]

        def piece(r: float) -> np.ndarray:
            if r <= 0.5:
                return left + 2.0 * r * (mid - left)
            return mid + (2.0 * r - 1.0) * (right - mid)

        r_best, e_best = _line_max(lambda r: node_energy(piece(r)), 0.0, 1.0)
        if e_best > energies[i]:
            nodes[i] = piece(r_best)
            energies[i] = e_best

    def accept_refined(outcome: SolveOutcome) -> bool:
        """A usable saddle: converged, above the minimum, distinct from it."""
        return bool(
            outcome.converged
            and outcome.energy.total >= e_min - 1e-10
            and float(np.abs(outcome.u.values - u_min.values).max()) >= 1e-3
        )

    crest_norm = np.inf
    sweeps = 0
    for sweeps in range(1, opts.deform_iters + 1):
        i_star = 1 + int(np.argmax(energies[1:-1]))
        crest_relocate(i_star)
        node = Field(grid, nodes[i_star])
        g = gradient(p, node)
        crest_norm = _l2(grid, g.values)
        if crest_norm <= handoff:
            break
        if sweeps % 20 == 0:
            # Deformation is slow here; see whether Newton already has a
            # basin from the current crest before grinding more sweeps.
            early = newton_refine(p, node, opts, kind="mountain_pass")
            if accept_refined(early):
                near = bool(early.energy.total - e_min <= 1e-8)
                return replace(
                    early,
                    iterations=sweeps,
                    path_energies=tuple(energies),
                    near_degenerate=near,
                )

        # Transversal descent: remove the component along the path tangent so
        # the crest does not slide down the unstable direction.
        tau = nodes[i_star + 1] - nodes[i_star - 1]
        d = -precond(g.values)
        tau_sq = float(np.sum(tau * tau))
        if tau_sq > 0:
            d = d - (float(np.sum(d * tau)) / tau_sq) * tau
        dn = _l2(grid, d)
        if dn > 0:
            cap = 0.5 * min(
                _l2(grid, nodes[i_star] - nodes[i_star - 1]),
                _l2(grid, nodes[i_star + 1] - nodes[i_star]),
            )
            step = min(1.0, cap / dn) if cap > 0 else 1.0
            e_node = energies[i_star]
            pred = float(np.sum(g.values * d)) * grid.spacing**2
            for _ in range(opts.max_backtracks):
                trial = nodes[i_star] + step * d
                e_trial = node_energy(trial)
                if e_trial < e_node + opts.armijo * step * min(pred, 0.0):
                    nodes[i_star] = trial
                    energies[i_star] = e_trial
                    break
                step *= opts.backtrack

        if sweeps % 5 == 0:
            nodes = _respread(grid, nodes, energies)
            energies = [energies[0]] + [
                node_energy(v) for v in nodes[1:-1]
            ] + [energies[-1]]

        i_star = 1 + int(np.argmax(energies[1:-1]))
        d_min = _l2(grid, nodes[i_star] - nodes[0])
        d_far = _l2(grid, nodes[i_star] - nodes[-1])
        if min(d_min, d_far) <= 1e-6:
            raise RuntimeError(
                "path collapse: crest node within 1e-6 of an endpoint; "
                "no separating barrier found at this resolution"
            )

    i_star = 1 + int(np.argmax(energies[1:-1]))
    refined = newton_refine(p, Field(grid, nodes[i_star]), opts, kind="mountain_pass")
    near_degenerate = bool(refined.energy.total - e_min <= 1e-8)
    return replace(
        refined,
        iterations=sweeps,
        path_energies=tuple(energies),
        near_degenerate=near_degenerate,
        message=refined.message,
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Smoothed comparison chain at a converged minimizer.

    ``defect`` is max(G_eps F + lap u): the violation of -lap u >= G_eps F;
    ``min_gap_u`` = min(u - u_lower); ``min_gap_w`` the same for the
    intermediate w solving (-lap + 1) w = G_eps F + u.
    """

    defect: float
    tol: float
    ok: bool
    min_gap_u: float
    min_gap_w: float


def comparison_diagnostic(p: Problem, u: Field, u_lower: Field, tol: float | None = None) -> ComparisonReport:
    """Check -lap u >= G_eps(F) - tol and the w-chain above the subsolution.

    F is the discrete right-hand side eps^2 lap^2 u - lap u - gradient(u),
    i.e. the same splitting the optimizer drives to zero; at a converged
    interior solution -lap u = G_eps(F) up to the smoothed solver residual.
    """
    tol = default_grad_tol(p.lam) if tol is None else float(tol)
    g = gradient(p, u)
    f_rhs = Field(
        p.grid,
        p.eps**2 * bilaplacian(u).values - laplacian(u).values - g.values,
    )
    gf = green_eps(f_rhs, p.eps)
    lap_u = laplacian(u)
    defect = float((gf.values + lap_u.values).max())

    spec = np.fft.rfft2(gf.values + u.values)
    w_eps = np.fft.irfft2(spec / (p.grid.k2 + 1.0), s=u.values.shape)
    return ComparisonReport(
        defect=defect,
        tol=tol,
        ok=bool(defect <= tol),
        min_gap_u=float((u.values - u_lower.values).min()),
        min_gap_w=float((w_eps - u_lower.values).min()),
    )


@dataclass(frozen=True)
class ContinuationReport:
    """Minimizer family along a decreasing eps schedule, against eps = 0.

    The four tracked quantities (eps*||lap u||_2, the cross term,
    ||u_eps - u_0||_H1, energy gap to the eps = 0 solve) should decrease
    along the schedule up to 5% wiggle; ``h2_slope`` is the log-log rate of
    ||u~_eps - u~_0||_H2 fitted on the three smallest eps.
    """

    eps: tuple
    converged: tuple
    eps_lap_norm: tuple
    cross_term: tuple
    h1_distance: tuple
    energy_gap: tuple
    tilde_h2: tuple
    h2_slope: float
    energy_zero: float
    final_gap_rel: float
    trend_eps_lap: bool
    trend_cross: bool
    trend_h1: bool
    trend_gap: bool
    outcomes: tuple = dc_field(default=(), repr=False)
    outcome_zero: SolveOutcome | None = dc_field(default=None, repr=False)
    failure: str = ""

    @property
    def all_trends_ok(self) -> bool:
        return self.trend_eps_lap and self.trend_cross and self.trend_h1 and self.trend_gap


def _decreasing(seq, wiggle: float = 0.05) -> bool:
    vals = [abs(x) for x in seq]
    floor = 1e-13 * (1.0 + max(vals, default=0.0))
    return all(b <= (1.0 + wiggle) * a + floor for a, b in zip(vals, vals[1:]))


def continuation(
    p0: Problem,
    eps_schedule,
    delta: float | None = None,
    opts: SolveOptions | None = None,
) -> ContinuationReport:
    """Warm-started local-min solves along eps_schedule, then the eps = 0 limit."""
    schedule = [float(e) for e in eps_schedule]
    if not schedule or any(e <= 0 for e in schedule):
        raise ValueError("eps_schedule must be positive")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("eps_schedule must be strictly decreasing")
    opts = opts or SolveOptions()

    outcomes: list[SolveOutcome] = []
    subs: list[SubsolutionResult] = []
    failure = ""
    warm: Field | None = None
    for eps in schedule + [0.0]:
        prob = p0.with_params(eps=eps)
        sub = build_subsolution(prob, delta)
        out = minimize_constrained(prob, sub.u_lower, opts, u0=warm)
        subs.append(sub)
        outcomes.append(out)
        if out.converged:
            warm = out.u
        elif not failure:
            failure = f"solve at eps={eps:g} did not converge: {out.message}"

    zero_out, zero_sub = outcomes.pop(), subs.pop()
    e0 = zero_out.energy.total
    u0_vals = zero_out.u

    eps_lap, cross, h1d, gap, tilde_h2 = [], [], [], [], []
    for eps, out, sub in zip(schedule, outcomes, subs):
        nm = norms(out.u)
        eps_lap.append(eps * nm.lap)
        cross.append(out.energy.cross)
        dn = norms(out.u - u0_vals)
        h1d.append(float(np.hypot(dn.l2, dn.h1)))
        gap.append(out.energy.total - e0)
        tilde_h2.append(h2_norm(sub.u_tilde - zero_sub.u_tilde))

    tail = min(3, len(schedule))
    log_e = np.log(np.array(schedule[-tail:]))
    log_d = np.log(np.maximum(np.array(tilde_h2[-tail:]), 1e-300))
    h2_slope = float(np.polyfit(log_e, log_d, 1)[0]) if tail >= 2 else np.nan
    final_gap_rel = abs(gap[-1]) / max(abs(e0), 1.0)

    return ContinuationReport(
        eps=tuple(schedule),
        converged=tuple(o.converged for o in outcomes),
        eps_lap_norm=tuple(eps_lap),
        cross_term=tuple(cross),
        h1_distance=tuple(h1d),
        energy_gap=tuple(gap),
        tilde_h2=tuple(tilde_h2),
        h2_slope=h2_slope,
        energy_zero=e0,
        final_gap_rel=final_gap_rel,
        trend_eps_lap=_decreasing(eps_lap),
        trend_cross=_decreasing(cross),
        trend_h1=_decreasing(h1d),
        trend_gap=_decreasing(gap),
        outcomes=tuple(outcomes),
        outcome_zero=zero_out,
        failure=failure,
    )
