"""Nonlinearity models: the function f, the constant s, and assumption checks.

A model supplies f, f', f'' on [0, inf), the inverse of f on its range, a
declared supremum of f, and a declared growth class:

* class "A": f''(t)t + f'(t) >= 0 and sup |f|/(f'(t)t) < inf,
* class "B": sup f'(t)t(|log t| + |f(t)|) < inf.

Three built-ins cover the standard cases: ``u1`` (f(t) = t), ``cp1``
(f(t) = (t-1)/(t+1)) and ``power`` (f(t) = t^alpha).  ``check_assumptions``
produces sampling-based certificates for the structural assumptions; these
are certificates over a log-spaced sample, not proofs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["VortexModel", "AssumptionReport", "builtin", "check_assumptions"]

TripleFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class VortexModel:
    """The nonlinearity f with its derivatives, inverse and metadata.

    ``eval(t)`` returns the triple (f(t), f'(t), f''(t)) for t >= 0.  Values
    at t = 0 are the continuous limits when those exist; if a limit diverges
    (power law with alpha < 1, say) the value 0 is substituted.  Such samples
    arise only at exact vortex zeros of e^sigma — a measure-zero set whose
    quadrature contribution vanishes under refinement — and the substitution
    is applied identically in the energy and its gradient, so variational
    consistency is unaffected.
    """

    name: str
    s: float
    sup_f: float  # np.inf when f is unbounded
    assumption_class: str  # "A" or "B"
    params: dict = field(default_factory=dict)
    _eval: TripleFn | None = field(default=None, repr=False, compare=False)
    _finv: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.assumption_class not in ("A", "B"):
            raise ValueError(f"assumption_class must be 'A' or 'B', got {self.assumption_class!r}")

    # -- evaluation ---------------------------------------------------------

    def eval(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(f(t), f'(t), f''(t)) elementwise for t >= 0."""
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < 0):
            raise ValueError("model evaluation requires t >= 0")
        return self._eval(t)

    def f(self, t) -> np.ndarray:
        return self.eval(t)[0]

    def fp(self, t) -> np.ndarray:
        return self.eval(t)[1]

    def fpp(self, t) -> np.ndarray:
        return self.eval(t)[2]

    def comb(self, t) -> np.ndarray:
        """The combination f''(t)t + f'(t) (the derivative of t -> f'(t)t)."""
        f, fp, fpp = self.eval(t)
        return fpp * np.asarray(t, dtype=np.float64) + fp

    @property
    def f_at_zero(self) -> float:
        return float(self.eval(np.array(0.0))[0])

    def f_inverse(self, y) -> np.ndarray:
        """Inverse of f, defined on the open interval (f(0), sup f)."""
        y = np.asarray(y, dtype=np.float64)
        f0 = self.f_at_zero
        if np.any(y <= f0) or np.any(y >= self.sup_f):
            raise ValueError(
                f"f_inverse argument outside the range ({f0:g}, {self.sup_f:g}) of f"
            )
        return self._finv(y)


# -- built-in models ---------------------------------------------------------


def _u1_eval(t: np.ndarray):
    one = np.ones_like(t)
    return t, one, np.zeros_like(t)


def _cp1_eval(t: np.ndarray):
    d = 1.0 + t
    return (t - 1.0) / d, 2.0 / d**2, -4.0 / d**3


def _make_power_eval(alpha: float) -> TripleFn:
    def eval_power(t: np.ndarray):
        pos = t > 0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            f = np.where(pos, t**alpha, 0.0)
            fp = np.where(pos, alpha * t ** (alpha - 1.0), 1.0 if alpha == 1.0 else 0.0)
            fpp_zero = 2.0 if alpha == 2.0 else 0.0
            fpp = np.where(pos, alpha * (alpha - 1.0) * t ** (alpha - 2.0), fpp_zero)
        return f, fp, fpp

    return eval_power


def builtin(name: str, **params) -> VortexModel:
    """Construct a built-in model: ``u1``, ``cp1`` or ``power``.

    Parameters
    ----------
    name : str
        Model family.
    **params
        ``s`` for all models (defaults: u1 -> 1, cp1 -> 0, power -> 1);
        ``alpha`` for the power model (default 2).

    Raises
    ------
    ValueError
        If the parameters violate the range condition f(0) < s < sup f:
        cp1 needs |s| < 1, u1 and power need s > 0; power needs alpha > 0.
    """
    params = dict(params)
    if name == "u1":
        s = float(params.pop("s", 1.0))
        if params:
            raise ValueError(f"unknown u1 parameters: {sorted(params)}")
        if s <= 0.0:
            raise ValueError(f"(f1) violated: u1 requires s > 0 (range condition f(0) < s), got s={s}")
        return VortexModel("u1", s, np.inf, "A", {"s": s}, _u1_eval, lambda y: y)

    if name == "cp1":
        s = float(params.pop("s", 0.0))
        if params:
            raise ValueError(f"unknown cp1 parameters: {sorted(params)}")
        if not (-1.0 < s < 1.0):
            raise ValueError(
                f"(f1) violated: cp1 requires |s| < 1 (range condition f(0) < s < sup f), got s={s}"
            )
        return VortexModel(
            "cp1", s, 1.0, "B", {"s": s}, _cp1_eval, lambda y: (1.0 + y) / (1.0 - y)
        )

    if name == "power":
        alpha = float(params.pop("alpha", 2.0))
        s = float(params.pop("s", 1.0))
        if params:
            raise ValueError(f"unknown power parameters: {sorted(params)}")
        if alpha <= 0.0:
            raise ValueError(f"power model requires alpha > 0, got {alpha}")
        if s <= 0.0:
            raise ValueError(f"(f1) violated: power model requires s > 0 (range condition f(0) < s), got s={s}")
        return VortexModel(
            "power",
            s,
            np.inf,
            "A",
            {"alpha": alpha, "s": s},
            _make_power_eval(alpha),
            lambda y: y ** (1.0 / alpha),
        )

    raise ValueError(f"unknown model {name!r}; built-ins are u1, cp1, power")


# -- assumption certificates --------------------------------------------------


@dataclass
class AssumptionReport:
    """Result of sampling-based assumption checks for a model.

    All verdicts are certificates over the sampled points only (flagged by
    ``sampled_only``); polynomial growth of f, f', f'' is declared by the
    model, not tested.
    """

    model: str
    t_min: float
    t_max: float
    samples: int
    monotone: bool  # f' > 0 on the sample          (f0)
    range_ok: bool  # f(0) < s < max sampled f       (f1)
    class_a: bool  # class-A inequalities hold on the sample
    class_b: bool  # class-B bound holds on the sample
    declared_class_ok: bool
    min_fp: float
    f_at_zero: float
    max_f_sampled: float
    ratio_a_max: float  # max |f| / (f' t)
    ratio_a_top_slope: float  # log-log trend of the class-A ratio near t_max
    bound_b_max: float  # max f' t (|log t| + |f|)
    bound_b_edge_ok: bool
    sampled_only: bool = True
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.monotone and self.range_ok and self.declared_class_ok

    def summary_lines(self) -> list[str]:
        flag = lambda b: "pass" if b else "FAIL"
        return [
            f"model {self.model}: sampled certificate on [{self.t_min:.1e}, {self.t_max:.1e}], {self.samples} points",
            f"  (f0) f' > 0: {flag(self.monotone)} (min f' = {self.min_fp:.3e})",
            f"  (f1) f(0) < s < sup f: {flag(self.range_ok)} "
            f"(f(0) = {self.f_at_zero:g}, max sampled f = {self.max_f_sampled:.3e})",
            f"  (f3)(a) class A: {flag(self.class_a)} "
            f"(max |f|/(f' t) = {self.ratio_a_max:.3e}, top slope = {self.ratio_a_top_slope:+.3f})",
            f"  (f3)(b) class B: {flag(self.class_b)} (max bound = {self.bound_b_max:.3e})",
            f"  declared class consistent: {flag(self.declared_class_ok)}",
        ]


def _log_slope(t: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y vs log t (0 for constant or vanishing y)."""
    good = y > 0
    if good.sum() < 2:
        return 0.0
    lx, ly = np.log(t[good]), np.log(y[good])
    return float(np.polyfit(lx, ly, 1)[0])


def check_assumptions(
    model: VortexModel, t_max: float = 1e6, samples: int = 2000, t_min: float = 1e-8
) -> AssumptionReport:
    """Sample the structural assumptions of a model on a log-spaced grid.

    Checks, on t in [t_min, t_max]:

    * (f0): f'(t) > 0 everywhere;
    * (f1): f(0) < s and s < max sampled f (capped by the declared sup);
    * class A: f''t + f' >= -1e-12 and |f|/(f' t) has a non-growing
      log-log trend over the top decade (so its sup is finite);
    * class B: f' t (|log t| + |f|) is finite with its maximum attained away
      from both sampled edges (no blow-up toward 0 or infinity).

    The declared class must pass its own check for ``declared_class_ok``.
    """
    if t_max <= 0 or t_min <= 0 or t_max <= t_min:
        raise ValueError("need 0 < t_min < t_max")
    if samples < 1000:
        raise ValueError("need at least 1000 sample points for the certificate")

    t = np.logspace(np.log10(t_min), np.log10(t_max), samples)
    f, fp, fpp = model.eval(t)
    f0 = model.f_at_zero
    notes: list[str] = []

    monotone = bool(np.all(fp > 0))
    max_f = float(f.max())
    # The sampled max must witness s < sup f, and s must respect the declared sup.
    range_ok = bool(f0 < model.s < model.sup_f and model.s < max_f)
    if model.s >= max_f:
        notes.append("sampled max of f did not exceed s; extend t_max or lower s")

    # class A: (f' t)' >= 0 and the ratio |f|/(f' t) stays bounded.
    comb = fpp * t + fp
    ratio_a = np.abs(f) / np.where(fp * t > 0, fp * t, np.nan)
    finite_a = np.all(np.isfinite(ratio_a))
    top = t >= t_max / 10.0
    slope_a = _log_slope(t[top], ratio_a[top]) if finite_a else np.inf
    class_a = bool(np.all(comb >= -1e-12) and finite_a and slope_a <= 0.02)
    ratio_a_max = float(np.nanmax(ratio_a)) if finite_a else np.inf

    # class B: f' t (|log t| + |f|) bounded, checked by interior attainment.
    bound_b = fp * t * (np.abs(np.log(t)) + np.abs(f))
    finite_b = np.all(np.isfinite(bound_b))
    bound_b_max = float(bound_b.max()) if finite_b else np.inf
    if finite_b:
        edge = max(bound_b[0], bound_b[-1])
        bound_b_edge_ok = bool(edge <= 0.5 * bound_b_max + 1e-30)
    else:
        bound_b_edge_ok = False
    class_b = bool(finite_b and bound_b_edge_ok)

    declared_ok = class_a if model.assumption_class == "A" else class_b

    return AssumptionReport(
        model=model.name,
        t_min=float(t_min),
        t_max=float(t_max),
        samples=int(samples),
        monotone=monotone,
        range_ok=range_ok,
        class_a=class_a,
        class_b=class_b,
        declared_class_ok=bool(declared_ok),
        min_fp=float(fp.min()),
        f_at_zero=f0,
        max_f_sampled=max_f,
        ratio_a_max=ratio_a_max,
        ratio_a_top_slope=float(slope_a) if np.isfinite(slope_a) else np.inf,
        bound_b_max=bound_b_max,
        bound_b_edge_ok=bound_b_edge_ok,
        notes=notes,
    )
