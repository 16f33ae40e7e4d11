"""Discrete inertial algorithms with uniform recording and stopping rules.

Variants
--------
IAA     the extrapolated-gradient method obtained by discretizing the
        implicit-Hessian-damped flow with step sqrt(s):

            y_k = x_k + alpha (x_k - x_{k-1})
            z_k = x_k + beta  (x_k - x_{k-1})
            x_{k+1} = y_k - s grad f(z_k) [+ s eps_k]

        (The continuous coefficients map to the discrete ones as
        alpha_disc = 1 - alpha_cont*sqrt(s), beta_disc = beta_cont/sqrt(s).)
HBM     x_{k+1} = x_k + alpha (x_k - x_{k-1}) - beta grad f(x_k)
NAG     gradient at the extrapolated point y_k instead of x_k
HBM_H   y_k gains the correction -theta (grad f(x_k) - grad f(x_{k-1}));
        gradient step at x_k
NAG_H   same correction; gradient step at y_k

For the baselines beta is the gradient step size; perturbed baselines add
beta*eps_k to x_{k+1} (IAA adds s*eps_k), matching each method's own step
scale.  Startup convention x_{-1} := x_0, so momentum terms vanish when
x_0 = x_1; Hessian-corrected variants take g_0 = grad f(x_0).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .errors import (
    Divergence,
    MissingGradientCache,
    NonFiniteIterate,
    OutOfBox,
    InfeasibleAlpha,
    EmptyBetaInterval,
)
from .perturbations import PerturbationSpec, sample_discrete
from .problems import Problem, Vector, as_point

VARIANTS = ("IAA", "HBM", "NAG", "HBM_H", "NAG_H")
BLOWUP_NORM = 1e12


@dataclass(frozen=True)
class AlgorithmConfig:
    """Variant tag plus coefficients; unused fields are ignored per variant.

    IAA uses (alpha, beta, s); HBM/NAG use (alpha, beta) with beta the step
    size; HBM_H/NAG_H additionally use theta.
    """

    variant: str
    alpha: float = 0.0
    beta: float = 0.0
    theta: float = 0.0
    s: float | None = None
    perturb: PerturbationSpec = field(default_factory=PerturbationSpec)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected {VARIANTS}")
        if self.alpha < 0 or self.beta < 0 or self.theta < 0:
            raise ValueError("alpha, beta, theta must be nonnegative")
        if self.variant == "IAA":
            if self.s is None or not (self.s > 0):
                raise ValueError("IAA needs a positive step size s")
        elif not (self.beta > 0):
            raise ValueError(f"{self.variant} needs a positive step size beta")


@dataclass(frozen=True)
class StoppingRule:
    """Stop on value_error <= tol (grad_norm if f* unknown) or at max_iter.

    tol = None disables the tolerance trigger (fixed-horizon runs).
    """

    tol: float | None = 1e-10
    max_iter: int = 100_000

    def __post_init__(self):
        if self.tol is not None and not (self.tol > 0):
            raise ValueError("tol must be positive (or None)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")


@dataclass(frozen=True)
class IterateRecord:
    """Per-iterate instrumentation.

    value_error is f(x_k) - f* when f* is known, else the raw value; dist
    is |x_k - x*| (nan if unknown); energy is the discrete Lyapunov energy
    with c = beta/(alpha*s) for IAA and nan otherwise; n_grad_evals counts
    cumulative algorithmic gradient evaluations (instrumentation excluded).
    """

    k: int
    x: Vector
    value_error: float
    grad_norm: float
    dist: float
    step: float
    energy: float
    n_grad_evals: int = 0


@dataclass(frozen=True)
class RunResult:
    """Records plus the stopping trigger ("tol" or "max_iter") and totals."""

    records: list[IterateRecord]
    trigger: str
    n_grad_evals: int
    box_warnings: tuple[str, ...] = ()

    @property
    def final(self) -> IterateRecord:
        return self.records[-1]

    def iterations(self) -> int:
        return self.records[-1].k


def step_iaa(
    problem: Problem,
    cfg: AlgorithmConfig,
    x_k: Vector,
    x_km1: Vector,
    eps_k: Vector | None = None,
) -> Vector:
    """One IAA update; pure function of its arguments."""
    d = x_k - x_km1
    y = x_k + cfg.alpha * d
    z = x_k + cfg.beta * d
    x_next = y - cfg.s * problem.grad(z)
    if eps_k is not None and np.any(eps_k):
        x_next = x_next + cfg.s * eps_k
    return x_next


def step_baseline(
    problem: Problem,
    cfg: AlgorithmConfig,
    x_k: Vector,
    x_km1: Vector,
    g_km1: Vector | None = None,
    eps_k: Vector | None = None,
) -> tuple[Vector, Vector | None]:
    """One baseline update; returns (x_{k+1}, gradient to cache).

    The cached gradient is grad f(x_k) for HBM/HBM_H/NAG_H (the Hessian
    correction of the next step needs it); NAG caches nothing, keeping it
    at one gradient evaluation per iterate.
    """
    d = x_k - x_km1
    g_cache: Vector | None = None
    if cfg.variant == "HBM":
        g_cache = problem.grad(x_k)
        x_next = x_k + cfg.alpha * d - cfg.beta * g_cache
    elif cfg.variant == "NAG":
        y = x_k + cfg.alpha * d
        x_next = y - cfg.beta * problem.grad(y)
    elif cfg.variant == "HBM_H":
        if g_km1 is None:
            raise MissingGradientCache(
                "HBM_H needs grad f(x_{k-1}); pass g_km1 (g_0 = grad f(x_0))"
            )
        g_cache = problem.grad(x_k)
        y = x_k + cfg.alpha * d - cfg.theta * (g_cache - g_km1)
        x_next = y - cfg.beta * g_cache
    elif cfg.variant == "NAG_H":
        if g_km1 is None:
            raise MissingGradientCache(
                "NAG_H needs grad f(x_{k-1}); pass g_km1 (g_0 = grad f(x_0))"
            )
        g_cache = problem.grad(x_k)
        y = x_k + cfg.alpha * d - cfg.theta * (g_cache - g_km1)
        x_next = y - cfg.beta * problem.grad(y)
    else:
        raise ValueError(f"step_baseline got variant {cfg.variant!r}")
    if eps_k is not None and np.any(eps_k):
        x_next = x_next + cfg.beta * eps_k
    return x_next, g_cache


def _grad_evals_per_step(cfg: AlgorithmConfig) -> int:
    return 2 if cfg.variant == "NAG_H" else 1


def validate_against_box(problem: Problem, cfg: AlgorithmConfig) -> list[str]:
    """Warnings (not errors) when IAA coefficients leave the certified box.

    The baselines carry no certified box; exploration outside a box is a
    legitimate use, so callers get a best-effort run either way.
    """
    if cfg.variant != "IAA":
        return []
    theorem = "T41" if cfg.perturb.is_zero else "T42"
    msgs: list[str] = []
    try:
        box = analysis.parameter_box(problem, theorem, alpha=cfg.alpha, s=cfg.s)
        if box.beta is not None and not box.beta.contains(cfg.beta):
            msgs.append(
                f"beta = {cfg.beta} outside {theorem} interval {box.beta} "
                f"at alpha = {cfg.alpha}; run is uncertified"
            )
    except (InfeasibleAlpha, EmptyBetaInterval, OutOfBox) as exc:
        msgs.append(f"outside {theorem} box: {exc}")
    return msgs


def run(
    problem: Problem,
    cfg: AlgorithmConfig,
    x0,
    x1=None,
    stop: StoppingRule | None = None,
) -> RunResult:
    """Run the configured algorithm from (x0, x1); x1 defaults to x0.

    Records every iterate including k = 0 and 1 (step of record 0 is 0 by
    the x_{-1} := x_0 convention).  Deterministic given the perturbation
    seed.  Raises :class:`Divergence` when |x| exceeds 1e12 and
    :class:`NonFiniteIterate` (with the last finite k) on NaN/Inf.
    """
    stop = stop or StoppingRule()
    x_prev = as_point(x0, problem.dimension).copy()
    x_cur = as_point(x1 if x1 is not None else x0, problem.dimension).copy()

    box_warnings = validate_against_box(problem, cfg)
    for msg in box_warnings:
        warnings.warn(msg, stacklevel=2)

    fstar = problem.min_value
    xstar = problem.minimizer
    use_value = fstar is not None
    c_energy = None
    if cfg.variant == "IAA" and use_value and cfg.alpha > 0 and cfg.s:
        c_energy = cfg.beta / (cfg.alpha * cfg.s)

    evals = 0

    def make_record(k: int, x: Vector, step: float) -> IterateRecord:
        fx = float(problem.func(x))
        gx = problem.grad(x)
        value_error = fx - fstar if use_value else fx
        dist = float(np.linalg.norm(x - xstar)) if xstar is not None else float("nan")
        if c_energy is not None and c_energy > 0:
            energy = value_error + 0.5 * c_energy * step * step
        elif c_energy == 0.0:
            energy = value_error
        else:
            energy = float("nan")
        return IterateRecord(
            k=k,
            x=x.copy(),
            value_error=value_error,
            grad_norm=float(np.linalg.norm(gx)),
            dist=dist,
            step=step,
            energy=energy,
            n_grad_evals=evals,
        )

    def hit_tol(rec: IterateRecord) -> bool:
        if stop.tol is None:
            return False
        metric = rec.value_error if use_value else rec.grad_norm
        return metric <= stop.tol

    records = [make_record(0, x_prev, 0.0)]
    step1 = float(np.linalg.norm(x_cur - x_prev))
    records.append(make_record(1, x_cur, step1))
    if hit_tol(records[-1]):
        return RunResult(records, "tol", evals, tuple(box_warnings))
    if stop.max_iter <= 1:
        return RunResult(records, "max_iter", evals, tuple(box_warnings))

    needs_cache = cfg.variant in ("HBM_H", "NAG_H")
    g_cache: Vector | None = None
    if needs_cache:
        g_cache = problem.grad(x_prev)  # g_0 = grad f(x_0)
        evals += 1

    sample_noise = cfg.perturb.model != "none"
    per_step = _grad_evals_per_step(cfg)
    trigger = "max_iter"
    k = 1
    while True:
        eps = sample_discrete(cfg.perturb, k, problem.dimension) if sample_noise else None
        if cfg.variant == "IAA":
            x_next = step_iaa(problem, cfg, x_cur, x_prev, eps)
        else:
            x_next, g_cache = step_baseline(problem, cfg, x_cur, x_prev, g_cache, eps)
        evals += per_step
        if not np.all(np.isfinite(x_next)):
            raise NonFiniteIterate(
                f"iterate {k + 1} is non-finite; last finite k = {k}",
                last_finite_k=k,
            )
        xmax = float(np.max(np.abs(x_next)))
        if xmax > BLOWUP_NORM:
            raise Divergence(
                f"iterates blew up at k = {k + 1} (|x| = {xmax:.3g})", when=k + 1
            )
        step = float(np.linalg.norm(x_next - x_cur))
        records.append(make_record(k + 1, x_next, step))
        if hit_tol(records[-1]):
            trigger = "tol"
            break
        if k + 1 >= stop.max_iter:
            break
        x_prev, x_cur = x_cur, x_next
        k += 1
    return RunResult(records, trigger, evals, tuple(box_warnings))
