"""Differentiable test objectives with strong-quasiconvexity metadata.

A :class:`Problem` bundles an objective, its analytic gradient, and the
constants (gamma, L, kappa) the convergence theory needs.  The constants are
caller-asserted; :mod:`inertiq.analysis` provides empirical falsification
tools.  Built-in problems cover the two benchmark objectives used throughout
the package plus diagonal quadratics.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionMismatch, NonFiniteInput, NonFiniteValue, UnknownProblem

Vector = NDArray[np.float64]

# Gradient norm allowed at a declared minimizer.
STATIONARITY_TOL = 1e-10


def as_point(x, dimension: int | None = None) -> Vector:
    """Coerce ``x`` to a finite 1-D float64 vector, checking length if given."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {arr.shape}")
    if dimension is not None and arr.shape[0] != dimension:
        raise DimensionMismatch(
            f"expected length {dimension}, got {arr.shape[0]}"
        )
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput(f"point contains NaN/Inf: {arr}")
    return arr


@dataclass(frozen=True)
class Problem:
    """Differentiable objective with curvature metadata.

    gamma is the strong-quasiconvexity modulus, lipschitz the gradient
    Lipschitz constant L, and kappa the quasar-convexity constant
    <grad f(x), x - x*> >= kappa (f(x) - f(x*)); kappa defaults to gamma/L,
    which is always admissible in this setting.
    """

    dimension: int
    func: Callable[[Vector], float]
    grad: Callable[[Vector], Vector]
    gamma: float
    lipschitz: float
    kappa: float | None = None
    minimizer: Vector | None = None
    min_value: float | None = None
    name: str = "custom"

    def __post_init__(self):
        if self.dimension < 1:
            raise DimensionMismatch("dimension must be a positive integer")
        for label, value in (("gamma", self.gamma), ("lipschitz", self.lipschitz)):
            if not (value > 0):
                raise ValueError(f"{label} must be positive, got {value}")
        if self.kappa is None:
            object.__setattr__(self, "kappa", self.gamma / self.lipschitz)
        if not (self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.minimizer is not None:
            xstar = as_point(self.minimizer, self.dimension)
            xstar.setflags(write=False)
            object.__setattr__(self, "minimizer", xstar)
            gnorm = float(np.linalg.norm(self.grad(xstar)))
            if gnorm > STATIONARITY_TOL:
                raise ValueError(
                    f"declared minimizer is not stationary: |grad| = {gnorm:.3e}"
                )
            if self.min_value is None:
                object.__setattr__(self, "min_value", float(self.func(xstar)))


def eval_pair(problem: Problem, x) -> tuple[float, Vector]:
    """Evaluate (f(x), grad f(x)); raises if input or output is non-finite."""
    xv = as_point(x, problem.dimension)
    value = float(problem.func(xv))
    gradient = np.asarray(problem.grad(xv), dtype=np.float64)
    if gradient.shape != (problem.dimension,):
        raise DimensionMismatch(
            f"gradient has shape {gradient.shape}, expected ({problem.dimension},)"
        )
    if not math.isfinite(value) or not np.all(np.isfinite(gradient)):
        raise NonFiniteValue(f"non-finite evaluation at x = {xv}")
    return value, gradient


# ---------------------------------------------------------------------------
# Built-in problems
# ---------------------------------------------------------------------------

def _sine_well() -> Problem:
    """1-D nonconvex objective f(x) = x^2 + 2 sin^2 x.

    Strongly quasiconvex with gamma = 1/2; grad f(x) = 2x + 2 sin 2x is
    Lipschitz with L = 6.  Unique minimizer x* = 0 with f(x*) = 0.
    """

    def f(x: Vector) -> float:
        return float(x[0] * x[0] + 2.0 * math.sin(x[0]) ** 2)

    def g(x: Vector) -> Vector:
        return np.array([2.0 * x[0] + 2.0 * math.sin(2.0 * x[0])])

    return Problem(
        dimension=1,
        func=f,
        grad=g,
        gamma=0.5,
        lipschitz=6.0,
        minimizer=np.array([0.0]),
        min_value=0.0,
        name="example51",
    )


def _arctan_basin() -> Problem:
    """2-D nonconvex objective x^2/10 + y^2/5 - arctan(1/(x^2 + 2y^2 + 0.2)).

    Strongly quasiconvex with gamma = 0.2; minimizer (0, 0) with optimal
    value -arctan 5.  The gradient Lipschitz constant is not published for
    this objective; L = 8 is adopted so that the benchmark step size
    s = 0.125 equals 1/L, keeping the preset inside the certified regime.
    """

    def f(p: Vector) -> float:
        x, y = p
        u = x * x + 2.0 * y * y + 0.2
        return float(x * x / 10.0 + y * y / 5.0 - math.atan(1.0 / u))

    def g(p: Vector) -> Vector:
        x, y = p
        u = x * x + 2.0 * y * y + 0.2
        w = 1.0 / (u * u + 1.0)
        return np.array([x / 5.0 + 2.0 * x * w, 2.0 * y / 5.0 + 4.0 * y * w])

    return Problem(
        dimension=2,
        func=f,
        grad=g,
        gamma=0.2,
        lipschitz=8.0,
        minimizer=np.array([0.0, 0.0]),
        min_value=-math.atan(5.0),
        name="example52",
    )


def make_quadratic(spectrum: Sequence[float]) -> Problem:
    """Diagonal quadratic f(x) = 1/2 sum_i lambda_i x_i^2 with lambda_i > 0.

    gamma = min(spectrum), L = max(spectrum), minimizer 0, optimal value 0.
    """
    lam = np.asarray(list(spectrum), dtype=np.float64)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("spectrum must be a nonempty sequence of reals")
    if not np.all(lam > 0):
        raise ValueError("quadratic spectrum must be strictly positive")
    lam.setflags(write=False)
    d = int(lam.size)

    def f(x: Vector) -> float:
        return float(0.5 * np.dot(lam * x, x))

    def g(x: Vector) -> Vector:
        return lam * x

    return Problem(
        dimension=d,
        func=f,
        grad=g,
        gamma=float(lam.min()),
        lipschitz=float(lam.max()),
        minimizer=np.zeros(d),
        min_value=0.0,
        name=f"quadratic({d},{list(map(float, lam))})",
    )


_QUADRATIC_RE = re.compile(
    r"^quadratic\(\s*(\d+)\s*,\s*\[([^\]]*)\]\s*\)$"
)


def builtin_problem(name: str) -> Problem:
    """Look up a built-in problem by identifier.

    Accepts ``example51``, ``example52``, or ``quadratic(d,[l1,...,ld])``.
    """
    key = name.strip()
    if key == "example51":
        return _sine_well()
    if key == "example52":
        return _arctan_basin()
    m = _QUADRATIC_RE.match(key)
    if m:
        d = int(m.group(1))
        try:
            spectrum = [float(tok) for tok in m.group(2).split(",") if tok.strip()]
        except ValueError as exc:
            raise UnknownProblem(f"bad quadratic spectrum in {name!r}") from exc
        if len(spectrum) != d:
            raise UnknownProblem(
                f"quadratic({d}, ...) needs {d} eigenvalues, got {len(spectrum)}"
            )
        return make_quadratic(spectrum)
    raise UnknownProblem(
        f"unknown problem {name!r}; expected example51, example52 "
        "or quadratic(d,[l1,...,ld])"
    )
