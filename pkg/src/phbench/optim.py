"""Classical minimizers: BFGS, Polak-Ribiere conjugate gradient, Nelder-Mead.

The gradient-based methods share a strong-Wolfe line search (bracketing
with derivative-secant trials, zoom with alternating secant/bisection).
Everything is deterministic: identical inputs give identical traces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

METHODS = ("CG", "BFGS", "NelderMead")

# Simplex spread below which Nelder-Mead declares convergence.
NM_XATOL = 1e-8

_WOLFE_MAX_EXPAND = 30
_WOLFE_MAX_ZOOM = 60


class LineSearchError(RuntimeError):
    """No step satisfying the Wolfe conditions was found."""


def _canonical_method(name):
    key = name.replace("-", "").replace("_", "").lower()
    table = {"cg": "CG", "bfgs": "BFGS", "neldermead": "NelderMead"}
    if key not in table:
        raise ValueError(f"unknown optimizer {name!r}; choose from {METHODS}")
    return table[key]


@dataclass
class OptimizerConfig:
    """Method choice plus stopping and line-search settings.

    c2 defaults per method (0.1 for CG, 0.9 for BFGS) when left as None.
    """

    method: str = "BFGS"
    grad_tol: float = 1e-8
    f_tol: float = 1e-12
    max_iters: int = 10000
    c1: float = 1e-4
    c2: Optional[float] = None

    def __post_init__(self):
        self.method = _canonical_method(self.method)
        if self.grad_tol <= 0 or self.f_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        c2 = self.resolved_c2
        if not 0 < self.c1 < c2 < 1:
            raise ValueError(f"need 0 < c1 < c2 < 1, got c1={self.c1}, c2={c2}")

    @property
    def resolved_c2(self):
        if self.c2 is not None:
            return self.c2
        return 0.1 if self.method == "CG" else 0.9


@dataclass
class ObjectiveHandle:
    """A scalar objective, optionally with a gradient, of fixed dimension.

    With debug=True the gradient is checked once against central finite
    differences (step 1e-6, tolerance 1e-5) at two fixed probe points.
    """

    value: Callable
    gradient: Optional[Callable]
    dim: int
    debug: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("objective dimension must be >= 1")
        if self.debug and self.gradient is not None:
            rng = np.random.default_rng(0)
            for _ in range(2):
                point = rng.standard_normal(self.dim)
                fd = _central_difference(self.value, point, 1e-6)
                err = float(np.max(np.abs(np.asarray(self.gradient(point)) - fd)))
                if err > 1e-5:
                    raise ValueError(
                        f"gradient disagrees with finite differences by {err:.3e}"
                    )


def _central_difference(value, point, step):
    out = np.zeros(point.shape[0])
    for j in range(point.shape[0]):
        shifted = point.copy()
        shifted[j] = point[j] + step
        plus = value(shifted)
        shifted[j] = point[j] - step
        minus = value(shifted)
        out[j] = (plus - minus) / (2.0 * step)
    return out


@dataclass
class OptimizationTrace:
    final_params: np.ndarray
    final_value: float
    iterations: int
    function_evals: int
    gradient_evals: int
    termination: str  # converged-grad | converged-f | max-iters


# -- strong Wolfe line search ----------------------------------------------------


def _wolfe_search(evaluate, f0, g0, direction, c1, c2, alpha0=1.0):
    """Find alpha with the strong Wolfe conditions along a descent direction.

    `evaluate(alpha)` must return (f, grad_vector, grad . direction) at the
    displaced point. Returns (alpha, f, grad_vector). Bracketing expands by
    a derivative secant (exact on quadratics) and zoom alternates secant
    with bisection, so the interval provably shrinks.
    """
    dphi0 = float(np.dot(g0, direction))
    if dphi0 >= 0:
        raise ValueError(f"not a descent direction: g . d = {dphi0:.3e}")

    def zoom(lo, f_lo, gd_lo, hi, f_hi, gd_hi):
        for j in range(_WOLFE_MAX_ZOOM):
            width = hi - lo
            if abs(width) < 1e-18 * max(1.0, abs(lo)):
                raise LineSearchError("zoom interval collapsed")
            trial = None
            if j % 2 == 0 and gd_hi != gd_lo:
                cand = lo - gd_lo * width / (gd_hi - gd_lo)
                inner_lo = min(lo, hi) + 1e-10 * abs(width)
                inner_hi = max(lo, hi) - 1e-10 * abs(width)
                if inner_lo < cand < inner_hi:
                    trial = cand
            if trial is None:
                trial = lo + 0.5 * width
            f_t, g_t, gd_t = evaluate(trial)
            if f_t > f0 + c1 * trial * dphi0 or f_t >= f_lo:
                hi, f_hi, gd_hi = trial, f_t, gd_t
            else:
                if abs(gd_t) <= -c2 * dphi0:
                    return trial, f_t, g_t
                if gd_t * width >= 0:
                    hi, f_hi, gd_hi = lo, f_lo, gd_lo
                lo, f_lo, gd_lo = trial, f_t, gd_t
        raise LineSearchError("zoom failed to satisfy the Wolfe conditions")

    a_prev, f_prev, gd_prev = 0.0, f0, dphi0
    alpha = alpha0
    for i in range(_WOLFE_MAX_EXPAND):
        f_a, g_a, gd_a = evaluate(alpha)
        if f_a > f0 + c1 * alpha * dphi0 or (i > 0 and f_a >= f_prev):
            return zoom(a_prev, f_prev, gd_prev, alpha, f_a, gd_a)
        if abs(gd_a) <= -c2 * dphi0:
            return alpha, f_a, g_a
        if gd_a >= 0:
            return zoom(alpha, f_a, gd_a, a_prev, f_prev, gd_prev)
        if gd_a != gd_prev:
            nxt = alpha - gd_a * (alpha - a_prev) / (gd_a - gd_prev)
        else:
            nxt = 2.0 * alpha
        if not alpha < nxt <= 100.0 * alpha:
            nxt = 2.0 * alpha
        a_prev, f_prev, gd_prev = alpha, f_a, gd_a
        alpha = nxt
    raise LineSearchError("bracketing exhausted its expansion budget")


def wolfe_line_search(obj, point, direction, cfg):
    """Step length along `direction` satisfying both Wolfe conditions.

    Raises ValueError when the direction is not a descent direction and
    LineSearchError when the bounded search fails.
    """
    if obj.gradient is None:
        raise ValueError("a Wolfe line search needs a gradient")
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    f0 = obj.value(point)
    g0 = np.asarray(obj.gradient(point), dtype=float)

    def evaluate(alpha):
        moved = point + alpha * direction
        f = obj.value(moved)
        g = np.asarray(obj.gradient(moved), dtype=float)
        return f, g, float(np.dot(g, direction))

    alpha, _, _ = _wolfe_search(evaluate, f0, g0, direction, cfg.c1, cfg.resolved_c2)
    return alpha


# -- drivers ---------------------------------------------------------------------


def minimize(obj, start, cfg):
    """Minimize the objective from `start` under the given configuration.

    CG and BFGS require a gradient; line-search failure terminates the run
    with the best point so far and a max-iters status rather than raising.
    """
    start = np.asarray(start, dtype=float)
    if start.shape != (obj.dim,):
        raise ValueError(f"start has shape {start.shape}, expected ({obj.dim},)")

    counters = {"nf": 0, "ng": 0}

    def value(x):
        counters["nf"] += 1
        return float(obj.value(x))

    if cfg.method == "NelderMead":
        params, fval, iters, termination = _nelder_mead(value, start, cfg)
        return OptimizationTrace(params, fval, iters, counters["nf"], 0, termination)

    if obj.gradient is None:
        raise ValueError(f"{cfg.method} requires a gradient")

    def grad(x):
        counters["ng"] += 1
        return np.asarray(obj.gradient(x), dtype=float)

    params, fval, iters, termination = _descent_loop(value, grad, start, cfg)
    return OptimizationTrace(
        params, fval, iters, counters["nf"], counters["ng"], termination
    )


def _descent_loop(value, grad, start, cfg):
    """Shared BFGS / Polak-Ribiere CG iteration."""
    bfgs = cfg.method == "BFGS"
    c1, c2 = cfg.c1, cfg.resolved_c2
    x = start.copy()
    f = value(x)
    g = grad(x)
    dim = x.shape[0]
    hess_inv = np.eye(dim)
    direction = -g
    iters = 0

    while True:
        if float(np.max(np.abs(g))) <= cfg.grad_tol:
            return x, f, iters, "converged-grad"
        if iters >= cfg.max_iters:
            return x, f, iters, "max-iters"

        if bfgs:
            direction = -(hess_inv @ g)
        if float(np.dot(g, direction)) >= 0.0:
            direction = -g

        def evaluate(alpha, _x=x, _d=direction):
            moved = _x + alpha * _d
            f_m = value(moved)
            g_m = grad(moved)
            return f_m, g_m, float(np.dot(g_m, _d))

        try:
            alpha, f_new, g_new = _wolfe_search(evaluate, f, g, direction, c1, c2)
        except LineSearchError:
            return x, f, iters, "max-iters"

        step = alpha * direction
        y = g_new - g
        x = x + step
        df = f - f_new
        iters += 1

        if bfgs:
            sy = float(np.dot(step, y))
            if sy > 1e-14 * np.linalg.norm(step) * np.linalg.norm(y):
                rho = 1.0 / sy
                left = np.eye(dim) - rho * np.outer(step, y)
                hess_inv = left @ hess_inv @ left.T + rho * np.outer(step, step)
        else:
            gg = float(np.dot(g, g))
            beta = max(0.0, float(np.dot(g_new, g_new - g)) / gg) if gg > 0 else 0.0
            direction = -g_new + beta * direction

        f, g = f_new, g_new
        if float(np.max(np.abs(g))) <= cfg.grad_tol:
            return x, f, iters, "converged-grad"
        if abs(df) <= cfg.f_tol:
            return x, f, iters, "converged-f"


def _nelder_mead(value, start, cfg):
    """Standard downhill simplex with the usual 1 / 2 / 0.5 / 0.5 moves."""
    dim = start.shape[0]
    simplex = np.tile(start, (dim + 1, 1))
    for k in range(dim):
        if simplex[k + 1, k] != 0.0:
            simplex[k + 1, k] *= 1.05
        else:
            simplex[k + 1, k] = 0.00025
    fsim = np.array([value(v) for v in simplex])
    order = np.argsort(fsim, kind="stable")
    simplex, fsim = simplex[order], fsim[order]

    iters = 0
    while iters < cfg.max_iters:
        value_spread = float(np.max(np.abs(fsim[1:] - fsim[0])))
        vertex_spread = float(np.max(np.abs(simplex[1:] - simplex[0])))
        if value_spread <= cfg.f_tol and vertex_spread <= NM_XATOL:
            return simplex[0], float(fsim[0]), iters, "converged-f"
        iters += 1

        centroid = np.mean(simplex[:-1], axis=0)
        reflected = centroid + (centroid - simplex[-1])
        f_r = value(reflected)
        if f_r < fsim[0]:
            expanded = centroid + 2.0 * (centroid - simplex[-1])
            f_e = value(expanded)
            if f_e < f_r:
                simplex[-1], fsim[-1] = expanded, f_e
            else:
                simplex[-1], fsim[-1] = reflected, f_r
        elif f_r < fsim[-2]:
            simplex[-1], fsim[-1] = reflected, f_r
        else:
            if f_r < fsim[-1]:
                contracted = centroid + 0.5 * (centroid - simplex[-1])
            else:
                contracted = centroid - 0.5 * (centroid - simplex[-1])
            f_c = value(contracted)
            if f_c < min(f_r, fsim[-1]):
                simplex[-1], fsim[-1] = contracted, f_c
            else:
                for k in range(1, dim + 1):
                    simplex[k] = simplex[0] + 0.5 * (simplex[k] - simplex[0])
                    fsim[k] = value(simplex[k])
        order = np.argsort(fsim, kind="stable")
        simplex, fsim = simplex[order], fsim[order]

    return simplex[0], float(fsim[0]), iters, "max-iters"
