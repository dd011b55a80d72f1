"""Powell and BFGS minimizers with exact objective-call accounting.

Both methods follow the classic formulations (conjugate-direction sweeps
with Brent line minimization; inverse-Hessian BFGS with a strong-Wolfe line
search on forward-difference gradients).  Every call made to the objective,
including bracketing steps and gradient probes, counts towards ``nfev``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import NonFiniteObjectiveError

Objective = Callable[[np.ndarray], float]

_GOLD = 1.618034
_CGOLD = 0.3819660
_TINY = 1e-21
_BRENT_MINTOL = 1.0e-11
_LINE_STEPS = 100


class Method(str, Enum):
    POWELL = "powell"
    BFGS = "bfgs"


@dataclass(frozen=True)
class OptimizerConfig:
    method: Method = Method.POWELL
    xtol: float = 1e-4
    ftol: float = 1e-4
    gtol: float = 1e-5
    fd_step: float = 1.49e-8
    maxiter: int | None = None
    maxfev: int | None = None

    def __post_init__(self):
        for name in ("xtol", "ftol", "gtol", "fd_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "method", Method(self.method))


@dataclass
class OptResult:
    best_params: np.ndarray
    best_value: float
    nfev: int
    iterations: int
    converged: bool
    message: str = ""
    history: list[float] = field(default_factory=list, repr=False)


class _StopSearch(Exception):
    pass


class _Counted:
    """Objective wrapper: counts calls, rejects non-finite values, keeps the best point."""

    def __init__(self, fun: Objective, maxfev: int | None):
        self.fun = fun
        self.maxfev = maxfev
        self.nfev = 0
        self.best_x: np.ndarray | None = None
        self.best_f = math.inf

    def __call__(self, x: np.ndarray) -> float:
        if self.maxfev is not None and self.nfev >= self.maxfev:
            raise _StopSearch
        self.nfev += 1
        value = float(self.fun(x))
        if not math.isfinite(value):
            raise NonFiniteObjectiveError(
                f"objective returned {value} at evaluation {self.nfev}, x={np.array2string(x)}"
            )
        if value < self.best_f:
            self.best_f = value
            self.best_x = np.array(x, dtype=float, copy=True)
        return value


def finite_diff_gradient(
    objective: Objective, x, fd_step: float = 1.49e-8, f0: float | None = None
) -> np.ndarray:
    """Forward-difference gradient; ``len(x) + 1`` calls, or ``len(x)`` if ``f0`` is given."""
    if not fd_step > 0:
        raise ValueError("fd_step must be positive")
    x = np.asarray(x, dtype=float)
    if f0 is None:
        f0 = objective(x)
    grad = np.empty_like(x)
    probe = x.copy()
    for i in range(x.size):
        probe[i] = x[i] + fd_step
        grad[i] = (objective(probe) - f0) / fd_step
        probe[i] = x[i]
    return grad


# --------------------------------------------------------------------------
# Powell


def _bracket(f1d, fa: float, xb: float = 1.0):
    xa = 0.0
    fb = f1d(xb)
    if fa < fb:
        xa, xb, fa, fb = xb, xa, fb, fa
    xc = xb + _GOLD * (xb - xa)
    fc = f1d(xc)
    steps = 0
    while fc < fb and steps < _LINE_STEPS:
        steps += 1
        tmp1 = (xb - xa) * (fb - fc)
        tmp2 = (xb - xc) * (fb - fa)
        val = tmp2 - tmp1
        denom = 2.0 * _TINY if abs(val) < _TINY else 2.0 * val
        w = xb - ((xb - xc) * tmp2 - (xb - xa) * tmp1) / denom
        wlim = xb + 110.0 * (xc - xb)
        if (w - xc) * (xb - w) > 0.0:
            fw = f1d(w)
            if fw < fc:
                xa, xb, fa, fb = xb, w, fb, fw
                break
            if fw > fb:
                xc, fc = w, fw
                break
            w = xc + _GOLD * (xc - xb)
            fw = f1d(w)
        elif (w - wlim) * (wlim - xc) >= 0.0:
            w = wlim
            fw = f1d(w)
        elif (w - wlim) * (xc - w) > 0.0:
            fw = f1d(w)
            if fw < fc:
                xb, xc, w = xc, w, w + _GOLD * (w - xc)
                fb, fc = fc, fw
                fw = f1d(w)
        else:
            w = xc + _GOLD * (xc - xb)
            fw = f1d(w)
        xa, xb, xc = xb, xc, w
        fa, fb, fc = fb, fc, fw
    return xa, xb, xc, fb


def _brent(f1d, xa: float, xb: float, xc: float, fb: float, tol: float) -> None:
    a, b = (xa, xc) if xa < xc else (xc, xa)
    x = w = v = xb
    fx = fw = fv = fb
    deltax = rat = 0.0
    for _ in range(_LINE_STEPS):
        tol1 = tol * abs(x) + _BRENT_MINTOL
        tol2 = 2.0 * tol1
        xmid = 0.5 * (a + b)
        if abs(x - xmid) < (tol2 - 0.5 * (b - a)):
            break
        if abs(deltax) <= tol1:
            deltax = a - x if x >= xmid else b - x
            rat = _CGOLD * deltax
        else:
            tmp1 = (x - w) * (fx - fv)
            tmp2 = (x - v) * (fx - fw)
            p = (x - v) * tmp2 - (x - w) * tmp1
            tmp2 = 2.0 * (tmp2 - tmp1)
            if tmp2 > 0.0:
                p = -p
            tmp2 = abs(tmp2)
            dx_temp, deltax = deltax, rat
            if p > tmp2 * (a - x) and p < tmp2 * (b - x) and abs(p) < abs(0.5 * tmp2 * dx_temp):
                rat = p / tmp2
                u = x + rat
                if (u - a) < tol2 or (b - u) < tol2:
                    rat = tol1 if xmid - x >= 0 else -tol1
            else:
                deltax = a - x if x >= xmid else b - x
                rat = _CGOLD * deltax
        u = x + (math.copysign(tol1, rat) if abs(rat) < tol1 else rat)
        fu = f1d(u)
        if fu > fx:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w, fv, fw = w, u, fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
        else:
            if u >= x:
                a = x
            else:
                b = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu


def _line_minimize(fun, x: np.ndarray, fx: float, direction: np.ndarray, tol: float):
    """Minimize along ``direction``; only a strict decrease moves the point."""
    best = [0.0, fx]

    def f1d(alpha: float) -> float:
        value = fun(x + alpha * direction)
        if value < best[1]:
            best[0], best[1] = alpha, value
        return value

    xa, xb, xc, fb = _bracket(f1d, fx)
    _brent(f1d, xa, xb, xc, fb, tol)
    alpha, fmin = best
    step = alpha * direction
    return fmin, x + step, step


def _powell(fun: _Counted, x0: np.ndarray, cfg: OptimizerConfig, maxiter: int):
    x = x0.copy()
    fval = fun(x)
    history = [fval]
    ndim = x.size
    direc = np.eye(ndim)
    iterations = 0
    converged = False
    message = "maximum iterations reached"
    try:
        while iterations < maxiter:
            fx = fval
            x_start = x.copy()
            bigind, delta = 0, 0.0
            for i in range(ndim):
                before = fval
                fval, x, _ = _line_minimize(fun, x, fval, direc[i], cfg.xtol * 100)
                if before - fval > delta:
                    delta, bigind = before - fval, i
            iterations += 1
            history.append(fval)
            # xtol enters through the line-search tolerance only
            if 2.0 * (fx - fval) <= cfg.ftol * (abs(fx) + abs(fval)) + 1e-20:
                converged = True
                message = "converged"
                break
            direc1 = x - x_start
            if not np.any(direc1):
                continue
            fx2 = fun(2.0 * x - x_start)
            if fx > fx2:
                t = 2.0 * (fx + fx2 - 2.0 * fval)
                t *= (fx - fval - delta) ** 2
                t -= delta * (fx - fx2) ** 2
                if t < 0.0:
                    fval, x, direc1 = _line_minimize(fun, x, fval, direc1, cfg.xtol * 100)
                    if np.any(direc1):
                        direc[bigind] = direc[-1]
                        direc[-1] = direc1
    except _StopSearch:
        message = "maximum function evaluations reached"
    return iterations, converged, message, history


# --------------------------------------------------------------------------
# BFGS


def _cubicmin(a, fa, fpa, b, fb, c, fc):
    with np.errstate(divide="raise", over="raise", invalid="raise"):
        try:
            C = fpa
            db, dc = b - a, c - a
            denom = (db * dc) ** 2 * (db - dc)
            d1 = np.array([[dc ** 2, -(db ** 2)], [-(dc ** 3), db ** 3]])
            A, B = d1 @ np.array([fb - fa - C * db, fc - fa - C * dc]) / denom
            radical = B * B - 3 * A * C
            xmin = a + (-B + np.sqrt(radical)) / (3 * A)
        except (ArithmeticError, FloatingPointError):
            return None
    return float(xmin) if np.isfinite(xmin) else None


def _quadmin(a, fa, fpa, b, fb):
    with np.errstate(divide="raise", over="raise", invalid="raise"):
        try:
            db = b - a
            B = (fb - fa - fpa * db) / (db * db)
            xmin = a - fpa / (2.0 * B)
        except (ArithmeticError, FloatingPointError):
            return None
    return float(xmin) if np.isfinite(xmin) else None


def _zoom(a_lo, a_hi, phi_lo, phi_hi, derphi_lo, phi, derphi, phi0, derphi0, c1, c2):
    delta1, delta2 = 0.2, 0.1
    phi_rec, a_rec = phi0, 0.0
    for i in range(10):
        dalpha = a_hi - a_lo
        a, b = (a_lo, a_hi) if dalpha >= 0 else (a_hi, a_lo)
        a_j = None
        if i > 0:
            cchk = delta1 * dalpha
            a_j = _cubicmin(a_lo, phi_lo, derphi_lo, a_hi, phi_hi, a_rec, phi_rec)
        if i == 0 or a_j is None or a_j > b - cchk or a_j < a + cchk:
            qchk = delta2 * dalpha
            a_j = _quadmin(a_lo, phi_lo, derphi_lo, a_hi, phi_hi)
            if a_j is None or a_j > b - qchk or a_j < a + qchk:
                a_j = a_lo + 0.5 * dalpha
        phi_aj = phi(a_j)
        if phi_aj > phi0 + c1 * a_j * derphi0 or phi_aj >= phi_lo:
            phi_rec, a_rec = phi_hi, a_hi
            a_hi, phi_hi = a_j, phi_aj
        else:
            derphi_aj = derphi(a_j)
            if abs(derphi_aj) <= -c2 * derphi0:
                return a_j, phi_aj
            if derphi_aj * (a_hi - a_lo) >= 0:
                phi_rec, a_rec = phi_hi, a_hi
                a_hi, phi_hi = a_lo, phi_lo
            else:
                phi_rec, a_rec = phi_lo, a_lo
            a_lo, phi_lo, derphi_lo = a_j, phi_aj, derphi_aj
    return None, None


def _wolfe_search(phi, derphi, phi0, old_phi0, derphi0, c1=1e-4, c2=0.9, maxiter=10):
    """Strong-Wolfe step length (bracketing phase followed by zoom)."""
    alpha0 = 0.0
    if old_phi0 is not None and derphi0 != 0:
        alpha1 = min(1.0, 1.01 * 2 * (phi0 - old_phi0) / derphi0)
        if alpha1 <= 0:
            alpha1 = 1.0
    else:
        alpha1 = 1.0
    phi_a0, derphi_a0 = phi0, derphi0
    phi_a1 = phi(alpha1)
    for i in range(maxiter):
        if alpha1 == 0:
            break
        if phi_a1 > phi0 + c1 * alpha1 * derphi0 or (phi_a1 >= phi_a0 and i > 0):
            return _zoom(alpha0, alpha1, phi_a0, phi_a1, derphi_a0, phi, derphi, phi0, derphi0, c1, c2)
        derphi_a1 = derphi(alpha1)
        if abs(derphi_a1) <= -c2 * derphi0:
            return alpha1, phi_a1
        if derphi_a1 >= 0:
            return _zoom(alpha1, alpha0, phi_a1, phi_a0, derphi_a1, phi, derphi, phi0, derphi0, c1, c2)
        alpha2 = 2 * alpha1
        alpha0, alpha1 = alpha1, alpha2
        phi_a0, phi_a1, derphi_a0 = phi_a1, phi(alpha1), derphi_a1
    return None, None


def _bfgs(fun: _Counted, x0: np.ndarray, cfg: OptimizerConfig, maxiter: int):
    xk = x0.copy()
    ndim = xk.size
    eye = np.eye(ndim)
    hk = eye.copy()
    iterations = 0
    converged = False
    message = "maximum iterations reached"
    history: list[float] = []
    try:
        old_fval = fun(xk)
        history.append(old_fval)
        gfk = finite_diff_gradient(fun, xk, cfg.fd_step, f0=old_fval)
        old_old_fval = old_fval + np.linalg.norm(gfk) / 2
        gnorm = float(np.max(np.abs(gfk), initial=0.0))
        if gnorm <= cfg.gtol:
            return 0, True, "converged", history
        while iterations < maxiter:
            pk = -hk @ gfk
            cache: dict[float, tuple[float, np.ndarray | None]] = {}

            def phi(alpha, xk=xk, pk=pk, cache=cache):
                value = fun(xk + alpha * pk)
                cache[alpha] = (value, None)
                return value

            def derphi(alpha, xk=xk, pk=pk, cache=cache):
                point = xk + alpha * pk
                f0 = cache[alpha][0] if alpha in cache else fun(point)
                grad = finite_diff_gradient(fun, point, cfg.fd_step, f0=f0)
                cache[alpha] = (f0, grad)
                return float(grad @ pk)

            derphi0 = float(gfk @ pk)
            alpha, fnew = _wolfe_search(phi, derphi, old_fval, old_old_fval, derphi0)
            if alpha is None:
                message = "line search failed to satisfy the Wolfe conditions"
                break
            sk = alpha * pk
            xk = xk + sk
            gfkp1 = cache[alpha][1]
            if gfkp1 is None:
                gfkp1 = finite_diff_gradient(fun, xk, cfg.fd_step, f0=fnew)
            yk = gfkp1 - gfk
            gfk = gfkp1
            old_old_fval, old_fval = old_fval, fnew
            iterations += 1
            history.append(min(fun.best_f, fnew))
            gnorm = float(np.max(np.abs(gfk), initial=0.0))
            if gnorm <= cfg.gtol:
                converged = True
                message = "converged"
                break
            ys = float(yk @ sk)
            rho = 1000.0 if ys == 0.0 else 1.0 / ys
            a1 = eye - rho * np.outer(sk, yk)
            a2 = eye - rho * np.outer(yk, sk)
            hk = a1 @ hk @ a2 + rho * np.outer(sk, sk)
    except _StopSearch:
        message = "maximum function evaluations reached"
    return iterations, converged, message, history


def minimize(objective: Objective, x0, cfg: OptimizerConfig | None = None) -> OptResult:
    """Minimize ``objective`` from ``x0``; the result carries the best point ever evaluated."""
    cfg = cfg or OptimizerConfig()
    x0 = np.array(x0, dtype=float).ravel()
    if cfg.method is Method.POWELL:
        maxiter = cfg.maxiter if cfg.maxiter is not None else 1000 * x0.size
        maxfev = cfg.maxfev if cfg.maxfev is not None else 1000 * x0.size
        fun = _Counted(objective, maxfev)
        iterations, converged, message, history = _powell(fun, x0, cfg, maxiter)
    else:
        maxiter = cfg.maxiter if cfg.maxiter is not None else 200 * x0.size
        fun = _Counted(objective, cfg.maxfev)
        iterations, converged, message, history = _bfgs(fun, x0, cfg, maxiter)
    history = list(np.minimum.accumulate(history)) if history else []
    return OptResult(
        best_params=fun.best_x,
        best_value=fun.best_f,
        nfev=fun.nfev,
        iterations=iterations,
        converged=converged,
        message=message,
        history=[float(h) for h in history],
    )
