"""Scalar root finders.

``bisect`` is the accurate bracketed solver used for extinction probabilities.
``zeroin`` and ``uniroot_all`` follow R's ``stats::uniroot`` (Brent's zeroin, C
source R_zeroin2) and ``rootSolve::uniroot.all`` step for step, so that tables
produced with those defaults can be reproduced digit for digit, including the
error their loose default tolerance leaves in the result.
"""
from __future__ import annotations

import sys
from collections.abc import Callable

from .errors import ConvergenceError, ParameterDomainError

DBL_EPSILON = sys.float_info.epsilon
R_UNIROOT_TOL = DBL_EPSILON**0.2


def bisect(f: Callable[[float], float], lo: float, hi: float, *, max_iter: int = 2000) -> float:
    """Bisect a sign change of ``f`` on [lo, hi] down to adjacent floats.

    Returns the endpoint of the final bracket with the smaller ``|f|``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ParameterDomainError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(max_iter):
        mid = lo + (hi - lo) / 2
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    else:
        raise ConvergenceError("bisection did not shrink the bracket to machine precision")
    return lo if abs(flo) <= abs(fhi) else hi


def zeroin(f, ax, bx, fa, fb, tol=R_UNIROOT_TOL, maxit=1000):
    """Brent's zeroin with R's conventions; returns ``(root, iterations)``."""
    a, b = ax, bx
    c, fc = a, fa
    if fa == 0.0:
        return a, 0
    if fb == 0.0:
        return b, 0
    left = maxit + 1
    while left:
        left -= 1
        prev_step = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol_act = 2 * DBL_EPSILON * abs(b) + tol / 2
        new_step = (c - b) / 2
        if abs(new_step) <= tol_act or fb == 0.0:
            return b, maxit + 1 - left
        # interpolation only when the previous step was large and went the right way
        if abs(prev_step) >= tol_act and abs(fa) > abs(fb):
            cb = c - b
            if a == c:
                t1 = fb / fa
                p = cb * t1
                q = 1.0 - t1
            else:
                q = fa / fc
                t1 = fb / fc
                t2 = fb / fa
                p = t2 * (cb * q * (q - t1) - (b - a) * (t1 - 1.0))
                q = (q - 1.0) * (t1 - 1.0) * (t2 - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if p < (0.75 * cb * q - abs(tol_act * q) / 2) and p < abs(prev_step * q / 2):
                new_step = p / q
        if abs(new_step) < tol_act:
            new_step = tol_act if new_step > 0 else -tol_act
        a, fa = b, fb
        b += new_step
        fb = f(b)
        if (fb > 0 and fc > 0) or (fb < 0 and fc < 0):
            c, fc = a, fa
    raise ConvergenceError(f"zeroin did not converge in {maxit} iterations")


def uniroot_all(f, lower, upper, n=100, tol=R_UNIROOT_TOL, maxiter=1000) -> list[float]:
    """All roots found by scanning ``n`` equal subintervals and refining each sign change.

    Grid points where ``f`` is exactly zero come first, as in rootSolve.
    """
    by = (upper - lower) / n
    xs = [lower + i * by for i in range(n)] + [upper]
    fx = [f(x) for x in xs]
    roots = [x for x, v in zip(xs, fx) if v == 0.0]
    for i in range(n):
        if fx[i] * fx[i + 1] < 0:
            root, _ = zeroin(f, xs[i], xs[i + 1], fx[i], fx[i + 1], tol, maxiter)
            roots.append(root)
    return roots

