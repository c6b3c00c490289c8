"""Numerical kernels: adaptive Simpson quadrature and bisection.

Everything here is plain Python over float callables, apart from the
vectorised helpers at the bottom which operate on numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NoBracket, QuadratureFailure

MAX_DEPTH = 60
MAX_PANELS = 200_000


@dataclass(frozen=True)
class SimpsonResult:
    value: float
    # Accepted panel edges (len = n_panels + 1) and the per-panel integrals.
    edges: np.ndarray
    panel_values: np.ndarray
    evaluations: int


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    *,
    max_depth: int = MAX_DEPTH,
) -> SimpsonResult:
    """Integrate ``f`` over ``[a, b]`` by adaptive composite Simpson.

    A panel is accepted when the two-half Simpson estimate differs from the
    whole-panel estimate by at most ``15 * tol_panel``; otherwise it is
    halved and each half inherits half the tolerance.  Accepted panels get
    the usual Richardson correction.  Panels are returned left to right so
    callers can build cumulative integrals.

    Raises QuadratureFailure if a panel reaches ``max_depth`` halvings
    without converging, or if the panel budget is exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if b < a:
        raise ValueError("require a <= b")
    if b == a:
        return SimpsonResult(0.0, np.array([a, b]), np.zeros(1), 0)

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    n_eval = 3
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # Depth-first, left child pushed last so panels come out in order.
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    edges = [a]
    values = []
    while stack:
        lo, hi, flo, fmid, fhi, est, ptol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flm, frm = f(lmid), f(rmid)
        n_eval += 2
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if abs(delta) <= 15.0 * ptol:
            values.append(left + right + delta / 15.0)
            edges.append(hi)
            continue
        if depth >= max_depth:
            raise QuadratureFailure(
                f"no convergence on [{lo:.6g}, {hi:.6g}] after {depth} halvings"
            )
        if len(values) + len(stack) > MAX_PANELS:
            raise QuadratureFailure(f"panel budget of {MAX_PANELS} exhausted")
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * ptol, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * ptol, depth + 1))

    panel_values = np.asarray(values)
    return SimpsonResult(
        value=float(np.sum(panel_values)),
        edges=np.asarray(edges),
        panel_values=panel_values,
        evaluations=n_eval,
    )


def bisect_increasing(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    ftol: float,
    *,
    max_iter: int = 200,
) -> float:
    """Find x in [lo, hi] with |f(x) - target| <= ftol for nondecreasing f.

    The stopping rule is on the function value, not on x.
    """
    f_lo = f(lo) - target
    if abs(f_lo) <= ftol:
        return lo
    f_hi = f(hi) - target
    if abs(f_hi) <= ftol:
        return hi
    if f_lo > 0 or f_hi < 0:
        raise NoBracket(
            f"target {target!r} not bracketed: f(lo)={f_lo + target!r}, f(hi)={f_hi + target!r}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid) - target
        if abs(f_mid) <= ftol:
            return mid
        if mid == lo or mid == hi:
            break  # float resolution exhausted
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
    raise NoBracket(f"bisection did not reach tolerance {ftol:g} for target {target!r}")


def simpson_richardson(
    f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray
) -> np.ndarray:
    """Elementwise two-half Simpson estimate with Richardson correction.

    Same five-point rule an accepted adaptive panel uses, applied to many
    intervals at once.
    """
    h = hi - lo
    mid = lo + 0.5 * h
    f0, f1, f2, f3, f4 = (
        f(lo),
        f(lo + 0.25 * h),
        f(mid),
        f(lo + 0.75 * h),
        f(hi),
    )
    whole = h / 6.0 * (f0 + 4.0 * f2 + f4)
    halves = h / 12.0 * (f0 + 4.0 * f1 + 2.0 * f2 + 4.0 * f3 + f4)
    return halves + (halves - whole) / 15.0
