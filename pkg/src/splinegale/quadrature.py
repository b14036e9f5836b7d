"""Gauss-Legendre quadrature, fixed and adaptive.

Fixed rules are exact for polynomials (n nodes integrate degree 2n-1);
the adaptive routine is used only for non-polynomial integrands such as
square roots of square functions or fractional powers.
"""

from functools import lru_cache

import numpy as np

from .errors import QuadratureNonConvergence


@lru_cache(maxsize=None)
def gauss_nodes(n: int):
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def nodes_for_degree(degree: int):
    """Smallest rule exact for polynomials of the given degree."""
    n = max(1, (degree + 2) // 2)
    return gauss_nodes(n)


def gauss_on(f, a: float, b: float, n: int) -> float:
    """Fixed n-point rule on [a, b] for a vectorized integrand."""
    if a == b:
        return 0.0
    x, w = gauss_nodes(n)
    mid, hw = 0.5 * (a + b), 0.5 * (b - a)
    return hw * float(np.dot(w, f(mid + hw * x)))


def adaptive_quadrature(f, a: float, b: float, rel_tol: float = 1e-10,
                        max_depth: int = 40) -> float:
    """Adaptive Gauss quadrature of a vectorized integrand on [a, b].

    The whole active front of intervals is evaluated in one batched call
    per depth, with errors estimated from an embedded 8/16-point pair
    against a budget proportional to interval length.  Intervals still
    unresolved at `max_depth` (by then ~1e-12 of the original length,
    e.g. around square-root kinks) are accepted while their estimated
    error is charged to a global budget; only exhausting it raises.
    """
    if a == b:
        return 0.0
    x8, w8 = gauss_nodes(8)
    x16, w16 = gauss_nodes(16)

    def eval_batch(lo, hi):
        mid, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
        pts8 = (mid[:, None] + hw[:, None] * x8[None, :]).ravel()
        pts16 = (mid[:, None] + hw[:, None] * x16[None, :]).ravel()
        v8 = np.asarray(f(pts8)).reshape(len(lo), 8)
        v16 = np.asarray(f(pts16)).reshape(len(lo), 16)
        vmax = np.max(np.abs(v16), axis=1)
        return hw * (v8 @ w8), hw * (v16 @ w16), hw * vmax

    lo = np.array([a])
    hi = np.array([b])
    i8, i16, bound = eval_batch(lo, hi)
    tol_abs = rel_tol * max(abs(i16[0]), 1e-14)
    total = 0.0
    forced = 0.0
    for depth in range(max_depth + 1):
        err = np.abs(i16 - i8)
        done = (err <= tol_abs * (hi - lo) / (b - a)) | (hi - lo < 1e-15 * (b - a))
        # intervals whose entire mass is provably negligible (e.g. the
        # roundoff-noise zone of a square-root around a double zero) are
        # accepted with their bound charged against the error budget
        tiny = ~done & (bound <= 1e-2 * tol_abs)
        forced += float(bound[tiny].sum())
        done |= tiny
        total += float(i16[done].sum())
        if depth == max_depth:
            rest = ~done
            total += float(i16[rest].sum())
            forced += float(err[rest].sum())
        if forced > tol_abs:
            raise QuadratureNonConvergence(
                f"error budget exhausted at depth {depth}"
            )
        if depth == max_depth:
            break
        lo, hi = lo[~done], hi[~done]
        if len(lo) == 0:
            break
        if len(lo) > (1 << 15):
            raise QuadratureNonConvergence(
                f"active front of {len(lo)} intervals at depth {depth}; "
                "integrand looks non-integrable or noisy"
            )
        mid = 0.5 * (lo + hi)
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        i8, i16, bound = eval_batch(lo, hi)
    return total
