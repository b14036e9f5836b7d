"""Real-root isolation and extrema for polynomials on an interval.

Coefficients are ascending-power in a local variable.  Roots are found by
recursive sign bisection: the sign-changing roots of the derivative split
the interval into monotone segments and each bracketing segment is
bisected.  Closed forms are used only for degrees one and two.  Roots of
even multiplicity (no sign change) are not reported; they carry no measure
for the level-set and absolute-value integrations built on top of this
module, and extrema are recovered from derivative roots instead.
"""

import numpy as np

_polyval = np.polynomial.polynomial.polyval

_BISECT_ITERS = 60
_ZERO_REL = 1e-13


def pval(c: np.ndarray, x):
    return _polyval(x, c)


def pder(c: np.ndarray) -> np.ndarray:
    if len(c) <= 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, len(c), dtype=float)


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1)
    keep = np.nonzero(np.abs(c) > 1e-15 * scale)[0]
    if keep.size == 0:
        return np.zeros(1)
    return c[: keep[-1] + 1]


def _bisect_many(c, lo, hi):
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    flo = pval(c, lo)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        fm = pval(c, mid)
        left = flo * fm <= 0.0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        flo = np.where(left, flo, fm)
    return 0.5 * (lo + hi)


def _quadratic_roots(c, lo, hi):
    a2, a1, a0 = c[2], c[1], c[0]
    scale = max(abs(a2), abs(a1), abs(a0))
    if abs(a2) <= 1e-15 * scale:
        return _linear_roots(c[:2], lo, hi)
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc < 0.0:
        return []
    sq = np.sqrt(disc)
    q = -0.5 * (a1 + np.copysign(sq, a1 if a1 != 0.0 else 1.0))
    roots = [q / a2]
    if q != 0.0:
        roots.append(a0 / q)
    return [r for r in set(roots) if lo - 1e-14 <= r <= hi + 1e-14]


def _linear_roots(c, lo, hi):
    if abs(c[1]) <= 1e-300:
        return []
    r = -c[0] / c[1]
    return [r] if lo - 1e-14 <= r <= hi + 1e-14 else []


def real_roots(c, lo: float, hi: float) -> np.ndarray:
    """Sign-changing roots of the polynomial in [lo, hi], sorted.

    Endpoint and critical-point values within 1e-13 of zero (relative to
    the coefficient scale) count as roots.
    """
    c = _trim(c)
    deg = len(c) - 1
    if deg == 0:
        return np.empty(0)
    if deg == 1:
        found = _linear_roots(c, lo, hi)
    elif deg == 2:
        found = _quadratic_roots(c, lo, hi)
    else:
        crit = real_roots(pder(c), lo, hi)
        pts = np.unique(np.concatenate(([lo], crit, [hi])))
        vals = pval(c, pts)
        tol = _ZERO_REL * max(np.max(np.abs(c)), np.max(np.abs(vals)))
        found = [float(p) for p, v in zip(pts, vals) if abs(v) <= tol]
        sign = np.where(np.abs(vals) <= tol, 0.0, np.sign(vals))
        blo, bhi = [], []
        for i in range(len(pts) - 1):
            if sign[i] * sign[i + 1] < 0.0:
                blo.append(pts[i])
                bhi.append(pts[i + 1])
        if blo:
            found.extend(float(r) for r in _bisect_many(c, blo, bhi))
    if not len(found):
        return np.empty(0)
    roots = np.sort(np.clip(np.asarray(found, dtype=float), lo, hi))
    keep = [roots[0]]
    for r in roots[1:]:
        if r - keep[-1] > 1e-13:
            keep.append(r)
    return np.asarray(keep)


def extrema_candidates(c, lo: float, hi: float) -> np.ndarray:
    """Endpoints plus interior critical points; covers every extremum."""
    c = _trim(c)
    if len(c) <= 2:
        return np.array([lo, hi])
    crit = real_roots(pder(c), lo, hi)
    return np.unique(np.concatenate(([lo, hi], crit)))


def max_abs_on(c, lo: float, hi: float) -> float:
    pts = extrema_candidates(c, lo, hi)
    return float(np.max(np.abs(pval(c, pts))))


def min_max_on(c, lo: float, hi: float):
    pts = extrema_candidates(c, lo, hi)
    vals = pval(c, pts)
    i, j = int(np.argmin(vals)), int(np.argmax(vals))
    return float(vals[i]), float(vals[j]), float(pts[i]), float(pts[j])


def sign_segments(c, lo: float, hi: float):
    """Partition [lo, hi] into maximal segments of constant sign.

    Returns (a, b, s) triples with s in {-1, 0, +1}; s = 0 marks a segment
    on which the polynomial is numerically zero.
    """
    c = _trim(c)
    cuts = real_roots(c, lo, hi)
    pts = np.unique(np.concatenate(([lo], cuts, [hi])))
    scale = max(np.max(np.abs(c)), 1e-300)
    out = []
    for i in range(len(pts) - 1):
        a, b = float(pts[i]), float(pts[i + 1])
        if b - a <= 0.0:
            continue
        v = float(pval(c, 0.5 * (a + b)))
        s = 0 if abs(v) <= _ZERO_REL * scale else (1 if v > 0 else -1)
        out.append((a, b, s))
    return out
