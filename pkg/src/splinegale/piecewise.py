"""Exact piecewise-polynomial arithmetic, norms and level sets on [0,1].

Each piece stores ascending monomial coefficients in the local variable
u = (x - mid)/halfwidth of its atom, which keeps Vandermonde and product
conditioning sane on small atoms.  All integrals of polynomial data go
through fixed Gauss-Legendre rules sized to the exact degree; only
genuinely non-polynomial integrands (square roots, fractional powers) use
adaptive quadrature.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegreeOverflow, EmptySet, NumericalGuard
from .partitions import Partition, common_refinement, is_refinement
from .quadrature import adaptive_quadrature, nodes_for_degree
from .rootfind import extrema_candidates, real_roots, sign_segments

DEGREE_CAP = 64

# sup-norm computations pair analytic extrema with this many sample points
# per piece and fail loudly if sampling beats the analytic value
_SUP_GUARD_SAMPLES = 512


def _affine_compose(c: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """Coefficients of p(alpha + beta*v) for ascending coefficients of p."""
    out = np.zeros(len(c))
    out[0] = c[-1]
    deg = 0
    for j in range(len(c) - 2, -1, -1):
        shifted = np.zeros(len(c))
        shifted[1 : deg + 2] = out[: deg + 1] * beta
        shifted[: deg + 1] += out[: deg + 1] * alpha
        deg += 1
        shifted[0] += c[j]
        out = shifted
    return out


@dataclass(frozen=True)
class IntervalUnion:
    """Disjoint sorted closed subintervals of [0,1]; touching ones merge."""

    intervals: tuple

    def __post_init__(self):
        raw = sorted((float(a), float(b)) for a, b in self.intervals if b > a)
        merged = []
        for a, b in raw:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @classmethod
    def of(cls, *pairs) -> "IntervalUnion":
        return cls(tuple(pairs))

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.intervals + other.intervals)

    def intersect(self, lo: float, hi: float) -> "IntervalUnion":
        out = [(max(a, lo), min(b, hi)) for a, b in self.intervals]
        return IntervalUnion(tuple(p for p in out if p[1] > p[0]))

    def subtract(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        for a, b in self.intervals:
            segs = [(a, b)]
            for c, d in other.intervals:
                nxt = []
                for lo, hi in segs:
                    if d <= lo or c >= hi:
                        nxt.append((lo, hi))
                        continue
                    if c > lo:
                        nxt.append((lo, c))
                    if d < hi:
                        nxt.append((d, hi))
                segs = nxt
            out.extend(segs)
        return IntervalUnion(tuple(out))

    def leftmost_subset(self, measure: float) -> "IntervalUnion":
        """Leftmost sub-union of exactly the requested measure."""
        take, left = [], measure
        for a, b in self.intervals:
            if left <= 0.0:
                break
            width = min(b - a, left)
            take.append((a, a + width))
            left -= width
        return IntervalUnion(tuple(take))

    def contains(self, other: "IntervalUnion", tol: float = 1e-12) -> bool:
        return other.subtract(self).measure <= tol

    def overlap(self, other: "IntervalUnion") -> float:
        return sum(
            self.intersect(a, b).measure for a, b in other.intervals
        )


class PiecewisePolynomial:
    """A polynomial of bounded degree on each atom of a partition."""

    __slots__ = ("grid", "coeffs", "_mids", "_hws")

    def __init__(self, grid: Partition, coeffs):
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
        if coeffs.shape[0] != grid.num_atoms:
            raise ValueError(
                f"{coeffs.shape[0]} pieces for {grid.num_atoms} atoms"
            )
        if coeffs.shape[1] > DEGREE_CAP + 1:
            raise DegreeOverflow(
                f"degree {coeffs.shape[1] - 1} exceeds cap {DEGREE_CAP}"
            )
        self.grid = grid
        self.coeffs = coeffs
        bp = np.asarray(grid.breakpoints)
        self._mids = 0.5 * (bp[1:] + bp[:-1])
        self._hws = 0.5 * (bp[1:] - bp[:-1])

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: float, grid: Partition | None = None):
        grid = grid or Partition.unit()
        return cls(grid, np.full((grid.num_atoms, 1), float(value)))

    @classmethod
    def step(cls, grid: Partition, values):
        """Piecewise-constant function with one value per atom."""
        vals = np.asarray(values, dtype=float).reshape(-1, 1)
        return cls(grid, vals)

    @classmethod
    def indicator(cls, a: float, b: float):
        bp = tuple(sorted({0.0, float(a), float(b), 1.0}))
        grid = Partition(bp, min_atom=min(np.diff(bp)))
        vals = [1.0 if a <= 0.5 * (bp[i] + bp[i + 1]) <= b else 0.0
                for i in range(len(bp) - 1)]
        return cls.step(grid, vals)

    @classmethod
    def from_power_basis(cls, global_coeffs, grid: Partition | None = None):
        """Build from ascending coefficients in the global variable x."""
        grid = grid or Partition.unit()
        g = np.asarray(global_coeffs, dtype=float)
        bp = np.asarray(grid.breakpoints)
        mids, hws = 0.5 * (bp[1:] + bp[:-1]), 0.5 * (bp[1:] - bp[:-1])
        rows = [_affine_compose(g, m, h) for m, h in zip(mids, hws)]
        return cls(grid, np.vstack(rows))

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def piece(self, i: int) -> np.ndarray:
        return self.coeffs[i]

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        idx = np.clip(
            np.searchsorted(self.grid.breakpoints, x_arr, side="right") - 1,
            0, self.grid.num_atoms - 1,
        )
        u = (x_arr - self._mids[idx]) / self._hws[idx]
        res = self.coeffs[idx, -1]
        for j in range(self.coeffs.shape[1] - 2, -1, -1):
            res = res * u + self.coeffs[idx, j]
        return res if x_arr.ndim else float(res)

    # -- grid handling -----------------------------------------------------

    def refine_to(self, grid: Partition) -> "PiecewisePolynomial":
        if grid.breakpoints == self.grid.breakpoints:
            return self
        if not is_refinement(grid, self.grid):
            raise ValueError("target grid does not refine the current grid")
        bp = np.asarray(grid.breakpoints)
        mids, hws = 0.5 * (bp[1:] + bp[:-1]), 0.5 * (bp[1:] - bp[:-1])
        src = np.clip(
            np.searchsorted(self.grid.breakpoints, mids, side="right") - 1,
            0, self.grid.num_atoms - 1,
        )
        rows = []
        for i, s in enumerate(src):
            alpha = (mids[i] - self._mids[s]) / self._hws[s]
            beta = hws[i] / self._hws[s]
            rows.append(_affine_compose(self.coeffs[s], alpha, beta))
        return PiecewisePolynomial(grid, np.vstack(rows))

    def _aligned(self, other: "PiecewisePolynomial"):
        grid = common_refinement(self.grid, other.grid)
        return self.refine_to(grid), other.refine_to(grid)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if np.isscalar(other):
            c = self.coeffs.copy()
            c[:, 0] += float(other)
            return PiecewisePolynomial(self.grid, c)
        a, b = self._aligned(other)
        wa, wb = a.coeffs.shape[1], b.coeffs.shape[1]
        w = max(wa, wb)
        c = np.zeros((a.coeffs.shape[0], w))
        c[:, :wa] += a.coeffs
        c[:, :wb] += b.coeffs
        return PiecewisePolynomial(a.grid, c)

    __radd__ = __add__

    def __neg__(self):
        return PiecewisePolynomial(self.grid, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if not np.isscalar(other) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return PiecewisePolynomial(self.grid, self.coeffs * float(other))
        a, b = self._aligned(other)
        d = a.degree + b.degree
        if d > DEGREE_CAP:
            raise DegreeOverflow(f"product degree {d} exceeds cap {DEGREE_CAP}")
        rows = [np.convolve(ra, rb) for ra, rb in zip(a.coeffs, b.coeffs)]
        return PiecewisePolynomial(a.grid, np.vstack(rows))

    __rmul__ = __mul__

    def square(self):
        return self * self

    # -- integration -------------------------------------------------------

    def integrate(self) -> float:
        x, w = nodes_for_degree(self.degree)
        vals = np.polynomial.polynomial.polyval(x, self.coeffs.T)
        return float(np.dot(self._hws, vals @ w))

    def integrate_on(self, lo: float, hi: float) -> float:
        return self._segment_sum(lo, hi, signed=True)

    def integrate_abs(self) -> float:
        return self._segment_sum(0.0, 1.0, signed=False)

    def integrate_abs_on(self, lo: float, hi: float) -> float:
        return self._segment_sum(lo, hi, signed=False)

    def _segment_sum(self, lo, hi, signed: bool) -> float:
        if hi <= lo:
            return 0.0
        bp = self.grid.breakpoints
        i0, i1 = self.grid.atom_index(lo), self.grid.atom_index(min(hi, 1.0) - 1e-300)
        x, w = nodes_for_degree(self.degree)
        total = 0.0
        for i in range(i0, i1 + 1):
            a = max(lo, bp[i])
            b = min(hi, bp[i + 1])
            if b <= a:
                continue
            ua = (a - self._mids[i]) / self._hws[i]
            ub = (b - self._mids[i]) / self._hws[i]
            c = self.coeffs[i]
            if signed:
                total += self._hws[i] * _gauss_local(c, ua, ub, x, w)
            else:
                for sa, sb, _s in sign_segments(c, ua, ub):
                    total += self._hws[i] * abs(_gauss_local(c, sa, sb, x, w))
        return total

    # -- norms ---------------------------------------------------------------

    def lp_norm(self, p: float, tol_quad: float = 1e-10) -> float:
        """L_p norm on [0,1]; exact for integer p and p = inf."""
        if p == np.inf:
            return self.sup_norm_on()
        if p < 1:
            raise ValueError("p must be >= 1")
        total = self.power_integral_abs(p, tol_quad)
        return float(total ** (1.0 / p))

    def power_integral_abs(self, p: float, tol_quad: float = 1e-10) -> float:
        """Integral of |f|^p; exact when p is a positive integer."""
        if p == int(p) and p >= 1:
            return self._int_power_integral(int(p))
        total = 0.0
        for i in range(self.grid.num_atoms):
            c, hw = self.coeffs[i], self._hws[i]
            for sa, sb, _s in sign_segments(c, -1.0, 1.0):
                total += hw * adaptive_quadrature(
                    lambda u: np.abs(pval_row(c, u)) ** p, sa, sb, tol_quad
                )
        return total

    def _int_power_integral(self, p: int) -> float:
        x, w = nodes_for_degree(self.degree * p)
        total = 0.0
        even = p % 2 == 0
        for i in range(self.grid.num_atoms):
            c, hw = self.coeffs[i], self._hws[i]
            if even:
                vals = pval_row(c, x)
                total += hw * float(np.dot(w, vals**p))
            else:
                for sa, sb, _s in sign_segments(c, -1.0, 1.0):
                    mid, shw = 0.5 * (sa + sb), 0.5 * (sb - sa)
                    vals = pval_row(c, mid + shw * x)
                    total += hw * shw * abs(float(np.dot(w, vals**p)))
        return total

    def lp_norm_on(self, p: float, lo: float, hi: float,
                   tol_quad: float = 1e-10) -> float:
        """L_p norm restricted to [lo, hi]; exact for integer p and inf."""
        if p == np.inf:
            return self.sup_norm_on((lo, hi))
        if p == int(p) and p >= 1:
            p_int = int(p)
            x, w = nodes_for_degree(self.degree * p_int)
            bp = self.grid.breakpoints
            i0 = self.grid.atom_index(lo)
            i1 = self.grid.atom_index(max(hi - 1e-300, 0.0))
            total = 0.0
            for i in range(i0, i1 + 1):
                a, b = max(lo, bp[i]), min(hi, bp[i + 1])
                if b <= a:
                    continue
                ua = (a - self._mids[i]) / self._hws[i]
                ub = (b - self._mids[i]) / self._hws[i]
                mid, shw = 0.5 * (ua + ub), 0.5 * (ub - ua)
                vals = np.abs(pval_row(self.coeffs[i], mid + shw * x))
                total += self._hws[i] * shw * float(np.dot(w, vals**p_int))
            return total ** (1.0 / p)
        total = adaptive_quadrature(
            lambda x: np.abs(self(x)) ** p, lo, hi, tol_quad
        )
        return float(total ** (1.0 / p))

    def sup_norm_on(self, interval=None) -> float:
        """Max of |f| on the interval (default all of [0,1]).

        Analytic extrema are cross-checked against a dense sample; a sample
        beating the analytic value means a missed extremum and raises.
        """
        lo, hi = interval if interval is not None else (0.0, 1.0)
        if hi < lo:
            raise ValueError("empty interval")
        best = 0.0
        bp = self.grid.breakpoints
        i0, i1 = self.grid.atom_index(lo), self.grid.atom_index(max(hi - 1e-300, 0.0))
        for i in range(i0, i1 + 1):
            a, b = max(lo, bp[i]), min(hi, bp[i + 1])
            if b < a:
                continue
            ua = (a - self._mids[i]) / self._hws[i]
            ub = (b - self._mids[i]) / self._hws[i]
            c = self.coeffs[i]
            pts = extrema_candidates(c, ua, ub)
            analytic = float(np.max(np.abs(pval_row(c, pts))))
            sample = float(
                np.max(np.abs(pval_row(c, np.linspace(ua, ub, _SUP_GUARD_SAMPLES))))
            )
            if sample > analytic * (1.0 + 1e-9) + 1e-13:
                raise NumericalGuard(
                    f"sampled sup {sample} exceeds analytic sup {analytic}"
                )
            best = max(best, analytic)
        return best

    # -- level sets ----------------------------------------------------------

    def super_level_set(self, threshold: float) -> IntervalUnion:
        """{x : f(x) >= threshold} as an interval union."""
        out = []
        for i in range(self.grid.num_atoms):
            c = self.coeffs[i].copy()
            c[0] -= threshold
            for sa, sb, s in sign_segments(c, -1.0, 1.0):
                if s >= 0:
                    out.append(
                        (self._mids[i] + self._hws[i] * sa,
                         self._mids[i] + self._hws[i] * sb)
                    )
        return IntervalUnion(tuple(out))

    def abs_super_level_set(self, threshold: float) -> IntervalUnion:
        return self.super_level_set(threshold).union(
            (-self).super_level_set(threshold)
        )

    def abs_cumulative(self, points) -> np.ndarray:
        """Integral of |f| from 0 to each of the (sorted) points."""
        pts = np.asarray(points, dtype=float)
        piece_tot = np.array(
            [self.integrate_abs_on(a, b) for a, b in self.grid.atoms()]
        )
        prefix = np.concatenate(([0.0], np.cumsum(piece_tot)))
        out = np.empty(len(pts))
        bp = self.grid.breakpoints
        for j, x in enumerate(pts):
            i = self.grid.atom_index(x)
            out[j] = prefix[i] + self.integrate_abs_on(bp[i], x)
        return out

    # -- serialization -------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"grid": list(self.grid.breakpoints),
             "pieces": [list(r) for r in self.coeffs]}
        )

    @classmethod
    def from_json(cls, text: str) -> "PiecewisePolynomial":
        data = json.loads(text)
        bp = tuple(data["grid"])
        gap = min(bp[i + 1] - bp[i] for i in range(len(bp) - 1))
        return cls(Partition(bp, min_atom=gap), np.asarray(data["pieces"]))


def pval_row(c: np.ndarray, x):
    return np.polynomial.polynomial.polyval(x, c)


def _gauss_local(c, ua, ub, x, w) -> float:
    mid, hw = 0.5 * (ua + ub), 0.5 * (ub - ua)
    return hw * float(np.dot(w, pval_row(c, mid + hw * x)))


def common_grid(fs):
    """Re-express all functions on the union of their grids."""
    grid = fs[0].grid
    for f in fs[1:]:
        grid = common_refinement(grid, f.grid)
    return [f.refine_to(grid) for f in fs]


def upper_envelope_abs(fs) -> PiecewisePolynomial:
    """Exact pointwise max of |f_n| as a piecewise polynomial.

    Pieces are cut at every sign change and every |f_i| = |f_j| crossing,
    so on each resulting cell a single signed polynomial dominates.
    """
    fs = common_grid(fs)
    grid = fs[0].grid
    new_bp = [0.0]
    rows = []
    width = max(f.coeffs.shape[1] for f in fs)
    mids = fs[0]._mids
    hws = fs[0]._hws
    for i in range(grid.num_atoms):
        polys = [f.coeffs[i] for f in fs]
        cuts = {-1.0, 1.0}
        for c in polys:
            cuts.update(float(r) for r in real_roots(c, -1.0, 1.0))
        for a_i in range(len(polys)):
            for b_i in range(a_i + 1, len(polys)):
                pa, pb = polys[a_i], polys[b_i]
                wa = max(len(pa), len(pb))
                diff = np.zeros(wa)
                diff[: len(pa)] += pa
                diff[: len(pb)] -= pb
                summ = np.zeros(wa)
                summ[: len(pa)] += pa
                summ[: len(pb)] += pb
                cuts.update(float(r) for r in real_roots(diff, -1.0, 1.0))
                cuts.update(float(r) for r in real_roots(summ, -1.0, 1.0))
        pts = sorted(cuts)
        dedup = [pts[0]]
        for t in pts[1:]:
            if t - dedup[-1] > 1e-12:
                dedup.append(t)
        dedup[-1] = 1.0
        for a, b in zip(dedup[:-1], dedup[1:]):
            um = 0.5 * (a + b)
            vals = [abs(float(pval_row(c, um))) for c in polys]
            n_star = int(np.argmax(vals))
            sign = 1.0 if float(pval_row(polys[n_star], um)) >= 0 else -1.0
            local = _affine_compose(
                sign * polys[n_star], 0.5 * (a + b), 0.5 * (b - a)
            )
            row = np.zeros(width)
            row[: len(local)] = local
            x_hi = mids[i] + hws[i] * b
            if x_hi - new_bp[-1] <= 1e-13:
                continue
            rows.append(row)
            new_bp.append(x_hi)
    new_bp[-1] = 1.0
    gap = min(new_bp[j + 1] - new_bp[j] for j in range(len(new_bp) - 1))
    return PiecewisePolynomial(
        Partition(tuple(new_bp), min_atom=gap), np.vstack(rows)
    )


# -- sequence norms ----------------------------------------------------------


def _dual_exponent(p: float) -> float:
    if p == 1.0:
        return np.inf
    if p == np.inf:
        return 1.0
    return p / (p - 1.0)


def _abs_power_sum(fs, q: int) -> PiecewisePolynomial:
    """Sum of |f_n|^q as an exact piecewise polynomial (integer q >= 1)."""
    fs = common_grid(fs)
    if q % 2 == 0:
        acc = None
        for f in fs:
            term = f
            prod = term
            for _ in range(q - 1):
                prod = prod * term
            acc = prod if acc is None else acc + prod
        return acc
    # odd powers need sign splits per piece
    grid = fs[0].grid
    new_bp = [0.0]
    rows = []
    mids, hws = fs[0]._mids, fs[0]._hws
    deg = max(f.degree for f in fs) * q
    if deg > DEGREE_CAP:
        raise DegreeOverflow(f"degree {deg} exceeds cap {DEGREE_CAP}")
    for i in range(grid.num_atoms):
        polys = [f.coeffs[i] for f in fs]
        cuts = {-1.0, 1.0}
        for c in polys:
            cuts.update(float(r) for r in real_roots(c, -1.0, 1.0))
        pts = sorted(cuts)
        dedup = [pts[0]]
        for t in pts[1:]:
            if t - dedup[-1] > 1e-12:
                dedup.append(t)
        dedup[-1] = 1.0
        for a, b in zip(dedup[:-1], dedup[1:]):
            um = 0.5 * (a + b)
            total = np.zeros(deg + 1)
            for c in polys:
                s = 1.0 if float(pval_row(c, um)) >= 0 else -1.0
                local = _affine_compose(s * c, 0.5 * (a + b), 0.5 * (b - a))
                prod = np.array([1.0])
                for _ in range(q):
                    prod = np.convolve(prod, local)
                total[: len(prod)] += prod
            x_hi = mids[i] + hws[i] * b
            if x_hi - new_bp[-1] <= 1e-13:
                continue
            rows.append(total)
            new_bp.append(x_hi)
    new_bp[-1] = 1.0
    gap = min(new_bp[j + 1] - new_bp[j] for j in range(len(new_bp) - 1))
    return PiecewisePolynomial(
        Partition(tuple(new_bp), min_atom=gap), np.vstack(rows)
    )


def power_integral(g: PiecewisePolynomial, e: float, tol_quad: float = 1e-10) -> float:
    """Integral of g^e for a nonnegative piecewise polynomial g."""
    if e == int(e) and e >= 1:
        x, w = nodes_for_degree(g.degree * int(e))
        total = 0.0
        for i in range(g.grid.num_atoms):
            vals = pval_row(g.coeffs[i], x)
            total += g._hws[i] * float(np.dot(w, np.maximum(vals, 0.0) ** int(e)))
        return total
    total = 0.0
    for i in range(g.grid.num_atoms):
        c, hw = g.coeffs[i], g._hws[i]
        total += hw * adaptive_quadrature(
            lambda u: np.maximum(pval_row(c, u), 0.0) ** e, -1.0, 1.0, tol_quad
        )
    return total


def _sup_numeric(fun, grid: Partition) -> float:
    """Dense-sampled sup with local golden-section refinement."""
    gr = (np.sqrt(5.0) - 1.0) / 2.0
    best = 0.0
    for a, b in grid.atoms():
        xs = np.linspace(a, b, 257)
        vals = fun(xs)
        j = int(np.argmax(vals))
        best = max(best, float(vals[j]))
        lo = xs[max(j - 1, 0)]
        hi = xs[min(j + 1, len(xs) - 1)]
        c, d = hi - gr * (hi - lo), lo + gr * (hi - lo)
        fc, fd = float(fun(c)), float(fun(d))
        for _ in range(60):
            if fc < fd:
                lo, c, fc = c, d, fd
                d = lo + gr * (hi - lo)
                fd = float(fun(d))
            else:
                hi, d, fd = d, c, fc
                c = hi - gr * (hi - lo)
                fc = float(fun(c))
        best = max(best, fc, fd)
    return best


# beyond this inner exponent (or degree budget) the exact coefficient
# expansion of sum |f|^q is numerically worse than direct evaluation
_EXACT_Q_LIMIT = 8


def lplq_norm(fs, p: float, q: float, tol_quad: float = 1e-10) -> float:
    """Mixed norm: L_p in x of the pointwise l_q norm across the sequence.

    Exact whenever q is a small integer (or inf) and p/q is an integer or
    inf; otherwise adaptive quadrature at the requested tolerance.
    """
    if not fs:
        return 0.0
    if not (p >= 1 and q >= 1):
        raise ValueError("p and q must be >= 1")
    fs = list(fs)
    if q == np.inf:
        env = upper_envelope_abs(fs)
        if p == np.inf:
            return env.sup_norm_on()
        return power_integral(env, p, tol_quad) ** (1.0 / p)
    max_deg = max(f.degree for f in fs)
    if q == int(q) and int(q) <= _EXACT_Q_LIMIT and int(q) * max_deg <= DEGREE_CAP:
        w = _abs_power_sum(fs, int(q))
        if p == np.inf:
            return w.sup_norm_on() ** (1.0 / q)
        return power_integral(w, p / q, tol_quad) ** (1.0 / p)
    # large or non-integer q: evaluate the inner norm directly
    aligned = common_grid(fs)

    def inner(x):
        acc = np.zeros(np.shape(x))
        for f in aligned:
            acc += np.abs(f(x)) ** q
        return acc

    if p == np.inf:
        return _sup_numeric(lambda x: inner(x) ** (1.0 / q), aligned[0].grid)
    total = 0.0
    for a, b in aligned[0].grid.atoms():
        total += adaptive_quadrature(
            lambda x: inner(x) ** (p / q), a, b, tol_quad
        )
    return total ** (1.0 / p)


@dataclass(frozen=True)
class PairingCheck:
    pairing: float
    bound: float
    passed: bool


def holder_pairing_check(fs, gs, p: float, q: float,
                         tol_quad: float = 1e-10) -> PairingCheck:
    """Duality pairing against the product of dual mixed norms."""
    if len(fs) != len(gs):
        raise ValueError("sequences must have equal length")
    pairing = 0.0
    for f, g in zip(fs, gs):
        pairing += (f * g).integrate()
    bound = lplq_norm(fs, p, q, tol_quad) * lplq_norm(
        gs, _dual_exponent(p), _dual_exponent(q), tol_quad
    )
    return PairingCheck(pairing, bound, abs(pairing) <= bound * (1 + 1e-9) + 1e-15)


# -- Remez operations ---------------------------------------------------------


@dataclass(frozen=True)
class RemezBound:
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class RemezLevelSet:
    level_set: IntervalUnion
    measure: float
    passed: bool


def _single_piece(pp: PiecewisePolynomial, lo: float, hi: float):
    i0 = pp.grid.atom_index(lo)
    i1 = pp.grid.atom_index(max(hi - 1e-300, 0.0))
    if i0 != i1:
        raise ValueError("interval must lie within one polynomial piece")
    return i0


def remez_bound_check(pp: PiecewisePolynomial, v, e: IntervalUnion,
                      order: int) -> RemezBound:
    """Sup norm on V against (4|V|/|E|)^(order-1) times the sup norm on E."""
    lo, hi = v
    _single_piece(pp, lo, hi)
    if e.measure <= 0.0:
        raise EmptySet("E must have positive measure")
    lhs = pp.sup_norm_on((lo, hi))
    sup_e = max(pp.sup_norm_on((a, b)) for a, b in e.intervals)
    rhs = (4.0 * (hi - lo) / e.measure) ** (order - 1) * sup_e
    return RemezBound(lhs, rhs, lhs <= rhs * (1 + 1e-10))


def remez_level_measure(pp: PiecewisePolynomial, v, order: int) -> RemezLevelSet:
    """Measure of {x in V : |p(x)| >= 8^(1-order) * sup_V |p|}."""
    lo, hi = v
    _single_piece(pp, lo, hi)
    sup = pp.sup_norm_on((lo, hi))
    threshold = 8.0 ** (1 - order) * sup
    level = pp.abs_super_level_set(threshold).intersect(lo, hi)
    measure = level.measure
    return RemezLevelSet(level, measure, measure >= 0.5 * (hi - lo) - 1e-12)


def level_set(pp: PiecewisePolynomial, threshold: float) -> IntervalUnion:
    """{x : pp(x) >= threshold} via per-piece root isolation."""
    return pp.super_level_set(threshold)
