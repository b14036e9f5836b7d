"""B-spline bases over interval partitions and splines expanded in them.

The knot vector carries multiplicity `order` at 0 and 1 and multiplicity
one at interior breakpoints, which is the unique pattern giving piecewise
polynomials of the given order with maximal interior smoothness.  Basis
values come from the de Boor-Cox recursion (normalized B-splines summing
to one); refinement to a finer partition inserts one knot at a time by
Boehm's rule, so every step is a binary convex combination.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotARefinement
from .partitions import Partition, is_refinement
from .piecewise import PiecewisePolynomial
from .quadrature import gauss_nodes


class BSplineBasis:
    """Normalized B-spline basis of a given order over a partition."""

    def __init__(self, partition: Partition, order: int):
        if order < 1:
            raise ValueError("order must be a positive integer")
        self.partition = partition
        self.order = int(order)
        bp = np.asarray(partition.breakpoints)
        self.knots = np.concatenate(
            (np.zeros(order), bp[1:-1], np.ones(order))
        )
        self.dim = partition.num_atoms + order - 1
        self._pp_maps = None

    def __repr__(self):
        return f"BSplineBasis(order={self.order}, atoms={self.partition.num_atoms})"

    # -- supports and regularity -------------------------------------------

    def support(self, i: int):
        """Closure of the support of basis function i."""
        return float(self.knots[i]), float(self.knots[i + self.order])

    def support_lengths(self) -> np.ndarray:
        k = self.order
        return self.knots[k : k + self.dim] - self.knots[: self.dim]

    def regularity(self) -> float:
        """Max length ratio between consecutive basis supports (>= 1)."""
        lens = self.support_lengths()
        if len(lens) < 2:
            return 1.0
        r = lens[1:] / lens[:-1]
        return float(max(r.max(), (1.0 / r).max()))

    def supports_containing(self, lo: float, hi: float):
        """Indices i with [lo, hi] inside the closed support of N_i."""
        k = self.order
        starts = self.knots[: self.dim]
        ends = self.knots[k : k + self.dim]
        idx = np.nonzero((starts <= lo) & (ends >= hi))[0]
        return idx

    # -- evaluation ----------------------------------------------------------

    def find_span(self, x: float) -> int:
        k = self.order
        mu = int(np.searchsorted(self.knots, x, side="right")) - 1
        return min(max(mu, k - 1), len(self.knots) - k - 1)

    def eval_nonzero(self, x: float):
        """First index and the `order` B-spline values active at x.

        de Boor-Cox recursion; the values are nonnegative and sum to one.
        """
        k = self.order
        mu = self.find_span(x)
        values = np.zeros(k)
        values[0] = 1.0
        left = np.zeros(k)
        right = np.zeros(k)
        for j in range(1, k):
            left[j] = x - self.knots[mu + 1 - j]
            right[j] = self.knots[mu + j] - x
            saved = 0.0
            for r in range(j):
                temp = values[r] / (right[r + 1] + left[j - r])
                values[r] = saved + right[r + 1] * temp
                saved = left[j - r] * temp
            values[j] = saved
        return mu - k + 1, values

    def eval_many(self, xs):
        """Vectorized de Boor-Cox over an array of points."""
        xs = np.asarray(xs, dtype=float)
        k = self.order
        mu = np.clip(
            np.searchsorted(self.knots, xs, side="right") - 1,
            k - 1, len(self.knots) - k - 1,
        )
        n = len(xs)
        values = np.zeros((n, k))
        values[:, 0] = 1.0
        left = np.zeros((n, k))
        right = np.zeros((n, k))
        for j in range(1, k):
            left[:, j] = xs - self.knots[mu + 1 - j]
            right[:, j] = self.knots[mu + j] - xs
            saved = np.zeros(n)
            for r in range(j):
                temp = values[:, r] / (right[:, r + 1] + left[:, j - r])
                values[:, r] = saved + right[:, r + 1] * temp
                saved = left[:, j - r] * temp
            values[:, j] = saved
        return mu - k + 1, values

    def basis_integrals(self) -> np.ndarray:
        """Integral of each basis function: support length / order."""
        return self.support_lengths() / self.order

    # -- Gram matrix ---------------------------------------------------------

    def gram(self) -> np.ndarray:
        """Dense symmetric Gram matrix, bandwidth order-1, assembled exactly."""
        k = self.order
        g = np.zeros((self.dim, self.dim))
        x, w = gauss_nodes(k)
        bp = np.asarray(self.partition.breakpoints)
        for a in range(self.partition.num_atoms):
            lo, hi = bp[a], bp[a + 1]
            mid, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
            pts = mid + hw * x
            _, vals = self.eval_many(pts)
            block = vals.T @ (vals * (w * hw)[:, None])
            g[a : a + k, a : a + k] += block
        return g

    def gram_banded_upper(self) -> np.ndarray:
        """Gram matrix in scipy upper-banded storage."""
        k = self.order
        g = self.gram()
        ab = np.zeros((k, self.dim))
        for offset in range(k):
            ab[k - 1 - offset, offset:] = np.diagonal(g, offset)
        return ab

    # -- conversion to piecewise form ----------------------------------------

    def _piece_maps(self):
        """Per-atom matrices taking windowed coefficients to local monomials."""
        if self._pp_maps is not None:
            return self._pp_maps
        k = self.order
        if k == 1:
            self._pp_maps = [np.ones((1, 1))] * self.partition.num_atoms
            return self._pp_maps
        u = np.cos(np.pi * (2 * np.arange(k) + 1) / (2 * k))
        vander = np.polynomial.polynomial.polyvander(u, k - 1)
        bp = np.asarray(self.partition.breakpoints)
        maps = []
        for a in range(self.partition.num_atoms):
            mid = 0.5 * (bp[a] + bp[a + 1])
            hw = 0.5 * (bp[a + 1] - bp[a])
            _, vals = self.eval_many(mid + hw * u)
            maps.append(np.linalg.solve(vander, vals))
        self._pp_maps = maps
        return maps


@lru_cache(maxsize=512)
def get_basis(partition: Partition, order: int) -> BSplineBasis:
    return BSplineBasis(partition, order)


def build_basis(partition: Partition, order: int) -> BSplineBasis:
    return get_basis(partition, order)


def regularity(partition: Partition, order: int) -> float:
    """Regularity parameter of the partition at the given spline order."""
    return get_basis(partition, order).regularity()


class Spline:
    """Coefficient vector in a B-spline basis."""

    __slots__ = ("basis", "coeffs", "_pp")

    def __init__(self, basis: BSplineBasis, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (basis.dim,):
            raise ValueError(f"expected {basis.dim} coefficients, got {coeffs.shape}")
        self.basis = basis
        self.coeffs = coeffs
        self._pp = None

    def __call__(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        first, vals = self.basis.eval_many(x_arr)
        window = first[:, None] + np.arange(self.basis.order)[None, :]
        res = np.sum(self.coeffs[window] * vals, axis=1)
        return res if np.ndim(x) else float(res[0])

    def __add__(self, other: "Spline") -> "Spline":
        if other.basis is not self.basis and (
            other.basis.partition != self.basis.partition
            or other.basis.order != self.basis.order
        ):
            raise ValueError("splines must share a basis")
        return Spline(self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other: "Spline") -> "Spline":
        return self + Spline(other.basis, -other.coeffs)

    def __mul__(self, scalar: float) -> "Spline":
        return Spline(self.basis, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def to_piecewise(self) -> PiecewisePolynomial:
        if self._pp is not None:
            return self._pp
        k = self.basis.order
        maps = self.basis._piece_maps()
        rows = np.empty((self.basis.partition.num_atoms, k))
        for a, m in enumerate(maps):
            rows[a] = m @ self.coeffs[a : a + k]
        self._pp = PiecewisePolynomial(self.basis.partition, rows)
        return self._pp

    def to_json(self) -> str:
        import json

        return json.dumps(
            {
                "basis": {"k": self.basis.order,
                          "breakpoints": list(self.basis.partition.breakpoints)},
                "coeffs": list(self.coeffs),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Spline":
        import json

        data = json.loads(text)
        part = Partition(tuple(data["basis"]["breakpoints"]))
        return cls(get_basis(part, int(data["basis"]["k"])), data["coeffs"])


def boehm_insert(knots: np.ndarray, coeffs: np.ndarray, order: int, x: float):
    """Insert one knot; returns (new_knots, new_coeffs).

    Every new coefficient is a convex combination of at most two old ones.
    """
    d = order - 1
    mu = int(np.searchsorted(knots, x, side="right")) - 1
    mu = min(max(mu, order - 1), len(knots) - order - 1)
    n = len(coeffs)
    out = np.empty(n + 1)
    for i in range(n + 1):
        if i <= mu - d:
            out[i] = coeffs[i]
        elif i >= mu + 1:
            out[i] = coeffs[i - 1]
        else:
            denom = knots[i + d] - knots[i]
            alpha = (x - knots[i]) / denom if denom > 0 else 0.0
            out[i] = alpha * coeffs[i] + (1.0 - alpha) * coeffs[i - 1]
    new_knots = np.insert(knots, mu + 1, x)
    return new_knots, out


def refine_spline(s: Spline, fine: Partition) -> Spline:
    """Re-expand a spline on a finer partition via repeated knot insertion."""
    coarse = s.basis.partition
    if not is_refinement(fine, coarse):
        raise NotARefinement("target partition does not refine the source")
    if fine.breakpoints == coarse.breakpoints:
        return Spline(get_basis(fine, s.basis.order), s.coeffs.copy())
    new_knots = sorted(set(fine.breakpoints) - set(coarse.breakpoints))
    knots, coeffs = s.basis.knots, s.coeffs
    for x in new_knots:
        knots, coeffs = boehm_insert(knots, coeffs, s.basis.order, x)
    return Spline(get_basis(fine, s.basis.order), coeffs)


@dataclass(frozen=True)
class StabilityReport:
    """Ratios relating coefficients and norms of a B-spline expansion."""

    coeff_ratio: float        # max_j |a_j| |J_j|^{1/p} / ||g||_{L_p(J_j)}
    norm_ratio: float         # ||g||_p / ||(a_j |E_j|^{1/p})||_{l_p}
    norm_ratio_reciprocal: float


def _max_atom_in_support(basis: BSplineBasis, j: int):
    """Longest atom inside the support of N_j; leftmost on ties."""
    lo, hi = basis.support(j)
    bp = basis.partition.breakpoints
    best = None
    for i in range(basis.partition.num_atoms):
        a, b = bp[i], bp[i + 1]
        if a >= lo - 1e-15 and b <= hi + 1e-15:
            if best is None or (b - a) > best[1] - best[0] + 1e-15:
                best = (a, b)
    return best


def stability_check(s: Spline, p: float) -> StabilityReport:
    """Empirical constants of the local and global B-spline stability bounds."""
    basis = s.basis
    g = s.to_piecewise()
    inv_p = 0.0 if p == np.inf else 1.0 / p
    coeff_ratio = 0.0
    for j in range(basis.dim):
        a, b = _max_atom_in_support(basis, j)
        local = g.lp_norm_on(p, a, b)
        aj = abs(s.coeffs[j])
        if local <= 0.0:
            ratio = 0.0 if aj <= 1e-300 else np.inf
        else:
            ratio = aj * (b - a) ** inv_p / local
        coeff_ratio = max(coeff_ratio, ratio)
    lens = basis.support_lengths()
    weighted = np.abs(s.coeffs) * lens**inv_p
    if p == np.inf:
        seq_norm = float(np.max(weighted))
        g_norm = g.sup_norm_on()
    else:
        seq_norm = float(np.sum(weighted**p) ** (1.0 / p))
        g_norm = g.lp_norm(p)
    if seq_norm <= 0.0:
        nr = 1.0 if g_norm <= 0.0 else np.inf
    else:
        nr = g_norm / seq_norm
    return StabilityReport(coeff_ratio, nr, np.inf if nr == 0.0 else 1.0 / nr)
