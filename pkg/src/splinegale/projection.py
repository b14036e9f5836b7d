"""Orthogonal projection onto spline spaces via banded normal equations.

The projector factors the Gram matrix once (banded Cholesky) and solves
for inner-product right-hand sides that are assembled exactly by
Gauss-Legendre rules sized to the integrand degree.  The dense inverse of
the Gram matrix is only formed on demand, for the off-diagonal decay
diagnostics and the exact L1 operator norm.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import NotARefinement, NumericalGuard, SingularGram
from .partitions import Filtration, Partition
from .piecewise import PiecewisePolynomial
from .quadrature import gauss_nodes
from .rootfind import sign_segments
from .bsplines import BSplineBasis, Spline, get_basis


class Projector:
    """L2-orthogonal projection onto the spline space of a basis."""

    def __init__(self, basis: BSplineBasis):
        self.basis = basis
        ab = basis.gram_banded_upper()
        try:
            self._chol = scipy.linalg.cholesky_banded(ab, lower=False)
        except scipy.linalg.LinAlgError as exc:
            raise SingularGram(str(exc)) from exc
        self._dual = None

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return scipy.linalg.cho_solve_banded((self._chol, False), rhs)

    def inner_products(self, f: PiecewisePolynomial) -> np.ndarray:
        """Exact integrals of f against every basis function."""
        basis = self.basis
        k = basis.order
        b = np.zeros(basis.dim)
        grid = basis.partition
        bp = grid.breakpoints
        x, w = gauss_nodes(max(1, (f.degree + k) // 2 + 1))
        f_bp = f.grid.breakpoints
        cuts = sorted(set(bp) | set(f_bp))
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            mid, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
            pts = mid + hw * x
            fv = f(pts)
            first, vals = basis.eval_many(pts)
            # within one cell all points share the same active window
            j0 = first[0]
            b[j0 : j0 + k] += (vals * (fv * w * hw)[:, None]).sum(axis=0)
        return b

    def project(self, f) -> Spline:
        """Best L2 approximation of f (piecewise polynomial or spline)."""
        if isinstance(f, Spline):
            f = f.to_piecewise()
        rhs = self.inner_products(f)
        coeffs = self.solve(rhs)
        resid = np.max(np.abs(self.basis.gram() @ coeffs - rhs))
        if resid > 1e-11 * max(1.0, np.max(np.abs(rhs))):
            raise NumericalGuard(f"normal-equation residual {resid:.3e}")
        return Spline(self.basis, coeffs)

    def dual_matrix(self) -> np.ndarray:
        """Inverse Gram matrix (the projector's dual coefficients)."""
        if self._dual is None:
            a = self.solve(np.eye(self.basis.dim))
            if np.max(np.abs(a - a.T)) > 1e-10 * max(1.0, np.max(np.abs(a))):
                raise NumericalGuard("dual matrix asymmetry beyond tolerance")
            self._dual = 0.5 * (a + a.T)
        return self._dual

    # -- diagnostics ---------------------------------------------------------

    def decay_fit(self) -> "DecayFit":
        """Fit |a_ij| <= C q^|i-j| / |span(E_i, E_j)| to the dual matrix."""
        a = self.dual_matrix()
        basis = self.basis
        k = basis.order
        dim = basis.dim
        starts = basis.knots[:dim]
        ends = basis.knots[k : k + dim]
        span = np.maximum.outer(ends, ends) - np.minimum.outer(starts, starts)
        weighted = np.abs(a) * span
        c0 = float(np.max(np.diag(weighted)))
        q_hat = 0.0
        for off in range(1, dim):
            band = np.diagonal(weighted, off)
            if band.size == 0:
                continue
            top = float(np.max(band))
            if top > 0.0 and c0 > 0.0:
                q_hat = max(q_hat, (top / c0) ** (1.0 / off))
        slack = c0 * np.power(max(q_hat, 1e-300),
                              np.abs(np.subtract.outer(np.arange(dim),
                                                       np.arange(dim)))) - weighted
        np.fill_diagonal(slack, c0 - np.diag(weighted))
        return DecayFit(c0, q_hat, q_hat < 1.0, float(np.min(slack)))

    def l1_opnorm(self) -> float:
        """Exact L1->L1 operator norm via the kernel representation.

        For each source point t the kernel section sum_j (A N(t))_j N_j is a
        spline in x whose absolute integral is computed exactly; the outer
        maximum over t is taken by dense sampling plus golden-section
        refinement on every source atom (the section integral is piecewise
        smooth but not polynomial in t once absolute values move roots).
        """
        a = self.dual_matrix()
        basis = self.basis
        k = basis.order
        maps = basis._piece_maps()
        hws = 0.5 * basis.partition.atom_lengths()
        num_atoms = basis.partition.num_atoms

        def section_l1(t: float) -> float:
            first, vals = basis.eval_nonzero(t)
            coeffs = a[:, first : first + k] @ vals
            total = 0.0
            for atom in range(num_atoms):
                local = maps[atom] @ coeffs[atom : atom + k]
                for sa, sb, _s in sign_segments(local, -1.0, 1.0):
                    total += hws[atom] * abs(_int_local(local, sa, sb))
            return total

        gr = (np.sqrt(5.0) - 1.0) / 2.0
        best = 0.0
        for lo, hi in basis.partition.atoms():
            xs = np.linspace(lo, hi, 33)
            vals = [section_l1(t) for t in xs]
            j = int(np.argmax(vals))
            best = max(best, vals[j])
            a_lo = xs[max(j - 1, 0)]
            b_hi = xs[min(j + 1, len(xs) - 1)]
            c = b_hi - gr * (b_hi - a_lo)
            d = a_lo + gr * (b_hi - a_lo)
            fc, fd = section_l1(c), section_l1(d)
            for _ in range(40):
                if fc < fd:
                    a_lo, c, fc = c, d, fd
                    d = a_lo + gr * (b_hi - a_lo)
                    fd = section_l1(d)
                else:
                    b_hi, d, fd = d, c, fc
                    c = b_hi - gr * (b_hi - a_lo)
                    fc = section_l1(c)
            best = max(best, fc, fd)
        return best


def _int_local(c: np.ndarray, ua: float, ub: float) -> float:
    x, w = gauss_nodes(max(1, (len(c) + 1) // 2))
    mid, hw = 0.5 * (ua + ub), 0.5 * (ub - ua)
    return hw * float(np.dot(w, np.polynomial.polynomial.polyval(mid + hw * x, c)))


@dataclass(frozen=True)
class DecayFit:
    c_hat: float
    q_hat: float
    geometric: bool         # whether q_hat < 1
    min_slack: float        # of the fitted envelope; >= 0 by construction


@lru_cache(maxsize=512)
def get_projector(partition: Partition, order: int) -> Projector:
    return Projector(get_basis(partition, order))


class MartingaleSplineSequence:
    """Sequence (f_n) with the level-n projection of f_{n+1} equal to f_n."""

    def __init__(self, filtration: Filtration, order: int, members):
        self.filtration = filtration
        self.order = order
        self.members = list(members)
        if len(self.members) != len(filtration):
            raise ValueError("one member per filtration level required")
        for n in range(len(self.members) - 1):
            pr = get_projector(filtration.levels[n], order)
            back = pr.project(self.members[n + 1].to_piecewise())
            gap = np.max(np.abs(back.coeffs - self.members[n].coeffs))
            if gap > 1e-10 * max(1.0, np.max(np.abs(self.members[n].coeffs))):
                raise NumericalGuard(
                    f"martingale consistency violated at level {n}: {gap:.2e}"
                )

    def __len__(self):
        return len(self.members)

    @property
    def terminal(self) -> Spline:
        return self.members[-1]


def make_martingale(filtration: Filtration, order: int,
                    terminal: Spline) -> MartingaleSplineSequence:
    """Project the terminal spline down every level of the filtration."""
    if terminal.basis.partition != filtration.finest or \
            terminal.basis.order != order:
        raise NotARefinement("terminal spline must live on the last level")
    members = []
    f_pp = terminal.to_piecewise()
    for level in filtration.levels[:-1]:
        members.append(get_projector(level, order).project(f_pp))
    members.append(terminal)
    return MartingaleSplineSequence(filtration, order, members)
