"""Positive kernel operators that dominate spline projections pointwise.

The operator attached to a partition, order and decay base q has the
piecewise-constant kernel sum_{i,j} q^|i-j| / |span(E_i,E_j)| over the
product of B-spline supports.  All cell values are assembled exactly, the
kernel is symmetric by construction, and the row integrals are asserted
against their hard two-sided bound at build time.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (BoundViolation, NotARefinement, ParameterError,
                     ZeroFunction)
from .partitions import Partition, is_refinement
from .piecewise import PiecewisePolynomial
from .projection import get_projector
from .bsplines import get_basis
from .quadrature import adaptive_quadrature


def kx_upper_bound(order: int, decay: float) -> float:
    return 2.0 * (order + 1) / (1.0 - decay)


class KernelOperator:
    """Self-adjoint positive integral operator with a cell-constant kernel."""

    def __init__(self, partition: Partition, order: int, decay: float):
        if not 0.0 < decay < 1.0:
            raise ParameterError("decay base must lie in (0, 1)")
        self.partition = partition
        self.order = int(order)
        self.decay = float(decay)
        basis = get_basis(partition, order)
        self.basis = basis
        m = partition.num_atoms
        k = self.order
        starts = basis.knots[: basis.dim]
        ends = basis.knots[k : k + basis.dim]
        bp = partition.breakpoints
        members = [
            basis.supports_containing(bp[a], bp[a + 1]) for a in range(m)
        ]
        cell = np.zeros((m, m))
        for a in range(m):
            ia = members[a]
            for b in range(a, m):
                jb = members[b]
                span = (np.maximum.outer(ends[ia], ends[jb])
                        - np.minimum.outer(starts[ia], starts[jb]))
                pw = decay ** np.abs(np.subtract.outer(ia, jb))
                v = float(np.sum(pw / span))
                cell[a, b] = v
                cell[b, a] = v
        self.cell = cell
        lens = partition.atom_lengths()
        self.kx = cell @ lens
        hi = kx_upper_bound(order, decay)
        self.kx_slack = float(
            min((self.kx - order).min(), (hi - self.kx).min())
        )
        if self.kx_slack < -1e-12:
            raise BoundViolation(
                f"row integral outside [{order}, {hi:.6g}] "
                f"by {-self.kx_slack:.3e}"
            )

    def apply(self, f: PiecewisePolynomial) -> PiecewisePolynomial:
        """Exact image of f; piecewise constant on the operator's atoms."""
        ints = self._atom_integrals(f, absolute=False)
        return PiecewisePolynomial.step(self.partition, self.cell @ ints)

    def apply_abs(self, f: PiecewisePolynomial) -> PiecewisePolynomial:
        """Exact image of |f|."""
        ints = self._atom_integrals(f, absolute=True)
        return PiecewisePolynomial.step(self.partition, self.cell @ ints)

    def apply_to_cellvalues(self, vals_per_atom: np.ndarray) -> np.ndarray:
        """Image of a function that is constant on this operator's atoms."""
        lens = self.partition.atom_lengths()
        return self.cell @ (vals_per_atom * lens)

    def _atom_integrals(self, f, absolute: bool) -> np.ndarray:
        bp = self.partition.breakpoints
        if absolute:
            return np.array(
                [f.integrate_abs_on(bp[a], bp[a + 1])
                 for a in range(self.partition.num_atoms)]
            )
        return np.array(
            [f.integrate_on(bp[a], bp[a + 1])
             for a in range(self.partition.num_atoms)]
        )

    def kernel_value(self, x: float, t: float) -> float:
        return float(
            self.cell[self.partition.atom_index(x), self.partition.atom_index(t)]
        )


# -- convexity check -----------------------------------------------------------

_EXP_CAP = 30.0


def phi_square(z):
    return np.asarray(z) ** 2


def phi_abs(z):
    return np.abs(z)


def phi_exp_capped(z):
    """exp below a cap, continued linearly by its tangent (stays convex)."""
    z = np.asarray(z, dtype=float)
    return np.where(
        z <= _EXP_CAP, np.exp(np.minimum(z, _EXP_CAP)),
        np.exp(_EXP_CAP) * (1.0 + z - _EXP_CAP),
    )


CONVEX_PHIS = {"square": phi_square, "abs": phi_abs, "exp-capped": phi_exp_capped}


def jensen_gap(op: KernelOperator, f: PiecewisePolynomial, phi="square",
               freeze_outer: bool = True) -> float:
    """Max over atoms of phi(Tf(x)) - K_x^{-1} T(phi(K_x f))(x).

    Nonpositive (within roundoff) for convex phi.  With `freeze_outer` the
    row integral K_x is held at the outer evaluation point, which is the
    form that follows from normalizing the kernel row to a probability
    measure; the alternative reading treats it as a function of the inner
    variable.
    """
    if isinstance(phi, str):
        phi_fn = CONVEX_PHIS[phi]
        phi_name = phi
    else:
        phi_fn, phi_name = phi, None
    bp = op.partition.breakpoints
    m = op.partition.num_atoms
    tf = op.cell @ op._atom_integrals(f, absolute=False)
    worst = -np.inf
    for b in range(m):
        kx_out = op.kx[b]
        inner = np.empty(m)
        for a in range(m):
            scale = kx_out if freeze_outer else op.kx[a]
            inner[a] = _integral_phi_scaled(f, phi_name, phi_fn, scale,
                                            bp[a], bp[a + 1])
        rhs = float(op.cell[b] @ inner) / kx_out
        lhs = float(phi_fn(tf[b]))
        worst = max(worst, lhs - rhs)
    return worst


def _integral_phi_scaled(f, phi_name, phi_fn, scale, lo, hi) -> float:
    if phi_name == "square":
        return scale * scale * (f * f).integrate_on(lo, hi)
    if phi_name == "abs":
        return scale * f.integrate_abs_on(lo, hi)
    return adaptive_quadrature(lambda x: phi_fn(scale * f(x)), lo, hi, 1e-12)


# -- maximal function ----------------------------------------------------------


class MaximalEstimator:
    """Certified lower bound of the Hardy-Littlewood maximal function.

    Candidate interval endpoints are the grid breakpoints plus a uniform
    grid; restricting the supremum to those intervals only ever
    underestimates.
    """

    def __init__(self, f: PiecewisePolynomial, grid_size: int = 256):
        pts = np.union1d(
            np.asarray(f.grid.breakpoints), np.linspace(0.0, 1.0, grid_size + 1)
        )
        self.f = f
        self.points = pts
        self.cumulative = f.abs_cumulative(pts)

    def lower(self, x: float) -> float:
        pts, cum = self.points, self.cumulative
        if x < pts[0] or x > pts[-1]:
            raise ValueError("x outside [0,1]")
        left = pts <= x
        right = pts >= x
        la, lc = pts[left], cum[left]
        rb, rc = pts[right], cum[right]
        widths = rb[None, :] - la[:, None]
        mass = rc[None, :] - lc[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = np.where(widths > 0.0, mass / widths, -np.inf)
        return float(np.max(avg))


def maximal_lower(f: PiecewisePolynomial, x: float, grid_size: int = 256) -> float:
    return MaximalEstimator(f, grid_size).lower(x)


# -- domination of the projection ---------------------------------------------


@dataclass(frozen=True)
class DominationReport:
    c1_hat: float     # max |Pf| / T|f| over atoms (exact on each atom)
    c2_hat: float     # max T|f| / maximal lower bound; an upper estimate
    c2_is_upper_estimate: bool = True


def domination_constants(partition: Partition, order: int, decay: float,
                         f: PiecewisePolynomial,
                         grid_size: int = 256) -> DominationReport:
    op = KernelOperator(partition, order, decay)
    ints = op._atom_integrals(f, absolute=True)
    if ints.sum() <= 0.0:
        raise ZeroFunction("f vanishes identically")
    tvals = op.cell @ ints
    pf = get_projector(partition, order).project(f).to_piecewise()
    bp = partition.breakpoints
    c1 = 0.0
    for b in range(partition.num_atoms):
        sup = pf.sup_norm_on((bp[b], bp[b + 1]))
        c1 = max(c1, sup / tvals[b])
    est = MaximalEstimator(f, grid_size)
    c2 = 0.0
    mids = 0.5 * (np.asarray(bp[1:]) + np.asarray(bp[:-1]))
    for b, x in enumerate(mids):
        c2 = max(c2, tvals[b] / est.lower(float(x)))
    return DominationReport(c1, c2)


# -- composition across nested scales -------------------------------------------


@dataclass(frozen=True)
class TowerResult:
    c_hat: float
    gamma: float
    per_atom_ratio: np.ndarray


def tower_constant(coarse: Partition, fine: Partition, order: int,
                   order_fine: int, sigma: float, tau: float, q: float,
                   f: PiecewisePolynomial) -> TowerResult:
    """Constant in |S T f| <= C gamma^k T_{coarse,q,k}|f| on each coarse atom."""
    if not is_refinement(fine, coarse):
        raise NotARefinement("fine partition must refine the coarse one")
    if q <= max(sigma, tau):
        raise ParameterError("q must exceed max(sigma, tau)")
    s_op = KernelOperator(coarse, order, sigma)
    t_op = KernelOperator(fine, order_fine, tau)
    r_op = KernelOperator(coarse, order, q)
    tf = t_op.cell @ t_op._atom_integrals(f, absolute=False)
    fine_lens = fine.atom_lengths()
    coarse_of = np.array(
        [coarse.atom_index(0.5 * (a + b)) for a, b in fine.atoms()]
    )
    w = np.zeros(coarse.num_atoms)
    np.add.at(w, coarse_of, tf * fine_lens)
    stf = s_op.cell @ w
    rf = r_op.cell @ r_op._atom_integrals(f, absolute=True)
    if rf.min() <= 0.0:
        raise ZeroFunction("f vanishes identically")
    gamma = get_basis(coarse, order).regularity()
    ratios = np.abs(stf) / (gamma**order * rf)
    return TowerResult(float(ratios.max()), gamma, ratios)


@dataclass(frozen=True)
class KernelProductResult:
    c_min: float
    gamma: float
    lhs_max: float


def kernel_product_min_constant(s_op: KernelOperator, t_op: KernelOperator,
                                q: float) -> KernelProductResult:
    """Smallest C with int K_S(x,t) K_T(t,s) dt <= C gamma^k K_{coarse,q}(x,s)."""
    coarse, fine = s_op.partition, t_op.partition
    if not is_refinement(fine, coarse):
        raise NotARefinement("operators must live on nested partitions")
    if q <= max(s_op.decay, t_op.decay):
        raise ParameterError("q must exceed both decay bases")
    r_op = KernelOperator(coarse, s_op.order, q)
    fine_lens = fine.atom_lengths()
    coarse_of = np.array(
        [coarse.atom_index(0.5 * (a + b)) for a, b in fine.atoms()]
    )
    lhs = (s_op.cell[:, coarse_of] * fine_lens[None, :]) @ t_op.cell
    rhs = r_op.cell[:, coarse_of]
    gamma = get_basis(coarse, s_op.order).regularity()
    ratio = lhs / (gamma**s_op.order * rhs)
    return KernelProductResult(float(ratio.max()), gamma, float(lhs.max()))


# -- decay policy ----------------------------------------------------------------


def default_decay(partition: Partition, order: int) -> float:
    """Observed dual-matrix decay rounded up to {0.5, 0.7, 0.9}."""
    q_hat = get_projector(partition, order).decay_fit().q_hat
    for q in (0.5, 0.7, 0.9):
        if q_hat <= q:
            return q
    return 0.9


# -- projected square sums across levels -----------------------------------------


@dataclass(frozen=True)
class ToolLepingleResult:
    lhs_projection: float
    lhs_kernel: float
    rhs: float
    ratio_projection: float
    ratio_kernel: float


def tool_lepingle(filtration, order: int, order_prime: int, n: int, fs,
                  p: float, decay: float | None = None) -> ToolLepingleResult:
    """Tail square sums seen through the level-n projection and kernel operator.

    fs[i] is the function attached to level n+i; each is first projected at
    the previous level with the second order, squared exactly, and the
    accumulated sum is pushed through the level-n operators.
    """
    if n < 1:
        raise ParameterError("n must be >= 1 so that level n-1 exists")
    levels = filtration.levels
    if n + len(fs) > len(levels):
        raise ParameterError("sequence extends past the filtration depth")
    acc = None
    tail = None
    for i, f in enumerate(fs):
        ell = n + i
        pp = f.to_piecewise() if hasattr(f, "to_piecewise") else f
        u = get_projector(levels[ell - 1], order_prime).project(pp)
        u2 = u.to_piecewise().square()
        f2 = pp.square()
        acc = u2 if acc is None else acc + u2
        tail = f2 if tail is None else tail + f2
    level_n = levels[n]
    proj = get_projector(level_n, order).project(acc).to_piecewise()
    q = decay if decay is not None else default_decay(level_n, order)
    kern = KernelOperator(level_n, order, q).apply(acc)
    gamma = get_basis(level_n, order).regularity()
    lhs_p = proj.lp_norm(p)
    lhs_t = kern.lp_norm(p)
    rhs = gamma**order * tail.lp_norm(p)
    return ToolLepingleResult(
        lhs_p, lhs_t, rhs,
        lhs_p / rhs if rhs > 0 else np.inf,
        lhs_t / rhs if rhs > 0 else np.inf,
    )
