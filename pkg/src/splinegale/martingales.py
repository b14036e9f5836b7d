"""Square functions and the inequality checks built on spline projections.

Difference sequences use the finite-depth convention that the projection
before the first level is zero, so the first difference is the first
projection itself.  Checks that need a "previous level" (the L1(l2)
conditional-projection inequality and the tail square-sum comparison) run
over levels 1 and up.
"""

from dataclasses import dataclass

import numpy as np

from .bsplines import Spline, refine_spline
from .envelopes import build_envelopes
from .errors import NotAdapted, ParameterError
from .kernels import KernelOperator, default_decay
from .partitions import Filtration
from .piecewise import (PiecewisePolynomial, common_grid, lplq_norm,
                        power_integral, upper_envelope_abs)
from .projection import MartingaleSplineSequence, get_projector
from .quadrature import adaptive_quadrature


def _as_pp(f) -> PiecewisePolynomial:
    return f.to_piecewise() if isinstance(f, Spline) else f


class DeltaSequence:
    """Level-by-level projection differences of a terminal function."""

    def __init__(self, filtration: Filtration, order: int, projections):
        self.filtration = filtration
        self.order = order
        self.projections = list(projections)
        deltas = [self.projections[0]]
        for n in range(1, len(self.projections)):
            lifted = refine_spline(self.projections[n - 1],
                                   filtration.levels[n])
            deltas.append(self.projections[n] - lifted)
        self.deltas = deltas
        self.delta_pps = [d.to_piecewise() for d in deltas]

    @classmethod
    def from_function(cls, filtration: Filtration, order: int, f):
        f_pp = _as_pp(f)
        projections = [
            get_projector(level, order).project(f_pp)
            for level in filtration.levels
        ]
        return cls(filtration, order, projections)

    def __len__(self):
        return len(self.deltas)

    @property
    def terminal_projection(self) -> Spline:
        return self.projections[-1]


class SquareFunction:
    """Running sums of squared differences, kept as exact polynomials."""

    def __init__(self, ds: DeltaSequence):
        self.ds = ds
        partials = []
        acc = None
        for pp in ds.delta_pps:
            sq = pp.square()
            acc = sq if acc is None else acc + sq
            partials.append(acc)
        self.partials = partials

    def q_polynomial(self, n: int | None = None) -> PiecewisePolynomial:
        """Sum of squared differences up to level n (default: all)."""
        return self.partials[-1 if n is None else n]

    def __call__(self, x):
        return np.sqrt(np.maximum(self.q_polynomial()(x), 0.0))

    def norm(self, p: float, tol_quad: float = 1e-10) -> float:
        """L_p norm of the square-root of the accumulated square sum."""
        q_pp = self.q_polynomial()
        if p == np.inf:
            return float(np.sqrt(q_pp.sup_norm_on()))
        return power_integral(q_pp, p / 2.0, tol_quad) ** (1.0 / p)


def square_function(filtration: Filtration, order: int, f) -> SquareFunction:
    return SquareFunction(DeltaSequence.from_function(filtration, order, f))


# -- adapted sequences -----------------------------------------------------------


class AdaptedSequence:
    """One spline per level, each in the spline space of its level."""

    def __init__(self, filtration: Filtration, order: int, members):
        self.filtration = filtration
        self.order = order
        self.members = list(members)
        if len(self.members) > len(filtration):
            raise ValueError("more members than filtration levels")
        for n, s in enumerate(self.members):
            if (s.basis.partition != filtration.levels[n]
                    or s.basis.order != order):
                raise NotAdapted(f"member {n} not on the level-{n} basis")

    @classmethod
    def from_functions(cls, filtration: Filtration, order: int, fs,
                       tol: float = 1e-10):
        """Project raw functions per level, rejecting non-members."""
        members = []
        for n, f in enumerate(fs):
            pp = _as_pp(f)
            s = get_projector(filtration.levels[n], order).project(pp)
            gap = (pp - s.to_piecewise()).sup_norm_on()
            scale = max(1.0, pp.sup_norm_on())
            if gap > tol * scale:
                raise NotAdapted(f"function {n} is {gap:.2e} from its level space")
            members.append(s)
        return cls(filtration, order, members)

    def __len__(self):
        return len(self.members)

    def pps(self):
        return [m.to_piecewise() for m in self.members]


# -- ratio reports ---------------------------------------------------------------


@dataclass(frozen=True)
class RatioReport:
    lhs: float
    rhs: float
    ratio: float


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0.0:
        return lhs / rhs
    return 0.0 if lhs == 0.0 else np.inf


def burkholder_ratio(filtration: Filtration, order: int, f,
                     p: float) -> RatioReport:
    """Square-function L_p norm against the norm of the terminal projection."""
    if not 1.0 < p < np.inf:
        raise ParameterError("p must lie in (1, inf)")
    ds = DeltaSequence.from_function(filtration, order, f)
    sf = SquareFunction(ds)
    lhs = sf.norm(p)
    rhs = ds.terminal_projection.to_piecewise().lp_norm(p)
    return RatioReport(lhs, rhs, _ratio(lhs, rhs))


@dataclass(frozen=True)
class SignSupReport:
    square_norm: float       # L1 norm of the square function
    best_signed: float       # largest L1 norm over tried sign patterns
    ratio_upper: float       # square_norm / best_signed
    ratio_lower: float       # best_signed / square_norm
    exhaustive: bool
    patterns_tried: int


def sign_randomized_ratio(ds: DeltaSequence, trials: int = 200,
                          seed: int = 0,
                          enumerate_limit: int = 2**14) -> SignSupReport:
    """Compare the square-function L1 norm with sup over sign patterns.

    The supremum is exact (full enumeration) while 2^(levels-1) patterns
    fit under the limit; beyond that it is estimated by greedy sign choice
    plus random sampling and flagged as such.
    """
    sf = SquareFunction(ds)
    s_norm = sf.norm(1.0)
    pps = common_grid(ds.delta_pps)
    grid = pps[0].grid
    stack = np.stack([pp.coeffs for pp in pps])
    n = len(pps)

    def l1_of(eps: np.ndarray) -> float:
        combo = np.tensordot(eps, stack, axes=1)
        return PiecewisePolynomial(grid, combo).integrate_abs()

    best = 0.0
    tried = 0
    exhaustive = 2 ** max(n - 1, 0) <= enumerate_limit
    if exhaustive:
        for bits in range(2 ** max(n - 1, 0)):
            eps = np.ones(n)
            for j in range(n - 1):
                if bits >> j & 1:
                    eps[j + 1] = -1.0
            best = max(best, l1_of(eps))
            tried += 1
    else:
        combo = stack[0].copy()
        for j in range(1, n):
            up = PiecewisePolynomial(grid, combo + stack[j]).integrate_abs()
            down = PiecewisePolynomial(grid, combo - stack[j]).integrate_abs()
            combo = combo + stack[j] if up >= down else combo - stack[j]
        best = max(best, PiecewisePolynomial(grid, combo).integrate_abs())
        tried += 1
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            eps = rng.choice((-1.0, 1.0), size=n)
            best = max(best, l1_of(eps))
            tried += 1
    return SignSupReport(s_norm, best, _ratio(s_norm, best),
                         _ratio(best, s_norm), exhaustive, tried)


def stein_check(fs, filtration: Filtration, order: int, p: float, r: float,
                mode: str = "P", decay: float | None = None) -> RatioReport:
    """Mixed-norm of the per-level images against the mixed-norm of inputs.

    Admissible exponents: 1 <= r <= p < inf, or 1 < p <= r <= inf.  The
    corner p = 1 < r is excluded.
    """
    admissible = (1.0 <= r <= p < np.inf) or (1.0 < p <= r)
    if not admissible:
        raise ParameterError(f"(p, r) = ({p}, {r}) outside the admissible range")
    if len(fs) > len(filtration):
        raise ValueError("more functions than levels")
    pps = [_as_pp(f) for f in fs]
    images = []
    for n, pp in enumerate(pps):
        level = filtration.levels[n]
        if mode == "P":
            images.append(get_projector(level, order).project(pp).to_piecewise())
        elif mode == "T":
            q = decay if decay is not None else default_decay(level, order)
            images.append(KernelOperator(level, order, q).apply(pp))
        else:
            raise ValueError("mode must be 'P' or 'T'")
    lhs = lplq_norm(images, p, r)
    rhs = lplq_norm(pps, p, r)
    return RatioReport(lhs, rhs, _ratio(lhs, rhs))


def lepingle_check(adapted: AdaptedSequence, order_prime: int) -> RatioReport:
    """L1(l2) norm of previous-level projections against that of the inputs.

    Runs over levels 1 and up, projecting each member at the level below
    with the second order.
    """
    filtration = adapted.filtration
    if len(adapted) < 2:
        raise ValueError("need at least two levels")
    images, inputs = [], []
    for n in range(1, len(adapted)):
        pp = adapted.members[n].to_piecewise()
        prev = get_projector(filtration.levels[n - 1], order_prime)
        images.append(prev.project(pp).to_piecewise())
        inputs.append(pp)
    lhs = lplq_norm(images, 1.0, 2.0)
    rhs = lplq_norm(inputs, 1.0, 2.0)
    return RatioReport(lhs, rhs, _ratio(lhs, rhs))


# -- the duality estimate ----------------------------------------------------------


@dataclass(frozen=True)
class DualityReport:
    lhs: float               # sum of E|f_n h_n|
    rhs: float               # E X_N^{1/2} * sup_n ||P_n tail||_inf^{1/2}
    ratio: float
    cs_term_f: float         # sum of E[f_n^2 / g_n]
    cs_term_h: float         # sum of E[g_n h_n^2]
    term_f_bound: float      # 2 E X_N^{1/2}
    term_f_ok: bool


def main_duality_check(adapted: AdaptedSequence, hs,
                       upto: int | None = None,
                       tol_quad: float = 1e-10) -> DualityReport:
    """Pairing sum against the square-sum functional, with the two
    Cauchy-Schwarz factors of its proof reported alongside."""
    n_levels = len(adapted) if upto is None else upto + 1
    filtration = adapted.filtration
    f_pps = [m.to_piecewise() for m in adapted.members[:n_levels]]
    h_pps = [_as_pp(h) for h in hs[:n_levels]]
    if len(h_pps) != n_levels:
        raise ValueError("need one h per level")
    envelopes = build_envelopes(filtration, adapted.order,
                                adapted.members[:n_levels], verify=False)

    lhs = sum((f * h).integrate_abs() for f, h in zip(f_pps, h_pps))

    x_last = envelopes.running_squares[-1]
    e_sqrt_x = envelopes.sqrt_expectations[-1]

    tails = [None] * n_levels
    acc = None
    for n in range(n_levels - 1, -1, -1):
        sq = h_pps[n].square()
        acc = sq if acc is None else acc + sq
        tails[n] = acc
    sup_term = 0.0
    for n in range(n_levels):
        proj = get_projector(filtration.levels[n], adapted.order)
        sup_term = max(sup_term,
                       proj.project(tails[n]).to_piecewise().sup_norm_on())
    rhs = e_sqrt_x * np.sqrt(sup_term)

    term_f = 0.0
    for f_pp, g in zip(f_pps, envelopes.members):
        g_pp = g.to_piecewise()
        num = f_pp.square()

        def integrand(x):
            return num(x) / np.maximum(g_pp(x), 1e-300)

        for a, b in num.grid.atoms():
            term_f += adaptive_quadrature(integrand, a, b, tol_quad)
    term_h = 0.0
    for g, h_pp in zip(envelopes.members, h_pps):
        term_h += (g.to_piecewise() * h_pp.square()).integrate()
    bound = 2.0 * e_sqrt_x
    return DualityReport(lhs, rhs, _ratio(lhs, rhs), term_f, term_h, bound,
                         term_f <= bound * (1 + 1e-9) + 1e-12)


# -- endpoint space norms -----------------------------------------------------------


def h1_norm(f, filtration: Filtration, order: int,
            tol_quad: float = 1e-10) -> float:
    """Expectation of the terminal square function."""
    sf = square_function(filtration, order, f)
    return power_integral(sf.q_polynomial(), 0.5, tol_quad)


def bmo_norm(h, filtration: Filtration, order: int,
             decay: float | None = None) -> float:
    """Max over levels of the sup of the kernel image of tail square sums.

    At finite depth the supremum runs over the available levels only.  The
    value depends on the decay base of the kernel operators; when omitted
    it follows the observed-decay policy per level.
    """
    ds = DeltaSequence.from_function(filtration, order, h)
    n_levels = len(ds)
    tails = [None] * n_levels
    acc = None
    for n in range(n_levels - 1, -1, -1):
        sq = ds.delta_pps[n].square()
        acc = sq if acc is None else acc + sq
        tails[n] = acc
    worst = 0.0
    for n in range(n_levels):
        level = filtration.levels[n]
        q = decay if decay is not None else default_decay(level, order)
        image = KernelOperator(level, order, q).apply(tails[n])
        worst = max(worst, float(np.max(image.coeffs[:, 0])))
    return float(np.sqrt(worst))


@dataclass(frozen=True)
class PairingReport:
    pairing: float
    bound: float
    ratio: float | None
    degenerate_consistent: bool   # when bound == 0: pairing must vanish too


def pairing_check(f, h, filtration: Filtration, order: int,
                  decay: float | None = None) -> PairingReport:
    """Terminal-level pairing against the product of the endpoint norms."""
    proj = get_projector(filtration.finest, order)
    pf = proj.project(_as_pp(f)).to_piecewise()
    ph = proj.project(_as_pp(h)).to_piecewise()
    pairing = (pf * ph).integrate()
    bound = h1_norm(f, filtration, order) * bmo_norm(h, filtration, order, decay)
    if bound == 0.0:
        return PairingReport(pairing, bound, None, abs(pairing) <= 1e-12)
    return PairingReport(pairing, bound, abs(pairing) / bound, True)


# -- maximal-function style checks ----------------------------------------------------


@dataclass(frozen=True)
class DoobReport:
    weak_constants: list     # lambda * |{sup |f_n| > lambda}| / sup_n ||f_n||_1
    weak_max: float
    lp_ratio: float          # ||sup_n |f_n|||_p / sup_n ||f_n||_p


def doob_checks(ms: MartingaleSplineSequence, p: float,
                lambdas) -> DoobReport:
    """Empirical constants of the weak-type and L_p maximal inequalities."""
    if not 1.0 < p:
        raise ParameterError("p must exceed 1")
    pps = [m.to_piecewise() for m in ms.members]
    env = upper_envelope_abs(pps)
    sup_l1 = max(pp.lp_norm(1.0) for pp in pps)
    weak = []
    for lam in lambdas:
        meas = env.super_level_set(float(lam)).measure
        weak.append(float(lam) * meas / sup_l1 if sup_l1 > 0 else 0.0)
    sup_lp = max(pp.lp_norm(p) for pp in pps)
    lp_ratio = _ratio(env.lp_norm(p), sup_lp)
    return DoobReport(weak, max(weak) if weak else 0.0, lp_ratio)


def orthogonality_gap(ds_f: DeltaSequence, ds_g: DeltaSequence) -> float:
    """Largest normalized cross inner product between unequal-level deltas."""
    worst = 0.0
    for i, df in enumerate(ds_f.delta_pps):
        norm_f = df.lp_norm(2.0)
        for j, dg in enumerate(ds_g.delta_pps):
            if i == j:
                continue
            norm_g = dg.lp_norm(2.0)
            inner = abs((df * dg).integrate())
            scale = norm_f * norm_g
            if scale > 0:
                worst = max(worst, inner / scale)
            elif inner > 0:
                worst = np.inf
    return worst
