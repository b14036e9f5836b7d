"""Monotone spline envelopes of running square sums, and greedy allocation.

`build_envelopes` realizes the constructive sequence whose coefficients
are maxima of sup norms of the running square sum over all coarser
supports containing the current one.  The resulting splines are
nonnegative, nondecreasing across levels and dominate the square root of
the running square sum pointwise; both facts hold by theorem, so any
numerical violation beyond tolerance raises.

`greedy_allocation` peels disjoint subsets of prescribed measure from
nested host sets, processing coarser-level requests last and always taking
the leftmost available mass.
"""

import json
from dataclasses import dataclass

import numpy as np

from .bsplines import Spline, get_basis, refine_spline
from .errors import InstanceInvalid, InternalExhaustion, PropertyViolation
from .partitions import Filtration
from .piecewise import IntervalUnion, PiecewisePolynomial, level_set  # noqa: F401
from .quadrature import adaptive_quadrature
from .rootfind import min_max_on


@dataclass
class EnvelopeSequence:
    filtration: Filtration
    order: int
    members: list            # Spline per level
    running_squares: list    # exact piecewise polynomials X_n
    expectations: list       # E g_n, exact
    sqrt_expectations: list  # E X_n^{1/2}, adaptive quadrature
    skipped: list            # (level_built, earlier_level) pairs with no
                             # containing support at the earlier level

    def ratios(self) -> np.ndarray:
        """E g_n / E X_n^{1/2} per level."""
        out = []
        for e, s in zip(self.expectations, self.sqrt_expectations):
            out.append(e / s if s > 0 else (1.0 if e == 0 else np.inf))
        return np.asarray(out)


def _sqrt_integral(x_pp: PiecewisePolynomial, tol: float = 1e-10) -> float:
    total = 0.0
    for a, b in x_pp.grid.atoms():
        total += adaptive_quadrature(
            lambda t: np.sqrt(np.maximum(x_pp(t), 0.0)), a, b, tol
        )
    return total


def build_envelopes(filtration: Filtration, order: int, members,
                    upto: int | None = None, verify: bool = True,
                    grid_checks: int = 1000) -> EnvelopeSequence:
    """Construct the envelope splines for an adapted sequence of members.

    `members[i]` must lie in the order-`order` spline space of level i.
    """
    last = len(members) - 1 if upto is None else upto
    levels = filtration.levels
    squares = []
    acc = None
    for ell in range(last + 1):
        pp = members[ell].to_piecewise() if isinstance(members[ell], Spline) \
            else members[ell]
        sq = pp.square()
        acc = sq if acc is None else acc + sq
        squares.append(acc)

    sup_cache: dict = {}

    def sup_on_support(ell: int, r: int) -> float:
        key = (ell, r)
        if key not in sup_cache:
            sup_cache[key] = squares[ell].sup_norm_on(
                get_basis(levels[ell], order).support(r)
            )
        return sup_cache[key]

    env_members, expectations, sqrt_exps, skipped = [], [], [], []
    for nu in range(last + 1):
        basis = get_basis(levels[nu], order)
        coeffs = np.zeros(basis.dim)
        contributed = np.zeros(nu + 1, dtype=bool)
        for j in range(basis.dim):
            lo, hi = basis.support(j)
            best = 0.0
            for ell in range(nu + 1):
                idx = get_basis(levels[ell], order).supports_containing(lo, hi)
                if len(idx) == 0:
                    continue
                contributed[ell] = True
                best = max(best, max(sup_on_support(ell, int(r)) for r in idx))
            coeffs[j] = np.sqrt(best)
        for ell in range(nu + 1):
            if not contributed[ell]:
                skipped.append((nu, ell))
        g = Spline(basis, coeffs)
        env_members.append(g)
        expectations.append(float(coeffs @ basis.basis_integrals()))
        sqrt_exps.append(_sqrt_integral(squares[nu]))

    seq = EnvelopeSequence(filtration, order, env_members, squares,
                           expectations, sqrt_exps, skipped)
    if verify:
        verify_envelopes(seq, grid_checks=grid_checks)
    return seq


@dataclass(frozen=True)
class EnvelopeReport:
    monotone_gap: float      # min over levels/points of g_{n+1} - g_n
    domination_gap: float    # min over levels/points of g_n - X_n^{1/2}
    ratios: np.ndarray       # E g_n / E X_n^{1/2}
    skipped: tuple


def _pp_min(pp: PiecewisePolynomial):
    best, arg = np.inf, 0.0
    for i in range(pp.grid.num_atoms):
        mn, _mx, amn, _amx = min_max_on(pp.coeffs[i], -1.0, 1.0)
        if mn < best:
            best = mn
            arg = pp._mids[i] + pp._hws[i] * amn
    return best, arg


def verify_envelopes(seq: EnvelopeSequence, tol: float = 1e-10,
                     grid_checks: int = 1000) -> EnvelopeReport:
    """Check monotonicity and domination exactly; raise on violation."""
    grid = np.linspace(0.0, 1.0, grid_checks + 1)
    mono_gap = np.inf
    for nu in range(len(seq.members) - 1):
        lifted = refine_spline(seq.members[nu],
                               seq.filtration.levels[nu + 1])
        diff = (seq.members[nu + 1] - lifted).to_piecewise()
        gap, arg = _pp_min(diff)
        gap = min(gap, float(np.min(diff(grid))))
        if gap < -tol:
            raise PropertyViolation(
                f"envelope not monotone at level {nu}: gap {gap:.2e} near x={arg:.6f}"
            )
        mono_gap = min(mono_gap, gap)
    dom_gap = np.inf
    for nu, (g, x_pp) in enumerate(zip(seq.members, seq.running_squares)):
        g_pp = g.to_piecewise()
        detect = g_pp.square() - x_pp
        mn, arg = _pp_min(detect)
        gap = 0.0
        if mn < 0.0:
            gap = float(g_pp(arg)) - np.sqrt(max(float(x_pp(arg)), 0.0))
        grid_gap = float(
            np.min(g_pp(grid) - np.sqrt(np.maximum(x_pp(grid), 0.0)))
        )
        gap = min(gap, grid_gap)
        if gap < -tol:
            raise PropertyViolation(
                f"envelope fails domination at level {nu}: gap {gap:.2e}"
            )
        dom_gap = min(dom_gap, gap)
    return EnvelopeReport(mono_gap, dom_gap, seq.ratios(), tuple(seq.skipped))


# -- greedy disjoint allocation -------------------------------------------------


@dataclass(frozen=True)
class AllocationInstance:
    """Requests (atom, level, host atom, admissible subset) plus the rate c1.

    Feasibility requires, for every j, the subset measure |B_j| to cover
    c1 times the total atom length requested by all i with level(i) >=
    level(j) whose hosts sit inside host j.
    """

    atoms: tuple            # (lo, hi) intervals, one per request
    levels: tuple           # level index per request
    hosts: tuple            # (lo, hi) host atom per request
    subsets: tuple          # IntervalUnion inside the host, per request
    c1: float

    def __post_init__(self):
        n = len(self.atoms)
        if not (len(self.levels) == len(self.hosts) == len(self.subsets) == n):
            raise ValueError("mismatched instance arrays")

    def demand(self, j: int) -> float:
        lo_j, hi_j = self.hosts[j]
        total = 0.0
        for i in range(len(self.atoms)):
            if self.levels[i] >= self.levels[j]:
                lo_i, hi_i = self.hosts[i]
                if lo_i >= lo_j - 1e-15 and hi_i <= hi_j + 1e-15:
                    total += self.atoms[i][1] - self.atoms[i][0]
        return total

    def validate(self):
        for j, b in enumerate(self.subsets):
            host = IntervalUnion.of(self.hosts[j])
            if b.subtract(host).measure > 1e-12:
                raise InstanceInvalid(f"subset {j} leaves its host atom")
            if b.measure < self.c1 * self.demand(j) - 1e-12:
                raise InstanceInvalid(
                    f"subset {j} too small: {b.measure:.6g} < "
                    f"c1 * demand = {self.c1 * self.demand(j):.6g}"
                )

    def to_json(self) -> str:
        return json.dumps({
            "atoms": [list(a) for a in self.atoms],
            "levels": list(self.levels),
            "hosts": [list(h) for h in self.hosts],
            "subsets": [[list(iv) for iv in b.intervals] for b in self.subsets],
            "c1": self.c1,
        })

    @classmethod
    def from_json(cls, text: str) -> "AllocationInstance":
        d = json.loads(text)
        return cls(
            tuple(tuple(a) for a in d["atoms"]),
            tuple(d["levels"]),
            tuple(tuple(h) for h in d["hosts"]),
            tuple(IntervalUnion(tuple(tuple(iv) for iv in b))
                  for b in d["subsets"]),
            float(d["c1"]),
        )


def allocation_to_json(mapping) -> str:
    """Serialize a greedy-allocation result for regression fixtures."""
    return json.dumps([[list(iv) for iv in phi.intervals] for phi in mapping])


def allocation_from_json(text: str):
    return [IntervalUnion(tuple(tuple(iv) for iv in phi))
            for phi in json.loads(text)]


def greedy_allocation(inst: AllocationInstance):
    """Disjoint subsets phi(j) of measure c1*|A_j| inside each B_j.

    Requests are processed in order of nonincreasing level; each one takes
    the leftmost still-unused mass of its admissible subset.  Exhaustion on
    a validated instance indicates a bug and raises.
    """
    inst.validate()
    order = sorted(range(len(inst.atoms)), key=lambda j: (-inst.levels[j], j))
    used = IntervalUnion.empty()
    out = [None] * len(inst.atoms)
    for j in order:
        target = inst.c1 * (inst.atoms[j][1] - inst.atoms[j][0])
        avail = inst.subsets[j].subtract(used)
        if avail.measure < target - 1e-12:
            raise InternalExhaustion(
                f"request {j} finds only {avail.measure:.6g} of {target:.6g}"
            )
        pick = avail.leftmost_subset(min(target, avail.measure))
        out[j] = pick
        used = used.union(pick)
    return out
