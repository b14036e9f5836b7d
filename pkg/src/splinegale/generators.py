"""Seeded random instance generation for the check harness.

Per-trial seeds are derived with splitmix64 from (master_seed, trial_index,
axis_index), and every generator consumes its own substream, so reports are
reproducible bit for bit from the configuration alone.
"""

import numpy as np

from .bsplines import Spline, get_basis, regularity
from .config import ExperimentConfig
from .envelopes import AllocationInstance
from .errors import GenerationExhausted
from .martingales import AdaptedSequence
from .partitions import Filtration, Partition
from .piecewise import IntervalUnion, PiecewisePolynomial

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial_index: int, axis_index: int = 0) -> int:
    s = splitmix64(master_seed & _MASK)
    s = splitmix64(s ^ splitmix64(trial_index))
    s = splitmix64(s ^ splitmix64(axis_index))
    return s


def substream(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(splitmix64(seed ^ splitmix64(tag)))


def gen_filtration(cfg: ExperimentConfig, seed: int) -> Filtration:
    """Random filtration kept under the configured regularity bound.

    Elementary mode splits one uniformly chosen atom per level; otherwise
    every atom of the previous level is split (so a degenerate split range
    of {1/2} yields the uniform dyadic filtration).  Splits whose
    regularity exceeds gamma_max are resampled, up to 100 attempts.
    """
    rng = substream(seed, 0)
    lo, hi = cfg.split_range
    levels = [Partition.unit()]
    for lev in range(1, cfg.levels):
        cur = levels[-1]
        for _attempt in range(100):
            if cfg.elementary:
                idx = int(rng.integers(cur.num_atoms))
                cand = cur.split_atom(idx, float(rng.uniform(lo, hi)))
            else:
                cand = cur
                for a in reversed(range(cur.num_atoms)):
                    cand = cand.split_atom(a, float(rng.uniform(lo, hi)))
            if regularity(cand, cfg.k) <= cfg.gamma_max + 1e-12:
                levels.append(cand)
                break
        else:
            raise GenerationExhausted(
                f"level {lev}: no admissible split in 100 attempts "
                f"(gamma_max={cfg.gamma_max})"
            )
    return Filtration(tuple(levels), elementary=cfg.elementary)


def observed_gamma(filtration: Filtration, order: int) -> float:
    return max(regularity(level, order) for level in filtration.levels)


def random_spline(partition: Partition, order: int,
                  rng: np.random.Generator, normalize: float | None = 2.0) -> Spline:
    basis = get_basis(partition, order)
    coeffs = rng.standard_normal(basis.dim)
    s = Spline(basis, coeffs)
    if normalize is not None:
        norm = s.to_piecewise().lp_norm(normalize)
        if norm > 0:
            s = Spline(basis, coeffs / norm)
    return s


def gen_adapted(cfg: ExperimentConfig, filtration: Filtration,
                seed: int) -> AdaptedSequence:
    """One normalized random spline per level, i.i.d. normal coefficients."""
    rng = substream(seed, 1)
    members = [
        random_spline(level, cfg.k, rng) for level in filtration.levels
    ]
    return AdaptedSequence(filtration, cfg.k, members)


def gen_functions(cfg: ExperimentConfig, filtration: Filtration, seed: int,
                  count: int | None = None, tag: int = 2):
    """Arbitrary (non-adapted) test functions: splines on the finest level."""
    rng = substream(seed, tag)
    n = count if count is not None else len(filtration)
    return [
        random_spline(filtration.finest, cfg.k, rng).to_piecewise()
        for _ in range(n)
    ]


def gen_polynomial_piece(order: int, rng: np.random.Generator):
    """A random polynomial of the given order with a host interval inside [0,1]."""
    lo = float(rng.uniform(0.0, 0.5))
    hi = float(rng.uniform(lo + 0.25, 1.0))
    coeffs = rng.standard_normal(order)
    return PiecewisePolynomial.from_power_basis(coeffs), (lo, hi)


def gen_interval_union(rng: np.random.Generator, lo: float, hi: float,
                       min_fraction: float = 0.1) -> IntervalUnion:
    """Random union of up to 3 subintervals of [lo, hi] of positive measure."""
    pieces = []
    for _ in range(int(rng.integers(1, 4))):
        a = float(rng.uniform(lo, hi))
        b = float(rng.uniform(lo, hi))
        a, b = min(a, b), max(a, b)
        if b > a:
            pieces.append((a, b))
    union = IntervalUnion(tuple(pieces))
    if union.measure < min_fraction * (hi - lo):
        width = min_fraction * (hi - lo)
        start = float(rng.uniform(lo, hi - width))
        union = union.union(IntervalUnion.of((start, start + width)))
    return union


def gen_allocation_instance(cfg: ExperimentConfig, filtration: Filtration,
                            seed: int) -> AllocationInstance:
    """Random feasible instance: hosts are atoms of filtration levels and
    the rate c1 is set from the realized demands (so feasibility is tight
    up to a random safety factor)."""
    rng = substream(seed, 3)
    n_top = len(filtration) - 1
    finest = filtration.finest
    n_req = int(rng.integers(1, max(2, 2 * finest.num_atoms)))
    atoms, levels, hosts, subsets = [], [], [], []
    for _ in range(n_req):
        atoms.append(finest.atoms()[int(rng.integers(finest.num_atoms))])
        lev = int(rng.integers(0, n_top + 1))
        levels.append(lev)
        host_part = filtration.levels[lev]
        host = host_part.atoms()[int(rng.integers(host_part.num_atoms))]
        hosts.append(host)
        subsets.append(gen_interval_union(rng, host[0], host[1],
                                          min_fraction=0.3))
    inst0 = AllocationInstance(tuple(atoms), tuple(levels), tuple(hosts),
                               tuple(subsets), c1=1.0)
    ceiling = min(
        subsets[j].measure / inst0.demand(j) for j in range(n_req)
    )
    c1 = float(ceiling * rng.uniform(0.5, 1.0))
    return AllocationInstance(tuple(atoms), tuple(levels), tuple(hosts),
                              tuple(subsets), c1=c1)
