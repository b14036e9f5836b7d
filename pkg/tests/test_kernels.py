import numpy as np
import pytest

from splinegale.errors import ParameterError, ZeroFunction
from splinegale.partitions import Filtration, Partition, dyadic_filtration
from splinegale.piecewise import PiecewisePolynomial
from splinegale.bsplines import Spline, get_basis
from splinegale.kernels import (KernelOperator, default_decay,
                                domination_constants, jensen_gap,
                                kernel_product_min_constant, kx_upper_bound,
                                maximal_lower, tool_lepingle, tower_constant)

ONE = PiecewisePolynomial.constant(1.0)
IND = PiecewisePolynomial.indicator(0.0, 0.5)


def _random_partition(rng, max_cuts=6):
    cuts = np.sort(rng.uniform(0.05, 0.95, int(rng.integers(0, max_cuts + 1))))
    return Partition(tuple(np.unique(np.concatenate(([0.0], cuts, [1.0])))))


def _brute_kernel(part, order, decay):
    """Quadruple-loop oracle for the cell kernel values."""
    basis = get_basis(part, order)
    bp = part.breakpoints
    m = part.num_atoms
    cells = np.zeros((m, m))
    for b in range(m):
        for a in range(m):
            for i in range(basis.dim):
                si, ei = basis.support(i)
                if not (si <= bp[a] and bp[a + 1] <= ei):
                    continue
                for j in range(basis.dim):
                    sj, ej = basis.support(j)
                    if not (sj <= bp[b] and bp[b + 1] <= ej):
                        continue
                    cells[b, a] += decay ** abs(i - j) / (max(ei, ej) - min(si, sj))
    return cells


def test_two_atom_hand_example():
    op = KernelOperator(Partition((0.0, 0.5, 1.0)), 1, 0.5)
    np.testing.assert_allclose(op.cell, [[2.0, 0.5], [0.5, 2.0]], atol=1e-15)
    np.testing.assert_allclose(op.kx, [1.25, 1.25], atol=1e-15)
    assert 1.0 <= op.kx.min() and op.kx.max() <= kx_upper_bound(1, 0.5)


def test_single_atom_identity():
    for q in (0.2, 0.5, 0.9):
        op = KernelOperator(Partition((0.0, 1.0)), 1, q)
        np.testing.assert_allclose(op.cell, [[1.0]])
        np.testing.assert_allclose(op.kx, [1.0])


def test_uniform_four_atoms_row_integral_window():
    op = KernelOperator(Partition.uniform(4), 2, 0.5)
    assert op.kx.min() >= 2.0 - 1e-12
    assert op.kx.max() <= 12.0 + 1e-12


def test_cells_match_brute_force():
    rng = np.random.default_rng(30)
    for k in (1, 2, 3, 4):
        for q in (0.5, 0.7):
            part = _random_partition(rng)
            op = KernelOperator(part, k, q)
            np.testing.assert_allclose(op.cell, _brute_kernel(part, k, q),
                                       atol=1e-12)
            assert np.array_equal(op.cell, op.cell.T)


def test_kx_bounds_sweep():
    rng = np.random.default_rng(31)
    for k in (1, 2, 3, 4):
        for q in (0.5, 0.7, 0.9):
            for _ in range(5):
                op = KernelOperator(_random_partition(rng), k, q)
                assert op.kx_slack >= -1e-12


def test_apply_examples():
    op = KernelOperator(Partition((0.0, 0.5, 1.0)), 1, 0.5)
    np.testing.assert_allclose(op.apply(ONE).coeffs.ravel(), [1.25, 1.25])
    np.testing.assert_allclose(op.apply(IND).coeffs.ravel(), [1.0, 0.25])


def test_apply_positivity_linearity_self_adjoint():
    rng = np.random.default_rng(32)
    for _ in range(30):
        part = _random_partition(rng)
        k = int(rng.integers(1, 4))
        op = KernelOperator(part, k, 0.6)
        f = PiecewisePolynomial.step(part, rng.uniform(0, 1, part.num_atoms))
        assert op.apply(f).coeffs.min() >= -1e-15
        g = PiecewisePolynomial.step(part, rng.standard_normal(part.num_atoms))
        a, b = rng.standard_normal(2)
        lin = op.apply(a * f + b * g)
        combo = a * op.apply(f) + b * op.apply(g)
        assert (lin - combo).sup_norm_on() <= 1e-12 * (abs(a) + abs(b) + 1)
        lhs = (op.apply(f) * g).integrate()
        rhs = (f * op.apply(g)).integrate()
        assert abs(lhs - rhs) <= 1e-11 * max(1.0, f.lp_norm(2) * g.lp_norm(2))


def test_operator_norm_bounds():
    rng = np.random.default_rng(33)
    for _ in range(100):
        part = _random_partition(rng)
        k = int(rng.integers(1, 4))
        q = float(rng.choice([0.5, 0.7, 0.9]))
        op = KernelOperator(part, k, q)
        f = PiecewisePolynomial.step(part, rng.standard_normal(part.num_atoms))
        bound = kx_upper_bound(k, q)
        tf = op.apply_abs(f)
        assert tf.lp_norm(1) <= bound * f.lp_norm(1) * (1 + 1e-12)
        assert tf.lp_norm(np.inf) <= bound * f.lp_norm(np.inf) * (1 + 1e-12)


def test_jensen_constant_equality():
    op = KernelOperator(Partition((0.0, 0.5, 1.0)), 1, 0.5)
    assert abs(jensen_gap(op, PiecewisePolynomial.constant(2.0), "square")) <= 1e-12


def test_jensen_indicator_strict():
    op = KernelOperator(Partition((0.0, 0.5, 1.0)), 1, 0.5)
    gap = jensen_gap(op, IND, "square")
    assert gap <= -1e-3  # strictly convex case: strict inequality


def test_jensen_sweep_all_phis():
    rng = np.random.default_rng(34)
    for _ in range(100):
        part = _random_partition(rng)
        k = int(rng.integers(1, 4))
        op = KernelOperator(part, k, 0.7)
        basis = get_basis(part, k)
        f = Spline(basis, rng.standard_normal(basis.dim)).to_piecewise()
        assert jensen_gap(op, f, "abs") <= 1e-10
        assert jensen_gap(op, f, "square") <= 1e-10
    # the capped exponential is slower; spot-check
    rng = np.random.default_rng(35)
    for _ in range(10):
        part = _random_partition(rng)
        op = KernelOperator(part, 2, 0.7)
        basis = get_basis(part, 2)
        f = Spline(basis, rng.standard_normal(basis.dim)).to_piecewise()
        assert jensen_gap(op, f, "exp-capped") <= 1e-10


def test_jensen_alternative_reading_flag():
    op = KernelOperator(Partition((0.0, 0.3, 1.0)), 1, 0.5)
    gap = jensen_gap(op, IND, "square", freeze_outer=False)
    assert np.isfinite(gap)


def test_maximal_examples():
    assert maximal_lower(ONE, 0.37) == pytest.approx(1.0, abs=1e-12)
    assert maximal_lower(IND, 0.75) == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert maximal_lower(IND, 0.25) == pytest.approx(1.0, abs=1e-12)


def test_maximal_is_lower_bound_of_averages():
    rng = np.random.default_rng(36)
    f = PiecewisePolynomial.from_power_basis(rng.standard_normal(3))
    for _ in range(20):
        x = float(rng.uniform(0, 1))
        got = maximal_lower(f, x, grid_size=64)
        a = float(rng.uniform(0, x)) if x > 0 else 0.0
        b = float(rng.uniform(x, 1)) if x < 1 else 1.0
        if b > a:
            avg = f.integrate_abs_on(a, b) / (b - a)
            finer = maximal_lower(f, x, grid_size=512)
            assert finer >= got - 1e-12
            assert finer >= avg - 1e-3  # dense grid nearly dominates any interval


def test_domination_single_atom():
    rep = domination_constants(Partition((0.0, 1.0)), 1, 0.5,
                               PiecewisePolynomial.from_power_basis([0.0, 1.0]))
    assert rep.c1_hat <= 1.0 + 1e-12
    assert rep.c2_is_upper_estimate


def test_domination_member_function():
    part = Partition((0.0, 0.4, 1.0))
    basis = get_basis(part, 2)
    f = Spline(basis, np.array([1.0, -2.0, 0.5])).to_piecewise()
    rep = domination_constants(part, 2, 0.7, f)
    assert np.isfinite(rep.c1_hat) and np.isfinite(rep.c2_hat)
    assert rep.c1_hat > 0


def test_domination_zero_function():
    with pytest.raises(ZeroFunction):
        domination_constants(Partition((0.0, 1.0)), 1, 0.5,
                             PiecewisePolynomial.constant(0.0))


def test_domination_pointwise_holds_by_construction():
    rng = np.random.default_rng(37)
    for _ in range(20):
        part = _random_partition(rng)
        k = int(rng.integers(1, 4))
        basis = get_basis(part, k)
        f = Spline(basis, rng.standard_normal(basis.dim)).to_piecewise()
        rep = domination_constants(part, k, 0.7, f)
        op = KernelOperator(part, k, 0.7)
        from splinegale.projection import get_projector

        pf = get_projector(part, k).project(f).to_piecewise()
        tf = op.apply_abs(f)
        xs = np.linspace(0, 1, 512)
        assert np.all(np.abs(pf(xs)) <= rep.c1_hat * tf(xs) * (1 + 1e-9) + 1e-12)


def test_tower_single_atom_fixture():
    res = tower_constant(Partition((0.0, 1.0)), Partition((0.0, 1.0)),
                         1, 1, 0.5, 0.5, 0.8, ONE)
    assert res.c_hat == pytest.approx(1.0, abs=1e-12)
    assert res.gamma == pytest.approx(1.0)


def test_tower_hand_checkable_cells():
    coarse = Partition((0.0, 0.5, 1.0))
    fine = Partition((0.0, 0.25, 0.5, 1.0))
    res = tower_constant(coarse, fine, 1, 1, 0.5, 0.5, 0.8, ONE)
    # independent oracle via brute-force kernels and cell sums
    kc = _brute_kernel(coarse, 1, 0.5)
    kf = _brute_kernel(fine, 1, 0.5)
    kq = _brute_kernel(coarse, 1, 0.8)
    fine_lens = fine.atom_lengths()
    tf = kf @ fine_lens
    w = np.array([tf[0] * 0.25 + tf[1] * 0.25, tf[2] * 0.5])
    stf = kc @ w
    rf = kq @ coarse.atom_lengths()
    oracle = np.max(np.abs(stf) / rf)
    assert res.c_hat == pytest.approx(oracle, rel=1e-12)


def test_tower_parameter_error():
    with pytest.raises(ParameterError):
        tower_constant(Partition((0.0, 1.0)), Partition((0.0, 1.0)),
                       1, 1, 0.5, 0.5, 0.5, ONE)


def test_tower_sweep_finite():
    rng = np.random.default_rng(38)
    for _ in range(40):
        coarse = _random_partition(rng, 3)
        fine = coarse
        for _ in range(int(rng.integers(1, 4))):
            fine = fine.split_atom(int(rng.integers(fine.num_atoms)),
                                   float(rng.uniform(0.3, 0.7)))
        k = int(rng.integers(1, 4))
        kp = int(rng.integers(1, 4))
        basis = get_basis(fine, kp)
        f = Spline(basis, rng.standard_normal(basis.dim)).to_piecewise()
        res = tower_constant(coarse, fine, k, kp, 0.5, 0.5, 0.8, f)
        assert np.isfinite(res.c_hat)


def test_kernel_product_single_atom():
    s_op = KernelOperator(Partition((0.0, 1.0)), 1, 0.5)
    t_op = KernelOperator(Partition((0.0, 1.0)), 1, 0.5)
    res = kernel_product_min_constant(s_op, t_op, 0.8)
    assert res.c_min == pytest.approx(1.0, abs=1e-12)


def test_kernel_product_two_level_dyadic():
    coarse = Partition((0.0, 0.5, 1.0))
    fine = Partition((0.0, 0.25, 0.5, 0.75, 1.0))
    s_op = KernelOperator(coarse, 1, 0.5)
    t_op = KernelOperator(fine, 1, 0.5)
    res = kernel_product_min_constant(s_op, t_op, 0.8)
    # oracle on the coarse-x / fine-s product grid
    kq = _brute_kernel(coarse, 1, 0.8)
    lens = fine.atom_lengths()
    coarse_of = np.array([coarse.atom_index((a + b) / 2) for a, b in fine.atoms()])
    lhs = (s_op.cell[:, coarse_of] * lens[None, :]) @ t_op.cell
    rhs = kq[:, coarse_of]
    assert res.c_min == pytest.approx(np.max(lhs / rhs), rel=1e-12)


def test_tool_lepingle_trivial_term():
    filt = Filtration((Partition((0.0, 1.0)), Partition((0.0, 1.0))))
    c = Spline(get_basis(Partition((0.0, 1.0)), 1), np.array([4.0]))
    res = tool_lepingle(filt, 1, 1, 1, [c], 2.0)
    assert res.lhs_projection == pytest.approx(16.0)
    assert res.ratio_projection == pytest.approx(1.0, abs=1e-12)
    assert res.ratio_kernel == pytest.approx(1.0, abs=1e-12)


def test_tool_lepingle_conditional_expectation_oracle():
    # order one on a uniform dyadic filtration: the projections are
    # conditional expectations, so the projected tail never beats the tail
    filt = dyadic_filtration(4)
    rng = np.random.default_rng(39)
    fs = []
    for lev in filt.levels[1:]:
        basis = get_basis(lev, 1)
        fs.append(Spline(basis, rng.standard_normal(basis.dim)))
    res = tool_lepingle(filt, 1, 1, 1, fs, 2.0)
    assert res.ratio_projection <= 1.0 + 1e-10


def test_tool_lepingle_sweep_recorded():
    rng = np.random.default_rng(40)
    ratios = []
    for _ in range(10):
        levels = [Partition((0.0, 1.0))]
        for _i in range(4):
            cur = levels[-1]
            levels.append(cur.split_atom(int(rng.integers(cur.num_atoms)),
                                         float(rng.uniform(0.3, 0.7))))
        filt = Filtration(tuple(levels), elementary=True)
        fs = []
        for lev in filt.levels[1:]:
            basis = get_basis(lev, 2)
            fs.append(Spline(basis, rng.standard_normal(basis.dim)))
        res = tool_lepingle(filt, 2, 3, 1, fs, 2.0)
        ratios.append(res.ratio_projection)
        assert np.isfinite(res.ratio_projection)
        assert np.isfinite(res.ratio_kernel)
    assert max(ratios) < 100.0


def test_default_decay_policy():
    assert default_decay(Partition((0.0, 0.5, 1.0)), 1) == 0.5
    assert default_decay(Partition.uniform(8), 2) in (0.5, 0.7, 0.9)
