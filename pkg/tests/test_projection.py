import numpy as np
import pytest

from splinegale.errors import NotARefinement
from splinegale.partitions import Filtration, Partition, dyadic_filtration
from splinegale.piecewise import PiecewisePolynomial
from splinegale.bsplines import Spline, get_basis
from splinegale.projection import get_projector, make_martingale

X = PiecewisePolynomial.from_power_basis([0.0, 1.0])


def _random_partition(rng, max_cuts=6):
    cuts = np.sort(rng.uniform(0.05, 0.95, int(rng.integers(0, max_cuts + 1))))
    return Partition(tuple(np.unique(np.concatenate(([0.0], cuts, [1.0])))))


def _random_pp(rng, max_deg=3):
    grid = _random_partition(rng, 3)
    return PiecewisePolynomial(
        grid, rng.standard_normal((grid.num_atoms, int(rng.integers(1, max_deg + 2))))
    )


def test_order_one_projects_to_atom_averages():
    pr = get_projector(Partition((0.0, 0.5, 1.0)), 1)
    s = pr.project(X)
    np.testing.assert_allclose(s.coeffs, [0.25, 0.75], atol=1e-14)


def test_order_one_average_oracle_sweep():
    rng = np.random.default_rng(20)
    for _ in range(100):
        part = _random_partition(rng)
        f = PiecewisePolynomial.step(part, rng.standard_normal(part.num_atoms))
        finer = part.split_atom(int(rng.integers(part.num_atoms)), 0.5)
        pr = get_projector(part, 1)
        got = pr.project(f.refine_to(finer)).coeffs
        # oracle: mean value per atom via dense quadrature
        bp = part.breakpoints
        for i in range(part.num_atoms):
            xs = np.linspace(bp[i], bp[i + 1], 2001)[:-1]
            oracle = np.mean(f(xs))
            assert abs(got[i] - oracle) < 1e-12


def test_projection_is_identity_on_members():
    rng = np.random.default_rng(21)
    for k in (1, 2, 3, 4):
        part = _random_partition(rng)
        basis = get_basis(part, k)
        s = Spline(basis, rng.standard_normal(basis.dim))
        back = get_projector(part, k).project(s.to_piecewise())
        np.testing.assert_allclose(back.coeffs, s.coeffs, atol=1e-11)


def test_projection_orthogonality_residual():
    pr = get_projector(Partition((0.0, 0.5, 1.0)), 2)
    x2 = PiecewisePolynomial.from_power_basis([0.0, 0.0, 1.0])
    s = pr.project(x2)
    resid = pr.inner_products(x2 - s.to_piecewise())
    assert np.max(np.abs(resid)) < 1e-13


def test_idempotence_and_self_adjointness():
    rng = np.random.default_rng(22)
    for k in (1, 2, 3):
        part = _random_partition(rng)
        pr = get_projector(part, k)
        f, g = _random_pp(rng), _random_pp(rng)
        pf = pr.project(f).to_piecewise()
        pg = pr.project(g).to_piecewise()
        again = pr.project(pf).to_piecewise()
        assert (again - pf).sup_norm_on() <= 1e-10
        lhs = (pf * g).integrate()
        rhs = (f * pg).integrate()
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, f.lp_norm(2) * g.lp_norm(2))


def test_tower_within_one_order():
    rng = np.random.default_rng(23)
    coarse = Partition((0.0, 0.5, 1.0))
    fine = coarse.split_atom(0, 0.5).split_atom(2, 0.4)
    for k in (1, 2, 3):
        f = _random_pp(rng)
        pf = get_projector(fine, k).project(f).to_piecewise()
        via = get_projector(coarse, k).project(pf)
        direct = get_projector(coarse, k).project(f)
        np.testing.assert_allclose(via.coeffs, direct.coeffs, atol=1e-10)


def test_dual_matrix_examples():
    pr = get_projector(Partition((0.0, 0.5, 1.0)), 1)
    np.testing.assert_allclose(pr.dual_matrix(), np.diag([2.0, 2.0]), atol=1e-13)
    part = Partition((0.0, 0.2, 0.7, 1.0))
    np.testing.assert_allclose(get_projector(part, 1).dual_matrix(),
                               np.diag(1.0 / part.atom_lengths()), atol=1e-12)
    pr2 = get_projector(Partition.uniform(4), 2)
    a = pr2.dual_matrix()
    g = pr2.basis.gram()
    assert np.max(np.abs(a @ g - np.eye(len(a)))) < 1e-10
    assert np.max(np.abs(a - a.T)) < 1e-10


def test_decay_fit():
    assert get_projector(Partition((0.0, 0.5, 1.0)), 1).decay_fit().q_hat == 0.0
    fit = get_projector(Partition.uniform(8), 2).decay_fit()
    assert 0.0 < fit.q_hat < 1.0
    assert fit.geometric and fit.min_slack >= -1e-12
    rng = np.random.default_rng(24)
    for _ in range(50):
        part = _random_partition(rng)
        fit = get_projector(part, 3).decay_fit()
        assert fit.q_hat < 1.0


def test_l1_opnorm_order_one_is_exactly_one():
    rng = np.random.default_rng(25)
    for _ in range(20):
        pr = get_projector(_random_partition(rng), 1)
        assert abs(pr.l1_opnorm() - 1.0) <= 1e-10


def test_l1_opnorm_higher_order_recorded():
    val = get_projector(Partition((0.0, 0.5, 1.0)), 2).l1_opnorm()
    assert 1.0 - 1e-12 <= val < 10.0
    rng = np.random.default_rng(26)
    vals = []
    for _ in range(20):
        vals.append(get_projector(_random_partition(rng), 3).l1_opnorm())
    assert np.isfinite(vals).all() and max(vals) < 100.0


def test_martingale_construction():
    filt = Filtration((Partition((0.0, 1.0)), Partition((0.0, 0.5, 1.0))),
                      elementary=True)
    term = Spline(get_basis(Partition((0.0, 0.5, 1.0)), 1), np.array([2.0, 0.0]))
    ms = make_martingale(filt, 1, term)
    np.testing.assert_allclose(ms.members[0].coeffs, [1.0])

    const = Spline(get_basis(Partition((0.0, 0.5, 1.0)), 2), np.full(3, -1.5))
    ms2 = make_martingale(Filtration(filt.levels), 2, const)
    xs = np.linspace(0, 1, 33)
    for member in ms2.members:
        np.testing.assert_allclose(member(xs), -1.5, atol=1e-12)


def test_martingale_consistency_property():
    rng = np.random.default_rng(27)
    filt = dyadic_filtration(4)
    basis = get_basis(filt.finest, 2)
    for _ in range(10):
        term = Spline(basis, rng.standard_normal(basis.dim))
        ms = make_martingale(filt, 2, term)
        for n in range(len(ms) - 1):
            pr = get_projector(filt.levels[n], 2)
            back = pr.project(ms.members[n + 1].to_piecewise())
            assert np.max(np.abs(back.coeffs - ms.members[n].coeffs)) <= 1e-10


def test_martingale_rejects_wrong_terminal():
    filt = dyadic_filtration(2)
    wrong = Spline(get_basis(Partition((0.0, 0.5, 1.0)), 1), np.zeros(2))
    with pytest.raises(NotARefinement):
        make_martingale(filt, 1, wrong)
