import numpy as np
import pytest

from splinegale.errors import InstanceInvalid
from splinegale.partitions import Filtration, Partition
from splinegale.piecewise import IntervalUnion, PiecewisePolynomial, level_set
from splinegale.bsplines import Spline, get_basis
from splinegale.envelopes import (AllocationInstance, build_envelopes,
                                  greedy_allocation, verify_envelopes)
from splinegale.generators import (gen_allocation_instance, gen_filtration,
                                   gen_adapted)
from splinegale.config import ExperimentConfig

SQRT5_FILT = Filtration((Partition((0.0, 1.0)), Partition((0.0, 0.5, 1.0))),
                        elementary=True)


def _sqrt5_members():
    return [Spline(get_basis(Partition((0.0, 1.0)), 1), np.array([1.0])),
            Spline(get_basis(Partition((0.0, 0.5, 1.0)), 1), np.array([2.0, 0.0]))]


def test_trivial_constant_instance():
    filt = Filtration((Partition((0.0, 1.0)),))
    member = Spline(get_basis(Partition((0.0, 1.0)), 1), np.array([-4.0]))
    seq = build_envelopes(filt, 1, [member])
    np.testing.assert_allclose(seq.members[0].coeffs, [4.0])
    assert seq.ratios()[0] == pytest.approx(1.0, abs=1e-12)


def test_sqrt5_fixture_exact():
    seq = build_envelopes(SQRT5_FILT, 1, _sqrt5_members())
    np.testing.assert_allclose(seq.members[1].coeffs, [np.sqrt(5.0), 1.0],
                               atol=1e-14)
    assert seq.expectations[1] == pytest.approx((np.sqrt(5) + 1) / 2, abs=1e-12)
    assert seq.sqrt_expectations[1] == pytest.approx((np.sqrt(5) + 1) / 2,
                                                     abs=1e-10)
    assert seq.ratios()[1] == pytest.approx(1.0, abs=1e-12)
    rep = verify_envelopes(seq)
    assert rep.monotone_gap >= -1e-12
    assert rep.domination_gap >= -1e-12


def test_envelope_properties_random_sweep():
    cfg = ExperimentConfig(levels=8, gamma_max=4.0, trials=1)
    worst_ratio = 0.0
    for order in (1, 2, 3):
        for seed in range(10):
            filt = gen_filtration(cfg.replace(k=order), seed)
            adapted = gen_adapted(cfg.replace(k=order), filt, seed)
            seq = build_envelopes(filt, order, adapted.members, verify=False)
            rep = verify_envelopes(seq)  # raises on violation
            assert rep.monotone_gap >= -1e-10
            assert rep.domination_gap >= -1e-10
            worst_ratio = max(worst_ratio, float(np.max(rep.ratios)))
    assert np.isfinite(worst_ratio)


def test_envelope_pointwise_domination_dense():
    rng = np.random.default_rng(70)
    cfg = ExperimentConfig(levels=6, trials=1, k=2)
    filt = gen_filtration(cfg, 3)
    adapted = gen_adapted(cfg, filt, 3)
    seq = build_envelopes(filt, 2, adapted.members)
    xs = np.linspace(0, 1, 4001)
    for g, x_pp in zip(seq.members, seq.running_squares):
        assert np.all(g(xs) >= np.sqrt(np.maximum(x_pp(xs), 0.0)) - 1e-10)
    for g0, g1 in zip(seq.members[:-1], seq.members[1:]):
        assert np.all(g1(xs) >= g0(xs) - 1e-10)


# -- greedy allocation -----------------------------------------------------------


def test_greedy_single_request_leftmost():
    inst = AllocationInstance(((0.0, 0.5),), (1,), ((0.0, 1.0),),
                              (IntervalUnion.of((0.0, 0.5)),), 0.5)
    out = greedy_allocation(inst)
    assert out[0].intervals == ((0.0, 0.25),)


def test_greedy_tight_nested_instance():
    # two nested hosts with feasibility exactly tight for the deeper request
    inst = AllocationInstance(
        atoms=((0.0, 0.5), (0.5, 0.75)),
        levels=(1, 2),
        hosts=((0.0, 1.0), (0.0, 0.5)),
        subsets=(IntervalUnion.of((0.0, 0.3)), IntervalUnion.of((0.1, 0.2))),
        c1=0.4,
    )
    out = greedy_allocation(inst)
    assert out[1].intervals == ((0.1, 0.2),)  # exactly tight: whole subset
    assert abs(out[0].measure - 0.2) < 1e-12
    assert out[0].overlap(out[1]) == 0.0


def test_greedy_invalid_instance_rejected():
    bad = AllocationInstance(((0.0, 0.5),), (1,), ((0.0, 1.0),),
                             (IntervalUnion.of((0.0, 0.1)),), 0.5)
    with pytest.raises(InstanceInvalid):
        greedy_allocation(bad)


def test_greedy_subset_outside_host_rejected():
    bad = AllocationInstance(((0.0, 0.1),), (1,), ((0.0, 0.5),),
                             (IntervalUnion.of((0.6, 0.9)),), 0.5)
    with pytest.raises(InstanceInvalid):
        greedy_allocation(bad)


def test_greedy_random_instances_properties():
    cfg = ExperimentConfig(levels=6, trials=1)
    count = 0
    for seed in range(200):
        filt = gen_filtration(cfg, seed)
        inst = gen_allocation_instance(cfg, filt, seed)
        out = greedy_allocation(inst)
        for j, phi_j in enumerate(out):
            target = inst.c1 * (inst.atoms[j][1] - inst.atoms[j][0])
            assert abs(phi_j.measure - target) <= 1e-12
            assert phi_j.subtract(inst.subsets[j]).measure <= 1e-12
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                assert out[i].overlap(out[j]) <= 1e-15
        count += 1
    assert count == 200


def test_allocation_instance_json_round_trip():
    cfg = ExperimentConfig(levels=5, trials=1)
    filt = gen_filtration(cfg, 9)
    inst = gen_allocation_instance(cfg, filt, 9)
    back = AllocationInstance.from_json(inst.to_json())
    assert back.atoms == inst.atoms
    assert back.levels == inst.levels
    assert back.c1 == inst.c1
    assert greedy_allocation(back)[0].measure == pytest.approx(
        greedy_allocation(inst)[0].measure
    )


def test_allocation_result_json_round_trip():
    from splinegale.envelopes import allocation_from_json, allocation_to_json

    cfg = ExperimentConfig(levels=5, trials=1)
    filt = gen_filtration(cfg, 13)
    inst = gen_allocation_instance(cfg, filt, 13)
    out = greedy_allocation(inst)
    back = allocation_from_json(allocation_to_json(out))
    assert [phi.intervals for phi in back] == [phi.intervals for phi in out]


# -- level sets ------------------------------------------------------------------


def test_level_set_examples():
    const = PiecewisePolynomial.constant(2.0)
    assert level_set(const, 1.0).measure == pytest.approx(1.0)
    x = PiecewisePolynomial.from_power_basis([0.0, 1.0])
    got = level_set(x, 0.125)
    assert got.measure == pytest.approx(0.875, abs=1e-12)
    # complement partitions the domain up to measure ~0
    comp = (-x).super_level_set(-0.125)
    assert got.measure + comp.measure == pytest.approx(1.0 + 0.0, abs=1e-10)


def test_level_set_remez_threshold_property():
    # a squared polynomial of order k is a polynomial of order 2k-1, so the
    # set where it clears 8^(-2(k-1)) of its sup fills at least half the atom
    rng = np.random.default_rng(71)
    for _ in range(200):
        order = int(rng.integers(1, 4))
        p = PiecewisePolynomial.from_power_basis(rng.standard_normal(order))
        squared = p * p
        lo, hi = 0.2, 0.9
        sup = squared.sup_norm_on((lo, hi))
        thr = 8.0 ** (-2 * (order - 1)) * sup
        measure = level_set(squared, thr).intersect(lo, hi).measure
        assert measure >= 0.5 * (hi - lo) - 1e-12
