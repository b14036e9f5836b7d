import numpy as np

from splinegale.quadrature import adaptive_quadrature, gauss_on, nodes_for_degree
from splinegale.rootfind import (max_abs_on, min_max_on, real_roots,
                                 sign_segments)


def test_real_roots_linear_quadratic():
    np.testing.assert_allclose(real_roots([0.5, -1.0], -1, 1), [0.5])
    roots = real_roots([-0.25, 0.0, 1.0], -1, 1)  # u^2 = 1/4
    np.testing.assert_allclose(roots, [-0.5, 0.5], atol=1e-12)
    assert len(real_roots([1.0, 0.0, 1.0], -1, 1)) == 0


def test_real_roots_high_degree_against_numpy():
    rng = np.random.default_rng(5)
    for _ in range(200):
        deg = int(rng.integers(3, 8))
        c = rng.standard_normal(deg + 1)
        found = real_roots(c, -1.0, 1.0)
        np_roots = np.polynomial.polynomial.polyroots(c)
        real = sorted(
            float(r.real) for r in np_roots
            if abs(r.imag) < 1e-9 and -1 - 1e-9 <= r.real <= 1 + 1e-9
        )
        # every simple sign-changing numpy root must be matched
        vals = np.polynomial.polynomial.polyval(np.asarray(real), c)
        for r, v in zip(real, vals):
            before = np.polynomial.polynomial.polyval(max(r - 1e-6, -1.0), c)
            after = np.polynomial.polynomial.polyval(min(r + 1e-6, 1.0), c)
            if before * after < 0:
                assert np.min(np.abs(found - r)) < 1e-9


def test_extrema_against_dense_sampling():
    rng = np.random.default_rng(7)
    xs = np.linspace(-1, 1, 20001)
    for _ in range(100):
        c = rng.standard_normal(int(rng.integers(1, 8)))
        dense = np.polynomial.polynomial.polyval(xs, c)
        assert max_abs_on(c, -1, 1) >= np.max(np.abs(dense)) - 1e-9
        mn, mx, _, _ = min_max_on(c, -1, 1)
        assert mn <= dense.min() + 1e-9
        assert mx >= dense.max() - 1e-9


def test_sign_segments_partition_interval():
    segs = sign_segments([-0.25, 0.0, 1.0], -1.0, 1.0)
    assert [s for _, _, s in segs] == [1, -1, 1]
    total = sum(b - a for a, b, _ in segs)
    assert abs(total - 2.0) < 1e-12


def test_gauss_exactness():
    x, w = nodes_for_degree(7)
    assert len(x) == 4
    val = gauss_on(lambda t: t ** 7 - 3 * t ** 4, -1, 1, 4)
    assert abs(val - (-6.0 / 5.0)) < 1e-13


def test_adaptive_smooth_and_kinked():
    assert abs(adaptive_quadrature(np.sin, 0.0, np.pi) - 2.0) < 1e-9
    c = 0.37771
    exact = 2.0 / 3.0 * ((1 - c) ** 1.5 + c ** 1.5)
    got = adaptive_quadrature(lambda x: np.sqrt(np.abs(x - c)), 0.0, 1.0)
    assert abs(got - exact) < 1e-9
