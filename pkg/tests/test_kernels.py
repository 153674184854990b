import math

import numpy as np
import pytest

from ibrownian import kernels as K

import oracles

# Frozen reference values.  The kernel points were produced by
# oracles.airy_ode_oracle (high-order RK on y'' = x*y) and
# oracles.bessel_series_oracle (direct per-term summation); regenerate with
# those functions if the grid ever changes.
AI_ZERO = 0.35502805388781727
AIP_ZERO = -0.25881940379280682
AIRY_DIAG = {0.0: 0.066987483779663987, -4.0: 0.64484252467191761}
AIRY_OFFDIAG = {
    (-2.0, 1.0): 0.039945689051187942,
    (0.5, 0.25): 0.031118964388556242,
    (-4.0, -3.0): 0.32160580154081575,
}
BESSEL_J = {
    (1.0, 0.5): 0.2422684576748739,
    (1.0, 1.0): 0.44005058574493355,
    (1.0, 5.0): -0.32757913759146956,
    (2.0, 0.5): 0.030604023458682652,
    (2.0, 1.0): 0.11490348493190056,
    (2.0, 5.0): 0.046565116277761415,
}


class TestAiryFunction:
    def test_values_at_zero(self):
        ai, aip = K.airy_fn(0.0)
        assert ai == pytest.approx(AI_ZERO, abs=1e-14)
        assert aip == pytest.approx(AIP_ZERO, abs=1e-14)

    def test_against_ode_oracle(self):
        xs = np.linspace(-10.0, 5.0, 301)
        ai, aip = K.airy_fn(xs)
        ai_o, aip_o = oracles.airy_ode_oracle(xs)
        assert np.max(np.abs(ai - ai_o)) <= 1e-8
        assert np.max(np.abs(aip - aip_o)) <= 1e-8

    def test_deep_left_tail_against_oracle(self):
        xs = np.linspace(-30.0, -10.0, 81)
        ai, aip = K.airy_fn(xs)
        ai_o, aip_o = oracles.airy_ode_oracle(xs)
        assert np.max(np.abs(ai - ai_o)) <= 1e-7
        assert np.max(np.abs(aip - aip_o)) <= 1e-7

    def test_series_asymptotic_crossover_is_continuous(self):
        for x0 in (-6.0, 6.0):
            lo, _ = K.airy_fn(x0 - 1e-9)
            hi, _ = K.airy_fn(x0 + 1e-9)
            assert abs(lo - hi) <= 1e-9

    def test_ode_residual_by_stencil(self):
        # five-point second derivative of the implementation itself; points
        # whose stencil straddles the series/asymptotic switch at |x| = 6
        # are excluded (the 1e-10 branch mismatch there, bounded by the
        # crossover test above, is amplified by 1/h^2 in a stencil)
        h = 5e-3
        xs = np.linspace(-9.5, 4.5, 141)
        xs = xs[np.abs(np.abs(xs) - 6.0) > 0.05]
        vals = {k: K.airy_fn(xs + k * h)[0] for k in (-2, -1, 0, 1, 2)}
        second = (-vals[2] + 16 * vals[1] - 30 * vals[0] + 16 * vals[-1] - vals[-2]) / (12 * h * h)
        resid = second - xs * vals[0]
        assert np.max(np.abs(resid)) <= 1e-8

    def test_domain_error(self):
        with pytest.raises(ValueError):
            K.airy_fn(-121.0)
        with pytest.raises(ValueError):
            K.airy_fn(11.0)

    def test_scalar_and_array_agree(self):
        xs = np.array([-3.0, 0.0, 2.0])
        ai_arr, _ = K.airy_fn(xs)
        for x, v in zip(xs, ai_arr):
            assert K.airy_fn(float(x))[0] == v


class TestAiryKernel:
    def test_frozen_diagonal(self):
        for x, want in AIRY_DIAG.items():
            assert K.airy_kernel(x, x) == pytest.approx(want, abs=1e-10)

    def test_frozen_offdiagonal(self):
        for (x, y), want in AIRY_OFFDIAG.items():
            assert K.airy_kernel(x, y) == pytest.approx(want, abs=1e-10)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x, y = rng.uniform(-8, 4, size=2)
            assert K.airy_kernel(x, y) == pytest.approx(K.airy_kernel(y, x), rel=1e-14, abs=1e-300)

    def test_near_diagonal_matches_direct_across_window(self):
        for m in (-5.0, -1.0, 0.0, 2.0):
            inside = K.airy_kernel(m - 0.495e-4, m + 0.495e-4)
            outside = K.airy_kernel(m - 0.505e-4, m + 0.505e-4)
            assert abs(inside - outside) <= 1e-9

    def test_diagonal_closed_form(self):
        for x in (-6.0, -2.5, 0.0, 1.5):
            ai, aip = K.airy_fn(x)
            assert K.airy_kernel(x, x) == pytest.approx(aip**2 - x * ai**2, abs=1e-13)


class TestBesselJ:
    def test_frozen_values(self):
        for (a, x), want in BESSEL_J.items():
            assert K.bessel_j(a, x) == pytest.approx(want, abs=1e-10)

    def test_against_series_oracle_nonint_order(self):
        for a in (1.0, 1.5, 2.5):
            for x in (0.05, 0.7, 3.0, 9.0):
                assert K.bessel_j(a, x) == pytest.approx(oracles.bessel_series_oracle(a, x), abs=2e-10)

    def test_against_integral_oracle_large_argument(self):
        # exercises the large-argument expansion past the series cut
        for a in (1, 2):
            for x in (20.0, 40.0, 80.0):
                assert K.bessel_j(a, x) == pytest.approx(oracles.bessel_integral_oracle(a, x), abs=1e-12)

    def test_derivative_against_series_oracle(self):
        for a in (1.0, 2.0, 1.5):
            for x in (0.5, 3.0, 12.0):
                want = oracles.bessel_series_prime_oracle(a, x)
                assert K.bessel_j_prime(a, x) == pytest.approx(want, abs=1e-9)

    def test_derivative_by_central_difference_large_argument(self):
        # past the series cut; h chosen so stencil noise stays below tolerance
        h = 1e-4
        for a in (1.0, 2.0, 1.5):
            for x in (25.0, 60.0):
                num = (K.bessel_j(a, x + h) - K.bessel_j(a, x - h)) / (2 * h)
                assert K.bessel_j_prime(a, x) == pytest.approx(num, abs=1e-8)

    def test_argument_cap(self):
        with pytest.raises(ValueError):
            K.bessel_j(1.0, 150.0)


class TestBesselKernel:
    def test_two_forms_agree(self):
        xs = np.linspace(0.5, 80.0, 20)
        for a in (1.0, 2.0):
            for x in xs:
                for y in xs:
                    v1 = K.bessel_kernel(a, x, y, form="derivative")
                    v2 = K.bessel_kernel(a, x, y, form="recurrence")
                    assert abs(v1 - v2) <= 1e-9

    def test_diagonal_closed_form(self):
        for a in (1.0, 2.0):
            for x in (0.3, 2.0, 17.5, 60.0):
                z = math.sqrt(x)
                ja = K.bessel_j(a, z)
                jb = K.bessel_j(a + 1.0, z)
                want = 0.25 * (ja * ja + jb * jb - (2.0 * a / z) * ja * jb)
                assert K.bessel_kernel(a, x, x) == pytest.approx(want, rel=1e-10, abs=1e-13)

    def test_near_diagonal_matches_direct_across_window(self):
        for a in (1.0, 2.0):
            for m in (0.5, 4.0, 25.0):
                inside = K.bessel_kernel(a, m - 0.495e-4, m + 0.495e-4)
                outside = K.bessel_kernel(a, m - 0.505e-4, m + 0.505e-4)
                assert abs(inside - outside) <= 1e-9

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            x, y = rng.uniform(0.2, 50.0, size=2)
            assert K.bessel_kernel(1.0, x, y) == pytest.approx(K.bessel_kernel(1.0, y, x), rel=1e-12)

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            K.bessel_kernel(0.5, 1.0, 1.0)  # order below 1
        with pytest.raises(ValueError):
            K.bessel_kernel(1.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            K.bessel_kernel(1.0, 1.0, 200.0)
        with pytest.raises(ValueError):
            K.bessel_kernel(1.0, 1.0, 1.0, form="magic")


class TestGinibreCorrelation:
    def test_one_point_intensity_is_inverse_pi(self):
        for z in ([0.0, 0.0], [1.3, -0.4], [-2.0, 2.0]):
            assert K.ginibre_correlation([z]) == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_two_point_closed_form(self):
        for u in (0.2, 0.7, 1.5, 3.0):
            got = K.ginibre_correlation([[0.0, 0.0], [u, 0.0]])
            want = (1.0 - math.exp(-u * u)) / math.pi**2
            assert got == pytest.approx(want, rel=1e-12)

    def test_translation_invariance(self):
        a = K.ginibre_correlation([[0.0, 0.0], [0.8, 0.3]])
        b = K.ginibre_correlation([[5.0, -2.0], [5.8, -1.7]])
        assert a == pytest.approx(b, rel=1e-10)

    def test_nonnegative_on_random_triples(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            pts = rng.normal(0, 1.5, size=(3, 2))
            assert K.ginibre_correlation(pts) >= -1e-12

    def test_permutation_invariance(self):
        pts = [[0.0, 0.0], [1.0, 0.2], [-0.5, 0.7]]
        assert K.ginibre_correlation(pts) == pytest.approx(K.ginibre_correlation(pts[::-1]), rel=1e-12)


class TestCorrelationDet:
    def test_airy_two_point(self):
        x, y = -2.0, 1.0
        kxx = K.airy_kernel(x, x)
        kyy = K.airy_kernel(y, y)
        kxy = K.airy_kernel(x, y)
        want = kxx * kyy - kxy * kxy
        got = K.correlation_det(K.KernelId.AIRY2, [[x], [y]])
        assert got == pytest.approx(want, rel=1e-12)

    def test_bessel_needs_alpha(self):
        with pytest.raises(ValueError):
            K.correlation_det(K.KernelId.BESSEL, [[1.0]])

    def test_beta_restriction(self):
        with pytest.raises(ValueError):
            K.correlation_det(K.KernelId.AIRY2, [[0.0]], beta=1.0)

    def test_point_cap(self):
        pts = [[float(i)] for i in range(13)]
        with pytest.raises(ValueError):
            K.correlation_det(K.KernelId.AIRY2, pts)

    def test_ginibre_dispatch(self):
        got = K.correlation_det(K.KernelId.GINIBRE, [[0.0, 0.0], [1.0, 0.0]])
        want = (1.0 - math.exp(-1.0)) / math.pi**2
        assert got == pytest.approx(want, rel=1e-12)


class TestKernelGrid:
    def test_airy_grid_square(self):
        xs = np.linspace(-2, 1, 7)
        g = K.kernel_grid(K.KernelId.AIRY2, xs)
        assert g.shape == (7, 7)
        assert np.allclose(g, g.T, rtol=1e-12)
        assert g[0, 0] == pytest.approx(K.airy_kernel(xs[0], xs[0]))

    def test_bessel_grid_rect(self):
        xs = np.linspace(0.5, 3.0, 4)
        ys = np.linspace(0.5, 3.0, 5)
        g = K.kernel_grid(K.KernelId.BESSEL, xs, ys, alpha=1.0)
        assert g.shape == (4, 5)
        assert g[1, 2] == pytest.approx(K.bessel_kernel(1.0, xs[1], ys[2]))
