import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import constant, ensemble, operators
from periodic_jacobi import (
    EdgeSingularityError,
    ValidationError,
    boundary_samples,
    build_model,
    dirichlet_integral_1,
    dirichlet_integral_2,
    discriminant_value,
    gap_shape_checks,
    harper,
    herglotz_k,
    k_complex,
    k_prime,
    make_jacobi,
    random_jacobi,
    trace_moment_check,
    trace_moment_rhs,
    u_of_x,
    v_of_x,
    vertical_identity_check,
)


@pytest.fixture(scope="module")
def q3_model():
    return build_model(random_jacobi(np.random.default_rng(33), 3))


@pytest.fixture(scope="module")
def constant_model():
    return build_model(constant(3))


def interior_points(M, rng, n, y_range=(0.05, 3.0)):
    return rng.uniform(0.05, np.pi - 0.05, n) + 1j * rng.uniform(*y_range, n)


class TestBoundaryValues:
    def test_v_zero_on_bands(self, q3_model):
        M = q3_model
        band_mid = M.bands.bands.mean(axis=1)
        x = np.arccos(-band_mid / M.c)
        np.testing.assert_array_equal(v_of_x(M, x), 0.0)

    def test_q2_gap_centre(self):
        M = build_model(make_jacobi(2, [1, 1], [1, -1]))
        # already normalised: the spectrum is symmetric
        assert abs(M.bands.shift) < 1e-12
        d0 = (0 - 0 + (1 * -1) - 1 - 1) / 1.0
        expected = 0.5 * np.arccosh(abs(d0) / 2)
        assert v_of_x(M, np.pi / 2) == pytest.approx(expected, rel=1e-12)

    def test_u_endpoints(self, q3_model):
        assert u_of_x(q3_model, 0.0) == 0.0
        assert u_of_x(q3_model, np.pi) == np.pi

    def test_constant_u_is_identity(self, constant_model):
        x = np.linspace(0, np.pi, 1001)
        np.testing.assert_allclose(u_of_x(constant_model, x), x, atol=1e-7)
        np.testing.assert_array_equal(v_of_x(constant_model, x), 0.0)

    def test_u_monotone_and_continuous(self, q3_model):
        M = q3_model
        x = np.linspace(0, np.pi, 10_001)
        u = u_of_x(M, x)
        assert np.diff(u).min() >= -1e-12
        # u has square-root behaviour at edges, so test continuity across them directly
        xe = M.edge_x[1:-1]
        jumps = np.abs(u_of_x(M, xe + 1e-13) - u_of_x(M, xe - 1e-13))
        assert jumps.max() < 1e-6
        for n in M.open_gaps:
            left, right = M.zgaps.gaps[n]
            inside = (x > left) & (x < right)
            np.testing.assert_allclose(u[inside], (n + 1) * np.pi / M.q, atol=1e-14)

    def test_boundary_samples(self):
        M = build_model(harper(1, 3))
        s = boundary_samples(M, 1001)
        positive = s.v > 0
        in_gap = np.zeros_like(positive)
        for left, right in M.zgaps.gaps:
            in_gap |= (s.x > left) & (s.x < right)
        np.testing.assert_array_equal(positive, in_gap)
        mid = np.argmin(np.abs(s.x - np.pi / 2))
        assert s.D[mid] == pytest.approx(discriminant_value(M.J, 0.0), abs=1e-12)
        with pytest.raises(ValidationError):
            boundary_samples(M, 1)


class TestK:
    def test_constant_is_identity(self, constant_model, rng):
        z = interior_points(constant_model, rng, 20)
        np.testing.assert_allclose(k_complex(constant_model, z), z, atol=1e-12)

    def test_asymptotic_tail(self, q3_model):
        M = q3_model
        z = np.pi / 3 + 10j
        gap = abs(k_complex(M, z) - z - 1j * M.Q[0])
        assert gap < abs(M.Q[1]) / np.cosh(10) + 1e-6

    def test_boundary_limit(self, q3_model):
        M = q3_model
        x = np.linspace(0.1, np.pi - 0.1, 37)
        x = x[np.min(np.abs(x[:, None] - M.edge_x[None, :]), axis=1) > 1e-3]
        k = k_complex(M, x + 1e-8j)
        np.testing.assert_allclose(k.real, u_of_x(M, x), atol=1e-4)
        np.testing.assert_allclose(k.imag, v_of_x(M, x), atol=1e-4)

    def test_edge_singularity(self, q3_model):
        with pytest.raises(EdgeSingularityError):
            k_complex(q3_model, complex(q3_model.zgaps.gaps[0, 0], 0.0))

    def test_outside_strip(self, q3_model):
        with pytest.raises(ValidationError):
            k_complex(q3_model, 1.0 - 0.5j)
        with pytest.raises(ValidationError):
            k_complex(q3_model, 4.0 + 1j)

    def test_imaginary_part_positive(self, q3_model, rng):
        z = interior_points(q3_model, rng, 50)
        assert np.all(k_complex(q3_model, z).imag > 0)

    def test_cauchy_riemann(self, q3_model, rng):
        M = q3_model
        h = 1e-6
        for z in interior_points(M, rng, 10, (0.2, 2.0)):
            dx = (k_complex(M, z + h) - k_complex(M, z - h)) / (2 * h)
            dy = (k_complex(M, z + 1j * h) - k_complex(M, z - 1j * h)) / (2 * h)
            # analytic: dk/dy = i dk/dx
            assert abs(dy - 1j * dx) < 1e-6
            assert abs(dx - k_prime(M, z)) < 1e-6

    @given(operators(q_max=4), st.floats(0.1, 3.0), st.floats(0.1, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_k_maps_to_comb_domain(self, J, x, y):
        M = build_model(J)
        k = k_complex(M, complex(x, y))
        assert k.imag > 0
        assert -1e-9 <= k.real <= np.pi + 1e-9


class TestTraceFormulas:
    def test_q2_coefficient(self):
        # Q_2 = 1/4 - Tr L^2 / (2 q c^2)
        M = build_model(harper(1, 3))
        assert M.Q[2] == pytest.approx(0.25 - M.traces[1] / (2 * 3 * M.c ** 2), rel=1e-14)

    def test_constant_all_zero(self, constant_model):
        np.testing.assert_allclose(constant_model.Q, 0.0, atol=1e-12)

    def test_harper_q1(self):
        M = build_model(harper(1, 3))
        assert M.Q[1] == pytest.approx(np.sum(M.J.b) / (3 * M.c), rel=1e-13)

    def test_n0(self, q3_model):
        assert trace_moment_check(q3_model, 0).residual < 1e-8

    def test_n2_value(self, q3_model):
        t = trace_moment_check(q3_model, 2)
        assert t.lhs == pytest.approx(q3_model.Q[0] / 2 + q3_model.Q[2], abs=1e-8)

    def test_constant_moments(self, constant_model):
        for n in range(6):
            t = trace_moment_check(constant_model, n)
            assert t.lhs == 0.0
            assert abs(t.rhs) < 1e-12

    def test_order_out_of_range(self, q3_model):
        with pytest.raises(ValidationError):
            trace_moment_check(q3_model, 6)

    def test_rhs_low_orders(self):
        Q = np.arange(1.0, 7.0)
        assert trace_moment_rhs(Q, 0) == 1.0
        assert trace_moment_rhs(Q, 1) == 2.0
        assert trace_moment_rhs(Q, 2) == pytest.approx(Q[0] / 2 + Q[2])
        assert trace_moment_rhs(Q, 3) == pytest.approx(Q[1] / 2 + Q[3])

    @given(operators(q_max=5))
    @settings(max_examples=20, deadline=None)
    def test_all_orders(self, J):
        M = build_model(J)
        for n in range(2 * J.q):
            assert trace_moment_check(M, n).residual < 1e-8


class TestDirichlet:
    def test_constant_exact_zero(self, constant_model):
        for fn in (dirichlet_integral_1, dirichlet_integral_2):
            r = fn(constant_model)
            assert r.integral == 0.0 and r.expected == 0.0

    def test_q2_worked_example(self):
        M = build_model(make_jacobi(2, [1, 1], [1, -1]))
        r1 = dirichlet_integral_1(M)
        assert r1.expected == pytest.approx(np.log(M.c / (2 * M.A)))
        assert r1.relative_residual < 1e-2
        assert dirichlet_integral_2(M).relative_residual < 2e-2

    def test_q3_ensemble(self):
        for J in ensemble(303, 20, (3,)):
            assert dirichlet_integral_1(build_model(J)).relative_residual < 1e-2

    def test_symmetric_operator(self):
        # palindromic diagonal with b -> -b symmetry: Q_1 vanishes
        M = build_model(make_jacobi(4, [1, 0.7, 1, 0.7], [0.5, -0.5, 0.5, -0.5]))
        assert abs(M.Q[1]) < 1e-12
        assert dirichlet_integral_2(M).relative_residual < 1e-2


class TestVerticalIdentity:
    def test_constant(self, constant_model):
        r = vertical_identity_check(constant_model)
        assert r.lhs == pytest.approx(np.pi ** 2 / 2, abs=1e-10)
        assert r.residual < 1e-10

    def test_even_symmetric(self):
        M = build_model(make_jacobi(2, [1, 2], [0, 0]))
        r = vertical_identity_check(M)
        assert r.lhs == pytest.approx(np.pi ** 2 / 2, abs=1e-8)
        assert r.rhs == pytest.approx(np.pi ** 2 / 2, abs=1e-8)

    def test_random_q3(self, q3_model):
        assert vertical_identity_check(q3_model).residual < 1e-6


class TestHerglotz:
    def test_constant(self, constant_model):
        z = np.array([0.5 + 1j, 2.0 + 0.3j])
        np.testing.assert_allclose(herglotz_k(constant_model, z), z, atol=1e-15)

    def test_random_q3(self, q3_model):
        z = np.pi / 3 + 1j
        assert abs(herglotz_k(q3_model, z, 4096) - k_complex(q3_model, z)) < 1e-5

    def test_origin_normalisation(self, q3_model):
        assert abs(herglotz_k(q3_model, 1e-7 + 1e-7j)) < 1e-5

    def test_needs_upper_half_plane(self, q3_model):
        with pytest.raises(ValidationError):
            herglotz_k(q3_model, 1.0 + 0j)


class TestGapShape:
    def test_midpoint_semicircle(self, q3_model):
        M = q3_model
        for n in M.open_gaps:
            left, right = M.zgaps.gaps[n]
            assert v_of_x(M, 0.5 * (left + right)) >= 0.5 * (right - left) - 1e-9

    def test_closed_gap_trivial(self):
        M = build_model(harper(1, 4))
        rep = gap_shape_checks(M, 1)
        assert rep.ok and rep.h_formula == 0.0

    def test_q4_ensemble(self):
        for J in ensemble(404, 5, (4,)):
            M = build_model(J)
            for n in M.open_gaps:
                rep = gap_shape_checks(M, int(n), 1000)
                assert rep.ok
                assert rep.h_discrepancy < 1e-8

    def test_gap_index_range(self, q3_model):
        with pytest.raises(ValidationError):
            gap_shape_checks(q3_model, 2)
