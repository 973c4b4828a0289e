import numpy as np
import pytest

from levelset import (
    AmbiguityWarning,
    CoefficientVector,
    FourierSupport,
    GramQ,
    InputError,
    PointCloud,
    build_feature_matrix,
    build_gram_q,
    coefficient_correlation,
    evaluate_psi,
    feature_map,
    feature_rank,
    nullspace_basis,
    psi_grid,
    recover_coefficients,
    sum_of_squares_at,
    sum_of_squares_field,
)
from levelset.contours import lattice_axis


def brute_force_psi(coeffs, point):
    """Independent oracle: term-by-term sum of the trigonometric polynomial."""
    total = 0.0 + 0.0j
    for k, c in zip(coeffs.support.elements, coeffs.values):
        total += c * np.exp(2j * np.pi * float(k @ point))
    return total


class TestFeatureMap:
    def test_origin_maps_to_ones(self):
        gam = FourierSupport.rect(5, 5)
        assert np.allclose(feature_map(np.zeros(2), gam), 1.0)

    def test_quarter_turn_roots_of_unity(self):
        s = FourierSupport.rect(3)
        phi = feature_map(np.array([0.25]), s)
        assert np.allclose(phi, [-1j, 1.0, 1j], atol=1e-15)

    def test_norm_squared_is_support_size(self, rng):
        gam = FourierSupport.rect(4, 3)
        for _ in range(5):
            x = rng.uniform(-0.5, 0.5, 2)
            assert np.linalg.norm(feature_map(x, gam)) ** 2 == pytest.approx(gam.size)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            feature_map(np.zeros(3), FourierSupport.rect(3, 3))


class TestEvaluatePsi:
    def test_zero_coefficients(self, rng):
        c = CoefficientVector(FourierSupport.rect(3, 3), np.zeros(9))
        assert evaluate_psi(c, rng.uniform(-0.5, 0.5, 2)) == 0

    def test_constant(self):
        c = CoefficientVector(FourierSupport.rect(1, 1), np.array([1.0]), conj_symmetric=True)
        pts = np.array([[0.1, -0.3, 0.0], [0.2, 0.4, 0.0]])
        assert np.allclose(evaluate_psi(c, pts), 1.0)

    def test_analytic_vertical_lines(self):
        # cos(2 pi x) - cos(2 pi a) vanishes on the lines x = +/- a
        a = 0.2
        support = FourierSupport.rect(3, 1)
        values = np.array([0.5, -np.cos(2 * np.pi * a), 0.5])
        c = CoefficientVector(support, values, conj_symmetric=True)
        ys = np.linspace(-0.5, 0.5, 11)
        on_line = np.stack([np.full_like(ys, a), ys])
        vals = evaluate_psi(c, on_line)
        assert vals.dtype.kind == "f"
        assert np.max(np.abs(vals)) < 1e-12

    def test_matches_brute_force(self, rng):
        support = FourierSupport.rect(3, 4)
        c = CoefficientVector(support, rng.standard_normal(12) + 1j * rng.standard_normal(12))
        for _ in range(5):
            x = rng.uniform(-0.5, 0.5, 2)
            assert evaluate_psi(c, x) == pytest.approx(brute_force_psi(c, x), abs=1e-12)


class TestPsiGrid:
    def test_matches_pointwise_oracle(self, rng):
        support = FourierSupport.rect(3, 2)
        c = CoefficientVector(support, rng.standard_normal(6) + 1j * rng.standard_normal(6))
        ax0 = np.linspace(-0.5, 0.5, 7)
        ax1 = np.linspace(-0.5, 0.5, 5)
        grid = psi_grid(c, (ax0, ax1))
        for i in (0, 3, 6):
            for j in (0, 2, 4):
                expected = brute_force_psi(c, np.array([ax0[i], ax1[j]]))
                assert grid[i, j] == pytest.approx(expected, abs=1e-12)


class TestFeatureMatrix:
    def test_single_origin_point(self):
        fm = build_feature_matrix(PointCloud(np.zeros((2, 1))), FourierSupport.rect(3, 3))
        assert np.allclose(fm.entries, 1.0)

    def test_gram_identity_with_dirichlet_kernel(self, rng):
        from levelset import DirichletKernel, gram_matrix

        gam = FourierSupport.rect(5, 5)
        cloud = PointCloud(rng.uniform(-0.5, 0.5, (2, 30)))
        fm = build_feature_matrix(cloud, gam)
        gram = gram_matrix(cloud, DirichletKernel(gam))
        diff = np.max(np.abs(fm.entries.conj().T @ fm.entries - gram.matrix))
        assert diff / gam.size < 1e-10

    def test_rank_equals_bound_on_curve(self, curve_3x3):
        from levelset import rank_bound, sample_curve

        gam = FourierSupport.rect(5, 5)
        cloud = sample_curve(curve_3x3, 61)
        fm = build_feature_matrix(cloud, gam)
        assert feature_rank(fm) == rank_bound(FourierSupport.rect(3, 3), gam) == 16


class TestGramQ:
    def test_single_origin_point_gives_ones(self):
        q = build_gram_q(PointCloud(np.zeros((2, 1))), FourierSupport.rect(3, 3))
        assert np.allclose(q.matrix, 1.0)

    def test_trace_counts_points_times_size(self, rng):
        gam = FourierSupport.rect(5, 3)
        cloud = PointCloud(rng.uniform(-0.5, 0.5, (2, 23)))
        q = build_gram_q(cloud, gam)
        assert np.trace(q.matrix).real == pytest.approx(23 * gam.size)

    def test_quadratic_form_is_annihilation_energy(self, rng):
        # c^H Q c must equal the summed |psi(x_i)|^2 for arbitrary complex c
        gam = FourierSupport.rect(3, 3)
        cloud = PointCloud(rng.uniform(-0.5, 0.5, (2, 15)))
        q = build_gram_q(cloud, gam)
        c = CoefficientVector(gam, rng.standard_normal(9) + 1j * rng.standard_normal(9))
        direct = np.sum(np.abs(evaluate_psi(c, cloud.coordinates)) ** 2)
        quad = np.vdot(c.values, q.matrix @ c.values).real
        assert quad == pytest.approx(direct, rel=1e-12)

    def test_hermitian_psd_on_any_cloud(self, rng):
        gam = FourierSupport.rect(4, 4)
        cloud = PointCloud(rng.uniform(-0.5, 0.5, (2, 40)))
        q = build_gram_q(cloud, gam)
        assert np.max(np.abs(q.matrix - q.matrix.conj().T)) == 0.0
        w = np.linalg.eigvalsh(q.matrix)
        assert w[0] >= -1e-10 * w[-1]

    def test_on_curve_gram_is_singular(self, curve_3x3, cloud_40):
        lam = FourierSupport.rect(3, 3)
        q = build_gram_q(cloud_40, lam)
        w = np.linalg.eigvalsh(q.matrix)
        assert w[0] < 1e-10 * w[-1]

    def test_non_hermitian_rejected(self):
        m = np.eye(3, dtype=complex)
        m[0, 1] = 1j
        m[1, 0] = 1j
        with pytest.raises(InputError):
            GramQ(FourierSupport.rect(3), m)


class TestRecoverCoefficients:
    def test_diagonal_picks_smallest(self):
        support = FourierSupport.rect(3)
        q = GramQ(support, np.diag([2.0, 1.0, 3.0]).astype(complex))
        c = recover_coefficients(q)
        assert np.allclose(c.values, [0.0, 1.0, 0.0])

    def test_identity_warns_with_full_nullity(self):
        support = FourierSupport.rect(3)
        q = GramQ(support, np.eye(3, dtype=complex))
        with pytest.warns(AmbiguityWarning) as record:
            recover_coefficients(q)
        assert record[0].message.nullity == 3

    def test_synthetic_recovery(self, curve_3x3, cloud_40):
        lam = FourierSupport.rect(3, 3)
        q = build_gram_q(cloud_40, lam)
        c = recover_coefficients(q)
        assert c.norm == pytest.approx(1.0)
        assert coefficient_correlation(c, curve_3x3.coefficients) > 0.999

    def test_scaling_invariance(self, cloud_40):
        lam = FourierSupport.rect(3, 3)
        q = build_gram_q(cloud_40, lam)
        c1 = recover_coefficients(q)
        c2 = recover_coefficients(GramQ(lam, 3.0 * q.matrix))
        assert np.allclose(c1.values, c2.values, atol=1e-12)

    def test_recovered_vector_is_conjugate_symmetric(self, cloud_40):
        lam = FourierSupport.rect(3, 3)
        c = recover_coefficients(build_gram_q(cloud_40, lam))
        assert c.conj_symmetric
        refl = lam.reflection_indices
        assert np.allclose(c.values[refl], np.conj(c.values))


class TestNullspaceBasis:
    def test_positive_definite_gives_empty(self):
        support = FourierSupport.rect(3)
        q = GramQ(support, np.diag([1.0, 2.0, 3.0]).astype(complex))
        assert nullspace_basis(q) == []

    def test_nullity_matches_shift_count(self, cloud_61):
        gam = FourierSupport.rect(5, 5)
        basis = nullspace_basis(build_gram_q(cloud_61, gam))
        assert len(basis) == 9

    def test_every_vector_annihilates_samples(self, cloud_61):
        gam = FourierSupport.rect(5, 5)
        basis = nullspace_basis(build_gram_q(cloud_61, gam))
        for c in basis:
            residuals = np.abs(evaluate_psi(c, cloud_61.coordinates))
            assert residuals.max() <= 1e-8 * c.norm * np.sqrt(gam.size)

    def test_orthonormal(self, cloud_61):
        gam = FourierSupport.rect(5, 5)
        basis = nullspace_basis(build_gram_q(cloud_61, gam))
        mat = np.stack([c.values for c in basis])
        assert np.allclose(mat @ mat.conj().T, np.eye(len(basis)), atol=1e-12)


class TestSumOfSquares:
    def test_constant_basis_gives_one(self):
        c = CoefficientVector(FourierSupport.rect(1, 1), np.array([1.0]), conj_symmetric=True)
        axes = (lattice_axis(16), lattice_axis(16))
        field = sum_of_squares_field([c], axes)
        assert np.allclose(field, 1.0)

    def test_nonnegative_and_zero_at_samples(self, cloud_61):
        gam = FourierSupport.rect(5, 5)
        basis = nullspace_basis(build_gram_q(cloud_61, gam))
        axes = (lattice_axis(64), lattice_axis(64))
        field = sum_of_squares_field(basis, axes)
        assert field.min() >= 0.0
        assert sum_of_squares_at(basis, cloud_61.coordinates).max() < 1e-12

    def test_empty_basis_rejected(self):
        with pytest.raises(InputError):
            sum_of_squares_field([], (lattice_axis(8), lattice_axis(8)))

    def test_unitary_mixing_invariance(self, cloud_61, rng):
        gam = FourierSupport.rect(5, 5)
        basis = nullspace_basis(build_gram_q(cloud_61, gam))
        mat = np.stack([c.values for c in basis])
        z = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        u, _ = np.linalg.qr(z)
        mixed = [CoefficientVector(gam, row) for row in (u @ mat)]
        axes = (lattice_axis(32), lattice_axis(32))
        f1 = sum_of_squares_field(basis, axes)
        f2 = sum_of_squares_field(mixed, axes)
        assert np.allclose(f1, f2, atol=1e-10)


class TestCoefficientVector:
    def test_length_checked(self):
        with pytest.raises(InputError):
            CoefficientVector(FourierSupport.rect(3, 3), np.zeros(5))

    def test_conjugate_symmetry_checked(self):
        support = FourierSupport.rect(3)
        with pytest.raises(InputError):
            CoefficientVector(support, np.array([1j, 0, 1j]), conj_symmetric=True)
        CoefficientVector(support, np.array([1j, 0.5, -1j]), conj_symmetric=True)
