import numpy as np
import pytest

from lllsim.fock import (FockVector, ResolutionError, WeightSpec, basis_vector,
                         build_weight_table, coherent_vector, inner, l2_norm,
                         random_resolved_vector, random_unit_vector,
                         weighted_l2_norm, zero_vector)
from lllsim.operators import (conserved_quantities,
                              harmonic_propagate, load_kernel_table,
                              magnetic_translate, projected_triple,
                              projector_quadrature_oracle, rotate, save_kernel_table)
from lllsim.quadrature import grid_values, polar_grid

from oracles import displacement_matrix

TWO_PI = 2.0 * np.pi


# -- projected trilinear product ----------------------------------------------

def test_triple_exact_single_terms(kernel_table):
    table = kernel_table(12)
    e0, e1 = basis_vector(0, 12), basis_vector(1, 12)
    out0 = projected_triple(e0, e0, e0, table)
    np.testing.assert_allclose(out0.coeffs[0], 1.0 / TWO_PI, rtol=1e-14)
    assert np.all(out0.coeffs[1:] == 0.0)
    out1 = projected_triple(e1, e1, e1, table)
    np.testing.assert_allclose(out1.coeffs[1], 1.0 / (2.0 * TWO_PI), rtol=1e-14)


def test_triple_zero_input_gives_zero(kernel_table, rng):
    table = kernel_table(10)
    u = random_unit_vector(rng, 10)
    out = projected_triple(u, u, zero_vector(10), table)
    assert np.all(out.coeffs == 0.0)


def test_triple_symmetric_in_unconjugated_slots(kernel_table, rng):
    table = kernel_table(14)
    p, q, r = (random_unit_vector(rng, 14) for _ in range(3))
    a = projected_triple(p, q, r, table)
    b = projected_triple(r, q, p, table)
    np.testing.assert_allclose(a.coeffs, b.coeffs, atol=1e-15)


def test_triple_dimension_mismatch(kernel_table, rng):
    table = kernel_table(8)
    with pytest.raises(ValueError):
        projected_triple(random_unit_vector(rng, 8), random_unit_vector(rng, 8),
                         random_unit_vector(rng, 9), table)


def test_selection_rule_single_index_inputs(kernel_table):
    # input indices (m, l, n) contribute only to k = m + n - l, exactly
    table = kernel_table(16)
    for m, ell, n in [(2, 1, 3), (0, 4, 5), (7, 0, 0), (3, 3, 3)]:
        out = projected_triple(basis_vector(m, 16), basis_vector(ell, 16),
                               basis_vector(n, 16), table).coeffs
        k = m + n - ell
        nz = np.nonzero(out)[0]
        if 0 <= k < 16:
            assert list(nz) == [k]
        else:
            assert len(nz) == 0


def test_triple_against_quadrature_oracle(kernel_table):
    N = 24
    table = kernel_table(N)
    grid = polar_grid(N)
    family = [basis_vector(0, N), basis_vector(1, N), basis_vector(2, N),
              coherent_vector(0.7, N)]
    gvals = [grid_values(f.coeffs, grid) for f in family]
    worst = 0.0
    for i, p in enumerate(family):
        for j, q in enumerate(family):
            for k, r in enumerate(family):
                direct = projected_triple(p, q, r, table)
                oracle = projector_quadrature_oracle(
                    gvals[i] * np.conj(gvals[j]) * gvals[k], grid, N)
                worst = max(worst, float(np.max(np.abs(direct.coeffs - oracle.coeffs))))
    assert worst <= 1e-8


def test_projector_oracle_orthonormal_and_cubic(kernel_table):
    N = 16
    grid = polar_grid(N)
    e0 = basis_vector(0, N)
    v0 = grid_values(e0.coeffs, grid)
    proj = projector_quadrature_oracle(v0, grid, N)
    np.testing.assert_allclose(proj.coeffs, e0.coeffs, atol=1e-10)
    cubic = projector_quadrature_oracle(np.abs(v0) ** 2 * v0, grid, N)
    expect = np.zeros(N, dtype=complex)
    expect[0] = 1.0 / TWO_PI
    np.testing.assert_allclose(cubic.coeffs, expect, atol=1e-8)


def test_kernel_table_cache_round_trip(tmp_path, kernel_table):
    table = kernel_table(10)
    path = tmp_path / "kernel10.npz"
    save_kernel_table(table, path)
    loaded = load_kernel_table(path)
    np.testing.assert_array_equal(loaded.values, table.values)
    # corrupt an entry the seeded spot-check will sample
    k, m, n = np.random.default_rng(10).integers(0, 10, size=3)
    bad = table.log_coeffs.copy()
    bad[k, m, n] = 0.5
    np.savez_compressed(tmp_path / "bad.npz", truncation=10, log_coeffs=bad)
    with pytest.raises(ValueError):
        load_kernel_table(tmp_path / "bad.npz")


# -- magnetic translation -------------------------------------------------------

def test_translate_identity_and_coherent():
    u = basis_vector(0, 24)
    assert magnetic_translate(u, 0.0) is u
    gamma = 1.0
    out = magnetic_translate(u, -np.conj(gamma))
    np.testing.assert_allclose(out.coeffs, coherent_vector(gamma, 24).coeffs, atol=1e-14)


def test_translate_unitary_random(rng):
    for _ in range(5):
        u = random_resolved_vector(rng, 64)
        alpha = complex(*rng.uniform(-1.4, 1.4, size=2))
        ru = magnetic_translate(u, alpha)
        assert abs(l2_norm(ru) - 1.0) <= 1e-8


def test_translate_preserves_inner_products(rng):
    u = random_resolved_vector(rng, 48, mode_scale=6.0)
    w = random_resolved_vector(rng, 48, mode_scale=6.0)
    alpha = 0.8 - 0.5j
    before = inner(u, w)
    after = inner(magnetic_translate(u, alpha), magnetic_translate(w, alpha))
    assert abs(abs(after) - abs(before)) <= 1e-9


def test_translate_matches_dense_matrix_oracle(rng):
    N = 40
    D = displacement_matrix(0.7 + 0.4j, N)
    for _ in range(3):
        u = random_resolved_vector(rng, N, mode_scale=5.0)
        series = magnetic_translate(u, 0.7 + 0.4j)
        np.testing.assert_allclose(series.coeffs, D @ u.coeffs, atol=1e-10)


def test_translate_composition_up_to_phase(rng):
    u = random_resolved_vector(rng, 48, mode_scale=6.0)
    a, b = 0.6 + 0.2j, -0.3 + 0.5j
    lhs = magnetic_translate(magnetic_translate(u, a), b)
    rhs = magnetic_translate(u, a + b)
    np.testing.assert_allclose(np.abs(lhs.coeffs), np.abs(rhs.coeffs), atol=1e-9)


def test_translate_rejects_unresolvable_shift():
    with pytest.raises(ResolutionError):
        magnetic_translate(basis_vector(0, 12), 6.0)


# -- rotation and propagator ---------------------------------------------------

def test_rotate_basics(rng):
    u = random_unit_vector(rng, 16)
    np.testing.assert_array_equal(rotate(u, 0.0).coeffs, u.coeffs)
    e1 = basis_vector(1, 4)
    np.testing.assert_allclose(rotate(e1, np.pi).coeffs[1], -1.0, atol=1e-15)


def test_rotate_pointwise_identity(rng):
    from lllsim.fock import evaluate

    u = random_unit_vector(rng, 20)
    theta = 1.234
    z = 0.6 * (rng.standard_normal(8) + 1j * rng.standard_normal(8))
    np.testing.assert_allclose(evaluate(rotate(u, theta), z),
                               evaluate(u, np.exp(1j * theta) * z), atol=1e-10)


def test_harmonic_propagator_identity(rng):
    # e^{i tau H} = e^{2 i tau} L_{2 tau}, checked componentwise
    u = random_unit_vector(rng, 24)
    tau = 0.37
    forward = harmonic_propagate(u, -tau)          # e^{+i tau H}
    rotated = FockVector(np.exp(2j * tau) * rotate(u, 2.0 * tau).coeffs)
    np.testing.assert_allclose(forward.coeffs, rotated.coeffs, atol=1e-12)
    assert l2_norm(harmonic_propagate(u, 5.0)) == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_array_equal(harmonic_propagate(u, 0.0).coeffs, u.coeffs)


# -- conserved quantities -------------------------------------------------------

def test_conserved_trivial_cases(kernel_table):
    table = kernel_table(8)
    q = conserved_quantities(basis_vector(0, 8), zero_vector(8), table)
    assert (q.M_u, q.M_v, q.H, q.P_minus, q.Q_minus) == (1.0, 0.0, 0.0, 0.0, 0.0)
    q1 = conserved_quantities(basis_vector(1, 8), zero_vector(8), table)
    assert q1.P_minus == pytest.approx(1.0, abs=1e-15)
    q2 = conserved_quantities(basis_vector(0, 8), basis_vector(0, 8), table)
    assert q2.H == pytest.approx(1.0 / TWO_PI, rel=1e-14)


def test_momenta_match_quadrature(kernel_table, rng):
    # the ladder-derived coefficient formulas must agree with the integrals
    N = 24
    table = kernel_table(N)
    grid = polar_grid(N)
    u, v = random_unit_vector(rng, N), random_unit_vector(rng, N)
    q = conserved_quantities(u, v, table)
    dens = (np.abs(grid_values(u.coeffs, grid)) ** 2
            - np.abs(grid_values(v.coeffs, grid)) ** 2)
    p_quad = np.real(grid.integrate((grid.r[:, None] ** 2 - 1.0) * dens))
    q_quad = grid.integrate(grid.nodes() * dens)
    assert q.P_minus == pytest.approx(p_quad, abs=1e-8)
    assert abs(q.Q_minus - q_quad) <= 1e-8


def test_energy_matches_quadrature(kernel_table, rng):
    N = 24
    table = kernel_table(N)
    grid = polar_grid(N)
    u, v = random_unit_vector(rng, N), random_unit_vector(rng, N)
    q = conserved_quantities(u, v, table)
    h_quad = np.real(grid.integrate(np.abs(grid_values(u.coeffs, grid)) ** 2
                                    * np.abs(grid_values(v.coeffs, grid)) ** 2))
    assert q.H == pytest.approx(h_quad, abs=1e-8)


# -- interaction decay and weighted projector continuity ------------------------

def test_translated_pair_product_gaussian_decay():
    N = 48
    grid = polar_grid(N)
    e0 = basis_vector(0, N)
    seps = np.array([1.5, 2.5, 3.5])
    sups = []
    for s in seps:
        f1 = grid_values(magnetic_translate(e0, s / 2).coeffs, grid)
        f2 = grid_values(magnetic_translate(e0, -s / 2).coeffs, grid)
        sups.append(np.max(np.abs(f1 * f2)))
    slope = np.polyfit(seps ** 2, np.log(sups), 1)[0]
    assert -slope >= 0.24
    # the exact envelope is e^{-d^2/4} / pi
    np.testing.assert_allclose(sups, np.exp(-seps ** 2 / 4.0) / np.pi, rtol=1e-6)


def test_projector_weighted_continuity(rng):
    N, kappa = 24, 1.0
    grid = polar_grid(N, kappa=kappa)
    wt = build_weight_table(WeightSpec("exponential", kappa), N)
    z = grid.nodes()
    bound = 2.0 * np.exp(kappa ** 2 / 2.0)
    for _ in range(5):
        coef = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        f = sum(coef[m, n] * z ** m * np.conj(z) ** n for m in range(3) for n in range(3))
        f = f * np.exp(-np.abs(z) ** 2 / 2.0)
        pf = projector_quadrature_oracle(f, grid, N)
        lhs = weighted_l2_norm(pf, wt)
        rhs = np.sqrt(np.sum(np.exp(2.0 * kappa * grid.r)[:, None]
                             * np.abs(f) ** 2 * grid.area_weights))
        assert lhs <= bound * rhs
