"""Tensor spectral discretization: orthonormality, exact eigenvalues,
gradient consistency, and refinement stability.

The finite-difference quotients computed here are the oracle for the
residual/energy relationship; nothing in the package computes gradients
this way.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cscbif
from cscbif import galerkin, variation
from cscbif.errors import (
    ConfigurationError,
    InvalidArgumentError,
    PositivityViolationError,
    UndefinedFractionError,
    UnsupportedGeometryError,
)


@pytest.fixture(scope="module")
def small_model(circle_sphere):
    return galerkin.build_model(circle_sphere, 8, 6)


def _random_positive_state(model, rng, t, scale=0.05):
    coeffs = scale * rng.standard_normal(model.shape)
    coeffs[0, 0] = np.sqrt(model.volume_at_one)
    return galerkin.State(t, coeffs)


# ---------------------------------------------------------------------------
# construction and validation


def test_build_rejects_curved_submersions(hopf_family):
    with pytest.raises(UnsupportedGeometryError):
        galerkin.build_model(hopf_family, 8, 6)


def test_build_rejects_high_dimensional_factors():
    fam = variation.SubmersionFamily(
        fiber=cscbif.sphere_manifold(3, Fraction(1)),
        base=cscbif.sphere_manifold(1, Fraction(1)),
    )
    with pytest.raises(UnsupportedGeometryError):
        galerkin.build_model(fam, 8, 6)


def test_build_rejects_tabulated_factors(nondiscrete_family):
    with pytest.raises(UnsupportedGeometryError):
        galerkin.build_model(nondiscrete_family, 8, 6)


def test_build_rejects_tiny_mode_counts(circle_sphere):
    with pytest.raises(ConfigurationError):
        galerkin.build_model(circle_sphere, 1, 6)
    with pytest.raises(ConfigurationError):
        galerkin.build_model(circle_sphere, 8, 1)


def test_state_needs_positive_t(small_model):
    with pytest.raises(InvalidArgumentError):
        galerkin.State(0.0, np.zeros(small_model.shape))


def test_model_constants(small_model):
    assert small_model.m == 3
    assert small_model.a_m == 8
    assert small_model.p_m == 6
    assert small_model.shape == (15, 6)
    assert small_model.n_modes == 90


# ---------------------------------------------------------------------------
# quadrature and orthonormality


def test_factor_bases_are_orthonormal(small_model):
    for fb in (small_model.base, small_model.fiber):
        gram = (fb.values * fb.weights) @ fb.values.T
        assert np.abs(gram - np.eye(fb.count)).max() < 1e-12


def test_constant_rows_have_the_right_height(small_model):
    # first basis function of each factor is 1/sqrt(volume)
    assert np.allclose(
        small_model.base.values[0], 1.0 / math.sqrt(2 * math.pi), atol=1e-14
    )
    assert np.allclose(
        small_model.fiber.values[0], 1.0 / math.sqrt(4 * math.pi), atol=1e-14
    )


def test_volume_at_one(small_model):
    assert small_model.volume_at_one == pytest.approx(8 * math.pi**2, rel=1e-13)


def test_projection_inverts_evaluation(small_model):
    rng = np.random.default_rng(7)
    coeffs = rng.standard_normal(small_model.shape)
    grid = galerkin.grid_values(small_model, galerkin.State(1.0, coeffs))
    back = galerkin.project(small_model, grid)
    assert np.abs(back - coeffs).max() < 1e-12


def test_parseval_on_the_grid(small_model):
    rng = np.random.default_rng(11)
    coeffs = rng.standard_normal(small_model.shape)
    grid = galerkin.grid_values(small_model, galerkin.State(1.0, coeffs))
    quad = float(np.sum(small_model.weights2 * grid * grid))
    assert quad == pytest.approx(float(np.sum(coeffs * coeffs)), rel=1e-12)


# ---------------------------------------------------------------------------
# eigenvalues


def test_eigentable_matches_sphere_spectra(small_model, circle_sphere):
    base_spec = circle_sphere.base.spectrum
    fiber_spec = circle_sphere.fiber.spectrum
    for (i, j), (b, lam) in small_model.eigentable():
        # base modes come in cos/sin pairs above the constant
        k = (i + 1) // 2
        ell = j
        assert b == base_spec.entry(k).value
        assert lam == fiber_spec.entry(ell).value


def test_mode_eigenvalues_scale_with_t(small_model):
    lam_2 = small_model.mode_eigenvalues(2.0)
    lam_1 = small_model.mode_eigenvalues(1.0)
    base_only = lam_1[:, 0]
    assert np.allclose(lam_2[:, 0], base_only)
    fiber_part = lam_1 - base_only[:, None]
    assert np.allclose(lam_2, base_only[:, None] + fiber_part / 2.0)


def test_linearization_zeroes_exactly_at_degeneracy_witnesses(
    small_model, circle_sphere
):
    for t in (Fraction(1), Fraction(1, 4), Fraction(7, 10)):
        lin = galerkin.linearization_at_one(small_model, t)
        for (i, j), (b, lam) in small_model.eigentable():
            rr = variation.degeneracy_roots(circle_sphere, b, lam)
            vanishes = t in rr.roots
            if b + lam == 0:
                continue  # constant mode never witnesses a degeneracy
            if vanishes:
                assert abs(lin[i, j]) < 1e-12
            else:
                assert abs(lin[i, j]) > 1e-6


# ---------------------------------------------------------------------------
# residual and energy


def test_constant_one_is_a_solution(small_model):
    for t in (0.3, 1.0, 2.5):
        res = galerkin.residual(small_model, galerkin.constant_state(small_model, t))
        assert np.abs(res).max() < 1e-13


def test_constant_residual_closed_form(small_model):
    # for u = c the equation collapses to s(t) (c - c^5) on the constant mode
    c, t = 1.3, 0.8
    res = galerkin.residual(small_model, galerkin.constant_state(small_model, t, c))
    s_t = 2.0 / t
    expected = s_t * (c - c**5) * math.sqrt(small_model.volume_at_one)
    assert res[0, 0] == pytest.approx(expected, rel=1e-12)
    off = np.abs(res).sum() - abs(res[0, 0])
    assert off < 1e-12


def test_energy_of_the_unit_constant(small_model):
    e = galerkin.energy(small_model, galerkin.constant_state(small_model, 1.0))
    assert e == pytest.approx(16 * math.pi**2 / 3, rel=1e-13)


def test_residual_is_the_energy_gradient_at_t_one(small_model):
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(10):
        state = _random_positive_state(small_model, rng, 1.0)
        res = galerkin.residual(small_model, state)
        fd = np.zeros(small_model.shape)
        for idx in np.ndindex(small_model.shape):
            for sign in (+1, -1):
                pert = state.coeffs.copy()
                pert[idx] += sign * h
                fd[idx] += sign * galerkin.energy(
                    small_model, galerkin.State(1.0, pert)
                )
        fd /= 2 * h
        assert np.abs(fd - res).max() / np.abs(res).max() < 1e-6


def test_energy_gradient_scaled_identity(small_model):
    # away from t = 1 the volume element contributes t^(k/2), constant in
    # u, so the energy gradient is that multiple of the residual
    rng = np.random.default_rng(5)
    h = 1e-6
    for t in (0.4, 1.7):
        state = _random_positive_state(small_model, rng, t)
        scaled = t * galerkin.residual(small_model, state)  # k = 2
        fd = np.zeros(small_model.shape)
        for idx in np.ndindex(small_model.shape):
            for sign in (+1, -1):
                pert = state.coeffs.copy()
                pert[idx] += sign * h
                fd[idx] += sign * galerkin.energy(small_model, galerkin.State(t, pert))
        fd /= 2 * h
        assert np.abs(fd - scaled).max() / np.abs(scaled).max() < 1e-6


def test_linearization_matches_jacobian_at_the_constant(small_model):
    t = 0.7
    state = galerkin.constant_state(small_model, t)
    jac = galerkin.residual_jacobian(small_model, state)
    lin = np.diag(galerkin.linearization_at_one(small_model, t).ravel())
    assert np.abs(jac - lin).max() < 1e-10


def test_jacobian_matches_finite_differences(small_model):
    rng = np.random.default_rng(13)
    state = _random_positive_state(small_model, rng, 0.9)
    jac = galerkin.residual_jacobian(small_model, state)
    h = 1e-6
    n = small_model.n_modes
    fd = np.zeros((n, n))
    for col, idx in enumerate(np.ndindex(small_model.shape)):
        plus = state.coeffs.copy()
        plus[idx] += h
        minus = state.coeffs.copy()
        minus[idx] -= h
        diff = galerkin.residual(
            small_model, galerkin.State(0.9, plus)
        ) - galerkin.residual(small_model, galerkin.State(0.9, minus))
        fd[:, col] = diff.ravel() / (2 * h)
    assert np.abs(fd - jac).max() < 1e-8


def test_t_derivative_matches_finite_differences(small_model):
    rng = np.random.default_rng(17)
    state = _random_positive_state(small_model, rng, 0.8)
    dt = galerkin.residual_t_derivative(small_model, state)
    h = 1e-7
    plus = galerkin.residual(small_model, galerkin.State(0.8 + h, state.coeffs))
    minus = galerkin.residual(small_model, galerkin.State(0.8 - h, state.coeffs))
    fd = (plus - minus) / (2 * h)
    assert np.abs(fd - dt).max() < 1e-6


def test_residual_rejects_sign_changing_states(small_model):
    state = galerkin.constant_state(small_model, 0.7)
    state.coeffs[1, 0] = 15.0  # drives the grid minimum well below zero
    with pytest.raises(PositivityViolationError):
        galerkin.residual(small_model, state)


def test_refinement_stability(circle_sphere):
    coarse = galerkin.build_model(circle_sphere, 8, 6)
    fine = galerkin.build_model(circle_sphere, 16, 12)
    coeffs = np.zeros(coarse.shape)
    coeffs[0, 0] = math.sqrt(coarse.volume_at_one)
    coeffs[1, 0] = 0.05
    coeffs[3, 1] = 0.02
    coeffs[0, 2] = -0.03
    res_c = galerkin.residual(coarse, galerkin.State(0.8, coeffs))
    lifted = np.zeros(fine.shape)
    lifted[: coarse.shape[0], : coarse.shape[1]] = coeffs
    res_f = galerkin.residual(fine, galerkin.State(0.8, lifted))
    shared = res_f[: coarse.shape[0], : coarse.shape[1]]
    assert np.abs(shared - res_c).max() < 1e-8


# ---------------------------------------------------------------------------
# diagnostics


def test_u_distance(small_model):
    state = galerkin.constant_state(small_model, 1.0)
    assert galerkin.u_distance(small_model, state) == 0
    state.coeffs[2, 1] = 0.25
    assert galerkin.u_distance(small_model, state) == pytest.approx(0.25)


def test_fiber_fraction_extremes(small_model):
    only_fiber = np.zeros(small_model.shape)
    only_fiber[0, 3] = 0.7
    assert galerkin.fiber_energy_fraction(galerkin.State(1.0, only_fiber)) == 1.0

    split = np.zeros(small_model.shape)
    split[2, 0] = 1.0
    split[0, 1] = 1.0
    assert galerkin.fiber_energy_fraction(galerkin.State(1.0, split)) == pytest.approx(
        0.5
    )

    base_only = np.zeros(small_model.shape)
    base_only[0, 0] = 2.0
    base_only[3, 0] = 1.0
    assert galerkin.fiber_energy_fraction(galerkin.State(1.0, base_only)) == 0.0


def test_fiber_fraction_undefined_for_zero(small_model):
    with pytest.raises(UndefinedFractionError):
        galerkin.fiber_energy_fraction(
            galerkin.State(1.0, np.zeros(small_model.shape))
        )


@given(t=st.floats(min_value=0.1, max_value=5.0, allow_nan=False))
@settings(max_examples=30, deadline=None)
def test_unit_constant_solves_at_every_scale(t):
    fam = variation.SubmersionFamily(
        fiber=cscbif.sphere_manifold(2, Fraction(1)),
        base=cscbif.sphere_manifold(1, Fraction(1)),
    )
    model = galerkin.build_model(fam, 4, 3)
    res = galerkin.residual(model, galerkin.constant_state(model, t))
    # roundoff scales with the curvature prefactor s(t) = 2/t
    assert np.abs(res).max() < 1e-13 * max(1.0, 2.0 / t) * 10
