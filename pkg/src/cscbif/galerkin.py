"""Spectral Galerkin discretization of the constant-scalar-curvature
equation on two-factor products.

The equation for the conformal factor u > 0 at fiber scale t is

    -a_m Lap_{g(t)} u + s(t) (u - u^{p_m - 1}) = 0,
    a_m = 4 (m - 1) / (m - 2),   p_m = 2 m / (m - 2),

the Euler-Lagrange equation of

    E(u) = int  (a_m / 2) |du|^2 + s(t) (u^2 / 2 - u^{p_m} / p_m)  dmu_{g(t)}.

The basis is a tensor product of one-dimensional spectral families, one per
factor: real Fourier modes on a circle, normalized Legendre polynomials in
the cosine of the polar angle (the axisymmetric harmonics) on a round
2-sphere.  The basis is orthonormal in L^2 of the unscaled product metric
and diagonalizes the Laplacian, mode (i, j) carrying the exact eigenvalue
pair (b_i, lam_j) and scaling to b_i + lam_j / t.  The nonlinear power is
evaluated by collocation on a tensor quadrature grid oversampled to
integrate triple products of basis functions exactly.

Scaling the fiber metric by t multiplies the volume measure by t^{k/2}
(k the fiber dimension).  That factor is applied to the energy only; the
residual is the coefficient vector of the equation in the unweighted basis
inner product, so the gradient of the energy equals t^{k/2} times the
residual, and exactly the residual at t = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import variation
from .errors import (
    ConfigurationError,
    InvalidArgumentError,
    PositivityViolationError,
    UndefinedFractionError,
    UnsupportedGeometryError,
)
from .spectra import ManifoldDescriptor, SphereSpectrum
from .variation import AllPairs, SubmersionFamily

_GRAM_TOL = 1e-12


@dataclass(frozen=True)
class FactorBasis:
    """One factor's spectral family sampled on its quadrature rule."""

    label: str            # "fourier" or "legendre"
    dim: int
    radius: Fraction
    count: int            # number of basis functions
    frequencies: tuple    # per-function frequency (Fourier) or degree (Legendre)
    eigenvalues_exact: tuple
    values: np.ndarray    # [count, nquad] basis functions at the nodes
    weights: np.ndarray   # [nquad] quadrature weights for the factor measure
    volume: float

    @property
    def eigenvalues(self):
        return np.array([float(v) for v in self.eigenvalues_exact])


def _fourier_basis(radius: Fraction, n_freq: int) -> FactorBasis:
    """Real Fourier family on a circle of the given radius: the constant
    plus cos/sin pairs for frequencies 1 .. n_freq - 1, so 2 n_freq - 1
    functions.  Equispaced nodes, 4 n_freq of them, integrate products of
    three basis functions exactly (top frequency 3 (n_freq - 1))."""
    r = float(radius)
    length = 2 * np.pi * r
    nquad = 4 * n_freq
    theta = 2 * np.pi * np.arange(nquad) / nquad
    weights = np.full(nquad, length / nquad)

    rows, freqs, eigs = [], [], []
    rows.append(np.full(nquad, 1 / np.sqrt(length)))
    freqs.append(0)
    eigs.append(Fraction(0))
    for j in range(1, n_freq):
        scale = np.sqrt(2 / length)
        rows.append(scale * np.cos(j * theta))
        rows.append(scale * np.sin(j * theta))
        freqs += [j, j]
        eigs += [Fraction(j * j) / radius**2] * 2
    return FactorBasis(
        "fourier", 1, radius, len(rows), tuple(freqs), tuple(eigs),
        np.vstack(rows), weights, length,
    )


def _legendre_basis(radius: Fraction, n_deg: int) -> FactorBasis:
    """Axisymmetric family on the round 2-sphere: normalized Legendre
    polynomials P_l(cos phi) for l = 0 .. n_deg - 1.  Gauss-Legendre nodes
    in cos phi, 2 n_deg of them, are exact through polynomial degree
    4 n_deg - 1 >= 3 (n_deg - 1)."""
    r = float(radius)
    area = 4 * np.pi * r * r
    nquad = 2 * n_deg
    nodes, gl_weights = np.polynomial.legendre.leggauss(nquad)
    weights = 2 * np.pi * r * r * gl_weights

    vander = np.polynomial.legendre.legvander(nodes, n_deg - 1)  # [nquad, n_deg]
    rows, freqs, eigs = [], [], []
    for ell in range(n_deg):
        norm = np.sqrt((2 * ell + 1) / area)
        rows.append(norm * vander[:, ell])
        freqs.append(ell)
        eigs.append(Fraction(ell * (ell + 1)) / radius**2)
    return FactorBasis(
        "legendre", 2, radius, n_deg, tuple(freqs), tuple(eigs),
        np.vstack(rows), weights, area,
    )


def _factor_basis(descriptor: ManifoldDescriptor, n_modes: int) -> FactorBasis:
    spec = descriptor.spectrum
    if not isinstance(spec, SphereSpectrum):
        raise UnsupportedGeometryError(
            f"factor {descriptor.name!r} has no one-dimensional spectral basis "
            "here; only round circles and 2-spheres are discretized"
        )
    if spec.dim != descriptor.dim:
        raise UnsupportedGeometryError(
            f"factor {descriptor.name!r}: descriptor dimension {descriptor.dim} "
            f"does not match its sphere spectrum dimension {spec.dim}"
        )
    if not isinstance(n_modes, int) or n_modes < 2:
        raise ConfigurationError(f"mode count must be an integer >= 2, got {n_modes!r}")
    if descriptor.dim == 1:
        return _fourier_basis(spec.radius, n_modes)
    if descriptor.dim == 2:
        return _legendre_basis(spec.radius, n_modes)
    raise UnsupportedGeometryError(
        f"factor {descriptor.name!r} has dimension {descriptor.dim}; spheres of "
        "dimension >= 3 are classification-only"
    )


@dataclass(frozen=True)
class GalerkinModel:
    """Discretized product family.  Coefficient arrays are indexed
    [base function, fiber function]."""

    family: SubmersionFamily
    base: FactorBasis
    fiber: FactorBasis
    basis_flat: np.ndarray   # [nb*nf, Mb*Mf] tensor basis on the grid

    @property
    def m(self) -> int:
        return self.family.m

    @property
    def a_m(self) -> Fraction:
        return Fraction(4 * (self.m - 1), self.m - 2)

    @property
    def p_m(self) -> Fraction:
        return Fraction(2 * self.m, self.m - 2)

    @property
    def shape(self):
        return (self.base.count, self.fiber.count)

    @property
    def n_modes(self) -> int:
        return self.base.count * self.fiber.count

    @property
    def volume_at_one(self) -> float:
        return self.base.volume * self.fiber.volume

    @property
    def weights2(self) -> np.ndarray:
        return np.outer(self.base.weights, self.fiber.weights)

    def eigentable(self):
        """Exact (b_i, lam_j) per mode pair, row-major over (i, j)."""
        return [
            ((i, j), (bi, lj))
            for i, bi in enumerate(self.base.eigenvalues_exact)
            for j, lj in enumerate(self.fiber.eigenvalues_exact)
        ]

    def mode_eigenvalues(self, t: float) -> np.ndarray:
        """b_i + lam_j / t on the [nb, nf] grid of mode pairs."""
        if not t > 0:
            raise InvalidArgumentError(f"scale parameter must be positive, got {t}")
        return self.base.eigenvalues[:, None] + self.fiber.eigenvalues[None, :] / t


@dataclass(frozen=True)
class State:
    """A candidate conformal factor: the fiber scale t and the coefficient
    array of u in the tensor basis."""

    t: float
    coeffs: np.ndarray

    def __post_init__(self):
        if not float(self.t) > 0:
            raise InvalidArgumentError(f"state needs t > 0, got {self.t!r}")


def build_model(family: SubmersionFamily, base_modes: int, fiber_modes: int) -> GalerkinModel:
    """Assemble the tensor basis for a product family and verify its
    orthonormality on the quadrature grid to 1e-12."""
    if family.a_norm_sq != 0 or not isinstance(family.joint_mode, AllPairs):
        raise UnsupportedGeometryError(
            "only product families (|A|^2 = 0, all-pairs joint spectrum) are "
            "discretized"
        )
    base = _factor_basis(family.base, base_modes)
    fiber = _factor_basis(family.fiber, fiber_modes)
    for factor in (base, fiber):
        gram = (factor.values * factor.weights) @ factor.values.T
        defect = np.abs(gram - np.eye(factor.count)).max()
        if defect > _GRAM_TOL:
            raise ConfigurationError(
                f"{factor.label} factor basis fails orthonormality by {defect:.3e}"
            )
    basis_flat = np.einsum("im,jn->ijmn", base.values, fiber.values).reshape(
        base.count * fiber.count, -1
    )
    return GalerkinModel(family, base, fiber, basis_flat)


def constant_state(model: GalerkinModel, t, value: float = 1.0) -> State:
    """The constant function `value` as a coefficient array."""
    coeffs = np.zeros(model.shape)
    coeffs[0, 0] = value * np.sqrt(model.volume_at_one)
    return State(float(t), coeffs)


def grid_values(model: GalerkinModel, state: State) -> np.ndarray:
    """u on the tensor quadrature grid, [Mb, Mf]."""
    return model.base.values.T @ state.coeffs @ model.fiber.values


def project(model: GalerkinModel, grid: np.ndarray) -> np.ndarray:
    """L^2(g(1)) projection of a grid function onto the basis, [nb, nf]."""
    pb = model.base.values * model.base.weights
    pf = model.fiber.values * model.fiber.weights
    return pb @ grid @ pf.T


def _positive_grid(model, state):
    g = grid_values(model, state)
    low = g.min()
    if not low > 0:
        raise PositivityViolationError(
            f"state is not strictly positive on the grid (min {low:.6e})"
        )
    return g


def residual(model: GalerkinModel, state: State) -> np.ndarray:
    """Coefficients of -a_m Lap_{g(t)} u + s(t) (u - u^{p-1}) in the basis.

    This is the gradient of `energy` divided by the measure factor t^{k/2};
    at t = 1 it is the gradient exactly."""
    t = float(state.t)
    g = _positive_grid(model, state)
    power = g ** (float(model.p_m) - 1.0)
    lam = model.mode_eigenvalues(t)
    s_t = variation.scalar_curvature(model.family, t)
    return float(model.a_m) * lam * state.coeffs + s_t * (state.coeffs - project(model, power))


def energy(model: GalerkinModel, state: State) -> float:
    """Total energy of the state under g(t), measure factor included."""
    t = float(state.t)
    g = _positive_grid(model, state)
    p = float(model.p_m)
    lam = model.mode_eigenvalues(t)
    s_t = variation.scalar_curvature(model.family, t)
    grad_term = 0.5 * float(model.a_m) * np.sum(lam * state.coeffs**2)
    potential = s_t * np.sum(model.weights2 * (g**2 / 2 - g**p / p))
    return t ** (model.family.fiber.dim / 2) * (grad_term + potential)


def linearization_at_one(model: GalerkinModel, t) -> np.ndarray:
    """Diagonal of the linearized operator at u = 1:
    a_m (b_i + lam_j / t - s(t) / (m - 1)) per mode pair, [nb, nf]."""
    t = float(t)
    lam = model.mode_eigenvalues(t)
    s_t = variation.scalar_curvature(model.family, t)
    return float(model.a_m) * (lam - s_t / (model.m - 1))


def residual_jacobian(model: GalerkinModel, state: State) -> np.ndarray:
    """Dense Jacobian of `residual` with respect to the coefficients,
    [n_modes, n_modes] over row-major mode pairs."""
    t = float(state.t)
    g = _positive_grid(model, state)
    p = float(model.p_m)
    lam = model.mode_eigenvalues(t).ravel()
    s_t = variation.scalar_curvature(model.family, t)
    wpow = (model.weights2 * g ** (p - 2.0)).ravel()
    gram = (model.basis_flat * wpow) @ model.basis_flat.T
    return np.diag(float(model.a_m) * lam + s_t) - s_t * (p - 1.0) * gram


def residual_t_derivative(model: GalerkinModel, state: State) -> np.ndarray:
    """Partial derivative of `residual` with respect to t at fixed
    coefficients, [nb, nf]."""
    t = float(state.t)
    g = _positive_grid(model, state)
    power = g ** (float(model.p_m) - 1.0)
    dlam = -model.fiber.eigenvalues[None, :] / t**2
    ds = -float(model.family.fiber.scalar_curvature) / t**2 - float(model.family.a_norm_sq)
    return float(model.a_m) * dlam * state.coeffs + ds * (
        state.coeffs - project(model, power)
    )


def u_distance(model: GalerkinModel, state: State) -> float:
    """L^2(g(1)) distance of the state from the constant solution u = 1."""
    ref = constant_state(model, state.t)
    return float(np.linalg.norm(state.coeffs - ref.coeffs))


def fiber_energy_fraction(state: State) -> float:
    """Share of the nonconstant coefficient energy carried by modes that
    vary along the fiber factor (fiber index >= 1)."""
    sq = np.asarray(state.coeffs, dtype=float) ** 2
    nonconstant = sq.sum() - sq[0, 0]
    if nonconstant == 0.0:
        raise UndefinedFractionError(
            "state is constant; the fiber energy fraction is undefined"
        )
    return float(sq[:, 1:].sum() / nonconstant)
