"""Branch structure of the discretized constant-scalar-curvature equation.

Given a Galerkin model, this module locates the parameters t at which the
trivial solution u = 1 degenerates (the diagonal of the linearization
crosses zero), switches onto the bifurcating branches, follows them by
pseudo-arclength continuation, and runs a finite-dimensional two-subspace
Lyapunov-Schmidt reduction whose agreement certifies that the bifurcating
solutions are constant along the fibers.

Branch switching solves the residual together with an amplitude pin
<c - c_triv, n> = amplitude in the extended unknowns (c, t), with n a unit
kernel direction.  When the kernel is multi-dimensional (a circle-factor
eigenvalue carries a cos/sin pair) the rotation orbit of a solution is a
genuine null direction of the extended Jacobian; additional phase rows
<c - c_triv, n_perp> = 0 remove it, and the resulting overdetermined but
consistent systems are corrected by damped Gauss-Newton least squares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import galerkin, variation
from .errors import (
    EmptyBranchError,
    HypothesisViolatedError,
    IncompleteSpectrumError,
    InvalidArgumentError,
    NoConvergenceError,
    NondiscreteDegeneracyError,
    NoNontrivialSolutionError,
    NotApplicableError,
    PositivityViolationError,
    PreconditionError,
    ReductionFailedError,
    UndefinedFractionError,
    UnsupportedGeometryError,
)
from .galerkin import GalerkinModel, State
from .variation import DegeneracyInstant

TOL_NEWTON = 1e-10
MAX_NEWTON_ITER = 50
KERNEL_THRESHOLD = 1e-8      # relative to the largest diagonal entry
BISECTION_TOL = 1e-10
_MIN_DAMPING = 1e-9
_NONTRIVIAL_NORM = 1e-8      # below this, a solution counts as the trivial one
_CIRCLE_DIRECTIONS = 8


def residual_norm(model: GalerkinModel, state: State) -> float:
    return float(np.linalg.norm(galerkin.residual(model, state)))


def _fraction_or_zero(state: State) -> float:
    try:
        return galerkin.fiber_energy_fraction(state)
    except UndefinedFractionError:
        return 0.0


# ---------------------------------------------------------------------------
# branch-point detection

@dataclass(frozen=True)
class BranchPoint:
    """A parameter where the linearization at u = 1 acquires kernel modes;
    `predicted_instant` is the matching exact degeneracy instant when the
    spectral enumeration finds one within 1e-9."""

    t: float
    kernel_modes: tuple
    predicted_instant: DegeneracyInstant | None = None

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel_modes)

    @property
    def horizontal(self) -> bool:
        return all(j == 0 for _, j in self.kernel_modes)


def _diagonal_entry(model, i, j, t):
    lam = model.base.eigenvalues[i] + model.fiber.eigenvalues[j] / t
    s_t = variation.scalar_curvature(model.family, t)
    return float(model.a_m) * (lam - s_t / (model.m - 1))


def detect_branch_points(model: GalerkinModel, t_min, t_max, n_samples: int) -> list:
    """Scan the closed-form linearization diagonal over [t_min, t_max],
    bisect every per-mode sign change to width < 1e-10, and merge
    coincident roots into branch points."""
    t_min, t_max = float(t_min), float(t_max)
    if not 0 < t_min < t_max:
        raise InvalidArgumentError(f"need 0 < t_min < t_max, got ({t_min}, {t_max})")
    if n_samples < 2:
        raise InvalidArgumentError(f"need n_samples >= 2, got {n_samples}")

    ts = np.linspace(t_min, t_max, n_samples)
    diags = np.stack([galerkin.linearization_at_one(model, t) for t in ts])

    roots = []  # (t_root, (i, j))
    nb, nf = model.shape
    for i in range(nb):
        for j in range(nf):
            vals = diags[:, i, j]
            for k in range(n_samples - 1):
                a, b = vals[k], vals[k + 1]
                if a == 0.0:
                    roots.append((float(ts[k]), (i, j)))
                    continue
                if a * b < 0:
                    lo, hi = float(ts[k]), float(ts[k + 1])
                    flo = a
                    while hi - lo > BISECTION_TOL:
                        mid = 0.5 * (lo + hi)
                        fm = _diagonal_entry(model, i, j, mid)
                        if fm == 0.0:
                            lo = hi = mid
                            break
                        if flo * fm < 0:
                            hi = mid
                        else:
                            lo, flo = mid, fm
                    roots.append((0.5 * (lo + hi), (i, j)))
            if vals[-1] == 0.0:
                roots.append((float(ts[-1]), (i, j)))

    roots.sort(key=lambda r: r[0])
    clusters = []  # [ [t values], {modes} ]
    for t_root, mode in roots:
        if clusters and abs(t_root - clusters[-1][0][-1]) <= 1e-9 * (1 + t_root):
            clusters[-1][0].append(t_root)
            clusters[-1][1].add(mode)
        else:
            clusters.append(([t_root], {mode}))

    try:
        lo = t_min - 1e-9 * (1 + t_min)
        hi = t_max + 1e-9 * (1 + t_max)
        predictions = variation.enumerate_degeneracy(model.family, lo, hi)
    except (NondiscreteDegeneracyError, IncompleteSpectrumError,
            UnsupportedGeometryError):
        predictions = ()

    points = []
    for t_vals, modes in clusters:
        t_bp = sum(t_vals) / len(t_vals)
        diag = galerkin.linearization_at_one(model, t_bp)
        cut = KERNEL_THRESHOLD * np.abs(diag).max()
        for idx in zip(*np.nonzero(np.abs(diag) < cut)):
            modes.add((int(idx[0]), int(idx[1])))
        predicted = None
        for inst in predictions:
            if abs(float(inst.t) - t_bp) <= 1e-9 * (1 + t_bp):
                predicted = inst
                break
        points.append(BranchPoint(t_bp, tuple(sorted(modes)), predicted))
    return points


def kernel_vectors(model: GalerkinModel, bp: BranchPoint) -> np.ndarray:
    """Unit coefficient arrays spanning the kernel, [dim, nb, nf]."""
    vecs = np.zeros((bp.kernel_dim,) + model.shape)
    for k, (i, j) in enumerate(bp.kernel_modes):
        vecs[k, i, j] = 1.0
    return vecs


# ---------------------------------------------------------------------------
# Newton solvers

def newton_solve(model: GalerkinModel, t, initial: State,
                 tol: float = TOL_NEWTON, max_iter: int = MAX_NEWTON_ITER) -> State:
    """Damped Newton at fixed t.  The initial state must be positive on the
    grid; every iterate stays positive (the step is halved on violation or
    on insufficient residual decrease)."""
    t = float(t)
    coeffs = np.array(initial.coeffs, dtype=float)
    state = State(t, coeffs)
    res = galerkin.residual(model, state)          # raises if not positive
    for _ in range(max_iter):
        norm = float(np.linalg.norm(res))
        if norm < tol:
            return state
        jac = galerkin.residual_jacobian(model, state)
        try:
            step = np.linalg.solve(jac, -res.ravel()).reshape(model.shape)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError(f"singular Jacobian at t = {t}") from exc
        alpha = 1.0
        while True:
            candidate = State(t, state.coeffs + alpha * step)
            try:
                res_new = galerkin.residual(model, candidate)
            except PositivityViolationError:
                pass
            else:
                new_norm = float(np.linalg.norm(res_new))
                if new_norm <= (1 - 0.25 * alpha) * norm or new_norm < tol:
                    state, res = candidate, res_new
                    break
            alpha *= 0.5
            if alpha < _MIN_DAMPING:
                raise NoConvergenceError(
                    f"line search stalled at t = {t} (residual {norm:.3e})"
                )
    raise NoConvergenceError(
        f"no convergence in {max_iter} iterations at t = {t} "
        f"(residual {float(np.linalg.norm(res)):.3e})"
    )


def _solve_pinned(model, coeffs, t, rows, targets,
                  tol=TOL_NEWTON, max_iter=MAX_NEWTON_ITER):
    """Damped Gauss-Newton for residual(c, t) = 0 subject to affine rows
    row_c . c + row_t * t = target, unknowns (c, t).  With more rows than
    one the system is overdetermined but consistent by construction; least
    squares keeps the step well defined.  Raises NoConvergenceError with a
    `positivity` attribute telling whether the line search ever hit the
    positivity boundary."""
    n = model.n_modes
    rows_c = np.array([np.asarray(rc, float).ravel() for rc, _ in rows]).reshape(len(rows), n)
    rows_t = np.array([rt for _, rt in rows], dtype=float)
    targets = np.asarray(targets, dtype=float)
    positivity_seen = False

    def evaluate(cv, tv):
        st = State(tv, cv.reshape(model.shape))
        full = np.concatenate([
            galerkin.residual(model, st).ravel(),
            rows_c @ cv + rows_t * tv - targets,
        ])
        return full, st

    c = np.asarray(coeffs, dtype=float).ravel().copy()
    t = float(t)
    F, state = evaluate(c, t)
    norm = float(np.linalg.norm(F))
    for _ in range(max_iter):
        if norm < tol:
            return state
        J = np.zeros((n + len(rows), n + 1))
        J[:n, :n] = galerkin.residual_jacobian(model, state)
        J[:n, n] = galerkin.residual_t_derivative(model, state).ravel()
        J[n:, :n] = rows_c
        J[n:, n] = rows_t
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        alpha = 1.0
        while True:
            cand_c = c + alpha * step[:n]
            cand_t = t + alpha * step[n]
            if cand_t > 0:
                try:
                    F_new, state_new = evaluate(cand_c, cand_t)
                except PositivityViolationError:
                    positivity_seen = True
                else:
                    new_norm = float(np.linalg.norm(F_new))
                    if new_norm <= (1 - 0.25 * alpha) * norm or new_norm < tol:
                        c, t, F, state, norm = cand_c, cand_t, F_new, state_new, new_norm
                        break
            alpha *= 0.5
            if alpha < _MIN_DAMPING:
                err = NoConvergenceError(
                    f"pinned solve stalled near t = {t} (residual {norm:.3e})"
                )
                err.positivity = positivity_seen
                raise err
    err = NoConvergenceError(
        f"pinned solve: no convergence in {max_iter} iterations (residual {norm:.3e})"
    )
    err.positivity = positivity_seen
    raise err


def _phase_rows(model, bp, align):
    """Orthonormal directions inside the kernel span orthogonal to the
    kernel component of `align` (flattened); pinning these to zero removes
    the rotation freedom of multi-dimensional kernels.  The rows must stay
    within the span: anything outside it would pin harmonic content the
    branch legitimately carries."""
    if bp is None or bp.kernel_dim <= 1:
        return []
    span = kernel_vectors(model, bp).reshape(bp.kernel_dim, -1)
    coords = span @ align
    basis = []
    nrm = np.linalg.norm(coords)
    if nrm > 1e-12:
        basis.append(coords / nrm)
    rows = []
    for k in range(bp.kernel_dim):
        w = np.zeros(bp.kernel_dim)
        w[k] = 1.0
        for b in basis:
            w -= (w @ b) * b
        wn = np.linalg.norm(w)
        if wn > 1e-10:
            w /= wn
            basis.append(w)
            rows.append(w @ span)
    return rows


# ---------------------------------------------------------------------------
# branch switching

def _candidate_directions(model, bp, direction):
    vecs = kernel_vectors(model, bp).reshape(bp.kernel_dim, -1)
    if bp.kernel_dim == 1:
        if direction in (1, -1):
            return [direction * vecs[0]]
        return [vecs[0], -vecs[0]]
    if bp.kernel_dim == 2:
        angles = 2 * np.pi * np.arange(_CIRCLE_DIRECTIONS) / _CIRCLE_DIRECTIONS
        dirs = [np.cos(a) * vecs[0] + np.sin(a) * vecs[1] for a in angles]
        return dirs if direction != -1 else [-d for d in dirs]
    out = []
    for v in vecs:
        out += [v, -v]
    return out


def switch_branch(model: GalerkinModel, bp: BranchPoint, amplitude: float,
                  direction=None) -> State:
    """Land on a nontrivial branch through bp: solve the equation in (c, t)
    with the kernel amplitude pinned to `amplitude`, starting from
    u = 1 + amplitude * (kernel direction) at t = bp.t.  Tries each
    candidate kernel direction in turn; a converged solution that collapses
    back to u = 1 counts as a failure for that direction."""
    if bp.kernel_dim < 1:
        raise PreconditionError("branch point has no kernel modes")
    amplitude = float(amplitude)
    c_triv = galerkin.constant_state(model, bp.t).coeffs.ravel()

    failures = []
    for n_hat in _candidate_directions(model, bp, direction):
        rows = [(n_hat, 0.0)]
        targets = [n_hat @ c_triv + amplitude]
        for w in _phase_rows(model, bp, n_hat):
            rows.append((w, 0.0))
            targets.append(w @ c_triv)
        start = c_triv + amplitude * n_hat
        try:
            state = _solve_pinned(model, start, bp.t, rows, targets)
        except (NoConvergenceError, PositivityViolationError) as exc:
            failures.append(str(exc))
            continue
        if galerkin.u_distance(model, state) > _NONTRIVIAL_NORM:
            return state
        failures.append("collapsed to the trivial solution")
    raise NoNontrivialSolutionError(
        f"no nontrivial branch found at t = {bp.t} "
        f"(amplitude {amplitude}, {len(failures)} attempts)"
    )


# ---------------------------------------------------------------------------
# pseudo-arclength continuation

@dataclass(frozen=True)
class BranchSample:
    t: float
    state: State
    energy: float
    fiber_fraction: float
    residual_norm: float
    u_distance: float


@dataclass(frozen=True)
class Branch:
    samples: tuple
    origin: BranchPoint | None
    stop_reason: str

    def __len__(self):
        return len(self.samples)

    @property
    def ts(self):
        return np.array([s.t for s in self.samples])

    @property
    def distances(self):
        return np.array([s.u_distance for s in self.samples])


def _make_sample(model, state):
    return BranchSample(
        t=float(state.t),
        state=state,
        energy=galerkin.energy(model, state),
        fiber_fraction=_fraction_or_zero(state),
        residual_norm=residual_norm(model, state),
        u_distance=galerkin.u_distance(model, state),
    )


def _tangent(model, state, phase_rows, previous=None):
    """Null direction of the extended Jacobian (with phase rows) at a
    solution, via SVD; oriented along `previous` when given."""
    n = model.n_modes
    mat = np.zeros((n + len(phase_rows), n + 1))
    mat[:n, :n] = galerkin.residual_jacobian(model, state)
    mat[:n, n] = galerkin.residual_t_derivative(model, state).ravel()
    for k, w in enumerate(phase_rows):
        mat[n + k, :n] = w
    _, _, vt = np.linalg.svd(mat)
    v = vt[-1]
    v /= np.linalg.norm(v)
    if previous is not None and v @ previous < 0:
        v = -v
    return v


def continue_branch(model: GalerkinModel, start: State, direction: int,
                    steps: int, ds: float, origin: BranchPoint | None = None) -> Branch:
    """Pseudo-arclength continuation from a converged solution.

    `direction` +1 follows the branch with growing distance from u = 1,
    -1 with shrinking distance (toward the branch point).  Stops early on
    positivity loss, corrector failure, or when the distance turns around
    (the turning sample is discarded so the kept prefix stays monotone).
    """
    if not ds > 0:
        raise InvalidArgumentError(f"arclength step must be positive, got {ds}")
    if steps < 1:
        raise InvalidArgumentError(f"need steps >= 1, got {steps}")
    if direction not in (1, -1):
        raise InvalidArgumentError(f"direction must be +1 or -1, got {direction!r}")
    if residual_norm(model, start) > 10 * TOL_NEWTON:
        raise PreconditionError("start state does not satisfy the residual tolerance")

    c_triv = galerkin.constant_state(model, start.t).coeffs.ravel()
    offset = start.coeffs.ravel() - c_triv
    phase = _phase_rows(model, origin, offset) if np.linalg.norm(offset) > 0 else []

    x = np.concatenate([start.coeffs.ravel(), [float(start.t)]])
    v = _tangent(model, start, phase)
    growth = 2 * (offset @ v[:-1])
    if abs(growth) > 1e-13 * (1 + np.linalg.norm(offset)):
        if growth * direction < 0:
            v = -v
    elif v[-1] * direction < 0:
        v = -v

    samples = [_make_sample(model, start)]
    dist_prev = galerkin.u_distance(model, start)
    reason = "steps-exhausted"
    for step_no in range(steps):
        x_pred = x + ds * v
        rows = [(w, 0.0) for w in phase] + [(v[:-1], float(v[-1]))]
        targets = [w @ c_triv for w in phase] + [float(v @ x_pred)]
        try:
            state = _solve_pinned(
                model, x_pred[:-1], x_pred[-1], rows, targets
            )
        except (NoConvergenceError, PositivityViolationError) as exc:
            if step_no == 0:
                raise EmptyBranchError(
                    f"first continuation corrector failed: {exc}"
                ) from exc
            hit_boundary = isinstance(exc, PositivityViolationError) or getattr(
                exc, "positivity", False
            )
            reason = "positivity-stop" if hit_boundary else "no-convergence"
            break
        dist = galerkin.u_distance(model, state)
        if (dist - dist_prev) * direction < 0:
            reason = "turnaround"
            break
        x = np.concatenate([state.coeffs.ravel(), [float(state.t)]])
        v = _tangent(model, state, phase, previous=v)
        samples.append(_make_sample(model, state))
        dist_prev = dist
    return Branch(tuple(samples), origin, reason)


# ---------------------------------------------------------------------------
# double Lyapunov-Schmidt reduction

@dataclass(frozen=True)
class ReductionSample:
    kernel_coefficients: tuple     # coordinates of n in the kernel basis
    alpha_full: np.ndarray         # complement correction, full space
    alpha_restricted: np.ndarray   # complement correction, fiber-constant space
    reduced: np.ndarray            # kernel projection of the residual at 1+n+alpha
    projected_residual_full: float
    projected_residual_restricted: float

    @property
    def difference(self) -> float:
        return float(np.linalg.norm(self.alpha_full - self.alpha_restricted))


@dataclass(frozen=True)
class ReductionResult:
    kernel_dim: int
    samples: tuple
    discrepancy: float             # max |alpha_full - alpha_restricted|


def _complement_solve(model, t, base_coeffs, indices, tol=1e-11):
    """Newton for the complement-projected equation: find v supported on
    `indices` (flat) with P residual(base + v) = 0."""
    n = model.n_modes
    idx = np.asarray(indices, dtype=int)
    v = np.zeros(len(idx))
    for _ in range(MAX_NEWTON_ITER):
        c = base_coeffs.copy().ravel()
        c[idx] += v
        state = State(t, c.reshape(model.shape))
        res = galerkin.residual(model, state).ravel()[idx]
        norm = float(np.linalg.norm(res))
        if norm < tol:
            return v, norm
        jac = galerkin.residual_jacobian(model, state)[np.ix_(idx, idx)]
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise ReductionFailedError(
                "complement Jacobian is singular; the kernel split is invalid"
            ) from exc
        v = v + step
    raise ReductionFailedError(
        f"complement solve did not converge (residual {norm:.3e})"
    )


def lyapunov_schmidt_reduce(model: GalerkinModel, bp: BranchPoint,
                            sample_radius: float, n_samples: int) -> ReductionResult:
    """Solve the complement equation v = alpha(n) for sampled kernel vectors
    n twice, over the full complement and over the fiber-constant complement
    only, and report the largest disagreement.  Agreement is the discretized
    form of the statement that both reductions produce the same branch, which
    forces the bifurcating solutions to be fiber-constant."""
    if bp.kernel_dim < 1:
        raise PreconditionError("branch point has no kernel modes")
    if not bp.horizontal:
        raise HypothesisViolatedError(
            "kernel contains fiber-dependent modes; the two reductions act on "
            "different kernels and the comparison is meaningless"
        )
    if n_samples < 1:
        raise InvalidArgumentError(f"need n_samples >= 1, got {n_samples}")
    nb, nf = model.shape
    kernel_flat = [i * nf + j for i, j in bp.kernel_modes]
    full_comp = [k for k in range(model.n_modes) if k not in set(kernel_flat)]
    fc_comp = [i * nf for i in range(nb) if (i, 0) not in set(bp.kernel_modes)]

    vecs = kernel_vectors(model, bp).reshape(bp.kernel_dim, -1)
    c_triv = galerkin.constant_state(model, bp.t).coeffs.ravel()

    if bp.kernel_dim == 1:
        coords = [((-1.0) ** k,) for k in range(n_samples)]
    else:
        angles = 2 * np.pi * np.arange(n_samples) / n_samples
        coords = [
            tuple(np.cos(a) if k == 0 else (np.sin(a) if k == 1 else 0.0)
                  for k in range(bp.kernel_dim))
            for a in angles
        ]

    samples = []
    worst = 0.0
    for coeffs in coords:
        n_vec = sample_radius * sum(c * v for c, v in zip(coeffs, vecs))
        base = c_triv + n_vec
        vf, rf = _complement_solve(model, bp.t, base, full_comp)
        vr, rr = _complement_solve(model, bp.t, base, fc_comp)
        alpha_full = np.zeros(model.n_modes)
        alpha_full[full_comp] = vf
        alpha_restricted = np.zeros(model.n_modes)
        alpha_restricted[fc_comp] = vr
        corrected = State(float(bp.t), (base + alpha_full).reshape(model.shape))
        reduced = galerkin.residual(model, corrected).ravel()[kernel_flat]
        sample = ReductionSample(
            kernel_coefficients=tuple(float(c) for c in coeffs),
            alpha_full=alpha_full.reshape(model.shape),
            alpha_restricted=alpha_restricted.reshape(model.shape),
            reduced=reduced,
            projected_residual_full=rf,
            projected_residual_restricted=rr,
        )
        samples.append(sample)
        worst = max(worst, sample.difference)
    return ReductionResult(bp.kernel_dim, tuple(samples), worst)


# ---------------------------------------------------------------------------
# fiber-constancy verification

@dataclass(frozen=True)
class TrialRow:
    index: int
    converged: bool
    nontrivial: bool
    t: float | None
    u_distance: float | None
    fiber_fraction: float | None
    violation: bool


@dataclass(frozen=True)
class FiberConstancyReport:
    branch_point: BranchPoint
    trials: tuple
    seed: int
    threshold: float
    max_fraction: float

    @property
    def passed(self) -> bool:
        return not any(row.violation for row in self.trials)


def verify_fiber_constancy(model: GalerkinModel, bp: BranchPoint, trials: int,
                           seed: int = 0, amplitude: float = 1e-2,
                           threshold: float = 1e-8) -> FiberConstancyReport:
    """Falsification channel for fiber-constancy of the bifurcating branch:
    branch-switch from seeded random perturbations that mix kernel and
    fiber-mode components; every converged nontrivial solution must shed its
    fiber content below `threshold`.  Violations are reported, not raised."""
    try:
        epsilon = variation.stability_epsilon(model.family)
    except NotApplicableError as exc:
        raise PreconditionError(
            "the family has no stability window; fiber-constancy of the "
            "branch is not guaranteed at any t"
        ) from exc
    if not float(bp.t) < epsilon:
        raise PreconditionError(
            f"branch point t = {bp.t} lies outside the stability window "
            f"(0, {epsilon}); fiber-constancy is only guaranteed inside it"
        )
    if bp.kernel_dim < 1:
        raise PreconditionError("branch point has no kernel modes")
    if trials < 1:
        raise InvalidArgumentError(f"need trials >= 1, got {trials}")

    rng = np.random.default_rng(seed)
    vecs = kernel_vectors(model, bp).reshape(bp.kernel_dim, -1)
    c_triv = galerkin.constant_state(model, bp.t).coeffs.ravel()
    nb, nf = model.shape

    rows_out = []
    max_fraction = 0.0
    for trial in range(trials):
        kcoef = rng.standard_normal(bp.kernel_dim)
        n_hat = (kcoef @ vecs)
        n_hat /= np.linalg.norm(n_hat)
        fiber_part = rng.standard_normal((nb, nf))
        fiber_part[:, 0] = 0.0
        fiber_part = fiber_part.ravel()
        fiber_part /= np.linalg.norm(fiber_part)

        rows = [(n_hat, 0.0)]
        targets = [n_hat @ c_triv + amplitude]
        for w in _phase_rows(model, bp, n_hat):
            rows.append((w, 0.0))
            targets.append(w @ c_triv)
        start = c_triv + amplitude * (n_hat + fiber_part)
        try:
            state = _solve_pinned(model, start, bp.t, rows, targets)
        except (NoConvergenceError, PositivityViolationError):
            rows_out.append(TrialRow(trial, False, False, None, None, None, False))
            continue
        dist = galerkin.u_distance(model, state)
        if dist <= _NONTRIVIAL_NORM:
            rows_out.append(TrialRow(trial, True, False, float(state.t), dist, None, False))
            continue
        fraction = _fraction_or_zero(state)
        max_fraction = max(max_fraction, fraction)
        rows_out.append(TrialRow(
            trial, True, True, float(state.t), dist, fraction,
            fraction >= threshold,
        ))
    return FiberConstancyReport(bp, tuple(rows_out), seed, threshold, max_fraction)
