"""Full pipeline on S^1(1) x S^2(1).

Classifies the degenerate set on (1/1000, 2] in exact arithmetic, then
discretizes the product, switches onto the nontrivial branch at t = 1,
and continues it in both directions.  Prints a summary of every stage.
"""

from fractions import Fraction

import numpy as np

import cscbif
from cscbif import continuation, galerkin, variation

family = variation.SubmersionFamily(
    fiber=cscbif.sphere_manifold(2, Fraction(1)),
    base=cscbif.sphere_manifold(1, Fraction(1)),
)

print("== exact classification on (1/1000, 2] ==")
report = variation.classify_window(family, Fraction(1, 1000), Fraction(2))
print(f"nondiscrete: {report.nondiscrete}")
print(f"degenerate set source: {report.d_source} (complete: {report.d_complete})")
print(f"stability threshold eps = {report.epsilon}")
print(f"instants in window: {len(report.rows)}")
for row in report.rows[::-1][:6]:
    inst = row.instant
    witness = ", ".join(f"({b}, {lam})" for b, lam in inst.witnesses)
    if row.certificate is not None:
        verdict = (f"index {row.certificate.index_below} -> "
                   f"{row.certificate.index_above}")
    else:
        verdict = row.certify_error
    print(f"  t = {str(inst.t):>7}  witnesses {witness:<14} {verdict}")
if len(report.rows) > 6:
    print(f"  ... {len(report.rows) - 6} more, down to t = {report.rows[0].instant.t}")

seq = variation.b_sequence(family, 8)
print(f"first bifurcation instants 1/j^2: {[str(t) for t in seq[:5]]}")

print()
print("== Galerkin discretisation (16 Fourier x 8 Legendre) ==")
model = galerkin.build_model(family, 16, 8)
print(f"modes: {model.n_modes}, grid {model.shape}")

points = continuation.detect_branch_points(model, 0.5, 1.5, 100)
bp = points[0]
print(f"branch point at t = {bp.t:.12f}, kernel dim {bp.kernel_dim}, "
      f"horizontal: {bp.horizontal}")

state = continuation.switch_branch(model, bp, amplitude=1e-2)
print(f"switched branch: t = {state.t:.12f}, "
      f"|u - 1| = {galerkin.u_distance(model, state):.3e}, "
      f"fiber fraction = {galerkin.fiber_energy_fraction(state):.3e}")

print()
print("== continuation toward the branch point ==")
shrink = continuation.continue_branch(model, state, -1, 40, 4e-4, origin=bp)
print(f"stop reason: {shrink.stop_reason}, samples: {len(shrink)}")
for s in shrink.samples[:: max(1, len(shrink) // 5)]:
    print(f"  t = {s.t:.9f}  |u - 1| = {s.u_distance:.3e}  "
          f"residual = {s.residual_norm:.1e}")
last = shrink.samples[-1]
print(f"final: t = {last.t:.12f}, |u - 1| = {last.u_distance:.3e}")

print()
print("== continuation away from the branch point ==")
grow = continuation.continue_branch(model, state, +1, 60, 2e-2, origin=bp)
last = grow.samples[-1]
grid_min = galerkin.grid_values(model, last.state).min()
print(f"stop reason: {grow.stop_reason}, samples: {len(grow)}")
print(f"final: t = {last.t:.6f}, |u - 1| = {last.u_distance:.4f}, "
      f"min u on grid = {grid_min:.4f}")

print()
print("== fiber constancy along the branch ==")
fc = continuation.verify_fiber_constancy(model, bp, trials=10, seed=0)
converged = sum(1 for row in fc.trials if row.converged)
print(f"trials converged: {converged}/{len(fc.trials)}, "
      f"max fiber fraction = {fc.max_fraction:.2e}, passed: {fc.passed}")
