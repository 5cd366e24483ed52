"""Classification of the quaternionic Hopf fibration S^3 -> S^7 -> S^4(1/2).

The fibers are totally geodesic with |A|^2 = 12 and the scalar curvatures
are s_h = 48, s_ghat = 6.  The joint pairs below are the splittings of the
low spherical harmonics of S^7 into horizontal and vertical eigenvalues:
pullbacks from the base carry vertical eigenvalue 0, and the degree-one
harmonics split as 4 + 3.  Everything here is spectral; no discretization
applies to a 4-dimensional base factor.
"""

from fractions import Fraction

import cscbif
from cscbif import variation

pairs = [
    (0, 0, 1),
    (4, 3, 8),
    (16, 0, 5),
    (40, 0, 14),
    (72, 0, 30),
    (112, 0, 55),
    (160, 0, 91),
    (216, 0, 140),
    (280, 0, 204),
]
family = variation.SubmersionFamily(
    fiber=cscbif.sphere_manifold(3, Fraction(1)),
    base=cscbif.sphere_manifold(4, Fraction(1, 2)),
    a_norm_sq=Fraction(12),
    joint_mode=variation.ExplicitJoint(pairs),
)

print("== canonical variation of the quaternionic Hopf fibration ==")
for t in (Fraction(1, 4), Fraction(1), Fraction(4)):
    print(f"  s(g({t})) = {variation.scalar_curvature(family, t)}")

eps = variation.stability_epsilon(family)
print(f"stability threshold eps = {eps}")
print("on (0, eps) every degeneracy instant is horizontal and the")
print("bifurcating solutions are constant along the fibers")

print()
print("== classification on (1/100, 6/25] ==")
report = variation.classify_window(family, Fraction(1, 100), Fraction(6, 25))
print(f"nondiscrete: {report.nondiscrete}")
print(f"degenerate set source: {report.d_source} (complete: {report.d_complete})")
print(f"equality D = D_hor = B on the window: {report.stability_equality}")
for row in report.rows:
    inst = row.instant
    witness = ", ".join(f"({b}, {lam})" for b, lam in inst.witnesses)
    cert = row.certificate
    print(f"  t = {float(inst.t):.15f}  witnesses {witness}")
    print(f"      index {cert.index_below} -> {cert.index_above}, "
          f"fiber-constant branches: {row.fiber_constancy_guaranteed}")
