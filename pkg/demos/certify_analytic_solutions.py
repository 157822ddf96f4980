"""Certify the two closed-form three-body solutions.

Builds the equilateral triangle and the Euler collinear triple from
their exact coordinates, evaluates the analytic scalar invariants, and
then runs the full rigor stack on each: interval Krawczyk certificate
(existence + uniqueness in a tiny box), Albouy-Chenciner residual, and
the local quadratic-model sampling test.
"""

import numpy as np

from ccbc import nbody, verify
from ccbc.interval import IntervalBox, iv_residuals
from ccbc.nbody import Problem

p = Problem(n=3)

# equilateral triangle with unit weighted moment of inertia: the three
# bodies sit on a circle of radius 1/sqrt(3), pairwise distance 1
radius = 1 / np.sqrt(3)
angles = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
triangle = np.column_stack([radius * np.cos(angles),
                            radius * np.sin(angles)]).reshape(-1)

# Euler collinear triple: bodies at -a, 0, +a with a = 1/sqrt(2)
a = 1 / np.sqrt(2)
euler = np.array([-a, 0.0, 0.0, 0.0, a, 0.0])

for name, q, expected in (
    ("equilateral triangle", triangle,
     dict(potential=3.0, lam=3.0, morse=0, isotropy=3)),
    ("Euler collinear triple", euler,
     dict(potential=5 * np.sqrt(2) / 2, lam=5 * np.sqrt(2) / 2,
          morse=1, isotropy=2)),
):
    print(f"=== {name} ===")
    scalars = nbody.derived_scalars(p, q)
    print(f"U       = {scalars.potential:.15f}  "
          f"(analytic {expected['potential']:.15f})")
    print(f"lambda  = {scalars.lam:.15f}")
    print(f"|f|_max = {np.abs(nbody.residuals(p, q)).max():.2e}")

    ac = verify.albouy_chenciner_residual(p, q)
    print(f"Albouy-Chenciner residual = {ac:.2e}")

    from ccbc import linalg
    eig = linalg.sym_eigenvalues(nbody.hessian(p, q))
    morse = verify.morse_index(p, eig)
    iso = verify.isotropy_index(p, q)
    print(f"Morse index h = {morse} (expected {expected['morse']}), "
          f"isotropy index i = {iso} (expected {expected['isotropy']})")

    # interval residuals over a tiny box around the root must bracket zero
    box = IntervalBox.from_point_radius(q, 1e-8)
    widths = [c.width for c in iv_residuals(p, box)]
    print(f"interval residual widths at r=1e-8: max {max(widths):.2e}, "
          f"all contain 0: {all(c.contains(0.0) for c in iv_residuals(p, box))}")

    cert = verify.krawczyk_certificate(p, q, r=1e-8)
    print(f"Krawczyk at r=1e-8: zero_in_f={cert.zero_in_f}, "
          f"unique={cert.unique}")

    rms, worst = verify.quadratic_rms_test(
        p, q, r_rel=1e-3, n_samples=10_000, seed=0
    )
    print(f"quadratic-model sampling: rms = {rms:.3e}, worst = {worst:.3e}")
    print()

print("both closed-form solutions verified and certified")
