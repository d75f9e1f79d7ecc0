# coding: utf-8

# # One-parameter groups
#
# Each generator exponentiates to a point transformation with a multiplier.
# Applying the groups to the constant solution gives Gaussians, kernels and
# the squeezed thermal state.

from fractions import Fraction

from psde.groups import (
    apply_group,
    conformal_G3,
    conformal_kernel_identity,
    flow_grid_check,
    flow_integrate,
    group_law_check,
    hyperbola_point,
)
from psde.solutions import heat_polynomial, residual, thermal

lam = Fraction(1, 3)
print("Galilean boost of 1:", apply_group(5, lam, 1).to_text())
print("conformal image of 1:", conformal_G3(lam, 1).to_text())

# The pseudo-rotation is parametrised by a rational point on the hyperbola.

c, s = hyperbola_point(Fraction(1, 3))
image = apply_group(4, (c, s), heat_polynomial(2), t_ref=Fraction(1, 2))
print(f"G4({c}, {s}) v_2 residual zero:", residual(image).is_zero())
print("group law for A3:", group_law_check(3, Fraction(1, 5), Fraction(1, 7))["holds"])

# ## Thermal state as a product
#
# With 1/gamma = 2 nbar + 1 the product of the two conformal images of 1,
# scaled by 2 gamma, is the squeezed thermal distribution.

print(conformal_kernel_identity())
print("Q_th(nbar=1) =", thermal(1).to_text())

# ## Numeric flows
#
# RK4 integration of the characteristic equations reproduces the closed-form
# maps and multipliers.

state = flow_integrate(4, 1.0, (0.5, -0.3, 0.75))
print("A4 orbit end point:", state.as_row())
print("grid check worst error:", flow_grid_check()["worst"])
