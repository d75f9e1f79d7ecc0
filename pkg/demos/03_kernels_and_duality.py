# coding: utf-8

# # Kernels, duality and the delta limit
#
# The x-side kernel solves the forward heat equation in x, the p-side kernel
# solves the backward equation in p, and their product solves the full
# equation on the window t0 < t < t1.

from fractions import Fraction

from psde.numeric import delta_limit_test
from psde.solutions import dual, kernel, p_operator, residual, x_operator

t0, t1 = Fraction(-1, 2), Fraction(2)
Kx = kernel("x_side", 0, t0)
Kp = kernel("p_side", 0, 0, 0, t1)
K = kernel("two_sided", 0, t0, 0, t1)
print("K_x =", Kx.to_text())
print("K_p =", Kp.to_text())
print("x-equation residual zero:", residual(Kx, x_operator()).is_zero())
print("p-equation residual zero:", residual(Kp, p_operator()).is_zero())
print("full residual zero:", residual(K).is_zero())

# ## Duality
#
# Swapping x and p and inverting t maps solutions to solutions. For the
# two-sided kernel the roles of the source and sink data swap too.

a, b = Fraction(1, 4), Fraction(3, 2)
lhs = dual(kernel("two_sided", Fraction(1, 3), a, Fraction(-1, 2), b), t_ref=2 / (a + b))
rhs = kernel("two_sided", Fraction(-1, 2), 1 / b, Fraction(1, 3), 1 / a)
print("dual of two-sided kernel matches:", lhs == rhs)

# ## Delta limit
#
# The integral of the kernel against a test function approaches the value at
# the source point, with the error dropping about tenfold per decade of eps.

for kind, edge in (("x_side", 0), ("p_side", 1)):
    rep = delta_limit_test(kind, "gauss", t_edge=edge)
    for row in rep["rows"]:
        print(kind, row)
