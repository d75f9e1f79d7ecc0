# coding: utf-8

# # Polynomial solutions
#
# Repeated application of the Galilean generator A5 = 2x + t d/dx to the
# constant solution produces heat polynomials. Hermite polynomials and a two
# parameter generalisation sit in the same family.

from fractions import Fraction

from psde.solutions import (
    generalized_hermite,
    generating_series_residual,
    heat_polynomial,
    heat_polynomial_by_operator,
    hermite,
    residual,
)

for n in range(5):
    v = heat_polynomial(n)
    print(f"v_{n}(2x, t) = {v.to_text()}    residual zero: {residual(v).is_zero()}")

print("A5^6 1 equals the closed sum:", heat_polynomial_by_operator(6) == heat_polynomial(6))

# Hermite polynomials are v_n(2x, -1); they are not solutions themselves but
# come out of the same construction with t frozen.

for n in range(5):
    print(f"H_{n}(x) = {hermite(n).to_text()}")

# The generalised family is generated by exp(lam alpha x - beta lam^2).

alpha, beta = Fraction(1), Fraction(1)
print("H~_5(1, 1; x) =", generalized_hermite(5, alpha, beta).to_text())

# ## Generating function
#
# Truncating the series after N terms leaves a remainder that matches the
# summed tail to high precision.

rep = generating_series_residual(8, Fraction(1, 2), "hermite")
print("coefficients exact:", rep["coefficients_exact"])
print("numeric check:", rep["numeric"][0])
