# coding: utf-8

# # Contraction and the b(t) family
#
# Rescaling a basis of so(3,1) by powers of gamma and letting gamma go to zero
# gives the algebra spanned by A4..A9.

from psde.scalar import ONE, T, linear_power
from psde.symmetry import classify_b, contraction_check

rep = contraction_check()
print("polynomial in gamma:", rep["polynomial_in_gamma"])
print("limit equals the operator algebra:", rep["limit_equals_operator_algebra"])
for bracket, value in rep["limit"]["brackets"].items():
    if value != "0":
        print(f"    {bracket} = {value}")

# The listed relations for this algebra carry the opposite sign on one
# bracket; that set fails the Jacobi identity, so no limit can reproduce it.

print("mismatch with listed relations:", rep["listed_relation_mismatches"])
print("listed relations satisfy Jacobi:", rep["listed_relations_jacobi"])

# ## Classifying u_t = u_xx + b(t) u_yy
#
# Constant b and b = (b1 t + b0)^-2 reduce to the standard equation; power
# laws keep one extra scaling field; anything else keeps five.

for b in (ONE, linear_power(2, 1, -2), T**3, T * T + 1):
    r = classify_b(b)
    print(f"{r['b']:>16}: {r['class']:<19} dim {r['dimension']}  checks pass {r['all_pass']}")
