# coding: utf-8

# # The symmetry algebra of the phase-space equation
#
# The operator L = d/dt - 1/4 d^2/dx^2 + 1/(4 t^2) d^2/dp^2 has a nine
# dimensional algebra of first-order symmetries A1..A9. This demo builds
# them, checks the symmetry criterion [L, A] = xi L and prints the table.

from psde.operators import build_psde_L
from psde.symmetry import (
    A_NAMES,
    check_symmetry,
    commutator_table,
    expected_A_table,
    make_generator_A,
)
from psde.lie import analyze_structure

L = build_psde_L()
A = [make_generator_A(i) for i in range(1, 10)]
print("L =", L.to_text())

# ## Symmetry criterion
#
# Only A2 (scaling) and A3 (the conformal generator) pick up a multiplier.

for name, op in zip(A_NAMES, A):
    print(f"{name}: xi = {check_symmetry(L, op).to_text()}")

# ## Commutator table
#
# Every bracket is computed exactly and compared with the embedded reference.

tab = commutator_table(A, A_NAMES)
print("matches reference:", tab.same_as(expected_A_table()))
for i in range(9):
    print("  ".join(f"{tab.entry_text(i, j):>6}" for j in range(9)))

# ## Structure
#
# The centre is spanned by A9, A5..A9 form a Heisenberg ideal and A1, A2, A3
# give an sl(2) triple.

rep = analyze_structure(tab)
for key, value in rep.to_dict()["levi_labels"].items():
    print(f"{key}: {value}")
