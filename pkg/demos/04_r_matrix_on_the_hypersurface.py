"""The R-matrix restricted to the hypersurface, by two routes, and its
entries as polynomials in the generators.

Run with ``python3 demos/04_r_matrix_on_the_hypersurface.py``.
"""

from msplab.ifun import generators
from msplab.level0 import (level0_dual_route_report, level0_membership, level0_R_direct, level0_window_report,
                           r_entries_level0, vanishing_report)
from msplab.targets import target_config

t = target_config(8)
N = 11
order = 18
g = generators(t, order)

# Route one: remove the hypersurface S-matrix from the restricted master
# S-matrix and expand at z = 0.
R = level0_R_direct(t, N, order, gens=g)
print("windows:", level0_window_report(R).to_json())

# Route two: the recursion on normalized entries (R_m)_j^b.
E = r_entries_level0(t, N, 4, order, g)
print("vanishing off j = b + m mod N:", vanishing_report(E, N, order, t.k).status)
print("routes agree:", level0_dual_route_report(t, N, 4, order, R, E).status)

# Every surviving entry is a polynomial in A, B, B2, B3, Y.
certs = level0_membership(t, N, 4, order, 6, g, E)
for (m, j, b, twisted), cert in sorted(certs.items())[:8]:
    label = f"-Y (R_{m})_{j}^{b}" if twisted else f"(R_{m})_{j}^{b}"
    print(f"{label:>16} = {cert.poly}")
print(f"{sum(c.certified for c in certs.values())} of {len(certs)} entries certified")
