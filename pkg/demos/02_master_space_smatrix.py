"""The S-matrix of the master space and its specializations.

Run with ``python3 demos/02_master_space_smatrix.py``.
"""

from msplab.ifun import msp_ifunction
from msplab.msp import (connection_AM, pf_check, rotation_holds, solve_SM, specialize_closed, specialize_recursive,
                        symplectic_check)
from msplab.targets import target_config

t = target_config(6)
N = 7

# The I-function is sparse: a term p^i q^d w^e appears only when i = e mod N.
I = msp_ifunction(t, N, 2)
print("nonzero I-function coefficients through q^2:", len(I.series.terms))
print("q^1 p^0 terms:", sorted((e, str(c)) for (i, d, e), c in I.series.terms.items() if i == 0 and d == 1))

# The connection matrix is p-multiplication plus a five-entry band times q.
A = connection_AM(t, N)
print("band:", [(key, [str(x) for x in val]) for key, val in sorted(A.entries.items()) if val[1]])

# Solving the connection column by column from column 0 = I/z gives S;
# the symplectic identity S(z) S(-z)* = Id is an independent check.
S = solve_SM(t, N, 4)
print("symplectic identity:", symplectic_check(S).to_json())

# The master-space Picard-Fuchs operator kills the I-function.
print("Picard-Fuchs:", pf_check(t, N, 4).to_json())

# At a fixed point with z = k t_alpha / a the entries become q-polynomials.
for a in (1, 2, 7, 13):
    f = specialize_recursive(t, N, a, 6)
    same = specialize_closed(t, N, a, 6) == f[0]
    print(f"a={a}: f_0 = {[str(c) for c in f[0].coeffs]} closed formula agrees: {same}")
    print(f"       degrees of f_0..f_{N + 3}:", [x.degree() for x in f])
    print("       rotation property:", all(rotation_holds(x, N, i, 0, 3) for i, x in enumerate(f)))

# a = 3 is not narrow: a denominator vanishes and the entry is skipped.
try:
    specialize_recursive(t, N, 3, 3)
except Exception as exc:
    print("a=3:", type(exc).__name__, exc)
