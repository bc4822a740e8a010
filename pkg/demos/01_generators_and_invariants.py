"""Generator series of the three hypersurfaces and their genus-zero invariants.

Run with ``python3 demos/01_generators_and_invariants.py``.
"""

from msplab.genus0 import bps_numbers, genus0_invariants, mirror_map, verify_yukawa_identity
from msplab.ifun import generators
from msplab.targets import all_targets

# Each target is a degree-k hypersurface in a weighted projective space.
for t in all_targets():
    print(f"k={t.k} weights={t.weights} r={t.r} p_k={t.p_k}")

    # I0, I11, I22 are built from the I-function; their first coefficients
    # are the constants of the master-space connection.
    g = generators(t, 30)
    print("  I0  :", [str(c) for c in g.I0.coeffs[:4]])
    print("  I11 :", [str(c) for c in g.I11.coeffs[:4]])
    print("  I22 :", [str(c) for c in g.I22.coeffs[:4]])

    # The normalized Yukawa coupling is exactly Y = 1/(1 - r q).
    print("  Yukawa identity through q^30:", verify_yukawa_identity(t, 30, g).status)

    # The mirror map Q = q exp(I1/I0) turns the Yukawa coupling into
    # instanton numbers; a second route reads them off the I-function.
    print("  mirror map:", [str(c) for c in mirror_map(g).coeffs[:4]])
    rep = genus0_invariants(t, 4, g)
    print("  routes agree:", rep.routes_agree)
    print("  N_{0,d}:", [str(n) for n in rep.invariants])
    print("  BPS n_d:", [str(n) for n in bps_numbers(rep.invariants)])
