"""The operator M on the hypergeometric series F(w, x) and the tower I_0..I_4.

Run with ``python3 demos/05_hypergeometric_tower.py``.
"""

from msplab.exact import TruncSeries
from msplab.targets import all_targets
from msplab.zagier_zinger import cross_check_generators, ip_tower, sextic_display_report, verify_zz

print("regrouped sextic series agrees:", sextic_display_report().status)

for t in all_targets():
    tower = ip_tower(t, 25)
    prod = tower[0]
    for s in tower[1:]:
        prod = prod * s
    print(f"k={t.k}")
    print("  I_1 =", [str(c) for c in tower[1].coeffs[:4]])
    print("  product equals 1/(1 - r x):", prod == TruncSeries.geometric(t.r, 25))
    print("  identities:", verify_zz(t, 25, tower).status)
    print("  I_0, I_1, I_2 match I0, I11, I22:", cross_check_generators(t, 25, tower).status)
