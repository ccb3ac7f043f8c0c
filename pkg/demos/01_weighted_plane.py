"""Local factors on the weighted plane P(1,1,w).

The only singular point of P(1,1,w) is (0:0:1). Whether a section of
O(l) + kO(w) can be quasismooth there depends on l mod w, and the local
factor 1 - q^-nu records exactly that.
"""

import warnings

from qsdensity import main_density, nu_certified, nu_profile
from qsdensity.points import closed_points
from qsdensity.quasismooth import NuZeroWarning
from qsdensity.toric import WP

warnings.simplefilter("ignore", NuZeroWarning)

for w in (2, 3, 5):
    X = WP((1, 1, w), 2 if w > 2 else 3)
    (P,) = [pt for pt in closed_points(X, 1) if pt.singular]
    print(f"P(1,1,{w}) over F_{X.q}, singular point {P}")
    for ell in range(w):
        res = nu_certified(P, ell, X=X)
        prof = nu_profile(X, None, ell, max_degree=6)
        dens = main_density(prof)
        print(f"  D = O({ell}):  nu = {res.value} ({res.certificate}),  density ~ {float(dens.value):.6f}")
    print()
