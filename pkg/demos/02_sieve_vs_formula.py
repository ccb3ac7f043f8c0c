"""Plane cubics over F_2: count the quasismooth ones and compare with the product formula.

Every cubic is enumerated. With scan degree 4 the Bezout bound for plane
curves guarantees that no singular point is missed.
"""

from qsdensity import ExperimentConfig, run_experiment, zeta_inverse
from qsdensity.toric import P

X = P(2, 2)
report = run_experiment(ExperimentConfig(X, 0, 1, ks=(1, 2, 3), scan_degree=4, s_values=(1, 2), trunc_degree=8))
limit = zeta_inverse(X, 3, 12)
print(f"1/zeta_P2(3) over F_2 ~ {float(limit.value):.6f}  (21/64 = {21 / 64:.6f})")
for row in report.rows:
    print(f"  deg {row.k}  {row.predicate:12s} {row.count:5d}/{row.total:<5d} = {row.fraction:.4f}"
          f"  analytic {row.analytic:.4f}  certified={row.certified}")
