"""Length of the singular scheme at a point of the plane.

mu(a) is the probability that a random jet has singular scheme of length a
at the point. Exhaustive enumeration reproduces the closed forms
1 - q^-3 and q^-3 - q^-4, and a Monte Carlo run shows the Wilson intervals.
"""

from qsdensity import ClosedFormMu, mu_exhaustive, mu_monte_carlo, scheme_length_density
from qsdensity.toric import P

for q in (2, 3):
    X = P(2, q)
    table = mu_exhaustive(1, X, a_max=1)
    closed = ClosedFormMu(q)
    for a in (0, 1):
        print(f"q={q} mu({a}) exhaustive {table(a)}  closed form {closed(a, 1)}")

mc = mu_monte_carlo(1, P(2, 3), a_max=1, samples=4000, seed=1)
for a, mu, method, half in mc.rows():
    print(f"monte carlo mu({a}) = {float(mu):.4f} +- {half:.4f}  [{method}]")

X = P(2, 5)
for s in (1, 2):
    d = scheme_length_density(ClosedFormMu(5), X, s, 12)
    print(f"P^2 over F_5, singular scheme length < {s}: {float(d.value):.6f}")
