"""Fixed points of the invariant-line recursion f = g**2 and what happens to
orbits around them, in a ferromagnetic and an antiferromagnetic example."""

import random

from padic_potts import ModelParams, classify_fixed_point, fixed_points, from_rational, iterate_orbit
from padic_potts.dynamics import basin_predicate, eval_f

rng = random.Random(1)

# p = 5, q = 5, N = 3: q is divisible by p and |theta| <= |q|^2
ferro = ModelParams(5, 5, 3)
report = fixed_points(ferro)
print("ferro (5,5,3):", report.reason, "/", report.labeling)
for label in ("x0", "x1", "x2"):
    c = classify_fixed_point(report.value(label), ferro)
    print(f"  {label}: |x| = 5^{report.points[label].norm}, |f'| = 5^{c.multiplier_norm_exponent}, {c.cls}")

# every start off the unit sphere ends up at x1
for v in (3, 1, -1, -4):
    start = from_rational(rng.randint(1, 999) * 5**max(v, 0), 5 ** max(-v, 0), 5)
    res = iterate_orbit(start, ferro, 64)
    print(f"  start with |x| = 5^{-v}: {res.verdict} {res.target} after {res.steps} steps;",
          basin_predicate(start, ferro, "x1"))

# p = 3, q = 1, N = -2: antiferromagnetic, |theta| = 9
anti = ModelParams(3, 1, -2)
report = fixed_points(anti)
print("antiferro (3,1,-2):", report.labeling)
for label in ("x0", "x1", "x2"):
    c = classify_fixed_point(report.value(label), anti)
    print(f"  {label}: |f'| = 3^{c.multiplier_norm_exponent}, {c.cls}")

# the unit ball is pulled to x2 while the unit sphere is invariant
res = iterate_orbit(from_rational(3, 2, 3), anti, 64)
print("  start 3/2:", res.verdict, res.target, "norms", res.norm_exponents[:6])
x = from_rational(2, 5, 3)
norms = []
for _ in range(10):
    x = eval_f(x, anti)
    norms.append(-x.valuation)
print("  start 2/5 stays on the sphere:", norms)
