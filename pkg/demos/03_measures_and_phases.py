"""Finite-volume measures built from the fixed points, their norms, and the
resulting phase picture."""

from padic_potts import ModelParams, compatibility_check, phase_diagnosis
from padic_potts.phase import (
    alternating_configuration,
    boundedness,
    brute_force_cross_check,
    constant_configuration,
    invariant_field,
    measure_norm_exponent,
    norm_formula,
)

strong = ModelParams(5, 5, 3)

# each fixed point gives a translation-invariant field whose measures are consistent
for i in (0, 1, 2):
    rep = compatibility_check(3, invariant_field(i, strong), strong)
    print(f"mu{i}: compatible at depth 3: {rep.passed} ({rep.configurations} configurations)")

# the exponent of |mu_i(sigma)| is affine in (|V_(n-1)|, #ones on leaves, energy)
for i in (0, 1, 2):
    print(f"mu{i} exponent formula:", norm_formula(i, strong).to_json())

# checked against exhaustive sums at depth 2
print("formula matches exhaustive sums:", all(brute_force_cross_check(i, 2, strong).ok for i in (0, 1, 2)))

# along the level-alternating configuration mu2 blows up while mu1 decays
for n in (2, 3, 4, 5):
    sigma = alternating_configuration(n, strong.q)
    print(f"n={n}: e(mu1) = {measure_norm_exponent(1, sigma, strong):5d}, "
          f"e(mu2) = {measure_norm_exponent(2, sigma, strong):5d}")

# the all-ones configuration has every edge matched, so its energy drags both down
for n in (2, 3, 4):
    sigma = constant_configuration(n, strong.q, 1)
    print(f"all ones, n={n}: e(mu1) = {measure_norm_exponent(1, sigma, strong)}, "
          f"e(mu2) = {measure_norm_exponent(2, sigma, strong)}")

for i in (0, 1, 2):
    b = boundedness(i, strong, 6)
    print(f"mu{i}: {b.status}, suprema {b.sup_exponents}")

for triple in ((5, 5, 3), (7, 1, 1), (3, 1, -2), (2, 1, 1)):
    print(triple, "->", phase_diagnosis(ModelParams(*triple)).verdict)
