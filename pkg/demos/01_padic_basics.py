"""A short tour of the p-adic number type: construction, arithmetic at
capped relative precision, and square roots."""

from padic_potts import from_rational, norm_valuation, padic, padic_sqrt
from padic_potts.errors import NoSquareRoot

# 9 = 3**2 * 1 in Q_3, and 1/3 has valuation -1
nine = from_rational(9, 1, 3)
print("9 in Q_3:", nine, "valuation", nine.valuation)
print("1/3 in Q_3 has valuation", from_rational(1, 3, 3).valuation)

# -3 in Q_5 is ...4442 in base 5
print("digits of -3 in Q_5:", from_rational(-3, 1, 5).digits()[:8])

# 2 + 3 = 5 carries into the valuation and costs one digit of precision
five = from_rational(2, 1, 5) + from_rational(3, 1, 5)
print("2 + 3 in Q_5: valuation", five.valuation, "relative precision", five.precision)

# cancellation leaves a zero known only up to an absolute bound
x = padic("7/11", 5)
z = x - x
print("x - x is zero:", z.is_zero, "exact:", z.is_exact_zero, "bound:", z.zero_bound)

# |x|_p as a power of p
print("v_5(125/3) =", norm_valuation(padic("125/3", 5)))

# square roots: -3 is a square in Q_7, the canonical root starts with digit 2
r, s = padic_sqrt(from_rational(-3, 1, 7))
print("sqrt(-3) in Q_7 starts", r.digits()[:6], "and its negative starts", s.digits()[:6])
print("r*r + 3 vanishes to", (r * r + 3).zero_bound, "digits")

# 3 has odd valuation in Q_3, 2 is not a residue mod 3, and 3 is not 1 mod 8 in Q_2
for value, p in ((3, 3), (2, 3), (3, 2)):
    try:
        padic_sqrt(from_rational(value, 1, p))
    except NoSquareRoot as exc:
        print(f"no sqrt of {value} in Q_{p}: {exc.condition}")
