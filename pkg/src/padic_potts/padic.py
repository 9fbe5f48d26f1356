"""Exact arithmetic in Q_p under a capped-relative-precision model.

A nonzero element is stored as ``p**valuation * unit`` where ``unit`` is a
p-adic unit known modulo ``p**precision``.  Values that cancel to all known
digits become *zero at precision* and remember the absolute bound ``m`` below
which they are known to vanish (``x = O(p**m)``).  An *exact* zero only comes
from exact input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import (
    DivisionByZero,
    NoSquareRoot,
    PrecisionExhausted,
    PrimeMismatch,
    ZeroAtPrecision,
)

__all__ = [
    "PrecisionConfig",
    "DEFAULT_CONFIG",
    "PadicNumber",
    "from_rational",
    "padic",
    "norm_valuation",
    "padic_sqrt",
    "sqrt_mod_prime",
    "is_quadratic_residue",
    "valuation_of_int",
]


@dataclass(frozen=True)
class PrecisionConfig:
    """Cap ``K`` on relative precision, in p-adic digits."""

    K: int = 64

    def __post_init__(self):
        if self.K < 8:
            raise ValueError(f"precision cap K must be >= 8, got {self.K}")


DEFAULT_CONFIG = PrecisionConfig()


def valuation_of_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _split(n: int, p: int) -> tuple[int, int]:
    v = valuation_of_int(n, p)
    return v, n // p**v


class PadicNumber:
    """Element of Q_p at capped relative precision.  Immutable."""

    __slots__ = ("prime", "valuation", "unit", "precision", "_exact_zero")

    def __init__(self, prime: int, valuation: int, unit: int, precision: int):
        # Normalizing constructor: strips p-factors out of ``unit`` and turns
        # full cancellation into zero-at-precision.
        if precision < 1:
            raise PrecisionExhausted(f"relative precision {precision} < 1")
        mod = prime**precision
        unit %= mod
        if unit == 0:
            self._set(prime, valuation + precision, 0, 0, False)
            return
        t = 0
        while unit % prime == 0:
            unit //= prime
            t += 1
        self._set(prime, valuation + t, unit, precision - t, False)

    def _set(self, prime, valuation, unit, precision, exact_zero):
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "_exact_zero", exact_zero)

    def __setattr__(self, name, value):
        raise AttributeError("PadicNumber is immutable")

    @classmethod
    def _raw(cls, prime, valuation, unit, precision, exact_zero=False):
        obj = object.__new__(cls)
        obj._set(prime, valuation, unit, precision, exact_zero)
        return obj

    @classmethod
    def zero(cls, prime: int, bound: int | None = None) -> "PadicNumber":
        """``O(p**bound)``, or the exact zero when ``bound`` is None."""
        if bound is None:
            return cls._raw(prime, 0, 0, 0, True)
        return cls._raw(prime, bound, 0, 0, False)

    @classmethod
    def power_of_p(cls, prime: int, exponent: int, cfg: PrecisionConfig = DEFAULT_CONFIG):
        return cls._raw(prime, exponent, 1, cfg.K)

    # -- predicates -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def is_exact_zero(self) -> bool:
        return self._exact_zero

    @property
    def zero_bound(self) -> int | None:
        """Absolute bound ``m`` of a zero-at-precision value, else None."""
        if self.unit == 0 and not self._exact_zero:
            return self.valuation
        return None

    @property
    def absolute_precision(self) -> float:
        if self._exact_zero:
            return math.inf
        return self.valuation + self.precision

    # -- conversion -----------------------------------------------------------

    def digits(self) -> list[int]:
        """Base-p digits of the unit part, little-endian."""
        out, u = [], self.unit
        for _ in range(self.precision):
            u, d = divmod(u, self.prime)
            out.append(d)
        return out

    def to_json(self) -> dict:
        if self.is_zero:
            return {
                "prime": self.prime,
                "zero": True,
                "zero_bound": self.zero_bound,
            }
        return {
            "prime": self.prime,
            "valuation": self.valuation,
            "unit_digits": self.digits(),
            "rel_precision": self.precision,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PadicNumber":
        p = data["prime"]
        if data.get("zero"):
            return cls.zero(p, data.get("zero_bound"))
        unit = sum(d * p**i for i, d in enumerate(data["unit_digits"]))
        if unit % p == 0:
            raise ValueError("leading unit digit must be nonzero")
        return cls(p, data["valuation"], unit, data["rel_precision"])

    def to_fraction(self) -> Fraction:
        """Rational representative ``p**v * u`` with ``0 <= u < p**r``."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.valuation

    def __repr__(self):
        p = self.prime
        if self._exact_zero:
            return f"PadicNumber(0, p={p})"
        if self.is_zero:
            return f"O({p}^{self.valuation})"
        shown = self.digits()[:8]
        body = " + ".join(f"{d}*{p}^{i}" for i, d in enumerate(shown))
        tail = " + ..." if self.precision > len(shown) else ""
        return f"{p}^{self.valuation} * ({body}{tail}) + O({p}^{self.absolute_precision})"

    # -- equality -------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = self._coerce(other)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.valuation == other.valuation
            and self.unit == other.unit
            and self.precision == other.precision
            and self._exact_zero == other._exact_zero
        )

    def __hash__(self):
        return hash((self.prime, self.valuation, self.unit, self.precision, self._exact_zero))

    def agrees_with(self, other, digits: int) -> bool:
        """True when ``self - other`` vanishes to ``digits`` digits relative to
        the larger of the two magnitudes."""
        other = self._coerce(other)
        diff = self - other
        if diff.is_exact_zero:
            return True
        scale = min(
            (t.valuation for t in (self, other) if not t.is_zero),
            default=None,
        )
        if scale is None:
            return True
        return diff.valuation >= scale + digits

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise PrimeMismatch(f"cannot combine Q_{self.prime} and Q_{other.prime}")
            return other
        if isinstance(other, (int, Rational)):
            # exact constants: never the limiting factor of a result's precision
            cap = max(self.precision, DEFAULT_CONFIG.K)
            return from_rational(other, 1, self.prime, PrecisionConfig(cap))
        raise TypeError(f"cannot coerce {type(other).__name__} to PadicNumber")

    def __add__(self, other):
        try:
            y = self._coerce(other)
        except TypeError:
            return NotImplemented
        p = self.prime
        if self._exact_zero:
            return y
        if y._exact_zero:
            return self
        A = min(self.absolute_precision, y.absolute_precision)
        terms = [t for t in (self, y) if not t.is_zero]
        if not terms:
            return PadicNumber.zero(p, A)
        v = min(t.valuation for t in terms)
        if A <= v:
            return PadicNumber.zero(p, A)
        s = sum(t.unit * p ** (t.valuation - v) for t in terms if t.valuation < A)
        return PadicNumber(p, v, s, A - v)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        mod = self.prime**self.precision
        return PadicNumber._raw(self.prime, self.valuation, (-self.unit) % mod, self.precision)

    def __sub__(self, other):
        try:
            y = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-y)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        try:
            y = self._coerce(other)
        except TypeError:
            return NotImplemented
        p = self.prime
        if self._exact_zero or y._exact_zero:
            return PadicNumber.zero(p)
        if self.is_zero or y.is_zero:
            return PadicNumber.zero(p, self.valuation + y.valuation)
        r = min(self.precision, y.precision)
        return PadicNumber._raw(p, self.valuation + y.valuation, (self.unit * y.unit) % p**r, r)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_zero:
            raise DivisionByZero("division by a value that is zero at precision")
        mod = self.prime**self.precision
        return PadicNumber._raw(self.prime, -self.valuation, pow(self.unit, -1, mod), self.precision)

    def __truediv__(self, other):
        try:
            y = self._coerce(other)
        except TypeError:
            return NotImplemented
        if y.is_zero:
            raise DivisionByZero("division by a value that is zero at precision")
        if self._exact_zero:
            return self
        if self.is_zero:
            return PadicNumber.zero(self.prime, self.valuation - y.valuation)
        r = min(self.precision, y.precision)
        mod = self.prime**r
        unit = (self.unit * pow(y.unit, -1, mod)) % mod
        return PadicNumber._raw(self.prime, self.valuation - y.valuation, unit, r)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PadicNumber._raw(self.prime, 0, 1, max(self.precision, 1))
        if self._exact_zero:
            return self
        if self.is_zero:
            return PadicNumber.zero(self.prime, self.valuation * n)
        mod = self.prime**self.precision
        return PadicNumber._raw(self.prime, self.valuation * n, pow(self.unit, n, mod), self.precision)


def from_rational(num, den=1, p: int = 2, cfg: PrecisionConfig = DEFAULT_CONFIG) -> PadicNumber:
    """Canonical image of ``num/den`` in Q_p at relative precision ``cfg.K``."""
    frac = Fraction(num) / Fraction(den) if den != 0 else None
    if frac is None:
        raise DivisionByZero("denominator is zero")
    if frac == 0:
        return PadicNumber.zero(p)
    vn, un = _split(frac.numerator, p)
    vd, ud = _split(frac.denominator, p)
    mod = p**cfg.K
    unit = (un * pow(ud, -1, mod)) % mod
    return PadicNumber._raw(p, vn - vd, unit, cfg.K)


def padic(value, p: int, cfg: PrecisionConfig = DEFAULT_CONFIG) -> PadicNumber:
    """Build a PadicNumber from an int, Fraction, PadicNumber or ``"a/b"`` string."""
    if isinstance(value, PadicNumber):
        return value
    if isinstance(value, str):
        value = Fraction(value)
    return from_rational(value, 1, p, cfg)


def norm_valuation(x: PadicNumber) -> int:
    """Exponent ``e`` with ``|x|_p = p**-e``."""
    if x.is_zero:
        raise ZeroAtPrecision(f"norm of {x!r} is undecidable at this precision")
    return x.valuation


# -- square roots -------------------------------------------------------------


def is_quadratic_residue(a: int, p: int) -> bool:
    """Whether ``a`` (coprime to odd ``p``) is a square mod p (Euler's criterion)."""
    a %= p
    if p == 2:
        return a == 1
    return pow(a, (p - 1) // 2, p) == 1


def sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of the residue ``a`` mod odd prime ``p`` (Tonelli-Shanks)."""
    a %= p
    if not is_quadratic_residue(a, p):
        raise ValueError(f"{a} is not a quadratic residue mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while is_quadratic_residue(z, p):
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 1, t * t % p
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def _hensel_lift_odd(u: int, r0: int, p: int, prec: int) -> int:
    # Newton step r <- r - (r^2 - u)/(2r); each pass doubles the known digits.
    r, known = r0 % p, 1
    while known < prec:
        known = min(2 * known, prec)
        mod = p**known
        r = (r - (r * r - u) * pow(2 * r, -1, mod)) % mod
    return r


def _lift_dyadic(u: int, prec: int) -> int:
    # x^2 = u (mod 2^k) with u = 1 (mod 8); fix one bit per step.
    x = 1
    for k in range(3, prec):
        if (x * x - u) % 2 ** (k + 1):
            x += 2 ** (k - 1)
    return x % 2 ** (prec - 1)


def padic_sqrt(a: PadicNumber) -> tuple[PadicNumber, PadicNumber]:
    """Both square roots of ``a``, canonical branch first.

    The canonical root has leading digit in ``1..(p-1)/2`` for odd p and is
    1 mod 4 for p = 2.
    """
    p = a.prime
    if a.is_exact_zero:
        return a, a
    if a.is_zero:
        raise ZeroAtPrecision("square root of a value that is zero at precision")
    if a.valuation % 2:
        raise NoSquareRoot("valuation odd", a)
    half = a.valuation // 2
    if p == 2:
        if a.precision < 3:
            raise PrecisionExhausted("need three known digits to decide a 2-adic square")
        if a.unit % 8 != 1:
            raise NoSquareRoot("a1, a2 not both zero", a)
        r = _lift_dyadic(a.unit, a.precision)
        prec = a.precision - 1
        if r % 4 != 1:
            r = (-r) % 2**prec
    else:
        a0 = a.unit % p
        if not is_quadratic_residue(a0, p):
            raise NoSquareRoot("leading digit not a quadratic residue", a)
        prec = a.precision
        r = _hensel_lift_odd(a.unit, sqrt_mod_prime(a0, p), p, prec)
        if r % p > (p - 1) // 2:
            r = (-r) % p**prec
    root = PadicNumber._raw(p, half, r, prec)
    return root, -root
