"""Fast randomized property checks behind ``padic-potts self-test``.

The full suites live in the test directory; these are the same properties at
a smaller sample size, runnable from an installed package.
"""

from __future__ import annotations

import itertools
import random

from . import dynamics, phase, potts
from .errors import NoSquareRoot
from .padic import PadicNumber, from_rational, padic_sqrt


def _random_rational(rng: random.Random, p: int) -> PadicNumber:
    num = rng.randint(1, 10**6) * rng.choice((-1, 1))
    den = rng.randint(1, 10**4)
    return from_rational(num * p ** rng.randint(-3, 3), den, p)


def check_field_axioms(rng, samples):
    for _ in range(samples):
        p = rng.choice((2, 3, 5, 7, 13))
        x, y, z = (_random_rational(rng, p) for _ in range(3))
        if not ((x * y) * z).agrees_with(x * (y * z), 60):
            return False
        lhs, rhs = x * (y + z), x * y + x * z
        if not (lhs - rhs).is_zero:
            return False
    return True


def check_sqrt_residues(rng, samples):
    for p in (3, 5, 7, 13):
        squares = {a * a % p for a in range(1, p)}
        for a0 in range(1, p):
            try:
                padic_sqrt(from_rational(a0, 1, p))
                found = True
            except NoSquareRoot:
                found = False
            if found != (a0 in squares):
                return False
    return True


def check_sqrt_soundness(rng, samples):
    for _ in range(samples):
        p = rng.choice((2, 3, 5, 7, 13))
        a = _random_rational(rng, p)
        try:
            r, _ = padic_sqrt(a)
        except NoSquareRoot:
            continue
        if not (r * r - a).is_zero and (r * r - a).valuation < a.valuation + a.precision - 2:
            return False
    return True


def check_vieta(rng, samples):
    for p, q, N in itertools.product((3, 5, 7), range(1, 6), (-2, -1, 1, 2)):
        params = potts.ModelParams(p, q, N)
        rep = dynamics.fixed_points(params)
        if not rep.exists:
            continue
        s = params.number(-dynamics.quadratic_coefficient(params))
        if not (rep.x1 + rep.x2).agrees_with(s, params.K - 4):
            return False
        if not (rep.x1 * rep.x2).agrees_with(params.number(q * q), params.K - 4):
            return False
    return True


def check_norm_formula(rng, samples):
    for triple in ((3, 1, 1), (3, 1, -2), (7, 1, 1)):
        params = potts.ModelParams(*triple)
        for i in phase.MEASURES:
            if not phase.brute_force_cross_check(i, 2, params).ok:
                return False
    return True


def check_compatibility(rng, samples):
    params = potts.ModelParams(5, 5, 3)
    for i in phase.MEASURES:
        if not potts.compatibility_check(2, phase.invariant_field(i, params), params).passed:
            return False
    return True


CHECKS = {
    "field axioms": check_field_axioms,
    "square-root residues": check_sqrt_residues,
    "square-root soundness": check_sqrt_soundness,
    "fixed-point sum and product": check_vieta,
    "norm formula vs exhaustive sums": check_norm_formula,
    "compatibility of fixed-point fields": check_compatibility,
}


def run_all(seed: int = 0, samples: int = 200) -> list[dict]:
    out = []
    for name, fn in CHECKS.items():
        rng = random.Random(f"{seed}:{name}")
        out.append({"check": name, "passed": bool(fn(rng, samples))})
    return out
