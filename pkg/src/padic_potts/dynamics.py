"""The rational map governing translation-invariant boundary fields.

On the invariant line ``hat h = (1, .., h, .., 1)`` the tree recursion
collapses to ``h = f(h)`` with

    g(x) = (theta x + q) / (x + A),   f = g**2,   A = theta + q - 1.

Norms are reported as *norm exponents* ``e`` with ``|y|_p = p**e`` (so
``e = -valuation``); a value that vanishes at the working precision has
exponent ``None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    HypothesisNotMet,
    NoSquareRoot,
    NotAFixedPoint,
    NotARecursionSolution,
    PoleEncountered,
    PrecisionExhausted,
    RegimeMismatch,
)
from .padic import PadicNumber, is_quadratic_residue, padic_sqrt
from .potts import ModelParams
from .tree import direct_successors, level, vertex_label

ATTRACTIVE, NEUTRAL, REPELLING = "Attractive", "Neutral", "Repelling"


def _require_binary(params: ModelParams):
    if params.k != 2:
        raise ValueError("the fixed-point theory is for the binary tree (k = 2)")


def norm_exponent(y: PadicNumber):
    """``e`` with ``|y|_p = p**e``; None when ``y`` is zero at precision."""
    if y.is_zero:
        return None
    return -y.valuation


def shift(params: ModelParams) -> PadicNumber:
    """``A = theta + q - 1``."""
    return params.theta + (params.q - 1)


def pole(params: ModelParams) -> PadicNumber:
    """The pole ``1 - theta - q`` of ``f`` and ``g``."""
    return -shift(params)


# -- evaluators -------------------------------------------------------------------


def eval_g(x: PadicNumber, params: ModelParams) -> PadicNumber:
    den = x + shift(params)
    if den.is_zero:
        raise PoleEncountered(pole(params))
    return (params.theta * x + params.q) / den


def eval_f(x: PadicNumber, params: ModelParams) -> PadicNumber:
    g = eval_g(x, params)
    return g * g


def eval_f_prime(x: PadicNumber, params: ModelParams) -> PadicNumber:
    """``f'(x) = 2 (theta x + q)(theta - 1)(theta + q) / (x + A)**3``.

    Same closed form as ``g(x)**2 * 2(theta-1)(theta+q) / ((theta x+q)(x+A))``
    but without dividing by ``theta x + q``, which may vanish.
    """
    den = x + shift(params)
    if den.is_zero:
        raise PoleEncountered(pole(params))
    th, q = params.theta, params.q
    return 2 * (th * x + q) * (th - 1) * (th + q) / (den * den * den)


def eval_g_inverse(x: PadicNumber, params: ModelParams) -> PadicNumber:
    den = params.theta - x
    if den.is_zero:
        raise PoleEncountered(params.theta)
    return (shift(params) * x - params.q) / den


def eval_eta(x: PadicNumber, y: PadicNumber, params: ModelParams) -> PadicNumber:
    """``A theta (x+y) + 2 theta x y + 2 q A + q (x+y)``."""
    th, q, A = params.theta, params.q, shift(params)
    s = x + y
    return A * th * s + 2 * th * x * y + 2 * q * A + q * s


# -- fixed points -------------------------------------------------------------------


def discriminant_fraction(params: ModelParams) -> Fraction:
    """``theta**2 - 2 theta - 4q + 1`` as an exact rational."""
    th = params.theta_fraction
    return th * th - 2 * th - 4 * params.q + 1


def quadratic_coefficient(params: ModelParams) -> Fraction:
    """``b`` in ``x**2 + b x + q**2 = 0``, the non-trivial fixed points."""
    th = params.theta_fraction
    return 2 * th - th * th + 2 * params.q - 1


def theorem_existence_predicate(p: int, q: int, N: int):
    """Existence of the non-trivial fixed points as read off the digit
    criteria of the existence theorems.

    True / False where those criteria decide, None in the undecided zone
    (p = 3 with q = 1 mod 3 and q >= 2).
    """
    if N < 0:
        return (-N) % 2 == 0
    k0 = q % p
    if q == 1:
        if p == 2:
            return False
        if p == 3:
            return N == 1
        return is_quadratic_residue(-3 % p, p)
    if p == 2:
        return k0 == 0
    if p == 3:
        return {0: True, 2: False}.get(k0)
    if k0 == 0:
        return True
    if (1 - 4 * k0) % p == 0:
        return False
    return is_quadratic_residue((1 - 4 * k0) % p, p)


@dataclass
class PointInfo:
    value: PadicNumber
    norm: int | None
    theta_x_plus_q: int | None
    x_plus_A: int | None
    multiplier_norm_exponent: int | None
    cls: str | None

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "norms": {"x": self.norm, "theta_x_plus_q": self.theta_x_plus_q, "x_plus_A": self.x_plus_A},
            "multiplier_norm_exponent": self.multiplier_norm_exponent,
            "class": self.cls,
        }


@dataclass
class FixedPointReport:
    params: ModelParams
    discriminant: PadicNumber
    exists: bool
    reason: str
    degenerate: bool
    labeling: str
    points: dict = field(default_factory=dict)
    theorem_predicate: bool | None = None

    @property
    def x0(self) -> PadicNumber:
        return self.points["x0"].value

    @property
    def x1(self) -> PadicNumber | None:
        return self.points["x1"].value if "x1" in self.points else None

    @property
    def x2(self) -> PadicNumber | None:
        return self.points["x2"].value if "x2" in self.points else None

    def value(self, label: str) -> PadicNumber:
        if label not in self.points:
            raise KeyError(f"fixed point {label} does not exist for {self.params.to_json()}")
        return self.points[label].value

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "discriminant": self.discriminant.to_json(),
            "discriminant_rational": str(discriminant_fraction(self.params)),
            "exists": self.exists,
            "reason": self.reason,
            "degenerate": self.degenerate,
            "labeling": self.labeling,
            "theorem_predicate": self.theorem_predicate,
            "points": {k: v.to_json() for k, v in sorted(self.points.items())},
        }


def classify_multiplier(e: int | None) -> str | None:
    if e is None:
        return ATTRACTIVE  # f'(x*) = 0 at precision: superattracting
    return ATTRACTIVE if e < 0 else NEUTRAL if e == 0 else REPELLING


def _point_info(x: PadicNumber, params: ModelParams) -> PointInfo:
    fp = eval_f_prime(x, params)
    e = norm_exponent(fp)
    return PointInfo(
        x,
        norm_exponent(x),
        norm_exponent(params.theta * x + params.q),
        norm_exponent(x + shift(params)),
        e,
        classify_multiplier(e),
    )


def _nontrivial_roots(params: ModelParams, root: PadicNumber):
    """Both roots of ``x**2 + b x + q**2`` given a square root of D.

    The root whose numerator involves no cancellation is computed directly,
    the other one through the product ``x1 x2 = q**2``.
    """
    b = params.number(quadratic_coefficient(params))
    s = (params.theta - 1) * root
    plus, minus = -b + s, -b - s
    q2 = params.number(params.q * params.q)
    if plus.is_zero or (not minus.is_zero and minus.valuation < plus.valuation):
        r_minus = minus / 2
        return q2 / r_minus, r_minus
    r_plus = plus / 2
    return r_plus, q2 / r_plus


def fixed_points(params: ModelParams) -> FixedPointReport:
    _require_binary(params)
    D = discriminant_fraction(params)
    disc = params.number(D)
    pred = theorem_existence_predicate(params.p, params.q, params.N)
    points = {"x0": _point_info(params.number(1), params)}
    if D == 0:
        x = params.number(-quadratic_coefficient(params) / 2)
        info = _point_info(x, params)
        points["x1"] = info
        points["x2"] = info
        return FixedPointReport(params, disc, True, "discriminant is zero", True, "double root", points, pred)
    try:
        root, _ = padic_sqrt(disc)
    except NoSquareRoot as exc:
        return FixedPointReport(params, disc, False, exc.condition, False, "none", points, pred)
    r_plus, r_minus = _nontrivial_roots(params, root)
    q_val = params.number(params.q).valuation
    if params.ferromagnetic and q_val > 0:
        labeling = "x1 has the smaller norm"
        x1, x2 = (r_plus, r_minus) if r_plus.valuation > r_minus.valuation else (r_minus, r_plus)
    elif not params.ferromagnetic:
        labeling = "x1 has the larger norm"
        x1, x2 = (r_plus, r_minus) if r_plus.valuation < r_minus.valuation else (r_minus, r_plus)
    else:
        labeling = "canonical square-root branch"
        x1, x2 = r_plus, r_minus
    points["x1"] = _point_info(x1, params)
    points["x2"] = _point_info(x2, params)
    return FixedPointReport(params, disc, True, "square root exists", False, labeling, points, pred)


# -- classification and orbits ------------------------------------------------------


@dataclass
class Classification:
    cls: str
    multiplier_norm_exponent: int | None

    def to_json(self) -> dict:
        return {"class": self.cls, "multiplier_norm_exponent": self.multiplier_norm_exponent}


def _close(a: PadicNumber, b: PadicNumber, threshold: int) -> bool:
    d = a - b
    return d.is_zero or d.valuation >= threshold


def classify_fixed_point(x_star: PadicNumber, params: ModelParams) -> Classification:
    """Class of a fixed point from ``|f'(x*)|_p``."""
    threshold = math.ceil(params.K / 2)
    if not _close(eval_f(x_star, params), x_star, threshold):
        raise NotAFixedPoint(f"|f(x) - x|_p exceeds p^-{threshold}")
    e = norm_exponent(eval_f_prime(x_star, params))
    return Classification(classify_multiplier(e), e)


@dataclass
class OrbitResult:
    verdict: str  # ConvergedTo | Cycle | PoleHit | Undecided
    steps: int
    target: str | None = None
    period: int | None = None
    trajectory: list = field(default_factory=list)

    @property
    def norm_exponents(self) -> list:
        return [norm_exponent(x) for x in self.trajectory]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "steps": self.steps,
            "target": self.target,
            "period": self.period,
            "norm_exponents": self.norm_exponents,
        }


def iterate_orbit(
    x_start: PadicNumber,
    params: ModelParams,
    max_iter: int,
    fixed: dict | None = None,
) -> OrbitResult:
    """Iterate ``f`` from ``x_start`` until it settles near a known fixed
    point (within ``p**-ceil(K/2)``), revisits a value, hits the pole, or
    ``max_iter`` steps pass."""
    if fixed is None:
        report = fixed_points(params)
        fixed = {k: v.value for k, v in report.points.items()}
    threshold = math.ceil(params.K / 2)
    x = x_start
    traj = [x]
    seen = {x: 0}
    for step in range(max_iter + 1):
        for label, xs in sorted(fixed.items()):
            if _close(x, xs, threshold):
                return OrbitResult("ConvergedTo", step, label, trajectory=traj)
        if step == max_iter:
            break
        try:
            x = eval_f(x, params)
        except PoleEncountered:
            return OrbitResult("PoleHit", step, trajectory=traj)
        except PrecisionExhausted:
            break
        traj.append(x)
        if x in seen:
            return OrbitResult("Cycle", step + 1, period=step + 1 - seen[x], trajectory=traj)
        seen[x] = step + 1
    return OrbitResult("Undecided", len(traj) - 1, trajectory=traj)


# -- basins ---------------------------------------------------------------------------

IN_BASIN, OUTSIDE, EXCLUDED = "InProvenBasin", "OutsideProvenRegion", "Excluded"


def ferro_regime(params: ModelParams) -> bool:
    """``|q|_p < 1`` and ``|theta|_p <= |q|_p**2``."""
    v_q = params.number(params.q).valuation
    return params.N > 0 and v_q > 0 and params.N >= 2 * v_q


def _ferro_basin(x: PadicNumber, params: ModelParams, report, depth_cap: int) -> str:
    v_q = params.number(params.q).valuation
    x2 = report.value("x2")
    y = x
    for _ in range(depth_cap + 1):
        if y.is_zero or y.valuation != 0:
            return IN_BASIN
        for centre in (params.number(1), x2):
            d = y - centre
            if d.is_zero:
                continue
            if centre == 1 and d.valuation < v_q:
                return IN_BASIN  # |y - 1| > |q|
            if v_q < d.valuation < 2 * v_q:
                return IN_BASIN  # |q|^2 < |y - centre| < |q|
        try:
            y = eval_f(y, params)
        except PoleEncountered:
            return EXCLUDED
    return OUTSIDE


def _antiferro_basin(x: PadicNumber, params: ModelParams, target: str, depth_cap: int) -> str:
    if x.is_zero or x.valuation > 0:
        return IN_BASIN if target == "x2" else OUTSIDE
    if x.valuation == 0 or target == "x2":
        return OUTSIDE
    y = x
    for _ in range(depth_cap + 1):
        if y.valuation < params.N:  # |y| > |theta|: the orbit stays on |y| = |theta|^2
            return IN_BASIN
        try:
            y = eval_f(y, params)
        except PoleEncountered:
            return EXCLUDED
    return OUTSIDE


def basin_predicate(x: PadicNumber, params: ModelParams, target: str, depth_cap: int = 32) -> str:
    """Membership of ``x`` in the proven part of the basin of ``target``.

    Regions are tested by norms, and the preimage sets by iterating at most
    ``depth_cap`` times; anything not settled that way is OutsideProvenRegion.
    """
    if target not in ("x1", "x2"):
        raise ValueError("target must be 'x1' or 'x2'")
    report = fixed_points(params)
    if not report.exists:
        raise RegimeMismatch("the non-trivial fixed points do not exist")
    if params.ferromagnetic:
        if not ferro_regime(params):
            raise RegimeMismatch("basins are proven for |q|_p < 1 and |theta|_p <= |q|_p^2")
        if target == "x2":
            return OUTSIDE
        return _ferro_basin(x, params, report, depth_cap)
    return _antiferro_basin(x, params, target, depth_cap)


# -- rigidity of recursion solutions on the invariant line -------------------------


def field_from_leaves(leaves: dict, params: ModelParams) -> dict:
    """Solution of ``h_x = g(h_(x,1)) g(h_(x,2))`` on levels ``1..n`` grown
    upward from the values on level ``n``."""
    depth = len(next(iter(leaves)))
    h = dict(leaves)
    for m in range(depth - 1, 0, -1):
        for x in level(params.k, m):
            a, b = direct_successors(x, params.k)
            h[x] = eval_g(h[a], params) * eval_g(h[b], params)
    return h


def field_from_root(level_one: dict, depth: int, params: ModelParams, split) -> dict:
    """Solution grown downward: for each vertex the value ``g(h_(x,1))`` is
    chosen by ``split(h_x)``, the sibling's ``g`` value is ``h_x / split``,
    and both children are recovered through ``g**-1``."""
    h = dict(level_one)
    for m in range(1, depth):
        for x in level(params.k, m):
            c = split(h[x])
            a, b = direct_successors(x, params.k)
            h[a] = eval_g_inverse(c, params)
            h[b] = eval_g_inverse(h[x] / c, params)
    return h


@dataclass
class RigidityReport:
    verdict: str  # Rigid | ContractionViolated | Unverified
    target: str
    rate_exponent: int
    distances: list
    checked_levels: list

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "target": self.target,
            "rate_exponent": self.rate_exponent,
            "distances": self.distances,
            "checked_levels": self.checked_levels,
        }


def field_rigidity_check(h: dict, params: ModelParams, digits: int | None = None) -> RigidityReport:
    """Check that a finite-depth invariant-line solution is pulled toward the
    fixed point its norms single out, at the proven per-level rate.

    ``distances[m-1]`` is the norm exponent of ``max_{x in W_m} |h_x - x*|``
    (None when every difference vanishes).  Level ``m`` is checked against
    level ``m+1`` whenever the children satisfy the estimate's hypotheses.
    """
    _require_binary(params)
    digits = params.K - 8 if digits is None else digits
    depth = max(len(x) for x in h)
    for m in range(1, depth):
        for x in level(params.k, m):
            a, b = direct_successors(x, params.k)
            rhs = eval_g(h[a], params) * eval_g(h[b], params)
            if not h[x].agrees_with(rhs, digits):
                raise NotARecursionSolution(f"recursion fails at vertex {vertex_label(x)}")
    vals = [v.valuation if not v.is_zero else math.inf for v in h.values()]
    report = fixed_points(params)
    if params.ferromagnetic:
        if not ferro_regime(params):
            raise HypothesisNotMet("needs |q|_p < 1 and |theta|_p <= |q|_p^2")
        if any(v == 0 for v in vals):
            raise HypothesisNotMet("some |h_x|_p equals 1")
        target = "x1"
        rate = -2 * params.number(params.q).valuation
        admissible = lambda v: v > 0  # noqa: E731
    else:
        if not report.exists:
            raise HypothesisNotMet("the non-trivial fixed points do not exist")
        nbar = -params.N
        rate = -nbar
        if all(v > 0 for v in vals):
            target = "x2"
            admissible = lambda v: v >= nbar  # noqa: E731
        elif all(v < 0 for v in vals):
            target = "x1"
            admissible = lambda v: v <= -2 * nbar  # noqa: E731
        else:
            raise HypothesisNotMet("need all |h_x|_p < 1 or all |h_x|_p > 1")
    xs = report.value(target)

    def level_distance(m):
        diffs = [h[x] - xs for x in level(params.k, m)]
        vs = [d.valuation for d in diffs if not d.is_zero]
        return -min(vs) if vs else None

    distances = [level_distance(m) for m in range(1, depth + 1)]
    checked, ok = [], True
    for m in range(1, depth):
        children = level(params.k, m + 1)
        if not all(admissible(h[y].valuation if not h[y].is_zero else math.inf) for y in children):
            continue
        checked.append(m)
        upper, lower = distances[m - 1], distances[m]
        if upper is None:
            continue
        if lower is None or upper > rate + lower:
            ok = False
    verdict = "Rigid" if ok and (checked or all(d is None for d in distances)) else (
        "ContractionViolated" if not ok else "Unverified"
    )
    return RigidityReport(verdict, target, rate, distances, checked)


__all__ = [
    "ATTRACTIVE",
    "NEUTRAL",
    "REPELLING",
    "IN_BASIN",
    "OUTSIDE",
    "EXCLUDED",
    "Classification",
    "FixedPointReport",
    "OrbitResult",
    "PointInfo",
    "RigidityReport",
    "basin_predicate",
    "classify_fixed_point",
    "discriminant_fraction",
    "eval_eta",
    "eval_f",
    "eval_f_prime",
    "eval_g",
    "eval_g_inverse",
    "ferro_regime",
    "field_from_leaves",
    "field_from_root",
    "field_rigidity_check",
    "fixed_points",
    "iterate_orbit",
    "norm_exponent",
    "pole",
    "quadratic_coefficient",
    "shift",
    "theorem_existence_predicate",
]
