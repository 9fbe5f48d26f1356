"""Finite-volume p-adic quasi Gibbs measures of the (q+1)-state Potts model.

The weight of a configuration ``sigma`` on ``V_n`` is

    p**H_n(sigma) * prod_{x in W_n} h[sigma(x), x],   H_n = N * #{equal edges},

and ``mu_n(sigma) = weight / Z_n``.  Sums over configuration spaces are done
exhaustively, grouped into :class:`~padic_potts.tree.ConfigurationClass`
buckets so that each distinct weight is computed once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .errors import (
    DegeneratePartitionFunction,
    NotARecursionSolution,
    SingularRecursion,
)
from .padic import DEFAULT_CONFIG, PadicNumber, PrecisionConfig, padic
from .tree import (
    DEFAULT_ENUMERATION_CAP,
    Configuration,
    Vertex,
    configuration_classes,
    direct_successors,
    enumerate_configurations,
    level,
    matched_edges,
    vertex_label,
)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class ModelParams:
    """Model configuration; ``theta = p**N`` is derived."""

    p: int
    q: int
    N: int
    k: int = 2
    cfg: PrecisionConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.N == 0:
            raise ValueError("coupling N must be nonzero")
        if self.k < 1:
            raise ValueError("branching k must be >= 1")

    @property
    def K(self) -> int:
        return self.cfg.K

    @property
    def ferromagnetic(self) -> bool:
        return self.N > 0

    @property
    def theta_fraction(self) -> Fraction:
        return Fraction(self.p) ** self.N

    @cached_property
    def theta(self) -> PadicNumber:
        return PadicNumber.power_of_p(self.p, self.N, self.cfg)

    def number(self, value) -> PadicNumber:
        """Coerce an int, Fraction or ``"a/b"`` string into Q_p at this precision."""
        return padic(value, self.p, self.cfg)

    def p_power(self, exponent: int) -> PadicNumber:
        return PadicNumber.power_of_p(self.p, exponent, self.cfg)

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "N": self.N, "k": self.k, "K": self.K}


class BoundaryField:
    """Vectors ``h_x = (h_0x, ..., h_qx)`` on the non-root vertices.

    A translation-invariant field stores a single vector; otherwise the
    field is an explicit map from vertex to vector.
    """

    def __init__(self, q: int, uniform=None, values: dict | None = None):
        if (uniform is None) == (values is None):
            raise ValueError("give exactly one of uniform / values")
        self.q = q
        self.uniform = tuple(uniform) if uniform is not None else None
        self.values = {tuple(x): tuple(v) for x, v in values.items()} if values is not None else None
        for vec in ([self.uniform] if self.uniform else self.values.values()):
            if len(vec) != q + 1:
                raise ValueError(f"field vectors need {q + 1} entries")

    @classmethod
    def translation_invariant(cls, vector) -> "BoundaryField":
        return cls(len(vector) - 1, uniform=vector)

    @classmethod
    def invariant_line(cls, value, params: ModelParams, position: int = 1, h0=1) -> "BoundaryField":
        """Translation-invariant field with ``hat h = (1, .., value, .., 1)``,
        ``value`` sitting at ``position`` (1-based)."""
        if not 1 <= position <= params.q:
            raise ValueError(f"position must lie in 1..{params.q}")
        h0 = params.number(h0)
        value = params.number(value)
        vec = [h0] * (params.q + 1)
        vec[position] = h0 * value
        return cls.translation_invariant(vec)

    @classmethod
    def per_vertex(cls, q: int, mapping: dict) -> "BoundaryField":
        return cls(q, values=mapping)

    def at(self, x: Vertex) -> tuple:
        if self.uniform is not None:
            return self.uniform
        try:
            return self.values[tuple(x)]
        except KeyError:
            raise KeyError(f"boundary field undefined at vertex {vertex_label(x)}") from None

    def hat(self, x: Vertex) -> tuple:
        return normalize(self.at(x))

    def to_json(self) -> dict:
        if self.uniform is not None:
            return {"uniform": [h.to_json() for h in self.uniform]}
        return {vertex_label(x): [h.to_json() for h in v] for x, v in sorted(self.values.items())}


def normalize(h) -> tuple:
    """``hat h_i = h_i / h_0`` for ``i = 1..q``."""
    h0 = h[0]
    if h0.is_zero:
        raise SingularRecursion("h_0 is zero at precision; cannot normalize")
    return tuple(hi / h0 for hi in h[1:])


# -- energies and weights ---------------------------------------------------------


def hamiltonian(sigma: Configuration, params: ModelParams) -> int:
    return params.N * matched_edges(sigma.spins, sigma.k, sigma.depth)


def _leaf_product(h: BoundaryField, n: int, leaf_spins, k: int) -> PadicNumber:
    out = None
    for x, s in zip(level(k, n), leaf_spins):
        term = h.at(x)[s]
        out = term if out is None else out * term
    return out


def weight(sigma: Configuration, h: BoundaryField, params: ModelParams) -> PadicNumber:
    leaf = _leaf_product(h, sigma.depth, sigma.leaf_spins(), sigma.k)
    return params.p_power(hamiltonian(sigma, params)) * leaf


def partition_function_bruteforce(
    n: int, h: BoundaryField, params: ModelParams, cap: int = DEFAULT_ENUMERATION_CAP
) -> PadicNumber:
    """``Z_n`` summed over every configuration of Omega_{V_n}."""
    total = PadicNumber.zero(params.p)
    for cls in configuration_classes(n, params.q, params.k, cap):
        w = params.p_power(params.N * cls.matches) * _leaf_product(h, n, cls.leaves, params.k)
        total = total + cls.count * w
    return total


def child_factor(x: Vertex, spin: int, h: BoundaryField, params: ModelParams) -> PadicNumber:
    """``prod_{y in S(x)} sum_j p**(N delta(spin, j)) h_{j,y}``."""
    out = None
    for y in direct_successors(x, params.k):
        hy = h.at(y)
        s = hy[0]
        for hj in hy[1:]:
            s = s + hj
        s = s + (params.theta - 1) * hy[spin]
        out = s if out is None else out * s
    return out


def _extended_weights(n: int, h: BoundaryField, params: ModelParams, cap: int):
    """For each class of Omega_{V_{n-1}}: the weight at depth n-1 and the
    summed weight of all its extensions to depth n."""
    k, q = params.k, params.q
    if n == 1:
        # V_0 carries no spins: one empty configuration, no edges to the root.
        z = None
        for y in level(k, 1):
            s = h.at(y)[0]
            for hj in h.at(y)[1:]:
                s = s + hj
            z = s if z is None else z * s
        return [(None, params.number(1), z)]
    factors = {}
    for x in level(k, n - 1):
        for s in range(q + 1):
            factors[x, s] = child_factor(x, s, h, params)
    out = []
    for cls in configuration_classes(n - 1, q, k, cap):
        energy = params.p_power(params.N * cls.matches)
        own = energy * _leaf_product(h, n - 1, cls.leaves, k)
        ext = energy
        for x, s in zip(level(k, n - 1), cls.leaves):
            ext = ext * factors[x, s]
        out.append((cls, own, ext))
    return out


def partition_function(
    n: int, h: BoundaryField, params: ModelParams, cap: int = DEFAULT_ENUMERATION_CAP
) -> PadicNumber:
    """``Z_n``, summing over Omega_{V_{n-1}} with the last level summed out
    vertex by vertex.  Feasible one level deeper than the brute-force sum."""
    total = PadicNumber.zero(params.p)
    for cls, _, ext in _extended_weights(n, h, params, cap):
        total = total + (cls.count if cls else 1) * ext
    return total


@dataclass
class MeasureValue:
    weight: PadicNumber
    Z: PadicNumber
    mu: PadicNumber


def finite_volume_measure(
    sigma: Configuration, h: BoundaryField, params: ModelParams, Z: PadicNumber | None = None
) -> MeasureValue:
    if Z is None:
        Z = partition_function_bruteforce(sigma.depth, h, params)
    if Z.is_zero:
        raise DegeneratePartitionFunction(f"Z_{sigma.depth} is zero at precision")
    w = weight(sigma, h, params)
    return MeasureValue(w, Z, w / Z)


def measure_values(n: int, h: BoundaryField, params: ModelParams, cap: int = DEFAULT_ENUMERATION_CAP):
    """``(class, mu)`` for every configuration class of Omega_{V_n}."""
    classes = configuration_classes(n, params.q, params.k, cap)
    weights = [
        params.p_power(params.N * c.matches) * _leaf_product(h, n, c.leaves, params.k) for c in classes
    ]
    Z = PadicNumber.zero(params.p)
    for c, w in zip(classes, weights):
        Z = Z + c.count * w
    if Z.is_zero:
        raise DegeneratePartitionFunction(f"Z_{n} is zero at precision")
    return [(c, w / Z) for c, w in zip(classes, weights)]


# -- compatibility ----------------------------------------------------------------


@dataclass
class CompatibilityReport:
    depth: int
    tol_exponent: int
    max_violation_exponent: float
    passed: bool
    configurations: int
    failures: list = field(default_factory=list)
    precision_floor: float = math.inf

    def to_json(self) -> dict:
        def finite(e):
            return None if e == math.inf else e

        return {
            "depth": self.depth,
            "tol_exponent": self.tol_exponent,
            "passed": self.passed,
            "configurations": self.configurations,
            "max_violation_exponent": finite(self.max_violation_exponent),
            "precision_floor": finite(self.precision_floor),
            "failures": self.failures,
        }


def compatibility_check(
    n: int,
    h: BoundaryField,
    params: ModelParams,
    tol_exponent: int | None = None,
    exhaustive: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
    max_failures: int = 5,
) -> CompatibilityReport:
    """Check ``sum_omega mu_n(sigma ∨ omega) = mu_{n-1}(sigma)`` for every
    ``sigma`` in Omega_{V_{n-1}}.

    Passes iff every difference has ``|diff|_p <= p**-tol_exponent`` or is
    zero at precision.  ``max_violation_exponent`` is the smallest valuation
    among differences that are visibly nonzero; ``precision_floor`` is the
    smallest absolute bound among those that vanish to all known digits.  ``exhaustive=True`` sums over omega explicitly
    instead of vertex by vertex; only practical for tiny trees.
    """
    if n < 2:
        raise ValueError("compatibility needs depth n >= 2")
    if tol_exponent is None:
        tol_exponent = params.K - 8
    rows = _extended_weights(n, h, params, cap)
    z_prev = PadicNumber.zero(params.p)
    z_next = PadicNumber.zero(params.p)
    for cls, own, ext in rows:
        z_prev = z_prev + cls.count * own
        z_next = z_next + cls.count * ext
    if exhaustive:
        z_next = partition_function_bruteforce(n, h, params, cap)
    for z, m in ((z_prev, n - 1), (z_next, n)):
        if z.is_zero:
            raise DegeneratePartitionFunction(f"Z_{m} is zero at precision")
    worst = math.inf
    floor = math.inf
    failures = []
    total = 0
    for cls, own, ext in rows:
        total += cls.count
        rhs = own / z_prev
        if exhaustive:
            sigma = Configuration(n - 1, params.q, cls.representative, params.k)
            lhs = PadicNumber.zero(params.p)
            for omega in enumerate_configurations(n, params.q, "W", params.k, cap):
                full = Configuration(n, params.q, sigma.spins + omega.spins, params.k)
                lhs = lhs + weight(full, h, params) / z_next
        else:
            lhs = ext / z_next
        diff = lhs - rhs
        if diff.is_zero:
            if not diff.is_exact_zero:
                floor = min(floor, diff.zero_bound)
            continue
        e = diff.valuation
        worst = min(worst, e)
        if e < tol_exponent and len(failures) < max_failures:
            failures.append(
                {"sigma": list(cls.representative), "lhs": lhs.to_json(), "rhs": rhs.to_json(), "exponent": e}
            )
    return CompatibilityReport(n, tol_exponent, worst, worst >= tol_exponent, total, failures, floor)


# -- the boundary-field recursion ---------------------------------------------------


def recursion_map_F(hat_h, params: ModelParams) -> tuple:
    """``F_i(x; theta) = ((theta-1) x_i + sum_j x_j + 1) / (sum_j x_j + theta)``."""
    if len(hat_h) != params.q:
        raise ValueError(f"expected {params.q} coordinates")
    s = params.number(0)
    for xj in hat_h:
        s = s + xj
    den = s + params.theta
    if den.is_zero:
        raise SingularRecursion("sum_j x_j + theta vanishes")
    return tuple(((params.theta - 1) * xi + s + 1) / den for xi in hat_h)


def recursion_product(children_hats, params: ModelParams) -> tuple:
    """``prod_{y in S(x)} F(hat h_y; theta)``, coordinatewise."""
    out = None
    for hy in children_hats:
        fy = recursion_map_F(hy, params)
        out = fy if out is None else tuple(a * b for a, b in zip(out, fy))
    return out


def recursion_residual(x: Vertex, h: BoundaryField, params: ModelParams) -> list:
    """``hat h_x - prod_{y in S(x)} F(hat h_y)`` per coordinate."""
    rhs = recursion_product([h.hat(y) for y in direct_successors(x, params.k)], params)
    return [a - b for a, b in zip(h.hat(x), rhs)]


def solves_recursion(x: Vertex, h: BoundaryField, params: ModelParams, digits: int | None = None) -> bool:
    digits = params.K - 8 if digits is None else digits
    rhs = recursion_product([h.hat(y) for y in direct_successors(x, params.k)], params)
    return all(a.agrees_with(b, digits) for a, b in zip(h.hat(x), rhs))


def random_recursion_solution(depth: int, params: ModelParams, rng, leaf_sampler, h0_sampler=None) -> BoundaryField:
    """Finite-depth solution of the recursion: random leaf vectors at
    ``depth``, every shallower vertex obtained from its children.  Each vertex
    gets an independent random ``h_0`` from ``h0_sampler`` (default 1)."""
    hats = {x: tuple(leaf_sampler(rng) for _ in range(params.q)) for x in level(params.k, depth)}
    for m in range(depth - 1, 0, -1):
        for x in level(params.k, m):
            hats[x] = recursion_product([hats[y] for y in direct_successors(x, params.k)], params)
    values = {}
    for x, hat in hats.items():
        h0 = h0_sampler(rng) if h0_sampler else params.number(1)
        values[x] = (h0,) + tuple(h0 * c for c in hat)
    return BoundaryField.per_vertex(params.q, values)


@dataclass
class PartitionRecursionReport:
    depth: int
    A: PadicNumber
    a: dict
    Z_n: PadicNumber
    Z_next: PadicNumber
    Z_next_bruteforce: PadicNumber | None
    holds: bool


def partition_recursion_check(
    n: int,
    h: BoundaryField,
    params: ModelParams,
    digits: int | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> PartitionRecursionReport:
    """Verify ``Z_{n+1} = A_{h,n} Z_n`` with ``A_{h,n} = prod_{x in W_n} a_h(x)``.

    ``a_h(x)`` is read off spin 0 and must reproduce the children product for
    every other spin.
    """
    digits = params.K - 8 if digits is None else digits
    a = {}
    for x in level(params.k, n):
        hx = h.at(x)
        ax = child_factor(x, 0, h, params) / hx[0]
        for i in range(1, params.q + 1):
            if not child_factor(x, i, h, params).agrees_with(ax * hx[i], digits):
                raise NotARecursionSolution(f"a_h({vertex_label(x)}) differs between spin 0 and spin {i}")
        a[x] = ax
    A = params.number(1)
    for ax in a.values():
        A = A * ax
    z_n = partition_function_bruteforce(n, h, params, cap)
    z_next = partition_function(n + 1, h, params, cap)
    try:
        z_brute = partition_function_bruteforce(n + 1, h, params, cap)
    except Exception:
        z_brute = None
    holds = z_next.agrees_with(A * z_n, digits)
    if z_brute is not None:
        holds = holds and z_brute.agrees_with(A * z_n, digits)
    return PartitionRecursionReport(n, A, a, z_n, z_next, z_brute, holds)


def all_configurations(n: int, q: int, k: int = 2):
    """Plain iterator over spin tuples of Omega_{V_n} (no cap)."""
    return itertools.product(range(q + 1), repeat=sum(k**m for m in range(1, n + 1)))
