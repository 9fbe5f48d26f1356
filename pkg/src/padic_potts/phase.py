"""Norms of the translation-invariant measures and phase diagnosis.

For the invariant-line field ``h = h0 * (1, x, 1, .., 1)`` built from a fixed
point ``x`` of ``f`` the partition function factorises exactly as

    Z_n = h0**2 (x + q)**2 * (h0 (x + A)**2) ** |V_{n-1}|,

so that, with every norm written as ``|.|_p = p**e``,

    e(mu(sigma)) = 2 v(x+q) + 2 |V_{n-1}| v(x+A) - v(x) #sigma - H(sigma),

where ``#sigma`` counts the leaves in state 1 and ``v`` is the valuation.
The value of ``h0`` cancels.  Suprema of the exponent over Omega_{V_n} are
found by a dynamic programme over tree levels; all bookkeeping is in
integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dynamics import fixed_points
from .errors import DegeneratePartitionFunction, MeasureUndefined
from .potts import BoundaryField, ModelParams, measure_values
from .tree import Configuration, leaf_one_count, matched_edges, tree_counts

MEASURES = (0, 1, 2)
BOUNDED, UNBOUNDED, UNKNOWN = "Bounded", "Unbounded", "Unknown"
STRONG, QUASI, NONE = "StrongTransition", "QuasiTransition", "NoTransition"


@dataclass(frozen=True)
class NormFormula:
    """``e = constant + per_volume * |V_{n-1}| + per_count * #sigma + per_energy * H``."""

    constant: int
    per_volume: int
    per_count: int
    per_energy: int = -1

    def exponent(self, n: int, count: int, energy: int) -> int:
        volume = tree_counts(2, n - 1).v if n > 1 else 0
        return self.constant + self.per_volume * volume + self.per_count * count + self.per_energy * energy

    def to_json(self) -> dict:
        return {
            "constant": self.constant,
            "per_volume": self.per_volume,
            "per_count": self.per_count,
            "per_energy": self.per_energy,
        }


def fixed_point_value(i: int, params: ModelParams, report=None):
    if i not in MEASURES:
        raise ValueError("measure index must be 0, 1 or 2")
    report = report or fixed_points(params)
    if i == 0:
        return report.x0
    if not report.exists:
        raise MeasureUndefined(f"x{i} does not exist for {params.to_json()}: {report.reason}")
    return report.value(f"x{i}")


def norm_formula(i: int, params: ModelParams, report=None) -> NormFormula:
    x = fixed_point_value(i, params, report)
    parts = (x + params.q, x + params.theta + (params.q - 1), x)
    if any(t.is_zero for t in parts):
        raise MeasureUndefined(f"a factor of the norm formula for mu_{i} vanishes at precision")
    v_xq, v_xa, v_x = (t.valuation for t in parts)
    return NormFormula(2 * v_xq, 2 * v_xa, -v_x)


def measure_norm_exponent(i: int, sigma: Configuration, params: ModelParams, h0_valuation: int = 0) -> int:
    """Exponent ``e`` with ``|mu_i(sigma)|_p = p**e``.

    ``h0_valuation`` is accepted for symmetry with field construction; the
    measure does not depend on a common factor of the boundary field.
    """
    del h0_valuation
    formula = norm_formula(i, params)
    energy = params.N * matched_edges(sigma.spins, sigma.k, sigma.depth)
    return formula.exponent(sigma.depth, leaf_one_count(sigma.spins, sigma.k, sigma.depth), energy)


# -- optimisation over configurations -------------------------------------------------


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _scale(c, a):
    return tuple(c * x for x in a)


def level_optimum(n: int, q: int, leaf_score, match_score, k: int = 2):
    """Maximise ``sum_leaves leaf_score(spin) + match_score * #matched edges``
    over Omega_{V_n}.  Scores are integer tuples compared lexicographically.

    Every subtree rooted at a given level is a copy of every other, so an
    optimum can be taken constant on each level; returns ``(value, level_spins)``.
    """
    zero = tuple(0 for _ in match_score)
    best = [tuple(leaf_score(s)) for s in range(q + 1)]
    choice = []
    for _ in range(n - 1, 0, -1):
        new, pick = [], []
        for s in range(q + 1):
            cand = [(_add(best[t], match_score if s == t else zero), t) for t in range(q + 1)]
            val, t = max(cand, key=lambda c: c[0])
            new.append(_scale(k, val))
            pick.append(t)
        best, choice = new, [pick] + choice
    top = max(range(q + 1), key=lambda s: best[s])
    spins = [top]
    for pick in choice:
        spins.append(pick[spins[-1]])
    return _scale(k, best[top]), spins


def sup_exponent(i: int, n: int, params: ModelParams, report=None):
    """``max_sigma e(mu_i(sigma))`` over Omega_{V_n}, with a maximising
    configuration given by its level spins."""
    f = norm_formula(i, params, report)
    value, spins = level_optimum(n, params.q, lambda s: (f.per_count * (s == 1),), (-params.N,), params.k)
    return f.exponent(n, 0, 0) + value[0], spins


def _growth_law(seq, stride):
    """Fit ``s_n = alpha 2**n + beta`` on the last three points of a subsequence."""
    tail = seq[-(2 * stride + 1)::stride]
    if len(tail) < 3:
        return None
    d1, d2 = tail[1] - tail[0], tail[2] - tail[1]
    if d2 != (2**stride) * d1:
        return None
    return d2


@dataclass
class BoundednessReport:
    measure: int
    status: str
    sup_exponents: list
    bound_exponent: int | None
    witness: list

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "status": self.status,
            "sup_exponents": self.sup_exponents,
            "bound_exponent": self.bound_exponent,
            "witness_levels": self.witness,
        }


def boundedness(i: int, params: ModelParams, n_max: int = 8, report=None) -> BoundednessReport:
    """Certify boundedness of ``mu_i`` from the exact per-depth suprema.

    The suprema obey ``s_n = alpha 2**n + beta`` once the optimal level
    pattern stabilises; when the last depths fit that law the sign of
    ``alpha`` decides, otherwise the status is Unknown.
    """
    sups, witness = [], []
    for n in range(1, n_max + 1):
        s, witness = sup_exponent(i, n, params, report)
        sups.append(s)
    growth = _growth_law(sups, 1)
    if growth is None:
        growth = _growth_law(sups, 2)
    if growth is None:
        status = UNKNOWN
    else:
        status = UNBOUNDED if growth > 0 else BOUNDED
    bound = max(sups) if status == BOUNDED else None
    return BoundednessReport(i, status, sups, bound, witness)


# -- witnesses ------------------------------------------------------------------------


def constant_configuration(n: int, q: int, spin: int = 1) -> Configuration:
    return Configuration.constant(n, q, spin)


def alternating_configuration(n: int, q: int, leaf_spin: int = 1, other: int = 0) -> Configuration:
    """Level-alternating configuration with ``leaf_spin`` on the leaves: no
    edge is matched, every leaf is counted."""
    spins = [leaf_spin if (n - m) % 2 == 0 else other for m in range(1, n + 1)]
    return Configuration.by_level(q, spins)


def transition_witness(bounded: int, unbounded: int, params: ModelParams, n: int, report=None):
    """Configuration on V_n pushing ``mu_unbounded / mu_bounded`` as far
    apart as possible, ties broken toward larger ``|mu_unbounded|``."""
    fb = norm_formula(bounded, params, report)
    fu = norm_formula(unbounded, params, report)
    _, spins = level_optimum(
        n,
        params.q,
        lambda s: ((fu.per_count - fb.per_count) * (s == 1), fu.per_count * (s == 1)),
        (0, -params.N),
        params.k,
    )
    return Configuration.by_level(params.q, spins)


def _descriptor(sigma: Configuration) -> str:
    levels = [sigma.spins[tree_counts(2, m - 1).v] for m in range(1, sigma.depth + 1)]
    if Configuration.by_level(sigma.q, levels).spins == sigma.spins:
        return "levels:" + ",".join(map(str, levels))
    return "spins:" + "".join(map(str, sigma.spins))


# -- diagnosis ------------------------------------------------------------------------


@dataclass
class PhaseReport:
    params: ModelParams
    regime: str
    verdict: str
    measures: dict
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "regime": "Ferro" if self.params.ferromagnetic else "Antiferro",
            "verdict": self.verdict,
            "per_measure": self.measures,
            "witnesses": self.witnesses,
            "notes": self.notes,
        }


def phase_diagnosis(params: ModelParams, n_max: int = 8) -> PhaseReport:
    """Classify the phase picture from the measures that actually exist.

    StrongTransition: a bounded and an unbounded measure with a common
    configuration sequence along which one norm tends to 0 and the other to
    infinity.  QuasiTransition: at least two distinct bounded measures.
    """
    report = fixed_points(params)
    values = {0: report.x0}
    if report.exists:
        values[1], values[2] = report.x1, report.x2
    distinct = {}
    for i, x in values.items():
        if not any(x == y for y in distinct.values()):
            distinct[i] = x
    measures, status = {}, {}
    for i in MEASURES:
        if i not in values:
            measures[f"mu{i}"] = {"exists": False, "bounded": None, "bound_exponent": None}
            continue
        b = boundedness(i, params, n_max, report)
        status[i] = b.status
        measures[f"mu{i}"] = {
            "exists": True,
            "distinct": i in distinct,
            "bounded": b.status,
            "bound_exponent": b.bound_exponent,
            "sup_exponents": b.sup_exponents,
        }
    notes = []
    if report.degenerate:
        notes.append("double root of the fixed-point quadratic")
    bounded = [i for i in distinct if status.get(i) == BOUNDED]
    unbounded = sorted((i for i in distinct if status.get(i) == UNBOUNDED), key=lambda i: (i == 0, i))
    witnesses = []
    for b in bounded:
        for u in unbounded:
            rows = []
            for n in range(2, n_max + 1):
                sigma = transition_witness(b, u, params, n, report)
                rows.append((n, sigma, measure_norm_exponent(b, sigma, params), measure_norm_exponent(u, sigma, params)))
            eb = [r[2] for r in rows]
            eu = [r[3] for r in rows]
            if all(x > y for x, y in zip(eb, eb[1:])) and all(x < y for x, y in zip(eu, eu[1:])):
                for n, sigma, xb, xu in rows:
                    witnesses.append({"n": n, "sigma_descriptor": _descriptor(sigma), "measure": f"mu{b}", "exponent": xb})
                    witnesses.append({"n": n, "sigma_descriptor": _descriptor(sigma), "measure": f"mu{u}", "exponent": xu})
                break
        if witnesses:
            break
    if witnesses:
        verdict = STRONG
    elif len(bounded) >= 2:
        verdict = QUASI
    else:
        verdict = NONE
    return PhaseReport(params, "Ferro" if params.ferromagnetic else "Antiferro", verdict, measures, witnesses, notes)


# -- cross-checks against exhaustive computation ----------------------------------------


@dataclass
class CrossCheckReport:
    measure: int
    depth: int
    configurations: int
    matched: int
    undecidable: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "depth": self.depth,
            "configurations": self.configurations,
            "matched": self.matched,
            "undecidable": self.undecidable,
            "mismatches": self.mismatches,
        }


def invariant_field(i: int, params: ModelParams, report=None) -> BoundaryField:
    return BoundaryField.invariant_line(fixed_point_value(i, params, report), params)


def brute_force_cross_check(i: int, n: int, params: ModelParams) -> CrossCheckReport:
    """Compare the closed-form exponent against ``|mu_i(sigma)|_p`` computed
    by exhaustive summation, for every sigma in Omega_{V_n}."""
    formula = norm_formula(i, params)
    h = invariant_field(i, params)
    try:
        rows = measure_values(n, h, params)
    except DegeneratePartitionFunction:
        return CrossCheckReport(i, n, 0, 0, 1, [])
    total = matched = undecidable = 0
    mismatches = []
    for cls, mu in rows:
        total += cls.count
        if mu.is_zero:
            undecidable += cls.count
            continue
        expected = formula.exponent(n, sum(s == 1 for s in cls.leaves), params.N * cls.matches)
        if -mu.valuation == expected:
            matched += cls.count
        else:
            mismatches.append({"sigma": list(cls.representative), "computed": -mu.valuation, "formula": expected})
    return CrossCheckReport(i, n, total, matched, undecidable, mismatches)


def exhaustive_exponents(n: int, params: ModelParams, measures=MEASURES, report=None):
    """Exponents of every existing measure on every configuration class of
    Omega_{V_n}: a list of ``(class, {i: e_i})``."""
    from .tree import configuration_classes

    formulas = {i: norm_formula(i, params, report) for i in measures}
    out = []
    for cls in configuration_classes(n, params.q, params.k):
        count = sum(s == 1 for s in cls.leaves)
        out.append((cls, {i: f.exponent(n, count, params.N * cls.matches) for i, f in formulas.items()}))
    return out


def comparison_violations(n: int, params: ModelParams):
    """Configurations of Omega_{V_n} breaking
    ``|mu1| <= p**(4 Nbar) |mu0|`` or ``|mu2| <= |q|_p**2 |mu0|``."""
    nbar = -params.N
    v_q = params.number(params.q).valuation
    bad = []
    for cls, e in exhaustive_exponents(n, params):
        if e[1] > 4 * nbar + e[0]:
            bad.append({"sigma": list(cls.representative), "relation": "mu1 vs mu0", "excess": e[1] - 4 * nbar - e[0]})
        if e[2] > e[0] - 2 * v_q:
            bad.append({"sigma": list(cls.representative), "relation": "mu2 vs mu0", "excess": e[2] - e[0] + 2 * v_q})
    return bad


def difference_bound_violations(n: int, params: ModelParams):
    """For ``|q|_p = 1``: configurations breaking
    ``|mu0 - mu_i| <= |1 - x_i| p**-H`` (i = 1, 2) or
    ``|mu1 - mu2| <= |x1 - x2| p**-H``, checked on exact measure values."""
    report = fixed_points(params)
    xs = {i: fixed_point_value(i, params, report) for i in MEASURES}
    tables = {}
    for i in MEASURES:
        tables[i] = {c.representative: (c, mu) for c, mu in measure_values(n, invariant_field(i, params, report), params)}
    bad = []
    pairs = [(0, 1), (0, 2), (1, 2)]
    for rep, (cls, mu0) in tables[0].items():
        mus = {0: mu0, 1: tables[1][rep][1], 2: tables[2][rep][1]}
        energy = params.N * cls.matches
        for a, b in pairs:
            diff = mus[a] - mus[b]
            gap = xs[a] - xs[b]
            if diff.is_zero:
                continue
            bound = -energy + (-gap.valuation if not gap.is_zero else -math.inf)
            if -diff.valuation > bound:
                bad.append({"sigma": list(rep), "pair": [a, b], "exponent": -diff.valuation, "bound": bound})
    return bad
