"""The A-infinity morphism F_n = sum_m sum_{Gamma in G_{n,m}} W_Gamma U_Gamma and its check.

Weights that are only known statistically are kept symbolic: an operator
is stored as a map from a sorted tuple of Monte Carlo graph keys (a
monomial in the unknown weights) to an exact operator.  Exact weights are
multiplied in directly, so with all-exact weights the only key is ().
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Callable, Mapping, Sequence

from .algebra import ZERO, Polynomial, PolyDiffOp, Polyvector, multi_index
from .graphs import graphs_with_profile, u_gamma
from .hochschild import cup, hochschild_d
from .weights import WeightConfig, WeightResult, weight

log = logging.getLogger(__name__)


class WeightedOp:
    """Polydifferential operator with coefficients polynomial in MC weights."""

    __slots__ = ("arity", "parts")

    def __init__(self, arity: int, parts: Mapping[tuple, PolyDiffOp] | None = None):
        self.arity = arity
        self.parts = {k: v for k, v in (parts or {}).items() if not v.is_zero()}

    @classmethod
    def exact(cls, op: PolyDiffOp) -> "WeightedOp":
        return cls(op.arity, {(): op})

    def is_exact(self) -> bool:
        return all(k == () for k in self.parts)

    def exact_part(self) -> PolyDiffOp:
        return self.parts.get((), PolyDiffOp.zero(self.arity))

    def __add__(self, other: "WeightedOp") -> "WeightedOp":
        if not other.parts:
            return self
        if not self.parts:
            return other
        if self.arity != other.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")
        parts = dict(self.parts)
        for k, v in other.parts.items():
            parts[k] = parts[k] + v if k in parts else v
        return WeightedOp(self.arity, parts)

    def scale(self, r) -> "WeightedOp":
        return WeightedOp(self.arity, {k: v.scale(r) for k, v in self.parts.items()})

    def cup(self, other: "WeightedOp") -> "WeightedOp":
        out: dict[tuple, PolyDiffOp] = {}
        for ka, a in self.parts.items():
            for kb, b in other.parts.items():
                key = tuple(sorted(ka + kb))
                c = cup(a, b)
                out[key] = out[key] + c if key in out else c
        return WeightedOp(self.arity + other.arity, out)

    def d(self) -> "WeightedOp":
        return WeightedOp(self.arity + 1, {k: hochschild_d(v) for k, v in self.parts.items()})

    def evaluate(self, args: Sequence[Polynomial]) -> dict[tuple, Polynomial]:
        out = {}
        for k, v in self.parts.items():
            val = v.evaluate(args)
            if val:
                out[k] = val
        return out


@dataclass
class FComponent:
    """F_n(gammas) together with the weights that produced it."""

    op: WeightedOp
    weights: dict[str, WeightResult] = field(default_factory=dict)

    @property
    def arity(self) -> int:
        return self.op.arity

    def is_exact(self) -> bool:
        return self.op.is_exact()

    def exact(self) -> PolyDiffOp:
        if not self.is_exact():
            raise ValueError("F_n uses Monte Carlo weights; no exact operator available")
        return self.op.exact_part()


def target_arity(gammas: Sequence[Polyvector]) -> int:
    return sum(g.degree for g in gammas) - len(gammas) + 1


def f_component(gammas: Sequence[Polyvector], cfg: WeightConfig = WeightConfig()) -> FComponent:
    """F_n(gamma_1, ..., gamma_n) as a sum over graphs of matching star profile."""
    n = len(gammas)
    if n < 1:
        raise ValueError("F_n needs n >= 1")
    m = target_arity(gammas)
    if m < 0:
        return FComponent(WeightedOp(0))
    degrees = [g.degree for g in gammas]
    total = WeightedOp(m)
    table: dict[str, WeightResult] = {}
    if any(g.is_zero() for g in gammas):
        return FComponent(total)
    for graph in graphs_with_profile(n, m, degrees):
        w = weight(graph, cfg)
        table[graph.key()] = w
        if w.mode == "zero":
            continue
        u = u_gamma(graph, gammas)
        if w.is_exact:
            total = total + WeightedOp.exact(u.scale(w.value))
        else:
            total = total + WeightedOp(m, {(graph.key(),): u})
    return FComponent(total, table)


@dataclass(frozen=True)
class SignConvention:
    """Signs for the relation

        d F_n + sum_{k+l=n} cup_sign(k, degs) F_k u F_l
              - sum_i wedge_sign(i, degs) F_{n-1}(.., g_i ^ g_{i+1}, ..) = 0

    ``k`` is the length of the left block and ``i`` the 1-based position of the
    first wedged factor.  Both callables return +1 or -1.
    """

    name: str
    cup_sign: Callable[[int, tuple], int]
    wedge_sign: Callable[[int, tuple], int]


def _cup_rule(k: int, degs: tuple) -> int:
    # Koszul sign of moving F_l (degree 1 - l) past the shifted degrees of the left block
    l = len(degs) - k
    shifted = sum(d - 1 for d in degs[:k])
    return -1 if (l - 1) * shifted % 2 else 1


def _wedge_rule(i: int, degs: tuple) -> int:
    return -1 if (len(degs) - i - 1) % 2 else 1


DEFAULT_SIGNS = SignConvention("koszul-shifted", _cup_rule, _wedge_rule)


def flip_cup(sc: SignConvention) -> SignConvention:
    """Negative control: same convention with every cup-term sign reversed."""
    return SignConvention(f"{sc.name}+flipped-cup", lambda k, d: -sc.cup_sign(k, d), sc.wedge_sign)


@dataclass
class Residual:
    """Evaluated left-hand side of the A-infinity relation."""

    parts: dict  # weight-monomial key -> exact Polynomial
    weights: dict  # graph key -> WeightResult

    def is_exact(self) -> bool:
        return all(k == () for k in self.parts)

    def exact(self) -> Polynomial:
        if not self.is_exact():
            raise ValueError("residual depends on Monte Carlo weights")
        return self.parts.get((), ZERO)

    def estimate(self) -> dict:
        """Per-monomial (mean, stderr), propagating weight errors to first order."""
        monos = set()
        for p in self.parts.values():
            monos.update(m for m, _ in p.items())
        out = {}
        for mono in monos:
            mean = 0.0
            grads: dict[str, float] = {}
            for key, p in self.parts.items():
                c = float(p.coefficient(mono))
                if not c:
                    continue
                vals = [self.weights[g].mean for g in key]
                prod = 1.0
                for v in vals:
                    prod *= v
                mean += c * prod
                for pos, g in enumerate(key):
                    rest = 1.0
                    for q, v in enumerate(vals):
                        if q != pos:
                            rest *= v
                    grads[g] = grads.get(g, 0.0) + c * rest
            var = sum((self.weights[g].stderr * gr) ** 2 for g, gr in grads.items())
            out[mono] = (mean, sqrt(var))
        return out


def eq2_terms(
    gammas: Sequence[Polyvector],
    sc: SignConvention = DEFAULT_SIGNS,
    cfg: WeightConfig = WeightConfig(),
) -> tuple[WeightedOp, dict[str, WeightResult]]:
    """The left-hand side of the relation as an operator of arity sum(deg) - n + 2."""
    n = len(gammas)
    degs = tuple(g.degree for g in gammas)
    arity = target_arity(gammas) + 1
    table: dict[str, WeightResult] = {}

    def F(gs):
        comp = f_component(gs, cfg)
        table.update(comp.weights)
        return comp.op

    total = WeightedOp(arity)
    top = F(gammas)
    if top.arity + 1 == arity:
        total = total + top.d()
    for k in range(1, n):
        left, right = F(gammas[:k]), F(gammas[k:])
        if left.arity + right.arity != arity:
            continue
        total = total + left.cup(right).scale(sc.cup_sign(k, degs))
    for i in range(1, n):
        merged = list(gammas[: i - 1]) + [gammas[i - 1].wedge(gammas[i])] + list(gammas[i + 1:])
        term = F(merged)
        if term.arity != arity:
            continue
        total = total + term.scale(-sc.wedge_sign(i, degs))
    return total, table


def eq2_residual(
    gammas: Sequence[Polyvector],
    fs: Sequence[Polynomial],
    sc: SignConvention = DEFAULT_SIGNS,
    cfg: WeightConfig = WeightConfig(),
):
    """Evaluate the relation on arguments ``fs``.

    Returns an exact Polynomial when every weight involved is exact,
    otherwise a :class:`Residual` carrying the weight provenance.
    """
    arity = target_arity(gammas) + 1
    if len(fs) != arity:
        raise ValueError(f"relation for these degrees takes {arity} arguments, got {len(fs)}")
    op, table = eq2_terms(gammas, sc, cfg)
    res = Residual(op.evaluate(fs), table)
    return res.exact() if op.is_exact() else res


def random_polynomial(
    rng: random.Random, var_count: int, max_degree: int = 3, max_terms: int = 3, min_degree: int = 0
) -> Polynomial:
    """Small random polynomial: coefficients in {-3..3}/{1,2,3}, degree <= max_degree."""
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        deg = rng.randint(min_degree, max_degree)
        mono = multi_index((rng.randint(1, var_count), 1) for _ in range(deg))
        terms[mono] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return Polynomial(terms)


def random_polyvector(rng: random.Random, degree: int, var_count: int, max_degree: int = 3) -> Polyvector:
    from itertools import combinations

    comps = {}
    keys = list(combinations(range(1, var_count + 1), degree))
    for key in rng.sample(keys, k=rng.randint(1, len(keys))) if keys else []:
        comps[key] = random_polynomial(rng, var_count, max_degree)
    return Polyvector(degree, comps)


def verify_report(
    n: int,
    degrees: Sequence[int],
    var_count: int = 3,
    trials: int = 10,
    sc: SignConvention = DEFAULT_SIGNS,
    cfg: WeightConfig = WeightConfig(),
    tolerance: float = 5.0,
    seed: int = 0,
    max_degree: int = 3,
) -> dict:
    """Check the relation on ``trials`` seeded random instances.

    All-exact residuals must vanish identically.  Otherwise every residual
    coefficient must satisfy |mean| <= tolerance * propagated stderr.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    degrees = tuple(degrees)
    if len(degrees) != n:
        raise ValueError(f"degree profile {degrees} does not have length {n}")
    rng = random.Random(seed)
    arity = sum(degrees) - n + 2
    passed = True
    max_residual = 0.0
    max_z = 0.0
    modes = set()
    table: dict[str, WeightResult] = {}
    failures = []
    for t in range(trials):
        gammas = [random_polyvector(rng, k, var_count, max_degree) for k in degrees]
        # constant arguments are killed by every derivative; keep them out
        fs = [random_polynomial(rng, var_count, max_degree, min_degree=1) for _ in range(max(arity, 0))]
        if arity < 0:
            modes.add("exact")
            continue
        res = eq2_residual(gammas, fs, sc, cfg)
        if isinstance(res, Polynomial):
            modes.add("exact")
            worst = max((abs(float(c)) for _, c in res.items()), default=0.0)
            ok = res.is_zero()
        else:
            modes.add("mc")
            table.update(res.weights)
            est = res.estimate()
            worst, ok = 0.0, True
            for mean, se in est.values():
                worst = max(worst, abs(mean))
                if se > 0:
                    max_z = max(max_z, abs(mean) / se)
                if abs(mean) > tolerance * se + 1e-9:
                    ok = False
        max_residual = max(max_residual, worst)
        if not ok:
            passed = False
            failures.append({"trial": t, "max_residual": worst})
            log.info("trial %d failed: max residual %g", t, worst)
    for comp_degrees in _subprofiles(degrees):
        m = sum(comp_degrees) - len(comp_degrees) + 1
        if m < 0:
            continue
        for g in graphs_with_profile(len(comp_degrees), m, comp_degrees):
            table.setdefault(g.key(), weight(g, cfg))
    return {
        "params": {
            "n": n,
            "degrees": list(degrees),
            "var_count": var_count,
            "seed": seed,
            "tolerance": tolerance,
            "signs": sc.name,
            "weights": cfg.to_json(),
        },
        "trials": trials,
        "mode": "mc" if "mc" in modes else "exact",
        "max_residual": max_residual,
        "max_z": max_z,
        "failures": failures,
        "per_graph": [{"graph": k, "weight": w.to_json(), "mode": w.mode} for k, w in sorted(table.items())],
        "pass": passed,
    }


def _subprofiles(degrees: tuple) -> list[tuple]:
    """Every degree profile at which some F_k is evaluated by the relation."""
    n = len(degrees)
    out = {degrees}
    for k in range(1, n):
        out.add(degrees[:k])
        out.add(degrees[k:])
    for i in range(n - 1):
        out.add(degrees[:i] + (degrees[i] + degrees[i + 1],) + degrees[i + 2:])
    return sorted(out)
